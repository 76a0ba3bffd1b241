use std::sync::Arc;

use super::kernel::bump;
use crate::error::{Error, Result};
use crate::geometry::{halton, ComplexPoint, GaussLegendre, ScalarField};

/// Tensor Gauss-Legendre discretization of the radial bump on the unit ball
/// of R^{2n}, with weights normalized to sum to one.
///
/// The nodes are turned by a fixed generic rotation so their projections onto
/// rational directions do not pile up.
#[derive(Clone, Debug)]
pub struct MollifierRule {
    dim: usize,
    order: usize,
    offsets: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl MollifierRule {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if dim == 0 || order == 0 {
            return Err(Error::InvalidParameter(format!(
                "mollifier rule needs positive dimension and order, got {dim} and {order}"
            )));
        }
        let gl = GaussLegendre::new(order);
        let reals = 2 * dim;
        let total = order.pow(reals as u32);
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        let mut idx = vec![0usize; reals];
        for _ in 0..total {
            let t: Vec<f64> = idx.iter().map(|&i| gl.nodes[i]).collect();
            let r2: f64 = t.iter().map(|x| x * x).sum();
            let w: f64 = idx.iter().map(|&i| gl.weights[i]).product::<f64>() * bump(r2.sqrt());
            if w > 0.0 {
                offsets.push(t);
                weights.push(w);
            }
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < order {
                    break;
                }
                *slot = 0;
            }
        }
        let sum: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= sum);
        let q = generic_rotation(reals);
        let offsets = offsets
            .into_iter()
            .map(|t| (&q * nalgebra::DVector::from_vec(t)).iter().copied().collect())
            .collect();
        Ok(Self {
            dim,
            order,
            offsets,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Quadrature nodes in the unit ball.
    pub fn offsets(&self) -> impl Iterator<Item = &[f64]> {
        self.offsets.iter().map(Vec::as_slice)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i |t_i|²`, the discrete second moment on the unit ball.
    pub fn second_moment(&self) -> f64 {
        self.offsets
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * t.iter().map(|x| x * x).sum::<f64>())
            .sum()
    }

    pub fn apply(&self, f: &ScalarField, p: &ComplexPoint, eps: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (t, w) in self.offsets.iter().zip(&self.weights) {
            acc += w * f.eval(&p.offset_by(t, eps))?;
        }
        Ok(acc)
    }
}

/// Orthogonal factor of a Halton-filled matrix.
fn generic_rotation(n: usize) -> nalgebra::DMatrix<f64> {
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| halton((i * n + j) as u64 + 1, 1, 7)[0] - 0.5 + if i == j { 1.0 } else { 0.0 });
    a.qr().q()
}

/// Convolution of `f` with the bump of radius `eps`, by tensor quadrature.
///
/// The result lives on `f.valid_on` shrunk by `eps` and is flagged smooth
/// there. A sampled estimate of `sup |f_eps - f|` is attached when the domain
/// is bounded.
pub fn mollify(f: &ScalarField, eps: f64, quad_order: usize) -> Result<ScalarField> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("mollification radius must be positive, got {eps}")));
    }
    let rule = Arc::new(MollifierRule::new(f.dim(), quad_order)?);
    let domain = f.valid_on().clone().shrink(eps);
    if let Some(bbox) = f.valid_on().bounding_box() {
        if bbox.half_widths.iter().any(|w| *w <= eps) {
            return Err(Error::DomainTooSmall {
                domain: f.valid_on().describe(),
                what: format!("mollification radius {eps}"),
            });
        }
    }
    let g = f.clone();
    let r = rule.clone();
    let out = ScalarField::try_new(format!("moll({}, {eps})", f.label()), domain.clone(), move |p| {
        r.apply(&g, p, eps)
    })
    .with_smooth_on(domain.clone());
    let tau = estimate_sup_distance(f, &out, &domain, 32)?;
    Ok(out.with_sup_distance(tau))
}

fn estimate_sup_distance(
    f: &ScalarField,
    g: &ScalarField,
    domain: &crate::geometry::Domain,
    samples: usize,
) -> Result<Option<f64>> {
    let Some(bbox) = domain.bounding_box() else {
        return Ok(None);
    };
    let dims = bbox.center.len();
    let mut worst: Option<f64> = None;
    let mut taken = 0;
    for i in 0..(samples as u64 * 16) {
        if taken == samples {
            break;
        }
        let u = halton(i, dims, 1);
        let reals: Vec<f64> = (0..dims)
            .map(|k| bbox.center[k] + bbox.half_widths[k] * (2.0 * u[k] - 1.0))
            .collect();
        let p = ComplexPoint::from_reals(&reals)?;
        if !domain.contains(&p) {
            continue;
        }
        let d = match g.eval(&p) {
            Ok(v) => (v - f.eval(&p)?).abs(),
            Err(Error::OutOfDomain { .. }) => continue,
            Err(e) => return Err(e),
        };
        taken += 1;
        worst = Some(worst.map_or(d, |w: f64| w.max(d)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::geometry::Domain;

    fn at(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::one(Complex64::new(re, im))
    }

    #[test]
    fn constants_and_harmonic_functions_are_preserved() {
        let d = Domain::centered_disk(2.0);
        let c = mollify(&ScalarField::constant(3.5, d.clone()), 0.1, 8).unwrap();
        assert!((c.eval(&at(0.2, -0.4)).unwrap() - 3.5).abs() < 1e-10);
        let re = mollify(&ScalarField::new("Re w", d, |p| p.coord(0).re), 0.1, 8).unwrap();
        assert!((re.eval(&at(0.7, 0.1)).unwrap() - 0.7).abs() < 1e-8);
    }

    #[test]
    fn modulus_squared_shifts_by_second_moment() {
        let d = Domain::centered_disk(2.0);
        let eps = 0.1;
        let rule = MollifierRule::new(1, 8).unwrap();
        let m = mollify(&ScalarField::new("|w|^2", d, |p| p.coord(0).norm_sqr()), eps, 8).unwrap();
        let shift = eps * eps * rule.second_moment();
        assert!(shift > 0.0);
        for (x, y) in [(0.0, 0.0), (0.5, -0.3), (-1.2, 0.4)] {
            let v = m.eval(&at(x, y)).unwrap();
            assert!((v - (x * x + y * y) - shift).abs() < 1e-12);
        }
        assert!((m.sup_distance().unwrap() - shift).abs() < 1e-12);
    }

    #[test]
    fn domain_shrinks_and_oversized_radius_is_rejected() {
        let d = Domain::centered_disk(1.0);
        let m = mollify(&ScalarField::constant(1.0, d.clone()), 0.2, 4).unwrap();
        assert!(m.eval(&at(0.85, 0.0)).is_err());
        assert!(m.eval(&at(0.75, 0.0)).is_ok());
        assert!(matches!(
            mollify(&ScalarField::constant(1.0, d), 1.5, 4),
            Err(Error::DomainTooSmall { .. })
        ));
    }

    #[test]
    fn rule_weights_are_positive_and_normalized() {
        let rule = MollifierRule::new(2, 4).unwrap();
        assert!(rule.len() < 256 && !rule.is_empty());
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(rule.weights.iter().all(|w| *w > 0.0));
    }
}
