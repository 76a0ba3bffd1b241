use std::fmt;
use std::sync::Arc;

use super::domain::Domain;
use super::grid::Grid;
use super::point::ComplexPoint;
use crate::error::{Error, Result};

pub type Evaluator = Arc<dyn Fn(&ComplexPoint) -> Result<f64> + Send + Sync>;

/// A real-valued function on a complex domain.
///
/// Evaluation is deterministic and refuses points outside `valid_on`.
/// `smooth_on`, when present, is the region where the field is claimed to be
/// infinitely differentiable.
#[derive(Clone)]
pub struct ScalarField {
    label: Arc<str>,
    eval: Evaluator,
    valid_on: Domain,
    smooth_on: Option<Domain>,
    interpolation_error: Option<f64>,
    sup_distance: Option<f64>,
}

impl ScalarField {
    pub fn new<F>(label: impl Into<String>, valid_on: Domain, f: F) -> Self
    where
        F: Fn(&ComplexPoint) -> f64 + Send + Sync + 'static,
    {
        Self::try_new(label, valid_on, move |p| Ok(f(p)))
    }

    pub fn try_new<F>(label: impl Into<String>, valid_on: Domain, f: F) -> Self
    where
        F: Fn(&ComplexPoint) -> Result<f64> + Send + Sync + 'static,
    {
        let label: String = label.into();
        Self {
            label: label.into(),
            eval: Arc::new(f),
            valid_on,
            smooth_on: None,
            interpolation_error: None,
            sup_distance: None,
        }
    }

    pub fn constant(value: f64, valid_on: Domain) -> Self {
        Self::new(format!("{value}"), valid_on, move |_| value)
    }

    pub fn with_smooth_on(mut self, smooth_on: Domain) -> Self {
        self.smooth_on = Some(smooth_on);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        let label: String = label.into();
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn valid_on(&self) -> &Domain {
        &self.valid_on
    }

    pub fn smooth_on(&self) -> Option<&Domain> {
        self.smooth_on.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.valid_on.dim()
    }

    /// Recorded bound on interpolation error for grid-sampled fields.
    pub fn interpolation_error(&self) -> Option<f64> {
        self.interpolation_error
    }

    /// Sampled estimate of the sup-distance to the field this one approximates.
    pub fn sup_distance(&self) -> Option<f64> {
        self.sup_distance
    }

    pub fn with_sup_distance(mut self, tau: Option<f64>) -> Self {
        self.sup_distance = tau;
        self
    }

    pub fn eval(&self, p: &ComplexPoint) -> Result<f64> {
        self.valid_on.check_dim(p)?;
        if !(self.valid_on.margin(p) > 0.0) {
            return Err(Error::OutOfDomain {
                field: self.label.to_string(),
                point: p.to_reals(),
            });
        }
        (self.eval)(p)
    }

    /// Same evaluator on a smaller domain.
    pub fn restrict(&self, domain: Domain) -> ScalarField {
        let smooth_on = self
            .smooth_on
            .clone()
            .map(|s| s.intersect(domain.clone()));
        ScalarField {
            label: self.label.clone(),
            eval: self.eval.clone(),
            valid_on: self.valid_on.clone().intersect(domain),
            smooth_on,
            interpolation_error: self.interpolation_error,
            sup_distance: self.sup_distance,
        }
    }

    /// `a·self + b·other` on the intersection of domains.
    pub fn linear_combination(&self, a: f64, other: &ScalarField, b: f64) -> ScalarField {
        let (f, g) = (self.clone(), other.clone());
        let valid = self.valid_on.clone().intersect(other.valid_on.clone());
        let smooth = match (&self.smooth_on, &other.smooth_on) {
            (Some(s), Some(t)) => Some(s.clone().intersect(t.clone())),
            _ => None,
        };
        let mut out = ScalarField::try_new(
            format!("{a}*{} + {b}*{}", self.label, other.label),
            valid,
            move |p| Ok(a * f.eval(p)? + b * g.eval(p)?),
        );
        out.smooth_on = smooth;
        out
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.linear_combination(1.0, other, -1.0)
    }

    /// `self ∘ map`, defined where `map` lands inside `self.valid_on`.
    pub fn compose<M>(&self, label: impl Into<String>, domain: Domain, map: M) -> ScalarField
    where
        M: Fn(&ComplexPoint) -> Option<ComplexPoint> + Send + Sync + 'static,
    {
        let f = self.clone();
        let label: String = label.into();
        let name = label.clone();
        ScalarField::try_new(label, domain, move |p| {
            let q = map(p).ok_or_else(|| Error::OutOfDomain {
                field: name.clone(),
                point: p.to_reals(),
            })?;
            f.eval(&q)
        })
    }

    /// Samples `self` on `grid` and interpolates multilinearly in the 2n real
    /// coordinates. The recorded error bound is `h²/8 · Σ_k max |second difference along k|`.
    pub fn sampled(&self, grid: &Grid) -> Result<ScalarField> {
        SampledField::build(self, grid).map(SampledField::into_field)
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("valid_on", &self.valid_on)
            .field("smooth_on", &self.smooth_on)
            .finish()
    }
}

/// Lattice samples of a field over a full box.
struct SampledField {
    label: String,
    origin: Vec<f64>,
    spacing: f64,
    counts: Vec<usize>,
    values: Vec<f64>,
    error_bound: f64,
    domain: Domain,
}

impl SampledField {
    fn build(field: &ScalarField, grid: &Grid) -> Result<Self> {
        let bbox = grid
            .domain()
            .bounding_box()
            .ok_or_else(|| Error::Unbounded(grid.domain().describe()))?;
        let h = grid.spacing();
        let dims = bbox.center.len();
        let counts: Vec<usize> = bbox
            .half_widths
            .iter()
            .map(|w| 2 * (w / h + 1e-9).floor() as usize + 1)
            .collect();
        let origin: Vec<f64> = (0..dims)
            .map(|k| bbox.center[k] - h * ((counts[k] - 1) / 2) as f64)
            .collect();
        let total: usize = counts.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut reals = vec![0.0; dims];
        for flat in 0..total {
            let mut rem = flat;
            for k in (0..dims).rev() {
                reals[k] = origin[k] + h * (rem % counts[k]) as f64;
                rem /= counts[k];
            }
            let p = ComplexPoint::from_reals(&reals)?;
            values.push(field.eval(&p)?);
        }
        let mut sampled = SampledField {
            label: format!("sampled({})", field.label()),
            origin,
            spacing: h,
            counts,
            values,
            error_bound: 0.0,
            domain: grid.domain().clone(),
        };
        sampled.error_bound = sampled.second_difference_bound() * h * h / 8.0;
        Ok(sampled)
    }

    fn index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).fold(0, |acc, (i, c)| acc * c + i)
    }

    /// Sum over axes of the largest second difference along that axis.
    fn second_difference_bound(&self) -> f64 {
        let dims = self.counts.len();
        let h2 = self.spacing * self.spacing;
        let mut worst = vec![0.0f64; dims];
        let total = self.values.len();
        let mut idx = vec![0usize; dims];
        for flat in 0..total {
            let mut rem = flat;
            for k in (0..dims).rev() {
                idx[k] = rem % self.counts[k];
                rem /= self.counts[k];
            }
            for k in 0..dims {
                if idx[k] == 0 || idx[k] + 1 >= self.counts[k] {
                    continue;
                }
                let mid = self.values[flat];
                idx[k] -= 1;
                let lo = self.values[self.index(&idx)];
                idx[k] += 2;
                let hi = self.values[self.index(&idx)];
                idx[k] -= 1;
                worst[k] = worst[k].max(((hi - 2.0 * mid + lo) / h2).abs());
            }
        }
        worst.iter().sum()
    }

    fn interpolate(&self, p: &ComplexPoint) -> Result<f64> {
        let reals = p.to_reals();
        let dims = self.counts.len();
        let mut base = vec![0usize; dims];
        let mut frac = vec![0.0; dims];
        for k in 0..dims {
            let t = (reals[k] - self.origin[k]) / self.spacing;
            let max = (self.counts[k] - 1) as f64;
            if !(0.0..=max).contains(&t) {
                return Err(Error::OutOfDomain {
                    field: self.label.clone(),
                    point: reals,
                });
            }
            let i = (t.floor() as usize).min(self.counts[k].saturating_sub(2));
            base[k] = i;
            frac[k] = t - i as f64;
        }
        let mut acc = 0.0;
        let mut corner = vec![0usize; dims];
        for mask in 0..(1usize << dims) {
            let mut w = 1.0;
            for k in 0..dims {
                let bit = (mask >> k) & 1;
                corner[k] = (base[k] + bit).min(self.counts[k] - 1);
                w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
            }
            if w != 0.0 {
                acc += w * self.values[self.index(&corner)];
            }
        }
        Ok(acc)
    }

    fn into_field(self) -> ScalarField {
        let label = self.label.clone();
        let domain = self.domain.clone();
        let bound = self.error_bound;
        let mut field = ScalarField::try_new(label, domain, move |p| self.interpolate(p));
        field.interpolation_error = Some(bound);
        field
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::geometry::grid::sample_grid;

    #[test]
    fn evaluation_outside_domain_is_an_error() {
        let f = ScalarField::new("|w|^2", Domain::centered_disk(1.0), |p| p.coord(0).norm_sqr());
        assert_eq!(f.eval(&ComplexPoint::one(Complex64::new(0.5, 0.0))).unwrap(), 0.25);
        assert!(matches!(
            f.eval(&ComplexPoint::one(Complex64::new(1.5, 0.0))),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            f.eval(&ComplexPoint::origin(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sampled_field_reproduces_bilinear_functions() {
        let f = ScalarField::new("xy", Domain::centered_disk(2.0), |p| {
            let z = p.coord(0);
            1.0 + 2.0 * z.re - z.im + 0.5 * z.re * z.im
        });
        let grid = sample_grid(&Domain::centered_disk(1.0), 0.25).unwrap();
        let s = f.sampled(&grid).unwrap();
        let p = ComplexPoint::one(Complex64::new(0.13, -0.31));
        assert!((s.eval(&p).unwrap() - f.eval(&p).unwrap()).abs() < 1e-12);
        assert!(s.interpolation_error().unwrap() < 1e-12);
    }

    #[test]
    fn sampled_field_error_bound_holds_for_quadratic() {
        let f = ScalarField::new("|w|^2", Domain::centered_disk(2.0), |p| p.coord(0).norm_sqr());
        let grid = sample_grid(&Domain::centered_disk(1.0), 0.1).unwrap();
        let s = f.sampled(&grid).unwrap();
        let bound = s.interpolation_error().unwrap();
        for k in 0..50 {
            let t = k as f64 / 50.0;
            let p = ComplexPoint::one(Complex64::new(0.6 * t - 0.3, 0.37 * (1.0 - t)));
            assert!((s.eval(&p).unwrap() - f.eval(&p).unwrap()).abs() <= bound + 1e-12);
        }
    }
}
