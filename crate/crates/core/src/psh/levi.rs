use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::operators::remap_stencil;
use crate::geometry::{ComplexPoint, Grid, ScalarField};

/// Finite-difference complex Hessian `∂²u/∂z_j∂z̄_k` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviMatrix {
    pub entries: DMatrix<Complex64>,
    pub location: ComplexPoint,
    pub spacing: f64,
}

impl LeviMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.entries)[0]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn levi_form(f: &ScalarField, p: &ComplexPoint, h: f64) -> Result<LeviMatrix> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("stencil spacing must be positive, got {h}")));
    }
    f.valid_on().check_dim(p)?;
    let n = p.dim();
    let at = |q: &ComplexPoint| f.eval(q).map_err(|e| remap_stencil(e, f, p));
    let center = at(p)?;
    let h2 = h * h;

    let mut second = vec![0.0; 2 * n];
    for (k, slot) in second.iter_mut().enumerate() {
        *slot = (at(&p.shifted(k, h))? - 2.0 * center + at(&p.shifted(k, -h))?) / h2;
    }
    let mixed = |k: usize, l: usize| -> Result<f64> {
        let pp = at(&p.shifted2(k, h, l, h))?;
        let pm = at(&p.shifted2(k, h, l, -h))?;
        let mp = at(&p.shifted2(k, -h, l, h))?;
        let mm = at(&p.shifted2(k, -h, l, -h))?;
        Ok((pp - pm - mp + mm) / (4.0 * h2))
    };

    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        entries[(j, j)] = Complex64::new(0.25 * (second[2 * j] + second[2 * j + 1]), 0.0);
        for k in j + 1..n {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            let re = mixed(xj, xk)? + mixed(yj, yk)?;
            let im = mixed(xj, yk)? - mixed(yj, xk)?;
            let z = Complex64::new(0.25 * re, 0.25 * im);
            entries[(j, k)] = z;
            entries[(k, j)] = z.conj();
        }
    }
    Ok(LeviMatrix {
        entries,
        location: p.clone(),
        spacing: h,
    })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
            let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
            let mean = 0.5 * (a + d);
            let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean - radius, mean + radius]
        }
        _ => {
            let mut real = DMatrix::zeros(2 * n, 2 * n);
            for j in 0..n {
                for k in 0..n {
                    let z = 0.5 * (m[(j, k)] + m[(k, j)].conj());
                    real[(j, k)] = z.re;
                    real[(j + n, k + n)] = z.re;
                    real[(j + n, k)] = z.im;
                    real[(j, k + n)] = -z.im;
                }
            }
            let doubled = jacobi_eigenvalues(real, 1e-12);
            doubled.into_iter().step_by(2).collect()
        }
    }
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below
/// `tol` relative to the matrix norm. Returns sorted eigenvalues.
pub fn jacobi_eigenvalues(mut a: DMatrix<f64>, tol: f64) -> Vec<f64> {
    let n = a.nrows();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Largest `λ` with `B v = λ A v` for Hermitian `A > 0`, i.e. the top
/// eigenvalue of `A^{-1/2} B A^{-1/2}`. `None` if `A` is not positive definite.
pub fn generalized_max_eigenvalue(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Option<f64> {
    if hermitian_eigenvalues(a)[0] <= 0.0 {
        return None;
    }
    let chol = a.clone().cholesky()?;
    let l = chol.l();
    let linv = l.try_inverse()?;
    let m = &linv * b * linv.adjoint();
    hermitian_eigenvalues(&m).last().copied()
}

/// Grid-wide minimum of the smallest Levi eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct PshReport {
    pub min_eigenvalue: f64,
    #[serde(rename = "argmin", serialize_with = "serialize_point")]
    pub argmin_location: ComplexPoint,
    #[serde(skip)]
    pub grid: Grid,
    #[serde(skip)]
    pub margin: f64,
    pub h: f64,
}

fn serialize_point<S: serde::Serializer>(p: &ComplexPoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.to_reals())
}

impl PshReport {
    pub fn is_strict(&self) -> bool {
        self.margin > 0.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numeric record")
    }
}

pub fn min_levi_eigenvalue(f: &ScalarField, grid: &Grid, h: f64) -> Result<PshReport> {
    let mut best: Option<(f64, &ComplexPoint)> = None;
    for node in grid.nodes() {
        let lambda = levi_form(f, node, h)?.min_eigenvalue();
        if best.is_none_or(|(b, _)| lambda < b) {
            best = Some((lambda, node));
        }
    }
    let (min, at) = best.ok_or_else(|| Error::EmptyGrid {
        domain: grid.domain().describe(),
        spacing: grid.spacing(),
    })?;
    Ok(PshReport {
        min_eigenvalue: min,
        argmin_location: at.clone(),
        grid: grid.clone(),
        margin: min,
        h,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PluriharmonicCheck {
    pub passed: bool,
    pub max_deviation: f64,
    pub argmax: Option<ComplexPoint>,
}

pub fn check_pluriharmonic(f: &ScalarField, grid: &Grid, h: f64, tol: f64) -> Result<PluriharmonicCheck> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid {
            domain: grid.domain().describe(),
            spacing: grid.spacing(),
        });
    }
    let mut worst = 0.0;
    let mut argmax = None;
    for node in grid.nodes() {
        let d = levi_form(f, node, h)?.max_norm();
        if d > worst || argmax.is_none() {
            worst = d;
            argmax = Some(node.clone());
        }
    }
    Ok(PluriharmonicCheck {
        passed: worst <= tol,
        max_deviation: worst,
        argmax,
    })
}
