use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of `t^n + c[n-1] t^{n-1} + ... + c[0]`, with repetition.
///
/// Degrees 1 and 2 use closed forms; higher degrees use the eigenvalues of the
/// companion matrix followed by two Newton steps on the polynomial.
pub fn monic_roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::RootSolver(format!("non-finite coefficients {c:?}")));
    }
    match c.len() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![-c[0]]),
        2 => Ok(quadratic_roots(c[1], c[0]).to_vec()),
        n => {
            let mut companion = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            for i in 1..n {
                companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
            }
            for i in 0..n {
                companion[(i, n - 1)] = -c[i];
            }
            let schur = nalgebra::linalg::Schur::try_new(companion, 1e-15, 10_000)
                .ok_or_else(|| Error::RootSolver(format!("Schur iteration did not converge for {c:?}")))?;
            let (_, t) = schur.unpack();
            let mut roots: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
            for r in roots.iter_mut() {
                *r = polish(c, *r);
            }
            Ok(roots)
        }
    }
}

/// Roots of `t² + b t + c` without cancellation.
pub fn quadratic_roots(b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * c).sqrt();
    let plus = b + disc;
    let minus = b - disc;
    let q = -0.5 * if plus.norm() >= minus.norm() { plus } else { minus };
    if q.norm() == 0.0 {
        return [q, q];
    }
    [q, c / q]
}

fn polish(c: &[Complex64], mut r: Complex64) -> Complex64 {
    for _ in 0..2 {
        let (p, dp) = eval_monic(c, r);
        if dp.norm() == 0.0 {
            break;
        }
        let next = r - p / dp;
        if !next.re.is_finite() || !next.im.is_finite() || eval_monic(c, next).0.norm() > p.norm() {
            break;
        }
        r = next;
    }
    r
}

/// Value and derivative of the monic polynomial at `t`.
pub fn eval_monic(c: &[Complex64], t: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for coeff in c.iter().rev() {
        dp = dp * t + p;
        p = p * t + coeff;
    }
    (p, dp)
}

/// Groups equal roots by index. An item joins the first group whose leading
/// member is within `tol` under `dist`.
pub fn cluster<T>(items: &[T], tol: f64, dist: impl Fn(&T, &T) -> f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, item) in items.iter().enumerate() {
        match groups.iter_mut().find(|g| dist(&items[g[0]], item) <= tol) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}
