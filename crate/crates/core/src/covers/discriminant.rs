use num_complex::Complex64;

use super::roots::monic_roots;
use super::spec::{CoverKind, CoverSpec};
use crate::geometry::{projective_lift, ComplexPoint};

/// Modulus of the discriminant of the fiber polynomial over `b` (given in
/// downstairs chart `chart`). Vanishes exactly on the branch locus.
///
/// For the projective Vieta map the binary-form discriminant is divided by
/// `‖a‖^{2n-2}` so the value does not depend on the chart.
pub fn discriminant_value(cover: &CoverSpec, chart: usize, b: &ComplexPoint) -> f64 {
    match cover.kind() {
        CoverKind::Power { .. } => b.coord(0).norm(),
        CoverKind::Vieta { n } => {
            let e: Vec<Complex64> = b.coords().to_vec();
            let mut a = vec![Complex64::new(1.0, 0.0)];
            a.extend(e);
            binary_discriminant(n, &a).norm()
        }
        CoverKind::ProjectiveVieta { n } => {
            let a = projective_lift(chart, b);
            let norm2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            binary_discriminant(n, &a).norm() / norm2.powi(n as i32 - 1)
        }
        CoverKind::Identity { .. } => 1.0,
    }
}

/// Discriminant of `Σ_j (-1)^j a_j T^{n-j} S^j`.
fn binary_discriminant(n: usize, a: &[Complex64]) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    match n {
        1 => one,
        2 => a[1] * a[1] - 4.0 * a[0] * a[2],
        3 => {
            let (p, q, r, s) = (a[0], -a[1], a[2], -a[3]);
            q * q * r * r - 4.0 * p * r * r * r - 4.0 * q * q * q * s - 27.0 * p * p * s * s + 18.0 * p * q * r * s
        }
        _ => {
            if a[0].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let coeffs: Vec<Complex64> = (0..n)
                .map(|i| {
                    let j = n - i;
                    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
                    sign * a[j] / a[0]
                })
                .collect();
            let Ok(roots) = monic_roots(&coeffs) else {
                return Complex64::new(0.0, 0.0);
            };
            let mut d = a[0].powu(2 * n as u32 - 2);
            for i in 0..n {
                for j in i + 1..n {
                    d *= (roots[i] - roots[j]).powu(2);
                }
            }
            d
        }
    }
}
