//! Explicit chart atlases and their transition maps.

use num_complex::Complex64;
use serde::Serialize;

use super::point::ComplexPoint;

const POLE: f64 = 1e-300;

/// Chart atlas of a model manifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Atlas {
    /// C^dim with a single chart.
    Affine { dim: usize },
    /// P^dim with the standard charts `a_k ≠ 0`; chart `k` has coordinates
    /// `a_j / a_k` for `j ≠ k` in increasing order of `j`.
    Projective { dim: usize },
    /// (P¹)^factors. Chart `mask` uses `ζ = 1/z` on factor `i` when bit `i` is set.
    ProjectiveProduct { factors: usize },
}

impl Atlas {
    pub fn dim(&self) -> usize {
        match *self {
            Atlas::Affine { dim } | Atlas::Projective { dim } => dim,
            Atlas::ProjectiveProduct { factors } => factors,
        }
    }

    pub fn chart_count(&self) -> usize {
        match *self {
            Atlas::Affine { .. } => 1,
            Atlas::Projective { dim } => dim + 1,
            Atlas::ProjectiveProduct { factors } => 1 << factors,
        }
    }

    /// Coordinates of `p` (given in chart `from`) in chart `to`, or `None` when
    /// the point is not in chart `to`.
    pub fn transition(&self, from: usize, to: usize, p: &ComplexPoint) -> Option<ComplexPoint> {
        if from == to {
            return Some(p.clone());
        }
        match *self {
            Atlas::Affine { .. } => None,
            Atlas::Projective { .. } => {
                let a = projective_lift(from, p);
                projective_chart(to, &a)
            }
            Atlas::ProjectiveProduct { factors } => {
                let mut coords = Vec::with_capacity(factors);
                for i in 0..factors {
                    let z = p.coord(i);
                    if (from >> i) & 1 == (to >> i) & 1 {
                        coords.push(z);
                    } else if z.norm() <= POLE {
                        return None;
                    } else {
                        coords.push(z.inv());
                    }
                }
                ComplexPoint::new(coords).ok()
            }
        }
    }

    /// Homogeneous coordinates of a chart point, normalized with a 1 in slot
    /// `chart` (projective) or one `(T, S)` pair per factor (products).
    pub fn homogeneous(&self, chart: usize, p: &ComplexPoint) -> Vec<Complex64> {
        match *self {
            Atlas::Affine { .. } => p.coords().to_vec(),
            Atlas::Projective { .. } => projective_lift(chart, p),
            Atlas::ProjectiveProduct { factors } => {
                let one = Complex64::new(1.0, 0.0);
                (0..factors)
                    .flat_map(|i| {
                        let z = p.coord(i);
                        if (chart >> i) & 1 == 0 {
                            [z, one]
                        } else {
                            [one, z]
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Inserts a 1 at slot `chart`.
pub fn projective_lift(chart: usize, p: &ComplexPoint) -> Vec<Complex64> {
    let mut a: Vec<Complex64> = p.coords().to_vec();
    a.insert(chart, Complex64::new(1.0, 0.0));
    a
}

/// Affine coordinates of `[a]` in chart `chart`, or `None` if `a_chart = 0`.
pub fn projective_chart(chart: usize, a: &[Complex64]) -> Option<ComplexPoint> {
    let pivot = a[chart];
    if pivot.norm() <= POLE * a.iter().map(|z| z.norm()).fold(0.0, f64::max) {
        return None;
    }
    let coords = a
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != chart)
        .map(|(_, z)| z / pivot);
    ComplexPoint::new(coords).ok()
}

/// The chart in which `[a]` has the largest pivot.
pub fn best_projective_chart(a: &[Complex64]) -> usize {
    let mut best = 0;
    for (j, z) in a.iter().enumerate() {
        if z.norm() > a[best].norm() {
            best = j;
        }
    }
    best
}
