use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Coords = SmallVec<[Complex64; 4]>;

/// A point of C^n in model coordinates.
#[derive(Clone, PartialEq)]
pub struct ComplexPoint {
    coords: Coords,
}

impl ComplexPoint {
    pub fn new<I: IntoIterator<Item = Complex64>>(coords: I) -> Result<Self> {
        let coords: Coords = coords.into_iter().collect();
        if coords.is_empty() {
            return Err(Error::InvalidPoint("a point needs at least one coordinate".into()));
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinates {coords:?}")));
        }
        Ok(Self { coords })
    }

    /// Builds a point without validation. Callers guarantee n ≥ 1 and finiteness.
    pub(crate) fn from_coords(coords: Coords) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn one(z: Complex64) -> Self {
        Self::from_coords(smallvec::smallvec![z])
    }

    pub fn two(z1: Complex64, z2: Complex64) -> Self {
        Self::from_coords(smallvec::smallvec![z1, z2])
    }

    pub fn origin(dim: usize) -> Self {
        Self::from_coords(smallvec::smallvec![Complex64::new(0.0, 0.0); dim.max(1)])
    }

    /// Interleaved real coordinates `re_1, im_1, ..., re_n, im_n`.
    pub fn from_reals(reals: &[f64]) -> Result<Self> {
        if !reals.len().is_multiple_of(2) {
            return Err(Error::InvalidPoint(format!(
                "{} real coordinates do not pair into complex ones",
                reals.len()
            )));
        }
        Self::new(reals.chunks(2).map(|c| Complex64::new(c[0], c[1])))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> Complex64 {
        self.coords[j]
    }

    pub fn to_reals(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Real coordinate `k` of the 2n real coordinates (even = real part).
    pub fn real_coord(&self, k: usize) -> f64 {
        let z = self.coords[k / 2];
        if k.is_multiple_of(2) {
            z.re
        } else {
            z.im
        }
    }

    /// The point moved by `step` along real direction `k`.
    pub fn shifted(&self, k: usize, step: f64) -> Self {
        let mut coords = self.coords.clone();
        if k.is_multiple_of(2) {
            coords[k / 2].re += step;
        } else {
            coords[k / 2].im += step;
        }
        Self { coords }
    }

    /// The point moved by two real steps at once.
    pub fn shifted2(&self, k: usize, a: f64, l: usize, b: f64) -> Self {
        let mut p = self.shifted(k, a);
        if l.is_multiple_of(2) {
            p.coords[l / 2].re += b;
        } else {
            p.coords[l / 2].im += b;
        }
        p
    }

    /// `self + scale * offset`, with `offset` given in interleaved real coordinates.
    pub fn offset_by(&self, offset: &[f64], scale: f64) -> Self {
        debug_assert_eq!(offset.len(), 2 * self.dim());
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(j, z)| Complex64::new(z.re + scale * offset[2 * j], z.im + scale * offset[2 * j + 1]))
            .collect();
        Self { coords }
    }

    /// Euclidean distance in R^{2n}.
    pub fn distance(&self, other: &ComplexPoint) -> f64 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl fmt::Debug for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, z) in self.coords.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{:+}i", z.re, z.im)?;
        }
        f.write_str(")")
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self::one(z)
    }
}
