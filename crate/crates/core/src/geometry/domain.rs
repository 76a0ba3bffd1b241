//! Open subsets of C^n described by a margin function.
//!
//! Every domain exposes `margin(p)`, which is positive exactly on the
//! interior. For disks, annuli and polydisks the margin is the distance to
//! the boundary (per coordinate for polydisks); for level-set regions it is
//! measured in level units.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::point::ComplexPoint;
use crate::error::{Error, Result};

pub type LevelFn = Arc<dyn Fn(&ComplexPoint) -> f64 + Send + Sync>;
pub type PointMap = Arc<dyn Fn(&ComplexPoint) -> Option<ComplexPoint> + Send + Sync>;

/// `{ lower < g(p) < upper }` for an explicit function `g`.
#[derive(Clone)]
pub struct LevelSet {
    pub name: String,
    pub dim: usize,
    pub func: LevelFn,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl LevelSet {
    fn margin(&self, p: &ComplexPoint) -> f64 {
        let g = (self.func)(p);
        if !g.is_finite() {
            return f64::NEG_INFINITY;
        }
        let lo = self.lower.map_or(f64::INFINITY, |l| g - l);
        let hi = self.upper.map_or(f64::INFINITY, |u| u - g);
        lo.min(hi)
    }
}

/// A box in R^{2n}: center plus half-width along every real coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundingBox {
    pub center: Vec<f64>,
    pub half_widths: Vec<f64>,
}

impl BoundingBox {
    fn intersect(&self, other: &BoundingBox) -> BoundingBox {
        let mut center = Vec::with_capacity(self.center.len());
        let mut half = Vec::with_capacity(self.center.len());
        for k in 0..self.center.len() {
            let lo = (self.center[k] - self.half_widths[k]).max(other.center[k] - other.half_widths[k]);
            let hi = (self.center[k] + self.half_widths[k]).min(other.center[k] + other.half_widths[k]);
            center.push(0.5 * (lo + hi));
            half.push((0.5 * (hi - lo)).max(0.0));
        }
        BoundingBox {
            center,
            half_widths: half,
        }
    }

    fn hull(&self, other: &BoundingBox) -> BoundingBox {
        let mut center = Vec::with_capacity(self.center.len());
        let mut half = Vec::with_capacity(self.center.len());
        for k in 0..self.center.len() {
            let lo = (self.center[k] - self.half_widths[k]).min(other.center[k] - other.half_widths[k]);
            let hi = (self.center[k] + self.half_widths[k]).max(other.center[k] + other.half_widths[k]);
            center.push(0.5 * (lo + hi));
            half.push(0.5 * (hi - lo));
        }
        BoundingBox {
            center,
            half_widths: half,
        }
    }
}

#[derive(Clone)]
pub enum Domain {
    Whole { dim: usize },
    Empty { dim: usize },
    Disk { center: Complex64, radius: f64 },
    Annulus { center: Complex64, inner: f64, outer: f64 },
    Polydisk { centers: Vec<Complex64>, radii: Vec<f64> },
    Level(LevelSet),
    Intersection(Vec<Domain>),
    Union(Vec<Domain>),
    /// `{ p : inner.margin(p) > by }`.
    Shrunk { inner: Box<Domain>, by: f64 },
    /// Interior of the complement, `{ p : inner.margin(p) < 0 }`.
    Exterior(Box<Domain>),
    /// `{ p : map(p) ∈ inner }`; used to express a set given in another chart.
    Pullback { inner: Box<Domain>, map: PointMap, dim: usize, label: String },
}

impl Domain {
    pub fn disk(center: Complex64, radius: f64) -> Self {
        Domain::Disk { center, radius }
    }

    pub fn centered_disk(radius: f64) -> Self {
        Domain::Disk {
            center: Complex64::new(0.0, 0.0),
            radius,
        }
    }

    pub fn annulus(center: Complex64, inner: f64, outer: f64) -> Self {
        Domain::Annulus { center, inner, outer }
    }

    pub fn polydisk(centers: Vec<Complex64>, radii: Vec<f64>) -> Self {
        assert_eq!(centers.len(), radii.len(), "polydisk needs one radius per center");
        Domain::Polydisk { centers, radii }
    }

    /// Polydisk centered at the origin with equal radii.
    pub fn centered_polydisk(dim: usize, radius: f64) -> Self {
        Domain::Polydisk {
            centers: vec![Complex64::new(0.0, 0.0); dim],
            radii: vec![radius; dim],
        }
    }

    pub fn sublevel(name: impl Into<String>, dim: usize, func: LevelFn, upper: f64) -> Self {
        Domain::Level(LevelSet {
            name: name.into(),
            dim,
            func,
            lower: None,
            upper: Some(upper),
        })
    }

    pub fn superlevel(name: impl Into<String>, dim: usize, func: LevelFn, lower: f64) -> Self {
        Domain::Level(LevelSet {
            name: name.into(),
            dim,
            func,
            lower: Some(lower),
            upper: None,
        })
    }

    pub fn intersect(self, other: Domain) -> Domain {
        match self {
            Domain::Intersection(mut parts) => {
                parts.push(other);
                Domain::Intersection(parts)
            }
            d => Domain::Intersection(vec![d, other]),
        }
    }

    pub fn union(self, other: Domain) -> Domain {
        match (self, other) {
            (Domain::Empty { .. }, o) => o,
            (s, Domain::Empty { .. }) => s,
            (Domain::Union(mut parts), o) => {
                parts.push(o);
                Domain::Union(parts)
            }
            (s, o) => Domain::Union(vec![s, o]),
        }
    }

    pub fn shrink(self, by: f64) -> Domain {
        Domain::Shrunk {
            inner: Box::new(self),
            by,
        }
    }

    /// Complement of the closure.
    pub fn exterior(self) -> Domain {
        Domain::Exterior(Box::new(self))
    }

    pub fn pullback(self, dim: usize, label: impl Into<String>, map: PointMap) -> Domain {
        Domain::Pullback {
            inner: Box::new(self),
            map,
            dim,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Whole { dim } | Domain::Empty { dim } => *dim,
            Domain::Disk { .. } | Domain::Annulus { .. } => 1,
            Domain::Polydisk { centers, .. } => centers.len(),
            Domain::Level(l) => l.dim,
            Domain::Intersection(parts) | Domain::Union(parts) => parts.first().map_or(1, Domain::dim),
            Domain::Shrunk { inner, .. } | Domain::Exterior(inner) => inner.dim(),
            Domain::Pullback { dim, .. } => *dim,
        }
    }

    /// Positive exactly on the interior.
    pub fn margin(&self, p: &ComplexPoint) -> f64 {
        match self {
            Domain::Whole { .. } => f64::INFINITY,
            Domain::Empty { .. } => f64::NEG_INFINITY,
            Domain::Disk { center, radius } => radius - (p.coord(0) - center).norm(),
            Domain::Annulus { center, inner, outer } => {
                let r = (p.coord(0) - center).norm();
                (r - inner).min(outer - r)
            }
            Domain::Polydisk { centers, radii } => centers
                .iter()
                .zip(radii)
                .zip(p.coords())
                .map(|((c, r), z)| r - (z - c).norm())
                .fold(f64::INFINITY, f64::min),
            Domain::Level(l) => l.margin(p),
            Domain::Intersection(parts) => parts.iter().map(|d| d.margin(p)).fold(f64::INFINITY, f64::min),
            Domain::Union(parts) => parts.iter().map(|d| d.margin(p)).fold(f64::NEG_INFINITY, f64::max),
            Domain::Shrunk { inner, by } => inner.margin(p) - by,
            Domain::Exterior(inner) => -inner.margin(p),
            Domain::Pullback { inner, map, .. } => match map(p) {
                Some(q) => inner.margin(&q),
                None => f64::NEG_INFINITY,
            },
        }
    }

    pub fn contains(&self, p: &ComplexPoint) -> bool {
        p.dim() == self.dim() && self.margin(p) > 0.0
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        match self {
            Domain::Disk { center, radius } | Domain::Annulus { center, outer: radius, .. } => Some(BoundingBox {
                center: vec![center.re, center.im],
                half_widths: vec![*radius, *radius],
            }),
            Domain::Polydisk { centers, radii } => Some(BoundingBox {
                center: centers.iter().flat_map(|c| [c.re, c.im]).collect(),
                half_widths: radii.iter().flat_map(|r| [*r, *r]).collect(),
            }),
            Domain::Intersection(parts) => parts
                .iter()
                .filter_map(Domain::bounding_box)
                .reduce(|a, b| a.intersect(&b)),
            Domain::Union(parts) => {
                let boxes: Option<Vec<_>> = parts
                    .iter()
                    .filter(|d| !matches!(d, Domain::Empty { .. }))
                    .map(Domain::bounding_box)
                    .collect();
                boxes?.into_iter().reduce(|a, b| a.hull(&b))
            }
            Domain::Shrunk { inner, .. } => inner.bounding_box(),
            _ => None,
        }
    }

    /// Lower bound for the nesting margin of `inner ⋐ self` when it can be
    /// read off structurally; `None` when it cannot.
    pub fn structural_nesting_margin(&self, inner: &Domain) -> Option<f64> {
        match (inner, self) {
            (Domain::Disk { center: c1, radius: r1 }, Domain::Disk { center: c2, radius: r2 }) => {
                Some(r2 - r1 - (c1 - c2).norm())
            }
            (
                Domain::Polydisk { centers: c1, radii: r1 },
                Domain::Polydisk { centers: c2, radii: r2 },
            ) if c1.len() == c2.len() => Some(
                c1.iter()
                    .zip(r1)
                    .zip(c2.iter().zip(r2))
                    .map(|((a, ra), (b, rb))| rb - ra - (a - b).norm())
                    .fold(f64::INFINITY, f64::min),
            ),
            (Domain::Level(a), Domain::Level(b)) if Arc::ptr_eq(&a.func, &b.func) => {
                let upper = match (a.upper, b.upper) {
                    (Some(ua), Some(ub)) => ub - ua,
                    (None, None) => f64::INFINITY,
                    (Some(_), None) => f64::INFINITY,
                    (None, Some(_)) => return None,
                };
                let lower = match (a.lower, b.lower) {
                    (Some(la), Some(lb)) => la - lb,
                    (None, None) => f64::INFINITY,
                    (Some(_), None) => f64::INFINITY,
                    (None, Some(_)) => return None,
                };
                Some(upper.min(lower))
            }
            (_, Domain::Intersection(parts)) => parts
                .iter()
                .map(|outer| outer.structural_nesting_margin(inner))
                .try_fold(f64::INFINITY, |acc, m| m.map(|m| acc.min(m))),
            (Domain::Intersection(parts), outer) => parts
                .iter()
                .filter_map(|p| outer.structural_nesting_margin(p))
                .reduce(f64::max),
            (Domain::Shrunk { inner: i, by }, outer) if !matches!(outer, Domain::Shrunk { .. }) => {
                outer.structural_nesting_margin(i).map(|m| m + by)
            }
            (_, Domain::Whole { .. }) => Some(f64::INFINITY),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        format!("{self:?}")
    }

    pub(crate) fn check_dim(&self, p: &ComplexPoint) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Whole { dim } => write!(f, "C^{dim}"),
            Domain::Empty { .. } => write!(f, "∅"),
            Domain::Disk { center, radius } => write!(f, "{{|w-({center})|<{radius}}}"),
            Domain::Annulus { center, inner, outer } => {
                write!(f, "{{{inner}<|w-({center})|<{outer}}}")
            }
            Domain::Polydisk { centers, radii } => {
                write!(f, "polydisk(")?;
                for (j, (c, r)) in centers.iter().zip(radii).enumerate() {
                    if j > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "|z{}-({c})|<{r}", j + 1)?;
                }
                write!(f, ")")
            }
            Domain::Level(l) => match (l.lower, l.upper) {
                (Some(lo), Some(hi)) => write!(f, "{{{lo}<{}<{hi}}}", l.name),
                (Some(lo), None) => write!(f, "{{{}>{lo}}}", l.name),
                (None, Some(hi)) => write!(f, "{{{}<{hi}}}", l.name),
                (None, None) => write!(f, "{{{} finite}}", l.name),
            },
            Domain::Intersection(parts) => {
                let s: Vec<String> = parts.iter().map(|d| format!("{d:?}")).collect();
                write!(f, "({})", s.join(" ∩ "))
            }
            Domain::Union(parts) => {
                let s: Vec<String> = parts.iter().map(|d| format!("{d:?}")).collect();
                write!(f, "({})", s.join(" ∪ "))
            }
            Domain::Shrunk { inner, by } => write!(f, "shrink({inner:?}, {by})"),
            Domain::Exterior(inner) => write!(f, "ext{inner:?}"),
            Domain::Pullback { inner, label, .. } => write!(f, "{label}^*{inner:?}"),
        }
    }
}
