use num_complex::Complex64;
use serde::Serialize;

use super::roots::{cluster, monic_roots};
use crate::error::{Error, Result};
use crate::geometry::{projective_chart, projective_lift, Atlas, ComplexPoint, Domain};

/// Relative radius for merging roots into one point of higher multiplicity.
pub const CLUSTER_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverKind {
    /// `w = z^d` on C.
    Power { degree: usize },
    /// Ordered roots to elementary symmetric functions, C^n → C^n.
    Vieta { n: usize },
    /// `(P¹)^n → P^n`, an n-tuple of points to the binary form vanishing on it.
    ProjectiveVieta { n: usize },
    /// The identity of a chart-glued manifold.
    Identity { atlas: Atlas },
}

/// A branched covering with explicit charts.
///
/// Fiber points are expressed in "fiber coordinates": the affine coordinate
/// for power and Vieta maps, normalized homogeneous coordinates
/// `(T_1, S_1, ..., T_n, S_n)` with `max(|T_i|, |S_i|) = 1` for the
/// projective Vieta map, and the same chart for the identity.
#[derive(Clone, Debug)]
pub struct CoverSpec {
    kind: CoverKind,
    downstairs_domains: Vec<Domain>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberPoint {
    pub point: ComplexPoint,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fiber {
    pub points: Vec<FiberPoint>,
}

impl Fiber {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }
}

impl CoverSpec {
    /// `downstairs_domains[k]` is the evaluation region in downstairs chart `k`.
    pub fn new(kind: CoverKind, downstairs_domains: Vec<Domain>) -> Result<Self> {
        let spec = Self {
            kind,
            downstairs_domains,
        };
        let atlas = spec.downstairs_atlas();
        if spec.downstairs_domains.len() != atlas.chart_count() {
            return Err(Error::InvalidParameter(format!(
                "{} downstairs domains for an atlas with {} charts",
                spec.downstairs_domains.len(),
                atlas.chart_count()
            )));
        }
        match kind {
            CoverKind::Power { degree: 0 } | CoverKind::Vieta { n: 0 } | CoverKind::ProjectiveVieta { n: 0 } => {
                return Err(Error::InvalidParameter("cover degree must be positive".into()))
            }
            _ => {}
        }
        if spec.downstairs_domains.iter().any(|d| d.dim() != atlas.dim()) {
            return Err(Error::DimensionMismatch {
                expected: atlas.dim(),
                got: spec.downstairs_domains[0].dim(),
            });
        }
        Ok(spec)
    }

    pub fn power(degree: usize, base: Domain) -> Result<Self> {
        Self::new(CoverKind::Power { degree }, vec![base])
    }

    pub fn vieta(n: usize, base: Domain) -> Result<Self> {
        Self::new(CoverKind::Vieta { n }, vec![base])
    }

    pub fn kind(&self) -> CoverKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        match self.kind {
            CoverKind::Power { degree } => degree,
            CoverKind::Vieta { n } | CoverKind::ProjectiveVieta { n } => (1..=n).product(),
            CoverKind::Identity { .. } => 1,
        }
    }

    pub fn downstairs_atlas(&self) -> Atlas {
        match self.kind {
            CoverKind::Power { .. } => Atlas::Affine { dim: 1 },
            CoverKind::Vieta { n } => Atlas::Affine { dim: n },
            CoverKind::ProjectiveVieta { n } => Atlas::Projective { dim: n },
            CoverKind::Identity { atlas } => atlas,
        }
    }

    pub fn upstairs_atlas(&self) -> Atlas {
        match self.kind {
            CoverKind::Power { .. } => Atlas::Affine { dim: 1 },
            CoverKind::Vieta { n } => Atlas::Affine { dim: n },
            CoverKind::ProjectiveVieta { n } => Atlas::ProjectiveProduct { factors: n },
            CoverKind::Identity { atlas } => atlas,
        }
    }

    /// Complex dimension of fiber coordinates.
    pub fn fiber_dim(&self) -> usize {
        match self.kind {
            CoverKind::ProjectiveVieta { n } => 2 * n,
            _ => self.upstairs_atlas().dim(),
        }
    }

    pub fn downstairs_domain(&self, chart: usize) -> &Domain {
        &self.downstairs_domains[chart]
    }

    /// Fiber over a point of downstairs chart 0.
    pub fn fiber(&self, b: &ComplexPoint) -> Result<Fiber> {
        self.fiber_in_chart(0, b)
    }

    pub fn fiber_in_chart(&self, chart: usize, b: &ComplexPoint) -> Result<Fiber> {
        let domain = self
            .downstairs_domains
            .get(chart)
            .ok_or_else(|| Error::InvalidParameter(format!("no downstairs chart {chart}")))?;
        domain.check_dim(b)?;
        if !domain.contains(b) {
            return Err(Error::OutOfDomain {
                field: format!("downstairs chart {chart}"),
                point: b.to_reals(),
            });
        }
        match self.kind {
            CoverKind::Power { degree } => Ok(power_fiber(degree, b.coord(0))),
            CoverKind::Vieta { n } => {
                let coeffs: Vec<Complex64> = (0..n)
                    .map(|i| {
                        let j = n - i;
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        sign * b.coord(j - 1)
                    })
                    .collect();
                let roots = monic_roots(&coeffs)?;
                let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
                let groups: Vec<(Vec<Complex64>, usize)> =
                    cluster(&roots, CLUSTER_TOLERANCE * scale, |a, b| (a - b).norm())
                        .into_iter()
                        .map(|g| (vec![mean(g.iter().map(|&i| roots[i]))], g.len()))
                        .collect();
                Ok(orderings(&groups, |parts| ComplexPoint::new(parts.iter().map(|p| p[0]))))
            }
            CoverKind::ProjectiveVieta { n } => {
                let a = projective_lift(chart, b);
                let roots = binary_form_roots(n, &a)?;
                let groups: Vec<([Complex64; 2], usize)> =
                    cluster(&roots, 2.0 * CLUSTER_TOLERANCE, |x, y| (x[0] * y[1] - x[1] * y[0]).norm())
                        .into_iter()
                        .map(|g| (mean_pair(g.iter().map(|&i| roots[i])), g.len()))
                        .collect();
                Ok(orderings(&groups, |parts| ComplexPoint::new(parts.iter().flat_map(|p| [p[0], p[1]]))))
            }
            CoverKind::Identity { .. } => Ok(Fiber {
                points: vec![FiberPoint {
                    point: b.clone(),
                    multiplicity: 1,
                }],
            }),
        }
    }

    /// The covering map, from fiber coordinates to downstairs chart `chart`.
    pub fn apply(&self, chart: usize, x: &ComplexPoint) -> Option<ComplexPoint> {
        match self.kind {
            CoverKind::Power { degree } => Some(ComplexPoint::one(x.coord(0).powu(degree as u32))),
            CoverKind::Vieta { .. } => {
                let e = elementary_symmetric(x.coords());
                ComplexPoint::new(e.into_iter().skip(1)).ok()
            }
            CoverKind::ProjectiveVieta { n } => {
                let pairs: Vec<[Complex64; 2]> = (0..n).map(|i| [x.coord(2 * i), x.coord(2 * i + 1)]).collect();
                projective_chart(chart, &binary_form_coefficients(&pairs))
            }
            CoverKind::Identity { .. } => Some(x.clone()),
        }
    }
}

fn power_fiber(degree: usize, w: Complex64) -> Fiber {
    if w.norm() == 0.0 {
        return Fiber {
            points: vec![FiberPoint {
                point: ComplexPoint::one(w),
                multiplicity: degree,
            }],
        };
    }
    let (r, theta) = w.to_polar();
    let d = degree as f64;
    let roots: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(r.powf(1.0 / d), (theta + 2.0 * std::f64::consts::PI * k as f64) / d))
        .collect();
    let scale = 1.0 + r.powf(1.0 / d);
    let groups = cluster(&roots, CLUSTER_TOLERANCE * scale, |a, b| (a - b).norm());
    Fiber {
        points: groups
            .into_iter()
            .map(|g| FiberPoint {
                point: ComplexPoint::one(mean(g.iter().map(|&i| roots[i]))),
                multiplicity: g.len(),
            })
            .collect(),
    }
}

fn mean(values: impl Iterator<Item = Complex64>) -> Complex64 {
    let (sum, count) = values.fold((Complex64::new(0.0, 0.0), 0usize), |(s, c), z| (s + z, c + 1));
    sum / count as f64
}

/// Average of projective points, each rescaled to the pivot of the first one.
fn mean_pair(mut pairs: impl Iterator<Item = [Complex64; 2]>) -> [Complex64; 2] {
    let first = pairs.next().expect("cluster groups are non-empty");
    let pivot = if first[0].norm() >= first[1].norm() { 0 } else { 1 };
    let mut sum = first;
    let mut count = 1.0;
    for p in pairs {
        let scale = first[pivot] / p[pivot];
        sum[0] += p[0] * scale;
        sum[1] += p[1] * scale;
        count += 1.0;
    }
    normalize_pair(sum[0] / count, sum[1] / count)
}

/// Every distinct ordering of the root multiset, each with multiplicity
/// `Π m_i!`, so that the multiplicities add up to `n!`.
fn orderings<T: Clone>(
    groups: &[(T, usize)],
    build: impl Fn(&[T]) -> Result<ComplexPoint>,
) -> Fiber {
    let weight: usize = groups.iter().map(|(_, m)| (1..=*m).product::<usize>()).product();
    let mut remaining: Vec<usize> = groups.iter().map(|(_, m)| *m).collect();
    let total: usize = remaining.iter().sum();
    let mut current: Vec<T> = Vec::with_capacity(total);
    let mut points = Vec::new();
    fn recurse<T: Clone>(
        groups: &[(T, usize)],
        remaining: &mut [usize],
        current: &mut Vec<T>,
        total: usize,
        out: &mut Vec<Vec<T>>,
    ) {
        if current.len() == total {
            out.push(current.clone());
            return;
        }
        for g in 0..groups.len() {
            if remaining[g] == 0 {
                continue;
            }
            remaining[g] -= 1;
            current.push(groups[g].0.clone());
            recurse(groups, remaining, current, total, out);
            current.pop();
            remaining[g] += 1;
        }
    }
    let mut tuples = Vec::new();
    recurse(groups, &mut remaining, &mut current, total, &mut tuples);
    for t in tuples {
        if let Ok(p) = build(&t) {
            points.push(FiberPoint {
                point: p,
                multiplicity: weight,
            });
        }
    }
    Fiber { points }
}

/// `[1, e_1, ..., e_n]` of the given values.
pub fn elementary_symmetric(z: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); z.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (k, zk) in z.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] = e[j] + e[j - 1] * zk;
        }
    }
    e
}

/// Coefficients `a_j` of `Π_i (S_i T - T_i S) = Σ_j (-1)^j a_j T^{n-j} S^j`.
pub fn binary_form_coefficients(pairs: &[[Complex64; 2]]) -> Vec<Complex64> {
    let n = pairs.len();
    let zero = Complex64::new(0.0, 0.0);
    // poly[j] = coefficient of T^{n-j} S^j in Π (S_i T - T_i S)
    let mut poly = vec![zero; n + 1];
    poly[0] = Complex64::new(1.0, 0.0);
    for (k, [t, s]) in pairs.iter().enumerate() {
        let mut next = vec![zero; n + 1];
        for j in 0..=k {
            next[j] += poly[j] * s;
            next[j + 1] -= poly[j] * t;
        }
        poly = next;
    }
    poly.iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 0 { *c } else { -c })
        .collect()
}

/// Roots of the binary form with coefficients `a`, as normalized `[T, S]`.
pub fn binary_form_roots(n: usize, a: &[Complex64]) -> Result<Vec<[Complex64; 2]>> {
    let (lead, tail) = (a[0], a[n]);
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::RootSolver("zero binary form".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    if lead.norm() == 0.0 || tail.norm() == 0.0 {
        // roots at [1:0] for leading zeros and at [0:1] for trailing zeros
        let first = a.iter().position(|z| z.norm() != 0.0).unwrap_or(0);
        let last = a[..=n].iter().rposition(|z| z.norm() != 0.0).unwrap_or(n);
        out.extend(std::iter::repeat_n([one, zero], first));
        out.extend(std::iter::repeat_n([zero, one], n - last));
        if last > first {
            let m = last - first;
            let inner: Vec<Complex64> = (first..=last)
                .map(|j| if (j - first) % 2 == j % 2 { a[j] } else { -a[j] })
                .collect();
            out.extend(binary_form_roots(m, &inner)?);
        }
        return Ok(out);
    }
    if lead.norm() >= tail.norm() {
        // monic in t = T/S
        let coeffs: Vec<Complex64> = (0..n)
            .map(|i| {
                let j = n - i;
                let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * a[j] / lead
            })
            .collect();
        for t in monic_roots(&coeffs)? {
            out.push(normalize_pair(t, one));
        }
    } else {
        // monic in s = S/T: Σ_j (-1)^j a_j s^j, leading (-1)^n a_n
        let lead_s = if n.is_multiple_of(2) { tail } else { -tail };
        let coeffs: Vec<Complex64> = (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * a[j] / lead_s
            })
            .collect();
        for s in monic_roots(&coeffs)? {
            out.push(normalize_pair(one, s));
        }
    }
    Ok(out)
}

fn normalize_pair(t: Complex64, s: Complex64) -> [Complex64; 2] {
    if t.norm() <= s.norm() {
        [t / s, Complex64::new(1.0, 0.0)]
    } else {
        [Complex64::new(1.0, 0.0), s / t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym2() -> CoverSpec {
        CoverSpec::vieta(2, Domain::centered_polydisk(2, 3.0)).unwrap()
    }

    #[test]
    fn square_roots_of_one() {
        let cover = CoverSpec::power(2, Domain::centered_disk(2.0)).unwrap();
        let f = cover.fiber(&ComplexPoint::one(c(1.0, 0.0))).unwrap();
        assert_eq!(f.points.len(), 2);
        assert!((f.points[0].point.coord(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((f.points[1].point.coord(0) - c(-1.0, 0.0)).norm() < 1e-15);
        let zero = cover.fiber(&ComplexPoint::one(c(0.0, 0.0))).unwrap();
        assert_eq!(zero.points.len(), 1);
        assert_eq!(zero.points[0].multiplicity, 2);
    }

    #[test]
    fn vieta_fibers_list_orderings() {
        let f = sym2().fiber(&ComplexPoint::two(c(0.0, 0.0), c(-1.0, 0.0))).unwrap();
        assert_eq!(f.points.len(), 2);
        assert!(f.points.iter().all(|p| p.multiplicity == 1));
        let pts: Vec<(f64, f64)> = f.points.iter().map(|p| (p.point.coord(0).re, p.point.coord(1).re)).collect();
        assert!(pts.contains(&(1.0, -1.0)) && pts.contains(&(-1.0, 1.0)));

        let d = sym2().fiber(&ComplexPoint::two(c(2.0, 0.0), c(1.0, 0.0))).unwrap();
        assert_eq!(d.points.len(), 1);
        assert_eq!(d.points[0].multiplicity, 2);
        assert_eq!(d.points[0].point, ComplexPoint::two(c(1.0, 0.0), c(1.0, 0.0)));
    }

    #[test]
    fn cubic_vieta_with_double_root() {
        let cover = CoverSpec::vieta(3, Domain::centered_polydisk(3, 10.0)).unwrap();
        // roots 1, 1, -2: e = (0, -3, -2)
        let b = ComplexPoint::new([c(0.0, 0.0), c(-3.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let f = cover.fiber(&b).unwrap();
        assert_eq!(f.points.len(), 3);
        assert_eq!(f.total_multiplicity(), 6);
        for p in &f.points {
            assert!(cover.apply(0, &p.point).unwrap().distance(&b) < 1e-9);
        }
    }

    #[test]
    fn projective_fibers_map_back() {
        let cover = CoverSpec::new(
            CoverKind::ProjectiveVieta { n: 2 },
            vec![Domain::centered_polydisk(2, 4.0); 3],
        )
        .unwrap();
        for (chart, b) in [
            (0, ComplexPoint::two(c(1.0, 0.5), c(0.25, -1.0))),
            (2, ComplexPoint::two(c(0.0, 0.0), c(0.3, 0.0))),
            (1, ComplexPoint::two(c(0.0, 0.0), c(0.0, 0.0))),
        ] {
            let f = cover.fiber_in_chart(chart, &b).unwrap();
            assert_eq!(f.total_multiplicity(), 2);
            for p in &f.points {
                assert!(cover.apply(chart, &p.point).unwrap().distance(&b) < 1e-9, "{chart} {b:?}");
            }
        }
        // a0 = 0: one root at infinity
        let f = cover.fiber_in_chart(2, &ComplexPoint::two(c(0.0, 0.0), c(0.3, 0.0))).unwrap();
        assert!(f.points.iter().any(|p| p.point.coord(1).norm() == 0.0));
    }

    #[test]
    fn binary_form_convention() {
        let a = binary_form_coefficients(&[[c(2.0, 0.0), c(1.0, 0.0)], [c(3.0, 0.0), c(1.0, 0.0)]]);
        assert_eq!(a, vec![c(1.0, 0.0), c(5.0, 0.0), c(6.0, 0.0)]);
        let e = elementary_symmetric(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(e, vec![c(1.0, 0.0), c(5.0, 0.0), c(6.0, 0.0)]);
    }
}
