use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{halton, sample_grid, Atlas, ComplexPoint, Domain, Grid, ScalarField};
use crate::psh::{check_pluriharmonic, min_levi_eigenvalue, PshReport};

const OVERLAP_SAMPLES: u64 = 2048;

/// One `(U_i, φ_i)` pair, with `U_i` given in the coordinates of atlas chart `chart`.
#[derive(Clone, Debug)]
pub struct CocycleChart {
    pub chart: usize,
    pub domain: Domain,
    pub potential: ScalarField,
}

impl CocycleChart {
    pub fn new(chart: usize, domain: Domain, potential: ScalarField) -> Self {
        Self {
            chart,
            domain,
            potential,
        }
    }
}

/// A finite Kähler cocycle over an explicit atlas.
#[derive(Clone, Debug)]
pub struct KahlerCocycle {
    atlas: Atlas,
    charts: Vec<CocycleChart>,
    overlaps: Vec<(usize, usize)>,
}

impl KahlerCocycle {
    pub fn new(atlas: Atlas, charts: Vec<CocycleChart>) -> Result<Self> {
        if charts.is_empty() {
            return Err(Error::InvalidParameter("a cocycle needs at least one chart".into()));
        }
        for c in &charts {
            if c.chart >= atlas.chart_count() {
                return Err(Error::InvalidParameter(format!(
                    "chart index {} outside atlas with {} charts",
                    c.chart,
                    atlas.chart_count()
                )));
            }
            if c.domain.dim() != atlas.dim() || c.potential.dim() != atlas.dim() {
                return Err(Error::DimensionMismatch {
                    expected: atlas.dim(),
                    got: c.domain.dim(),
                });
            }
        }
        let mut cocycle = Self {
            atlas,
            charts,
            overlaps: Vec::new(),
        };
        cocycle.overlaps = cocycle.detect_overlaps();
        Ok(cocycle)
    }

    /// Single-chart cocycle on an affine chart.
    pub fn single(domain: Domain, potential: ScalarField) -> Result<Self> {
        let dim = domain.dim();
        Self::new(Atlas::Affine { dim }, vec![CocycleChart::new(0, domain, potential)])
    }

    pub fn atlas(&self) -> Atlas {
        self.atlas
    }

    pub fn charts(&self) -> &[CocycleChart] {
        &self.charts
    }

    pub fn chart(&self, i: usize) -> &CocycleChart {
        &self.charts[i]
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atlas.dim()
    }

    /// Pairs `(i, j)`, `i < j`, whose chart domains were found to overlap.
    pub fn overlaps(&self) -> &[(usize, usize)] {
        &self.overlaps
    }

    pub fn eval(&self, i: usize, p: &ComplexPoint) -> Result<f64> {
        let c = &self.charts[i];
        if !c.domain.contains(p) {
            return Err(Error::OutOfDomain {
                field: format!("chart {i} of cocycle"),
                point: p.to_reals(),
            });
        }
        c.potential.eval(p)
    }

    /// Coordinates in the chart of entry `j` of a point given in the chart of entry `i`.
    pub fn transport(&self, i: usize, j: usize, p: &ComplexPoint) -> Option<ComplexPoint> {
        self.atlas.transition(self.charts[i].chart, self.charts[j].chart, p)
    }

    /// `φ_i - φ_j` on `U_i ∩ U_j`, in the coordinates of entry `i`.
    pub fn overlap_difference(&self, i: usize, j: usize) -> ScalarField {
        let atlas = self.atlas;
        let (ci, cj) = (self.charts[i].chart, self.charts[j].chart);
        let inner = self.charts[j].domain.clone();
        let map: crate::geometry::PointMap = Arc::new(move |p| atlas.transition(ci, cj, p));
        let overlap = self.charts[i]
            .domain
            .clone()
            .intersect(inner.pullback(atlas.dim(), format!("T{ci}{cj}"), map));
        let (fi, fj) = (self.charts[i].potential.clone(), self.charts[j].potential.clone());
        ScalarField::try_new(format!("φ{i} - φ{j}"), overlap, move |p| {
            let q = atlas.transition(ci, cj, p).ok_or_else(|| Error::OutOfDomain {
                field: format!("φ{j}"),
                point: p.to_reals(),
            })?;
            Ok(fi.eval(p)? - fj.eval(&q)?)
        })
    }

    /// Same charts with potentials replaced entrywise.
    pub fn with_potentials(&self, potentials: Vec<ScalarField>) -> Result<Self> {
        if potentials.len() != self.charts.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} potentials, got {}",
                self.charts.len(),
                potentials.len()
            )));
        }
        let charts = self
            .charts
            .iter()
            .zip(potentials)
            .map(|(c, potential)| CocycleChart {
                chart: c.chart,
                domain: c.domain.clone(),
                potential,
            })
            .collect();
        Ok(Self {
            atlas: self.atlas,
            charts,
            overlaps: self.overlaps.clone(),
        })
    }

    /// Grid on chart `i` restricted to `region` (if given), keeping nodes at
    /// distance more than `collar` from the chart boundary.
    pub fn chart_grid(&self, i: usize, region: Option<&Domain>, node_h: f64, collar: f64) -> Result<Grid> {
        let domain = &self.charts[i].domain;
        let target = match region {
            Some(r) => domain.clone().intersect(r.clone()),
            None => domain.clone(),
        };
        sample_grid(&target, node_h)?.filter("chart collar", |p| {
            domain.margin(p) > collar && region.is_none_or(|r| r.contains(p))
        })
    }

    /// Levi margin of each chart potential on its grid.
    pub fn psh_margins(&self, regions: &[Option<Domain>], node_h: f64, fd_h: f64, collar: f64) -> Result<Vec<PshReport>> {
        (0..self.len())
            .map(|i| {
                let region = regions.get(i).and_then(Option::as_ref);
                let grid = self.chart_grid(i, region, node_h, collar)?;
                min_levi_eigenvalue(&self.charts[i].potential, &grid, fd_h)
            })
            .collect()
    }

    /// Largest Levi max-norm of `φ_i - φ_j` over all detected overlaps, sampled
    /// on the lattice of chart `i` at spacing `node_h`. Nodes are kept when both
    /// chart margins exceed `collar`.
    pub fn overlap_deviation(&self, region: Option<&Domain>, node_h: f64, fd_h: f64, collar: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &(i, j) in &self.overlaps {
            let diff = self.overlap_difference(i, j);
            let base = match self.chart_grid(i, region, node_h, collar) {
                Ok(g) => g,
                Err(Error::EmptyGrid { .. }) => continue,
                Err(e) => return Err(e),
            };
            let dj = &self.charts[j].domain;
            let grid = match base.filter("overlap", |p| {
                self.transport(i, j, p).is_some_and(|q| dj.margin(&q) > collar)
                    && diff.valid_on().margin(p) > 0.0
            }) {
                Ok(g) => g,
                Err(Error::EmptyGrid { .. }) => continue,
                Err(e) => return Err(e),
            };
            let check = check_pluriharmonic(&diff, &grid, fd_h, f64::INFINITY)?;
            worst = worst.max(check.max_deviation);
        }
        Ok(worst)
    }

    fn detect_overlaps(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.charts.len() {
            for j in i + 1..self.charts.len() {
                if self.sample_overlap(i, j) || self.sample_overlap(j, i) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn sample_overlap(&self, i: usize, j: usize) -> bool {
        let Some(bbox) = self.charts[i].domain.bounding_box() else {
            return true;
        };
        let dims = bbox.center.len();
        (0..OVERLAP_SAMPLES).any(|k| {
            let u = halton(k, dims, 7);
            let reals: Vec<f64> = (0..dims)
                .map(|d| bbox.center[d] + bbox.half_widths[d] * (2.0 * u[d] - 1.0))
                .collect();
            let Ok(p) = ComplexPoint::from_reals(&reals) else {
                return false;
            };
            self.charts[i].domain.contains(&p)
                && self
                    .transport(i, j, &p)
                    .is_some_and(|q| self.charts[j].domain.contains(&q))
        })
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    pub(crate) fn fubini_study_p1() -> KahlerCocycle {
        let d = Domain::centered_disk(2.5);
        let fs = |label: &str| {
            ScalarField::new(label, Domain::centered_disk(3.0), |p| (1.0 + p.coord(0).norm_sqr()).ln())
        };
        KahlerCocycle::new(
            Atlas::Projective { dim: 1 },
            vec![
                CocycleChart::new(0, d.clone(), fs("fs0")),
                CocycleChart::new(1, d, fs("fs1")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fubini_study_cocycle_is_kahler() {
        let k = fubini_study_p1();
        assert_eq!(k.overlaps(), &[(0, 1)]);
        let margins = k.psh_margins(&[], 0.25, 0.01, 0.05).unwrap();
        assert!(margins.iter().all(|r| r.margin > 0.0));
        let dev = k.overlap_deviation(None, 0.1, 0.002, 0.05).unwrap();
        assert!(dev < 1e-4, "{dev}");
    }

    #[test]
    fn overlap_difference_is_log_modulus() {
        let k = fubini_study_p1();
        let d = k.overlap_difference(0, 1);
        let p = ComplexPoint::one(Complex64::new(0.8, 0.6));
        assert!((d.eval(&p).unwrap() - 0.0).abs() < 1e-14);
        let q = ComplexPoint::one(Complex64::new(2.0, 0.0));
        assert!((d.eval(&q).unwrap() - 4f64.ln()).abs() < 1e-14);
        assert!(d.eval(&ComplexPoint::one(Complex64::new(0.1, 0.0))).is_err());
    }

    #[test]
    fn chart_indices_are_validated() {
        let d = Domain::centered_disk(1.0);
        let f = ScalarField::constant(0.0, d.clone());
        assert!(KahlerCocycle::new(Atlas::Affine { dim: 1 }, vec![CocycleChart::new(1, d, f)]).is_err());
    }
}
