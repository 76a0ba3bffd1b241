use std::sync::Arc;

use super::cocycle::KahlerCocycle;
use super::local::{local_smooth, prepare, LocalMeasurements};
use super::opens::NestedOpens;
use super::params::{CheckedParams, SmoothingParams};
use crate::error::{Error, Result};
use crate::geometry::{halton, Atlas, ComplexPoint, Domain, PointMap, ScalarField};

const COVERAGE_SAMPLES: u64 = 4096;

/// A subset of a chart-glued manifold: one part per atlas chart, in that
/// chart's coordinates. A point belongs to the set when it lies in some part
/// after transport.
#[derive(Clone, Debug)]
pub struct ManifoldSet {
    atlas: Atlas,
    parts: Vec<Domain>,
}

impl ManifoldSet {
    pub fn new(atlas: Atlas, parts: Vec<Domain>) -> Result<Self> {
        if parts.len() != atlas.chart_count() {
            return Err(Error::InvalidParameter(format!(
                "{} parts for an atlas with {} charts",
                parts.len(),
                atlas.chart_count()
            )));
        }
        Ok(Self { atlas, parts })
    }

    pub fn empty(atlas: Atlas) -> Self {
        let dim = atlas.dim();
        Self {
            atlas,
            parts: vec![Domain::Empty { dim }; atlas.chart_count()],
        }
    }

    /// Single part on the only chart of an affine atlas.
    pub fn affine(domain: Domain) -> Self {
        Self {
            atlas: Atlas::Affine { dim: domain.dim() },
            parts: vec![domain],
        }
    }

    pub fn atlas(&self) -> Atlas {
        self.atlas
    }

    pub fn part(&self, chart: usize) -> &Domain {
        &self.parts[chart]
    }

    pub fn parts(&self) -> &[Domain] {
        &self.parts
    }

    pub fn contains(&self, chart: usize, p: &ComplexPoint) -> bool {
        self.parts.iter().enumerate().any(|(c, d)| {
            !matches!(d, Domain::Empty { .. })
                && self.atlas.transition(chart, c, p).is_some_and(|q| d.contains(&q))
        })
    }

    /// Adds `domain`, given in chart `chart`, to the set.
    pub fn with(mut self, chart: usize, domain: Domain) -> Self {
        let part = std::mem::replace(&mut self.parts[chart], Domain::Empty { dim: 1 });
        self.parts[chart] = part.union(domain);
        self
    }

    /// The set seen in the coordinates of chart `chart`.
    pub fn in_chart(&self, chart: usize) -> Domain {
        let dim = self.atlas.dim();
        let mut out = Domain::Empty { dim };
        for (c, d) in self.parts.iter().enumerate() {
            if matches!(d, Domain::Empty { .. }) {
                continue;
            }
            if c == chart {
                out = out.union(d.clone());
            } else {
                let atlas = self.atlas;
                let map: PointMap = Arc::new(move |p| atlas.transition(chart, c, p));
                out = out.union(d.clone().pullback(dim, format!("T{chart}{c}"), map));
            }
        }
        out
    }
}

/// `V″ ⋐ V′ ⋐ V` in the coordinates of one atlas chart.
#[derive(Clone, Debug)]
pub struct RefinementTriple {
    pub chart: usize,
    pub inner: Domain,
    pub middle: Domain,
    pub outer: Domain,
    /// Overrides the gluing parameters for this triple.
    pub params: Option<SmoothingParams>,
    /// Restricts the measurements of this step.
    pub core: Option<Domain>,
}

impl RefinementTriple {
    pub fn new(chart: usize, inner: Domain, middle: Domain, outer: Domain) -> Self {
        Self {
            chart,
            inner,
            middle,
            outer,
            params: None,
            core: None,
        }
    }

    pub fn with_core(mut self, core: Domain) -> Self {
        self.core = Some(core);
        self
    }

    pub fn with_params(mut self, params: SmoothingParams) -> Self {
        self.params = Some(params);
        self
    }
}

/// One step of the gluing loop.
#[derive(Clone, Debug)]
pub struct GlueStep {
    pub triple: RefinementTriple,
    /// Cocycle entry the step smoothed.
    pub entry: usize,
    /// `ψ_new - ψ_old` in the triple's chart, zero off `V`.
    pub chi: ScalarField,
    /// Declared support, the triple's `V′`.
    pub support: Domain,
    pub checked: CheckedParams,
    pub measurements: LocalMeasurements,
}

/// The finite sum of corrections produced by [`global_glue`].
#[derive(Clone, Debug)]
pub struct GluingCorrection {
    atlas: Atlas,
    steps: Vec<GlueStep>,
}

impl GluingCorrection {
    pub fn steps(&self) -> &[GlueStep] {
        &self.steps
    }

    /// `χ = Σ χ_n` in the coordinates of chart `chart`.
    pub fn chi(&self, chart: usize) -> ScalarField {
        let dim = self.atlas.dim();
        let atlas = self.atlas;
        let parts: Vec<(usize, ScalarField)> = self.steps.iter().map(|s| (s.triple.chart, s.chi.clone())).collect();
        ScalarField::try_new(format!("chi[{chart}]"), Domain::Whole { dim }, move |p| {
            let mut acc = 0.0;
            for (c, chi) in &parts {
                if let Some(q) = atlas.transition(chart, *c, p) {
                    acc += chi.eval(&q)?;
                }
            }
            Ok(acc)
        })
    }
}

/// Iterates over the refinement, smoothing the entry potential on each
/// triple and spreading the correction to every chart.
///
/// `Ω` at step `n` is `V_n ∩ (X1 ∪ A_{n-1})`, where `A_{n-1}` is the union of
/// the inner sets already processed.
pub fn global_glue(
    cocycle: &KahlerCocycle,
    x1: &ManifoldSet,
    x2: &ManifoldSet,
    refinement: &[RefinementTriple],
    params: &SmoothingParams,
) -> Result<(GluingCorrection, KahlerCocycle)> {
    let atlas = cocycle.atlas();
    if x1.atlas() != atlas || x2.atlas() != atlas {
        return Err(Error::InvalidParameter("X1 and X2 must use the cocycle atlas".into()));
    }
    check_coverage(x1, x2, refinement)?;
    let mut potentials: Vec<ScalarField> = cocycle.charts().iter().map(|c| c.potential.clone()).collect();
    let mut processed = ManifoldSet::empty(atlas);
    let mut steps = Vec::with_capacity(refinement.len());
    for (n, triple) in refinement.iter().enumerate() {
        let step = n + 1;
        let c = triple.chart;
        if c >= atlas.chart_count() {
            return Err(Error::InvalidParameter(format!("step {step}: chart {c} outside atlas")));
        }
        check_inside(&triple.outer, |p| x2.contains(c, p), "X2", step)?;
        let entry = (0..cocycle.len())
            .filter(|&i| cocycle.chart(i).chart == c)
            .find(|&i| sampled_subset(&triple.outer, |p| cocycle.chart(i).domain.contains(p)))
            .ok_or_else(|| Error::Coverage(format!("step {step}: no cocycle entry on chart {c} contains V")))?;

        let old = potentials[entry].clone();
        let phi = old.restrict(triple.outer.clone());
        let omega = triple
            .outer
            .clone()
            .intersect(x1.in_chart(c).union(processed.in_chart(c)));
        let opens = NestedOpens::new(triple.inner.clone(), triple.middle.clone(), triple.outer.clone(), omega)
            .map_err(|e| e.at_step(step))?
            .with_core(triple.core.clone());
        let step_params = triple.params.as_ref().unwrap_or(params);
        let (checked, measurements) = prepare(&phi, &opens, step_params).map_err(|e| e.at_step(step))?;
        let psi = local_smooth(&phi, &opens, &checked).map_err(|e| e.at_step(step))?;

        let chi = {
            let (outer, psi, old) = (triple.outer.clone(), psi.clone(), old.clone());
            ScalarField::try_new(format!("chi{step}"), Domain::Whole { dim: atlas.dim() }, move |p| {
                if outer.contains(p) {
                    Ok(psi.eval(p)? - old.eval(p)?)
                } else {
                    Ok(0.0)
                }
            })
        };

        for (j, slot) in potentials.iter_mut().enumerate() {
            let prev = slot.clone();
            let outer = triple.outer.clone();
            let updated = if j == entry {
                let psi = psi.clone();
                ScalarField::try_new(prev.label().to_string(), prev.valid_on().clone(), move |p| {
                    if outer.contains(p) {
                        psi.eval(p)
                    } else {
                        prev.eval(p)
                    }
                })
            } else {
                let cj = cocycle.chart(j).chart;
                let chi = chi.clone();
                let prev = prev.clone();
                ScalarField::try_new(prev.label().to_string(), prev.valid_on().clone(), move |p| {
                    let base = prev.eval(p)?;
                    match atlas.transition(cj, c, p) {
                        Some(q) if outer.contains(&q) => Ok(base + chi.eval(&q)?),
                        _ => Ok(base),
                    }
                })
            };
            let smooth = match (slot.smooth_on(), psi.smooth_on()) {
                (Some(s), Some(t)) if j == entry => Some(s.clone().intersect(triple.middle.clone().exterior()).union(t.clone())),
                (Some(s), _) => Some(s.clone()),
                _ => None,
            };
            *slot = match smooth {
                Some(s) => updated.with_smooth_on(s),
                None => updated,
            };
        }

        processed = processed.with(c, triple.inner.clone());
        steps.push(GlueStep {
            triple: triple.clone(),
            entry,
            chi,
            support: triple.middle.clone(),
            checked,
            measurements,
        });
    }
    let corrected = cocycle.with_potentials(potentials)?;
    Ok((GluingCorrection { atlas, steps }, corrected))
}

fn samples_of(domain: &Domain, seed: u64, count: u64) -> Result<Vec<ComplexPoint>> {
    let bbox = domain
        .bounding_box()
        .ok_or_else(|| Error::Unbounded(domain.describe()))?;
    let dims = bbox.center.len();
    let mut out = Vec::new();
    for k in 0..count {
        let t = halton(k, dims, seed);
        let reals: Vec<f64> = (0..dims)
            .map(|d| bbox.center[d] + bbox.half_widths[d] * (2.0 * t[d] - 1.0))
            .collect();
        let p = ComplexPoint::from_reals(&reals)?;
        if domain.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

fn sampled_subset(domain: &Domain, inside: impl Fn(&ComplexPoint) -> bool) -> bool {
    samples_of(domain, 13, COVERAGE_SAMPLES / 4).is_ok_and(|s| s.iter().all(inside))
}

fn check_inside(domain: &Domain, inside: impl Fn(&ComplexPoint) -> bool, name: &str, step: usize) -> Result<()> {
    for p in samples_of(domain, 13, COVERAGE_SAMPLES / 4)? {
        if !inside(&p) {
            return Err(Error::Coverage(format!(
                "step {step}: V contains {:?}, which is outside {name}",
                p.to_reals()
            )));
        }
    }
    Ok(())
}

/// Samples `X2 ∖ X1` in every chart and requires each sample to lie in some `V″`.
fn check_coverage(x1: &ManifoldSet, x2: &ManifoldSet, refinement: &[RefinementTriple]) -> Result<()> {
    let atlas = x2.atlas();
    for (c, part) in x2.parts().iter().enumerate() {
        if matches!(part, Domain::Empty { .. }) {
            continue;
        }
        for p in samples_of(part, 17, COVERAGE_SAMPLES)? {
            if x1.contains(c, &p) {
                continue;
            }
            let covered = refinement.iter().any(|t| {
                atlas
                    .transition(c, t.chart, &p)
                    .is_some_and(|q| t.inner.contains(&q))
            });
            if !covered {
                return Err(Error::Coverage(format!(
                    "point {:?} of chart {c} lies in X2 ∖ X1 but in no V″",
                    p.to_reals()
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::smoothing::local_smooth;

    fn kink() -> ScalarField {
        ScalarField::new("2|w|", Domain::centered_disk(2.5), |p| 2.0 * p.coord(0).norm())
            .with_smooth_on(Domain::annulus(Complex64::new(0.0, 0.0), 0.0, 2.5))
    }

    fn triple() -> RefinementTriple {
        RefinementTriple::new(
            0,
            Domain::centered_disk(0.41),
            Domain::centered_disk(0.54),
            Domain::centered_disk(0.6),
        )
    }

    fn params() -> SmoothingParams {
        SmoothingParams::new(0.05, 0.00025, 0.001)
    }

    #[test]
    fn single_triple_matches_local_smooth() {
        let cocycle = KahlerCocycle::single(Domain::centered_disk(2.0), kink()).unwrap();
        let x1 = ManifoldSet::affine(Domain::centered_disk(2.0).intersect(Domain::centered_disk(0.4).exterior()));
        let x2 = ManifoldSet::affine(Domain::centered_disk(0.6));
        let (corr, out) = global_glue(&cocycle, &x1, &x2, &[triple()], &params()).unwrap();
        assert_eq!(corr.steps().len(), 1);
        let step = &corr.steps()[0];
        let opens = NestedOpens::new(
            Domain::centered_disk(0.41),
            Domain::centered_disk(0.54),
            Domain::centered_disk(0.6),
            Domain::Empty { dim: 1 },
        )
        .unwrap();
        let direct = local_smooth(&kink().restrict(Domain::centered_disk(0.6)), &opens, &step.checked).unwrap();
        for k in 0..300 {
            let p = ComplexPoint::one(Complex64::from_polar(0.002 * k as f64, 0.7 * k as f64));
            let glued = out.eval(0, &p).unwrap();
            assert_eq!(glued.to_bits(), direct.eval(&p).unwrap().to_bits());
            let chi = step.chi.eval(&p).unwrap();
            if !step.support.contains(&p) {
                assert_eq!(chi.to_bits(), 0.0f64.to_bits());
            }
        }
    }

    #[test]
    fn uncovered_region_is_reported() {
        let cocycle = KahlerCocycle::single(Domain::centered_disk(2.0), kink()).unwrap();
        let x1 = ManifoldSet::affine(Domain::centered_disk(2.0).intersect(Domain::centered_disk(0.5).exterior()));
        let x2 = ManifoldSet::affine(Domain::centered_disk(0.6));
        assert!(matches!(
            global_glue(&cocycle, &x1, &x2, &[triple()], &params()),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn infeasibility_carries_the_step_index() {
        let cocycle = KahlerCocycle::single(Domain::centered_disk(2.0), kink()).unwrap();
        let x1 = ManifoldSet::affine(Domain::centered_disk(2.0).intersect(Domain::centered_disk(0.4).exterior()));
        let x2 = ManifoldSet::affine(Domain::centered_disk(0.6));
        let mut p = params();
        p.eta = 0.01;
        match global_glue(&cocycle, &x1, &x2, &[triple()], &p) {
            Err(Error::Infeasible { step: Some(1), condition, .. }) => assert_eq!(condition, "eta ≤ delta/2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn manifold_sets_see_other_charts() {
        let atlas = Atlas::Projective { dim: 1 };
        let s = ManifoldSet::new(atlas, vec![Domain::Empty { dim: 1 }, Domain::centered_disk(0.5)]).unwrap();
        assert!(s.contains(0, &ComplexPoint::one(Complex64::new(3.0, 0.0))));
        assert!(!s.contains(0, &ComplexPoint::one(Complex64::new(1.0, 0.0))));
        assert!(s.in_chart(0).contains(&ComplexPoint::one(Complex64::new(0.0, 2.5))));
    }
}
