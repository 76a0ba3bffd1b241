use super::cocycle::{CocycleChart, KahlerCocycle};
use super::glue::{global_glue, GluingCorrection, ManifoldSet, RefinementTriple};
use super::params::SmoothingParams;
use crate::covers::{check_fiber_containment, lift_potential, pushforward_chart, CoverSpec};
use crate::error::{Error, Result};
use crate::geometry::{curve_mass, mass_integral, ComplexPoint, Curve, Domain};
use crate::scenarios::report::{Check, Comparison, VerificationReport};
use crate::scenarios::verify::{positivity, verify_agreement};

const CONTAINMENT_SAMPLES: u64 = 256;

/// A cohomology probe: the mass of `dd^c` of the potential on a disk or curve.
#[derive(Clone, Debug)]
pub enum MassProbe {
    Disk { name: String, chart: usize, disk: Domain, h: f64 },
    Curve { name: String, curve: Curve, quad_order: usize },
    /// The disk `{origin + t·direction : t ∈ disk}` inside one chart.
    Line {
        name: String,
        chart: usize,
        origin: ComplexPoint,
        direction: ComplexPoint,
        disk: Domain,
        h: f64,
    },
}

impl MassProbe {
    pub fn name(&self) -> &str {
        match self {
            MassProbe::Disk { name, .. } | MassProbe::Curve { name, .. } | MassProbe::Line { name, .. } => name,
        }
    }
}

/// The mass of `dd^c` of `cocycle` measured by `probe`.
pub fn probe_mass(cocycle: &KahlerCocycle, probe: &MassProbe) -> Result<f64> {
    match probe {
        MassProbe::Disk { chart, disk, h, .. } => mass_integral(&cocycle.chart(*chart).potential, disk, *h),
        MassProbe::Curve { curve, quad_order, .. } => curve_mass(cocycle, curve, *quad_order),
        MassProbe::Line {
            chart,
            origin,
            direction,
            disk,
            h,
            ..
        } => {
            let (o, d) = (origin.clone(), direction.clone());
            let restricted = cocycle.chart(*chart).potential.compose("line", Domain::Whole { dim: 1 }, move |t| {
                ComplexPoint::new(o.coords().iter().zip(d.coords()).map(|(a, b)| a + t.coord(0) * b)).ok()
            });
            mass_integral(&restricted, disk, *h)
        }
    }
}

/// Which verifications [`smooth_pushforward`] runs and where.
#[derive(Clone, Debug)]
pub struct CheckPlan {
    /// Region outside `N̄` per downstairs chart, or `None` to skip the chart.
    pub agreement_regions: Vec<Option<Domain>>,
    pub agreement_samples: u64,
    /// Region per downstairs chart for the Levi margin.
    pub positivity_regions: Vec<Option<Domain>>,
    /// `(node spacing, finite-difference step)` pairs, coarse first.
    pub positivity_levels: Vec<(f64, f64)>,
    pub masses: Vec<MassProbe>,
    /// Allowed relative change of every mass.
    pub mass_tol: f64,
}

#[derive(Clone, Debug)]
pub struct PushforwardOutcome {
    /// The continuous cocycle `(U′_k, π_* φ)`.
    pub unsmoothed: KahlerCocycle,
    /// The same cocycle with the correction added.
    pub smoothed: KahlerCocycle,
    pub correction: GluingCorrection,
    pub report: VerificationReport,
}

/// The downstairs cocycle of pushed-forward potentials, one entry per downstairs chart.
pub fn pushforward_cocycle(cover: &CoverSpec, upstairs: &KahlerCocycle) -> Result<KahlerCocycle> {
    let atlas = cover.downstairs_atlas();
    let mut charts = Vec::with_capacity(atlas.chart_count());
    for k in 0..atlas.chart_count() {
        let lifted = lift_potential(cover, upstairs, k)?;
        check_fiber_containment(cover, &lifted, k, CONTAINMENT_SAMPLES)?;
        let potential = pushforward_chart(cover, &lifted, k)?;
        charts.push(CocycleChart::new(k, cover.downstairs_domain(k).clone(), potential));
    }
    KahlerCocycle::new(atlas, charts)
}

/// Pushes the upstairs cocycle forward, glues with `X1 = base ∖ N̄′` and
/// `X2 = N`, and verifies agreement outside `N̄`, positivity and mass.
pub fn smooth_pushforward(
    cover: &CoverSpec,
    upstairs: &KahlerCocycle,
    n: &ManifoldSet,
    nprime: &ManifoldSet,
    params: &SmoothingParams,
    refinement: &[RefinementTriple],
    plan: &CheckPlan,
) -> Result<PushforwardOutcome> {
    let atlas = cover.downstairs_atlas();
    if n.atlas() != atlas || nprime.atlas() != atlas {
        return Err(Error::InvalidParameter("N and N′ must use the downstairs atlas".into()));
    }
    let unsmoothed = pushforward_cocycle(cover, upstairs)?;
    let x1_parts = (0..atlas.chart_count())
        .map(|k| cover.downstairs_domain(k).clone().intersect(nprime.in_chart(k).exterior()))
        .collect();
    let x1 = ManifoldSet::new(atlas, x1_parts)?;
    let (correction, smoothed) = global_glue(&unsmoothed, &x1, n, refinement, params)?;

    let mut report = VerificationReport::new("");
    let mut zone = ManifoldSet::empty(atlas);
    for t in refinement {
        zone = zone.with(t.chart, t.outer.clone());
    }
    let many = unsmoothed.len() > 1;
    let suffix = |base: &str, k: usize| if many { format!("{base}[{k}]") } else { base.to_string() };
    for (k, region) in plan.agreement_regions.iter().enumerate() {
        let Some(region) = region else { continue };
        let mut check = verify_agreement(
            &smoothed.chart(k).potential,
            &unsmoothed.chart(k).potential,
            region,
            &zone.in_chart(smoothed.chart(k).chart),
            plan.agreement_samples,
        )?;
        check.name = suffix(&check.name, k);
        report.push(check);
    }
    for (k, region) in plan.positivity_regions.iter().enumerate() {
        let Some(region) = region else { continue };
        for (level, &(node_h, fd_h)) in plan.positivity_levels.iter().enumerate() {
            let name = suffix(&format!("positivity_level{level}"), k);
            report.push(positivity(&name, &smoothed.chart(k).potential, region, node_h, fd_h)?);
        }
    }
    for probe in &plan.masses {
        let name = probe.name();
        let (before, after) = (probe_mass(&unsmoothed, probe)?, probe_mass(&smoothed, probe)?);
        let rel = (after - before).abs() / before.abs();
        report.push(
            Check::new(format!("mass_change[{name}]"), rel, Comparison::Le, plan.mass_tol)
                .with_detail(format!("before {before:.12e}, after {after:.12e}")),
        );
    }
    Ok(PushforwardOutcome {
        unsmoothed,
        smoothed,
        correction,
        report,
    })
}
