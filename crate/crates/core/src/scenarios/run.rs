use std::path::Path;

use super::registry::{C2Probe, ClassProbe, Scenario};
use super::report::{Check, Comparison, VerificationReport};
use super::verify::{refinement_ratio, SAMPLE_SEED};
use crate::covers::CLUSTER_TOLERANCE;
use crate::error::Result;
use crate::error::Error;
use crate::geometry::sample_grid;
use crate::psh::kernel::BUMP_NORMALIZATION;
use crate::smoothing::{probe_mass, smooth_pushforward, KahlerCocycle, PushforwardOutcome};

/// Largest change of the overlap deviation that still counts as unchanged.
pub const OVERLAP_TOLERANCE: f64 = 1e-8;
const OVERLAP_COLLAR: f64 = 0.05;

pub struct ScenarioRun {
    pub report: VerificationReport,
    /// `None` when the pipeline itself failed.
    pub outcome: Option<PushforwardOutcome>,
}

/// Runs the pipeline and every check of `scenario`. Errors become failed checks.
pub fn run_scenario(scenario: &Scenario) -> ScenarioRun {
    let mut report = VerificationReport::new(&scenario.id);
    report.set_param("h", scenario.config.h);
    report.set_param("eps", scenario.params.eps);
    report.set_param("eta", scenario.params.eta);
    report.set_param("delta", scenario.params.delta);
    report.set_param("n_radius", scenario.config.n_radius);
    report.set_param("nprime_radius", scenario.config.nprime_radius);
    report.set_param("quad_order", scenario.params.quad_order);
    report.set_param("node_h", scenario.params.node_h);
    report.set_param("cover", scenario.cover.kind());
    report.set_env("crate_version", env!("CARGO_PKG_VERSION"));
    report.set_env("bump_normalization", BUMP_NORMALIZATION);
    report.set_env("cluster_tolerance", CLUSTER_TOLERANCE);
    report.set_env("sample_seed", SAMPLE_SEED);

    let outcome = match smooth_pushforward(
        &scenario.cover,
        &scenario.upstairs,
        &scenario.n,
        &scenario.nprime,
        &scenario.params,
        &scenario.refinement,
        &scenario.plan,
    ) {
        Ok(o) => o,
        Err(e) => {
            report.push(Check::failed("pipeline", e.to_string()));
            return ScenarioRun { report, outcome: None };
        }
    };
    report.extend(outcome.report.checks.iter().cloned());
    for (i, step) in outcome.correction.steps().iter().enumerate() {
        let m = &step.measurements;
        report.set_param(&format!("step{i}.margin"), m.margin);
        report.set_param(&format!("step{i}.tau"), m.tau);
        report.set_param(&format!("step{i}.k_sigma"), m.k_sigma);
    }
    if let Some(probe) = &scenario.c2 {
        report.extend(c2_checks(&outcome, probe));
    }
    for class in &scenario.classes {
        report.push(class_check(&outcome.smoothed, class));
    }
    if let Some((node_h, fd_h)) = scenario.overlap {
        report.push(overlap_check(&outcome, node_h, fd_h));
    }
    ScenarioRun {
        report,
        outcome: Some(outcome),
    }
}

fn c2_checks(outcome: &PushforwardOutcome, probe: &C2Probe) -> Vec<Check> {
    let mut out = Vec::new();
    let smoothed = &outcome.smoothed.chart(probe.chart).potential;
    out.push(match refinement_ratio(smoothed, &probe.region, probe.h) {
        Ok(r) => Check::new("c2_ratio", r, Comparison::Le, probe.max_ratio),
        Err(e) => Check::failed("c2_ratio", e.to_string()),
    });
    if let Some(floor) = probe.raw_min_ratio {
        let raw = &outcome.unsmoothed.chart(probe.chart).potential;
        out.push(match refinement_ratio(raw, &probe.region, probe.h) {
            Ok(r) => Check::new("c2_ratio_unsmoothed", r, Comparison::Ge, floor),
            Err(e) => Check::failed("c2_ratio_unsmoothed", e.to_string()),
        });
    }
    out
}

fn class_check(smoothed: &KahlerCocycle, class: &ClassProbe) -> Check {
    let name = format!("class_mass[{}]", class.name);
    let total: Result<f64, _> = class.probes.iter().map(|p| probe_mass(smoothed, p)).sum();
    match total {
        Ok(m) => Check::new(name, (m - class.expected).abs() / class.expected, Comparison::Le, class.rel_tol)
            .with_detail(format!("mass {m:.12e}, expected {:.12e}", class.expected)),
        Err(e) => Check::failed(name, e.to_string()),
    }
}

fn overlap_check(outcome: &PushforwardOutcome, node_h: f64, fd_h: f64) -> Check {
    let measure = |c: &KahlerCocycle| c.overlap_deviation(None, node_h, fd_h, OVERLAP_COLLAR);
    match (measure(&outcome.unsmoothed), measure(&outcome.smoothed)) {
        (Ok(before), Ok(after)) => Check::new("overlap_deviation_change", (after - before).abs(), Comparison::Le, OVERLAP_TOLERANCE)
            .with_detail(format!("before {before:.6e}, after {after:.6e}")),
        (Err(e), _) | (_, Err(e)) => Check::failed("overlap_deviation_change", e.to_string()),
    }
}

/// Writes the smoothed potential of every chart as CSV into `dir`, one file per chart,
/// sampled at `5h` (at least 0.25 in two dimensions) over the positivity regions.
pub fn dump_fields(scenario: &Scenario, outcome: &PushforwardOutcome, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let io = |e: std::io::Error| Error::InvalidParameter(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    for (k, region) in scenario.plan.positivity_regions.iter().enumerate() {
        let Some(region) = region else { continue };
        let spacing = if region.dim() > 1 { (scenario.config.h * 5.0).max(0.25) } else { scenario.config.h * 5.0 };
        let grid = sample_grid(region, spacing)?;
        for (tag, cocycle) in [("unsmoothed", &outcome.unsmoothed), ("smoothed", &outcome.smoothed)] {
            let path = dir.join(format!("{}_chart{k}_{tag}.csv", scenario.id));
            let file = std::fs::File::create(&path).map_err(io)?;
            grid.write_csv(&cocycle.chart(k).potential, std::io::BufWriter::new(file))
                .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
    }
    Ok(written)
}
