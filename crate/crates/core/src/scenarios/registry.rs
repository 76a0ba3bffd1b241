use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::covers::{discriminant_value, CoverKind, CoverSpec};
use crate::error::{Error, Result};
use std::sync::Arc;

use crate::geometry::{Atlas, ComplexPoint, Curve, Domain, LevelFn, ScalarField};
use crate::smoothing::{sublevel_family, CheckPlan, CocycleChart, KahlerCocycle, ManifoldSet, MassProbe, RefinementTriple, SmoothingParams};

pub const SCENARIO_IDS: [&str; 4] = ["S1", "S2", "S3", "S4"];

/// Parameter overrides accepted by [`build_scenario`].
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Overrides {
    pub h: Option<f64>,
    pub eps: Option<f64>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    pub n_radius: Option<f64>,
    pub nprime_radius: Option<f64>,
}

impl Overrides {
    pub const NAMES: [&'static str; 6] = ["h", "eps", "eta", "delta", "n_radius", "nprime_radius"];

    /// Sets an override by name; dashes and underscores are interchangeable.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidOverride(format!("{name} must be positive and finite, got {value}")));
        }
        let slot = match name.replace('-', "_").as_str() {
            "h" => &mut self.h,
            "eps" => &mut self.eps,
            "eta" => &mut self.eta,
            "delta" => &mut self.delta,
            "n_radius" => &mut self.n_radius,
            "nprime_radius" => &mut self.nprime_radius,
            _ => return Err(Error::InvalidOverride(format!("unknown parameter `{name}`"))),
        };
        *slot = Some(value);
        Ok(())
    }
}

/// Resolved configuration of a scenario, echoed into its report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub h: f64,
    pub eps: f64,
    pub eta: f64,
    pub delta: f64,
    pub n_radius: f64,
    pub nprime_radius: f64,
}

impl ScenarioConfig {
    /// An `n_radius` override alone scales the default `N′` radius along when it would not fit.
    fn resolve(defaults: ScenarioConfig, o: &Overrides) -> Result<Self> {
        let mut c = ScenarioConfig {
            h: o.h.unwrap_or(defaults.h),
            eps: o.eps.unwrap_or(defaults.eps),
            eta: o.eta.unwrap_or(defaults.eta),
            delta: o.delta.unwrap_or(defaults.delta),
            n_radius: o.n_radius.unwrap_or(defaults.n_radius),
            nprime_radius: o.nprime_radius.unwrap_or(defaults.nprime_radius),
        };
        if let (Some(n), None) = (o.n_radius, o.nprime_radius) {
            if defaults.nprime_radius >= n {
                c.nprime_radius = n * defaults.nprime_radius / defaults.n_radius;
            }
        }
        for (name, v) in [("h", c.h), ("eps", c.eps), ("eta", c.eta), ("delta", c.delta), ("n_radius", c.n_radius), ("nprime_radius", c.nprime_radius)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidOverride(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if c.eta > c.delta / 2.0 {
            return Err(Error::Infeasible {
                condition: "eta ≤ delta/2".into(),
                detail: format!("eta={}, delta/2={}", c.eta, c.delta / 2.0),
                step: None,
            });
        }
        if c.nprime_radius >= c.n_radius {
            return Err(Error::Infeasible {
                condition: "N′ ⋐ N".into(),
                detail: format!("nprime_radius={} is not below n_radius={}", c.nprime_radius, c.n_radius),
                step: None,
            });
        }
        Ok(c)
    }
}

/// Refinement ratio check of the sup discrete Laplacian.
#[derive(Clone, Debug)]
pub struct C2Probe {
    pub chart: usize,
    pub region: Domain,
    pub h: f64,
    pub max_ratio: f64,
    /// Lower bound the unsmoothed potential must reach, showing the check bites.
    pub raw_min_ratio: Option<f64>,
}

/// A mass that must match a known value.
#[derive(Clone, Debug)]
pub struct ClassProbe {
    pub name: String,
    /// Probes whose masses add up to the class.
    pub probes: Vec<MassProbe>,
    pub expected: f64,
    pub rel_tol: f64,
}

/// A fully instantiated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub description: String,
    pub config: ScenarioConfig,
    pub cover: CoverSpec,
    pub upstairs: KahlerCocycle,
    pub n: ManifoldSet,
    pub nprime: ManifoldSet,
    pub params: SmoothingParams,
    pub refinement: Vec<RefinementTriple>,
    pub plan: CheckPlan,
    pub c2: Option<C2Probe>,
    pub classes: Vec<ClassProbe>,
    /// Node spacing and FD step for the overlap check, when the cocycle has overlaps.
    pub overlap: Option<(f64, f64)>,
}

pub fn default_config(id: &str) -> Result<ScenarioConfig> {
    Ok(match id {
        "S1" => ScenarioConfig {
            h: 0.02,
            eps: 0.04,
            eta: 0.00025,
            delta: 0.001,
            n_radius: 0.6,
            nprime_radius: 0.4,
        },
        "S2" => ScenarioConfig {
            h: 0.01,
            eps: 0.05,
            eta: 0.008,
            delta: 0.02,
            n_radius: 2.5,
            nprime_radius: 0.5,
        },
        "S3" => ScenarioConfig {
            h: 0.01,
            eps: 0.01,
            eta: 0.002,
            delta: 0.0045,
            n_radius: 0.5,
            nprime_radius: 0.02,
        },
        "S4" => ScenarioConfig {
            h: 0.02,
            eps: 0.04,
            eta: 0.0001,
            delta: 0.0005,
            n_radius: 0.6,
            nprime_radius: 0.4,
        },
        other => return Err(Error::UnknownScenario(other.into())),
    })
}

pub fn description(id: &str) -> &'static str {
    match id {
        "S1" => "power map w = z^2 on C, potential |z|^2",
        "S2" => "Vieta map C^2 -> Sym^2(C), potential |z1|^2 + |z2|^2",
        "S3" => "Vieta map P1 x P1 -> P2, product Fubini-Study potential",
        "S4" => "identity cover of P1, Fubini-Study plus a cone point",
        _ => "",
    }
}

pub fn build_scenario(id: &str, overrides: &Overrides) -> Result<Scenario> {
    let config = ScenarioConfig::resolve(default_config(id)?, overrides)?;
    match id {
        "S1" => s1(config),
        "S2" => s2(config),
        "S3" => s3(config),
        "S4" => s4(config),
        other => Err(Error::UnknownScenario(other.into())),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `V″ ⋐ V′ ⋐ V` radii for a disk triple between `N′` and `N`.
fn disk_triple_radii(config: &ScenarioConfig) -> Result<(f64, f64, f64)> {
    let gap = config.n_radius - config.nprime_radius;
    let inner = config.nprime_radius + 0.05 * gap;
    let middle = config.n_radius - config.eps - 0.05 * gap;
    if middle <= inner {
        return Err(Error::Infeasible {
            condition: "V″ ⋐ V′".into(),
            detail: format!(
                "mollification radius {} leaves no room between N′ radius {} and N radius {}",
                config.eps, config.nprime_radius, config.n_radius
            ),
            step: None,
        });
    }
    Ok((inner, middle, config.n_radius))
}

fn positivity_levels(h: f64) -> Vec<(f64, f64)> {
    vec![(h, h), (h / 2.0, h / 2.0)]
}

fn s1(config: ScenarioConfig) -> Result<Scenario> {
    let base = 2.0;
    if config.n_radius >= 1.5 {
        return Err(Error::InvalidOverride(format!("n_radius {} must stay below 1.5", config.n_radius)));
    }
    let cover = CoverSpec::power(2, Domain::centered_disk(base))?;
    let up = Domain::centered_disk(1.5);
    let upstairs = KahlerCocycle::single(
        up.clone(),
        ScalarField::new("|z|^2", up, |p| p.coord(0).norm_sqr()).with_smooth_on(Domain::Whole { dim: 1 }),
    )?;
    let (inner, middle, outer) = disk_triple_radii(&config)?;
    let params = SmoothingParams::new(config.eps, config.eta, config.delta)
        .with_quad_order(12)
        .with_h(0.02)
        .with_node_h(0.02);
    let refinement = vec![RefinementTriple::new(
        0,
        Domain::centered_disk(inner),
        Domain::centered_disk(middle),
        Domain::centered_disk(outer),
    )];
    let mass_radius = (config.n_radius + 0.1).max(1.0);
    let mass_disk = Domain::centered_disk(mass_radius);
    let plan = CheckPlan {
        agreement_regions: vec![Some(Domain::annulus(c(0.0, 0.0), config.n_radius, 1.5))],
        agreement_samples: 10_000,
        positivity_regions: vec![Some(Domain::centered_disk((config.n_radius + 0.2).max(1.0)))],
        positivity_levels: positivity_levels(config.h),
        masses: vec![MassProbe::Disk {
            name: "disk".into(),
            chart: 0,
            disk: mass_disk.clone(),
            h: 0.02,
        }],
        mass_tol: 0.01,
    };
    Ok(Scenario {
        id: "S1".into(),
        description: description("S1").into(),
        cover,
        upstairs,
        n: ManifoldSet::affine(Domain::centered_disk(config.n_radius)),
        nprime: ManifoldSet::affine(Domain::centered_disk(config.nprime_radius)),
        params,
        refinement,
        plan,
        c2: Some(C2Probe {
            chart: 0,
            region: Domain::centered_disk(config.nprime_radius),
            h: config.h,
            max_ratio: 1.5,
            raw_min_ratio: Some(1.9),
        }),
        classes: vec![ClassProbe {
            name: "disk".into(),
            probes: vec![MassProbe::Disk {
                name: "disk".into(),
                chart: 0,
                disk: mass_disk,
                h: 0.02,
            }],
            expected: 4.0 * PI * mass_radius,
            rel_tol: 0.01,
        }],
        overlap: None,
        config,
    })
}

/// `s² - 4p`, the discriminant of `t² - st + p`.
fn s2_discriminant(p: &ComplexPoint) -> Complex64 {
    let (s, q) = (p.coord(0), p.coord(1));
    s * s - 4.0 * q
}

/// Level sets of `|D|/2` bound the smoothing sets; the boxes only bind well outside the base.
const S2_LEVEL_SCALE: f64 = 0.2;
const S2_CORE_RADIUS: f64 = 2.2;

fn s2(config: ScenarioConfig) -> Result<Scenario> {
    if config.n_radius > 3.0 {
        return Err(Error::InvalidOverride(format!("n_radius {} must stay at or below 3", config.n_radius)));
    }
    let base = Domain::centered_polydisk(2, 2.0);
    let chart = Domain::centered_polydisk(2, 3.0);
    let cover = CoverSpec::vieta(2, chart)?;
    let up = Domain::centered_polydisk(2, 5.0);
    let upstairs = KahlerCocycle::single(
        up.clone(),
        ScalarField::new("|z1|^2+|z2|^2", up, |p| p.coord(0).norm_sqr() + p.coord(1).norm_sqr())
            .with_smooth_on(Domain::Whole { dim: 2 }),
    )?;
    let gap = config.n_radius - config.nprime_radius;
    let inner = config.nprime_radius + 0.05 * gap;
    let middle = config.nprime_radius + 0.75 * gap;
    let level = sublevel_family("|D|/2", 2, |p| S2_LEVEL_SCALE * s2_discriminant(p).norm());
    let boxed = |s_radius: f64, p_radius: f64, r: f64| {
        Domain::polydisk(vec![c(0.0, 0.0), c(0.0, 0.0)], vec![s_radius, p_radius]).intersect(level(S2_LEVEL_SCALE * r))
    };
    let refinement = vec![RefinementTriple::new(
        0,
        boxed(2.5, 2.6, inner),
        boxed(2.6, 2.7, middle),
        boxed(2.7, 2.8, config.n_radius),
    )
    .with_core(Domain::centered_polydisk(2, S2_CORE_RADIUS))];
    let disc: LevelFn = Arc::new(|p: &ComplexPoint| s2_discriminant(p).norm());
    let params = SmoothingParams::new(config.eps, config.eta, config.delta)
        .with_quad_order(14)
        .with_h(0.01)
        .with_node_h(0.25);
    let plan = CheckPlan {
        agreement_regions: vec![Some(base.clone().intersect(Domain::superlevel("|D|", 2, disc, config.n_radius)))],
        agreement_samples: 10_000,
        positivity_regions: vec![Some(base)],
        positivity_levels: vec![(0.4, config.h), (0.4, config.h / 2.0)],
        masses: vec![MassProbe::Line {
            name: "p=1/4".into(),
            chart: 0,
            origin: ComplexPoint::two(c(0.0, 0.0), c(0.25, 0.0)),
            direction: ComplexPoint::two(c(1.0, 0.0), c(0.0, 0.0)),
            disk: Domain::centered_disk(1.8),
            h: 0.05,
        }],
        mass_tol: 0.01,
    };
    Ok(Scenario {
        id: "S2".into(),
        description: description("S2").into(),
        cover,
        upstairs,
        n: ManifoldSet::affine(boxed(2.7, 2.8, config.n_radius)),
        nprime: ManifoldSet::affine(boxed(2.4, 2.5, config.nprime_radius)),
        params,
        refinement,
        plan,
        c2: None,
        classes: Vec::new(),
        overlap: None,
        config,
    })
}

/// Conic parameter `r = |τ|` of the branch point `(e1, e2) = (2τ, τ²)` in chart 0.
/// The chart 0 and chart 2 caps smooth `r < R0_INNER` and `r > 1/R0_INNER`
/// first; the chart 1 band covers `R1_INNER < r < 1/R1_INNER` last, with
/// quadrature order `S3_BAND_ORDER`.
const S3_R1_INNER: f64 = 0.55;
const S3_R1_MIDDLE: f64 = 0.4;
const S3_R0_INNER: f64 = 0.75;
const S3_R0_MIDDLE: f64 = 0.95;
const S3_BAND_ORDER: usize = 4;

/// `|z1|² + |z2|²` in chart coordinates, the size term that cuts the tube around the conic.
fn s3_size(p: &ComplexPoint) -> f64 {
    p.coord(0).norm_sqr() + p.coord(1).norm_sqr()
}

/// Size of the conic point with parameter modulus `r`, in chart 0 and chart 1.
fn s3_conic_size(chart: usize, r: f64) -> f64 {
    match chart {
        0 => 4.0 * r * r + r.powi(4),
        _ => 0.25 / (r * r) + 0.25 * r * r,
    }
}

/// `V″ ⋐ V′ ⋐ V` in chart `chart` as sublevels of `disc + inner·(size/size_U)^p`,
/// boxed by `bound` plus a pad, where `p` puts the conic ends of `V″` and `V′` at the given sizes.
fn s3_triple(
    cover: &CoverSpec,
    chart: usize,
    (size_inner, size_middle): (f64, f64),
    (inner, middle, outer): (f64, f64, f64),
    bound: f64,
) -> RefinementTriple {
    let power = (middle / inner).ln() / (size_middle / size_inner).ln();
    let cover = cover.clone();
    let family = sublevel_family("disc+size", 2, move |p| {
        discriminant_value(&cover, chart, p) + inner * (s3_size(p) / size_inner).powf(power)
    });
    let boxed = |level: f64, pad: f64| Domain::centered_polydisk(2, bound + pad).intersect(family(level));
    RefinementTriple::new(chart, boxed(inner, 0.0), boxed(middle, 0.1), boxed(outer, 0.2))
}

fn s3(config: ScenarioConfig) -> Result<Scenario> {
    if config.n_radius > 1.0 {
        return Err(Error::InvalidOverride(format!("n_radius {} must stay at or below 1", config.n_radius)));
    }
    let atlas = Atlas::Projective { dim: 2 };
    let chart_domain = Domain::centered_polydisk(2, 3.0);
    let cover = CoverSpec::new(CoverKind::ProjectiveVieta { n: 2 }, vec![chart_domain; 3])?;
    let up = Domain::centered_polydisk(2, 1.2);
    let upstairs = KahlerCocycle::new(
        Atlas::ProjectiveProduct { factors: 2 },
        (0..4)
            .map(|mask| {
                let fs = ScalarField::new("fs x fs", up.clone(), |p| {
                    (1.0 + p.coord(0).norm_sqr()).ln() + (1.0 + p.coord(1).norm_sqr()).ln()
                })
                .with_smooth_on(Domain::Whole { dim: 2 });
                CocycleChart::new(mask, up.clone(), fs)
            })
            .collect(),
    )?;
    let gap = config.n_radius - config.nprime_radius;
    let levels = (
        config.nprime_radius + 0.1 * gap,
        config.nprime_radius + 0.45 * gap,
        config.nprime_radius + 0.9 * gap,
    );
    let band = (s3_conic_size(1, S3_R1_INNER), s3_conic_size(1, S3_R1_MIDDLE));
    let cap = (s3_conic_size(0, S3_R0_INNER), s3_conic_size(0, S3_R0_MIDDLE));
    let params = SmoothingParams::new(config.eps, config.eta, config.delta)
        .with_quad_order(8)
        .with_h(0.01)
        .with_node_h(0.2);
    let refinement = vec![
        s3_triple(&cover, 0, cap, levels, 2.5),
        s3_triple(&cover, 2, cap, levels, 2.5),
        s3_triple(&cover, 1, band, levels, 1.6).with_params(params.clone().with_quad_order(S3_BAND_ORDER)),
    ];
    let unit = Domain::centered_polydisk(2, 1.0);
    let disc_set = |chart: usize, level: f64, above: bool| {
        let cover = cover.clone();
        let f: LevelFn = Arc::new(move |p: &ComplexPoint| discriminant_value(&cover, chart, p));
        let set = if above {
            Domain::superlevel("disc", 2, f, level)
        } else {
            Domain::sublevel("disc", 2, f, level)
        };
        unit.clone().intersect(set)
    };
    let n = ManifoldSet::new(atlas, (0..3).map(|k| disc_set(k, config.n_radius, false)).collect())?;
    let nprime = ManifoldSet::new(atlas, (0..3).map(|k| disc_set(k, config.nprime_radius, false)).collect())?;
    let line = |chart: usize, origin: ComplexPoint, direction: ComplexPoint| MassProbe::Line {
        name: format!("e1=1, chart {chart}"),
        chart,
        origin,
        direction,
        disk: Domain::centered_disk(1.0),
        h: 0.02,
    };
    let lines = vec![
        line(0, ComplexPoint::two(c(1.0, 0.0), c(0.0, 0.0)), ComplexPoint::two(c(0.0, 0.0), c(1.0, 0.0))),
        line(2, ComplexPoint::two(c(0.0, 0.0), c(0.0, 0.0)), ComplexPoint::two(c(1.0, 0.0), c(1.0, 0.0))),
    ];
    let plan = CheckPlan {
        agreement_regions: (0..3).map(|k| Some(disc_set(k, config.n_radius, true))).collect(),
        agreement_samples: 10_000,
        positivity_regions: vec![None, None, None],
        positivity_levels: vec![(0.35, config.h), (0.35, config.h / 2.0)],
        masses: lines.clone(),
        mass_tol: 0.01,
    };
    Ok(Scenario {
        id: "S3".into(),
        description: description("S3").into(),
        cover,
        upstairs,
        n,
        nprime,
        params,
        refinement,
        plan,
        c2: None,
        classes: vec![ClassProbe {
            name: "line".into(),
            probes: lines,
            expected: 8.0 * PI,
            rel_tol: 0.02,
        }],
        overlap: None,
        config,
    })
}

const S4_CENTER: Complex64 = Complex64::new(0.2, 0.0);
const S4_KAPPA: f64 = 0.5;
const S4_CONE_RADIUS: f64 = 0.3;

/// `κ·f(|z - z0|)` with `f(r) = r - r²/(2r0)` inside `r0` and `r0/2` outside.
fn s4_cone(z: Complex64) -> f64 {
    let r = (z - S4_CENTER).norm();
    let f = if r < S4_CONE_RADIUS { r - r * r / (2.0 * S4_CONE_RADIUS) } else { S4_CONE_RADIUS / 2.0 };
    S4_KAPPA * f
}

fn s4(config: ScenarioConfig) -> Result<Scenario> {
    let atlas = Atlas::Projective { dim: 1 };
    if config.n_radius > 0.8 {
        return Err(Error::InvalidOverride(format!("n_radius {} must stay at or below 0.8", config.n_radius)));
    }
    let chart_domain = Domain::centered_disk(2.5);
    let valid = Domain::centered_disk(3.0);
    let phi0 = ScalarField::new("fs+cone", valid.clone(), |p| {
        let z = p.coord(0);
        (1.0 + z.norm_sqr()).ln() + s4_cone(z)
    });
    let phi1 = ScalarField::new("fs+cone", valid, |p| {
        let w = p.coord(0);
        let cone = if w.norm() > 0.0 { s4_cone(w.inv()) } else { S4_KAPPA * S4_CONE_RADIUS / 2.0 };
        (1.0 + w.norm_sqr()).ln() + cone
    });
    let phi0 = phi0.with_smooth_on(
        Domain::annulus(S4_CENTER, 0.0, S4_CONE_RADIUS - 0.01).union(Domain::annulus(S4_CENTER, S4_CONE_RADIUS + 0.01, 10.0)),
    );
    let phi1 = phi1.with_smooth_on(Domain::centered_disk(1.9));
    let upstairs = KahlerCocycle::new(
        atlas,
        vec![
            CocycleChart::new(0, chart_domain.clone(), phi0),
            CocycleChart::new(1, chart_domain.clone(), phi1),
        ],
    )?;
    let cover = CoverSpec::new(CoverKind::Identity { atlas }, vec![chart_domain.clone(), chart_domain])?;
    let (inner, middle, outer) = disk_triple_radii(&config)?;
    let params = SmoothingParams::new(config.eps, config.eta, config.delta)
        .with_quad_order(12)
        .with_h(0.02)
        .with_node_h(0.02);
    let refinement = vec![RefinementTriple::new(
        0,
        Domain::disk(S4_CENTER, inner),
        Domain::disk(S4_CENTER, middle),
        Domain::disk(S4_CENTER, outer),
    )];
    let empty = Domain::Empty { dim: 1 };
    let n = ManifoldSet::new(atlas, vec![Domain::disk(S4_CENTER, config.n_radius), empty.clone()])?;
    let nprime = ManifoldSet::new(atlas, vec![Domain::disk(S4_CENTER, config.nprime_radius), empty])?;
    let mass_disk = Domain::disk(S4_CENTER, 1.0);
    let plan = CheckPlan {
        agreement_regions: vec![
            Some(Domain::annulus(S4_CENTER, config.n_radius, 2.0)),
            Some(Domain::centered_disk(1.0)),
        ],
        agreement_samples: 10_000,
        positivity_regions: vec![Some(Domain::centered_disk(2.0)), Some(Domain::centered_disk(2.0))],
        positivity_levels: positivity_levels(config.h),
        masses: vec![MassProbe::Disk {
            name: "disk".into(),
            chart: 0,
            disk: mass_disk,
            h: 0.02,
        }],
        mass_tol: 0.01,
    };
    Ok(Scenario {
        id: "S4".into(),
        description: description("S4").into(),
        cover,
        upstairs,
        n,
        nprime,
        params,
        refinement,
        plan,
        c2: Some(C2Probe {
            chart: 0,
            region: Domain::disk(S4_CENTER, config.nprime_radius),
            h: config.h,
            max_ratio: 1.5,
            raw_min_ratio: Some(1.9),
        }),
        classes: vec![ClassProbe {
            name: "P1".into(),
            probes: vec![MassProbe::Curve {
                name: "P1".into(),
                curve: Curve::projective_line(),
                quad_order: 8,
            }],
            expected: 4.0 * PI,
            rel_tol: 0.01,
        }],
        overlap: Some((0.1, 0.01)),
        config,
    })
}
