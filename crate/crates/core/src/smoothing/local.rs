use serde::Serialize;

use super::opens::{shift_value, NestedOpens};
use super::params::{validate_params, CheckedParams, SmoothingParams};
use crate::error::{Error, Result};
use crate::geometry::{halton, sample_grid, ComplexPoint, Domain, Grid, ScalarField};
use crate::psh::{generalized_max_eigenvalue, levi_form, mollify, regmax::reg_max_unchecked, MollifierRule, RegMaxKernel};

const CONTAINMENT_SAMPLES: u64 = 512;

/// Quantities measured on the lattices of one local smoothing step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalMeasurements {
    /// Smallest Levi eigenvalue of the input over `V∖U`, away from its singular set.
    pub margin: f64,
    /// `max(sup_{V∖U} |φ_ε - φ|, sup_U (φ - φ_ε)^+)`.
    pub tau: f64,
    /// `m · sup λ` where `λ` is the top eigenvalue of `-Lσ` relative to `Lφ` on `V∖U`.
    pub k_sigma: f64,
    pub nodes: usize,
}

/// Lattice nodes of `region` whose axis stencils of reach `reach` stay inside `within`.
pub fn stencil_grid(region: &Domain, within: &Domain, node_h: f64, reach: f64) -> Result<Grid> {
    sample_grid(region, node_h)?.filter("stencil reach", |p| {
        within.contains(p)
            && (0..2 * p.dim()).all(|k| within.contains(&p.shifted(k, reach)) && within.contains(&p.shifted(k, -reach)))
    })
}

/// Checks that every mollifier node around sampled points of `V` lies in `W`.
pub fn check_mollifier_reach(opens: &NestedOpens, phi: &ScalarField, params: &SmoothingParams) -> Result<()> {
    let rule = MollifierRule::new(opens.dim(), params.quad_order)?;
    let bbox = opens
        .v
        .bounding_box()
        .ok_or_else(|| Error::Unbounded(opens.v.describe()))?;
    let dims = bbox.center.len();
    let reach_target = opens.w.clone().intersect(phi.valid_on().clone());
    for k in 0..CONTAINMENT_SAMPLES {
        let t = halton(k, dims, 5);
        let reals: Vec<f64> = (0..dims)
            .map(|d| bbox.center[d] + bbox.half_widths[d] * (2.0 * t[d] - 1.0))
            .collect();
        let p = ComplexPoint::from_reals(&reals)?;
        if !opens.v.contains(&p) {
            continue;
        }
        if let Some(bad) = rule.offsets().find(|o| !reach_target.contains(&p.offset_by(o, params.eps))) {
            return Err(Error::DomainTooSmall {
                domain: reach_target.describe(),
                what: format!(
                    "mollification radius {} around {:?} reaches {:?}",
                    params.eps,
                    reals,
                    p.offset_by(bad, params.eps).to_reals()
                ),
            });
        }
    }
    Ok(())
}

/// Measures the psh margin of `phi` on `W`, the mollification distance `τ`
/// and the relative Hessian bound of the shift profile.
pub fn measure(phi: &ScalarField, opens: &NestedOpens, params: &SmoothingParams) -> Result<LocalMeasurements> {
    check_mollifier_reach(opens, phi, params)?;
    let h = params.h;
    let region = match &opens.core {
        Some(core) => opens.v.clone().intersect(core.clone()),
        None => opens.v.clone(),
    };
    let grid = stencil_grid(&region, phi.valid_on(), params.node_h, 2.0 * h)?;
    let phi_w = phi.restrict(opens.w.clone());
    let phi_eps = mollify(&phi_w, params.eps, params.quad_order)?;
    let kernel = RegMaxKernel::standard();
    let sigma = opens.shift_profile();

    let mut margin = f64::INFINITY;
    let mut tau: f64 = 0.0;
    let mut lambda: f64 = 0.0;
    for p in grid.nodes() {
        if !opens.v.contains(p) {
            continue;
        }
        let diff = phi_eps.eval(p)? - phi.eval(p)?;
        if opens.u.contains(p) {
            tau = tau.max(-diff);
        } else {
            tau = tau.max(diff.abs());
            if near_singular(phi, p, h) {
                continue;
            }
            let l_phi = levi_form(phi, p, h)?;
            margin = margin.min(l_phi.min_eigenvalue());
            let s = shift_value(&opens.u, &opens.v, &kernel, p);
            if s > -1.0 {
                let l_sigma = levi_form(&sigma, p, h)?;
                let minus = -l_sigma.entries;
                match generalized_max_eigenvalue(&l_phi.entries, &minus) {
                    Some(l) => lambda = lambda.max(l),
                    None => lambda = f64::INFINITY,
                }
            }
        }
    }
    let k_sigma = if margin > 0.0 { margin * lambda } else { f64::INFINITY };
    Ok(LocalMeasurements {
        margin,
        tau,
        k_sigma,
        nodes: grid.len(),
    })
}

/// Whether the first-order distance from `p` to the complement of
/// `phi.smooth_on()` is below `2h`, so that an FD stencil may straddle it.
fn near_singular(phi: &ScalarField, p: &ComplexPoint, h: f64) -> bool {
    let Some(smooth) = phi.smooth_on() else {
        return false;
    };
    let m = smooth.margin(p);
    if m <= 0.0 {
        return true;
    }
    let grad2: f64 = (0..2 * p.dim())
        .map(|k| {
            let d = (smooth.margin(&p.shifted(k, h)) - smooth.margin(&p.shifted(k, -h))) / (2.0 * h);
            if d.is_finite() { d * d } else { 0.0 }
        })
        .sum();
    m < 2.0 * h * grad2.sqrt()
}

/// Measures, fills in `tau_bound` and `k_sigma`, and validates.
pub fn prepare(phi: &ScalarField, opens: &NestedOpens, params: &SmoothingParams) -> Result<(CheckedParams, LocalMeasurements)> {
    let m = measure(phi, opens, params)?;
    let filled = params.clone().with_tau_bound(m.tau).with_k_sigma(m.k_sigma);
    Ok((validate_params(m.margin, &filled)?, m))
}

/// `ψ = M_η(φ, φ_ε + 2δσ)` on `V`, and `φ` itself elsewhere on `W`.
///
/// Points outside `V` return `phi(p)` unchanged, so `ψ` agrees with `φ` bit
/// for bit there.
pub fn local_smooth(phi: &ScalarField, opens: &NestedOpens, checked: &CheckedParams) -> Result<ScalarField> {
    let params = checked.params();
    if phi.dim() != opens.dim() {
        return Err(Error::DimensionMismatch {
            expected: opens.dim(),
            got: phi.dim(),
        });
    }
    check_mollifier_reach(opens, phi, params)?;
    let phi_w = phi.restrict(opens.w.clone());
    let phi_eps = mollify(&phi_w, params.eps, params.quad_order)?;
    let kernel = RegMaxKernel::standard();
    let (eta, delta) = (params.eta, params.delta);
    let (u, v) = (opens.u.clone(), opens.v.clone());
    let f = phi.clone();
    let valid = phi.valid_on().clone().intersect(opens.w.clone());
    let smooth = match phi.smooth_on() {
        Some(s) => s.clone().intersect(opens.w.clone()).union(opens.u.clone()),
        None => opens.u.clone(),
    };
    let psi = ScalarField::try_new(format!("smooth({})", phi.label()), valid, move |p| {
        let base = f.eval(p)?;
        if !v.contains(p) {
            return Ok(base);
        }
        let lifted = phi_eps.eval(p)? + 2.0 * delta * shift_value(&u, &v, &kernel, p);
        Ok(reg_max_unchecked(base, lifted, eta, &kernel))
    });
    Ok(psi.with_smooth_on(smooth))
}
