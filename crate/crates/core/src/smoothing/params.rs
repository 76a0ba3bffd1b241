use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of one local smoothing step.
///
/// `tau_bound` and `k_sigma` are measured quantities. They start at zero and
/// are filled in by [`crate::smoothing::measure`] before validation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingParams {
    /// Mollification radius.
    pub eps: f64,
    /// Width of the regularized maximum.
    pub eta: f64,
    /// Amplitude of the shift profile.
    pub delta: f64,
    /// Gauss-Legendre order per real axis of the mollifier rule.
    pub quad_order: usize,
    /// Finite-difference step for Levi forms.
    pub h: f64,
    /// Spacing of the measurement lattices.
    pub node_h: f64,
    /// Bound on how far mollification moves the potential.
    pub tau_bound: f64,
    /// Hessian bound of the shift profile, relative to the potential's Levi form.
    pub k_sigma: f64,
}

impl SmoothingParams {
    pub fn new(eps: f64, eta: f64, delta: f64) -> Self {
        Self {
            eps,
            eta,
            delta,
            quad_order: 8,
            h: 0.02,
            node_h: 0.02,
            tau_bound: 0.0,
            k_sigma: 0.0,
        }
    }

    pub fn with_quad_order(mut self, order: usize) -> Self {
        self.quad_order = order;
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_node_h(mut self, node_h: f64) -> Self {
        self.node_h = node_h;
        self
    }

    pub fn with_tau_bound(mut self, tau: f64) -> Self {
        self.tau_bound = tau;
        self
    }

    pub fn with_k_sigma(mut self, k: f64) -> Self {
        self.k_sigma = k;
        self
    }
}

/// Parameters that passed [`validate_params`] for a given psh margin, with
/// the slack left in each inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckedParams {
    params: SmoothingParams,
    pub margin: f64,
    pub tau_slack: f64,
    pub eta_slack: f64,
    pub absorption_slack: f64,
}

impl CheckedParams {
    pub fn params(&self) -> &SmoothingParams {
        &self.params
    }
}

fn infeasible(condition: &str, detail: String) -> Error {
    Error::Infeasible {
        condition: condition.into(),
        detail,
        step: None,
    }
}

/// Checks, in order, `m > 0`, `tau_bound < delta`, `eta ≤ delta/2` and
/// `2·delta·k_sigma < m/2`. The first violated condition is named in the error.
pub fn validate_params(m: f64, params: &SmoothingParams) -> Result<CheckedParams> {
    for (name, value) in [("eps", params.eps), ("eta", params.eta), ("delta", params.delta), ("h", params.h), ("node_h", params.node_h)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")));
        }
    }
    if params.quad_order == 0 {
        return Err(Error::InvalidParameter("quad_order must be positive".into()));
    }
    if !(params.tau_bound >= 0.0) || !(params.k_sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tau_bound and k_sigma must be non-negative, got {} and {}",
            params.tau_bound, params.k_sigma
        )));
    }
    if !(m > 0.0) {
        return Err(infeasible("m > 0", format!("measured psh margin m={m}")));
    }
    if !(params.tau_bound < params.delta) {
        return Err(infeasible(
            "tau_bound < delta",
            format!("tau_bound={}, delta={}", params.tau_bound, params.delta),
        ));
    }
    if !(params.eta <= params.delta / 2.0) {
        return Err(infeasible(
            "eta ≤ delta/2",
            format!("eta={}, delta/2={}", params.eta, params.delta / 2.0),
        ));
    }
    let absorbed = 2.0 * params.delta * params.k_sigma;
    if !(absorbed < m / 2.0) {
        return Err(infeasible(
            "2·delta·K_sigma < m/2",
            format!("2·delta·K_sigma={absorbed}, m/2={}", m / 2.0),
        ));
    }
    Ok(CheckedParams {
        params: params.clone(),
        margin: m,
        tau_slack: params.delta - params.tau_bound,
        eta_slack: params.delta / 2.0 - params.eta,
        absorption_slack: m / 2.0 - absorbed,
    })
}
