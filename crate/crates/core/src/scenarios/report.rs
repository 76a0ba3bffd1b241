use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// How a check's value is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value ≤ tol`
    Le,
    /// `value < tol`
    Lt,
    /// `value ≥ tol`
    Ge,
    /// `value > tol`
    Gt,
}

impl Comparison {
    pub fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Comparison::Le => value <= tol,
            Comparison::Lt => value < tol,
            Comparison::Ge => value >= tol,
            Comparison::Gt => value > tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub cmp: Comparison,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, cmp: Comparison, tol: f64) -> Self {
        let pass = value.is_finite() && cmp.holds(value, tol);
        Self {
            name: name.into(),
            value: if value.is_finite() { value } else { f64::MAX },
            tol,
            pass,
            cmp,
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: None,
        }
    }

    /// A check that could not be evaluated; it counts as a failure.
    pub fn failed(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: 0.0,
            tol: 0.0,
            pass: false,
            cmp: Comparison::Le,
            status: CheckStatus::Fail,
            detail: Some(detail.into()),
        }
    }

    pub fn not_applicable(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: 0.0,
            tol: 0.0,
            pass: true,
            cmp: Comparison::Le,
            status: CheckStatus::NotApplicable,
            detail: Some(detail.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Whether `pass` and `status` agree with `value`, `cmp` and `tol`.
    pub fn is_consistent(&self) -> bool {
        match self.status {
            CheckStatus::NotApplicable => self.pass,
            CheckStatus::Fail => !self.pass && (self.detail.is_some() || !self.cmp.holds(self.value, self.tol)),
            CheckStatus::Pass => self.pass && self.cmp.holds(self.value, self.tol),
        }
    }
}

/// Outcome of one scenario run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub env: BTreeMap<String, Value>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            env: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn set_param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.into(), serde_json::to_value(value).expect("serializable parameter"));
    }

    pub fn set_env(&mut self, key: &str, value: impl Serialize) {
        self.env.insert(key.into(), serde_json::to_value(value).expect("serializable environment entry"));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("malformed report: {e}")))
    }

    /// Names of the checks whose fields disagree, plus `"pass"` if the overall
    /// flag is not the conjunction of the individual ones.
    pub fn inconsistencies(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.is_consistent())
            .map(|c| c.name.clone())
            .collect();
        if self.pass != self.checks.iter().all(|c| c.pass) {
            out.push("pass".into());
        }
        out
    }
}
