use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the domain of `{field}`")]
    OutOfDomain { field: String, point: Vec<f64> },

    #[error("finite-difference stencil around {point:?} leaves the domain of `{field}`")]
    StencilOutOfDomain { field: String, point: Vec<f64> },

    #[error("grid over `{domain}` with spacing {spacing} has no nodes")]
    EmptyGrid { domain: String, spacing: f64 },

    #[error("domain `{0}` is unbounded; a bounding box is required")]
    Unbounded(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation `{op}` does not support dimension {dim}")]
    UnsupportedDimension { op: &'static str, dim: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain `{domain}` is too small for {what}")]
    DomainTooSmall { domain: String, what: String },

    #[error("domains `{0}` and `{1}` do not overlap")]
    DisjointDomains(String, String),

    #[error("polynomial root solver failed: {0}")]
    RootSolver(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("parameter infeasibility{}: {condition} violated ({detail})", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Infeasible {
        condition: String,
        detail: String,
        step: Option<usize>,
    },

    #[error("potential `{field}` is not strictly plurisubharmonic: grid margin {margin:e}")]
    NotStrictlyPsh { field: String, margin: f64 },

    #[error("fiber containment violated: {0}")]
    FiberContainment(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid scenario override: {0}")]
    InvalidOverride(String),
}

impl Error {
    pub(crate) fn at_step(self, index: usize) -> Self {
        match self {
            Error::Infeasible {
                condition, detail, ..
            } => Error::Infeasible {
                condition,
                detail,
                step: Some(index),
            },
            other => other,
        }
    }
}
