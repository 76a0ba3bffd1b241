//! Local smoothing, finite gluing over a refinement, and the smoothed pushforward.

pub mod cocycle;
pub mod glue;
pub mod local;
pub mod opens;
pub mod params;
pub mod pipeline;

pub use cocycle::{CocycleChart, KahlerCocycle};
pub use glue::{global_glue, GlueStep, GluingCorrection, ManifoldSet, RefinementTriple};
pub use local::{check_mollifier_reach, local_smooth, measure, prepare, stencil_grid, LocalMeasurements};
pub use opens::{sublevel_family, NestedOpens};
pub use params::{validate_params, CheckedParams, SmoothingParams};
pub use pipeline::{probe_mass, pushforward_cocycle, smooth_pushforward, CheckPlan, MassProbe, PushforwardOutcome};
