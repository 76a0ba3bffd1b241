//! Shipped scenarios and the checks that turn their conclusions into pass/fail results.

pub mod registry;
pub mod report;
pub mod run;
pub mod verify;

pub use report::{Check, CheckStatus, Comparison, VerificationReport};
pub use verify::{mass_change, positivity, refinement_ratio, region_samples, sup_laplacian, verify_agreement, SAMPLE_SEED};
pub use registry::{build_scenario, default_config, description, C2Probe, ClassProbe, Overrides, Scenario, ScenarioConfig, SCENARIO_IDS};
pub use run::{dump_fields, run_scenario, ScenarioRun, OVERLAP_TOLERANCE};
