//! Branched covers with explicit charts: fibers, pushforward and discriminants.

pub mod discriminant;
pub mod pushforward;
pub mod roots;
pub mod spec;

pub use discriminant::discriminant_value;
pub use pushforward::{check_fiber_containment, lift_potential, pushforward, pushforward_chart};
pub use roots::{cluster, monic_roots, quadratic_roots};
pub use spec::{binary_form_coefficients, elementary_symmetric, CoverKind, CoverSpec, Fiber, FiberPoint, CLUSTER_TOLERANCE};
