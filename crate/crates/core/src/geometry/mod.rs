//! Points, domains, grids, scalar fields and the discrete operators built on them.

pub mod atlas;
pub mod curve;
pub mod domain;
pub mod field;
pub mod grid;
pub mod operators;
pub mod point;
pub mod quadrature;

pub use atlas::{best_projective_chart, projective_chart, projective_lift, Atlas};
pub use curve::{curve_mass, Curve, CurvePatch, ParamRegion};
pub use domain::{BoundingBox, Domain, LevelFn, LevelSet, PointMap};
pub use field::{Evaluator, ScalarField};
pub use grid::{sample_grid, Grid};
pub use operators::{discrete_laplacian, mass_integral, rect_disk_area};
pub use point::{ComplexPoint, Coords};
pub use quadrature::{halton, radical_inverse, GaussLegendre};
