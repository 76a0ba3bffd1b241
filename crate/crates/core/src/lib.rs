//! Smoothing of pushed-forward Kähler potentials along branched covers.
//!
//! A Kähler potential cocycle upstairs is pushed forward by summing over
//! fibers, smoothed near the branch locus with mollification and the
//! regularized maximum, and glued chart by chart. Every conclusion is
//! checked numerically: Levi forms by finite differences, cohomology by
//! mass integrals.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covers;
pub mod error;
pub mod geometry;
pub mod psh;
pub mod scenarios;
pub mod smoothing;

pub use error::{Error, Result};
pub use geometry::{ComplexPoint, Domain, Grid, ScalarField};
