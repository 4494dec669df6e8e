//! Numerical and exact-arithmetic toolkit for curvature inequalities of
//! hypersurfaces in hyperbolic space.
//!
//! The crate has four layers:
//!
//! * [`symfunc`] — elementary symmetric functions of principal-curvature
//!   vectors, the associated inequality margins, and brute-force
//!   Kronecker-delta / permutation-sum oracles in exact rational arithmetic.
//! * [`geometry`] — discretized radial-graph hypersurfaces (exact geodesic
//!   spheres, axisymmetric profiles in any dimension, full lat-long grids in
//!   `H^3`), their shape operators, curvature integrals and
//!   quermassintegrals.
//! * [`flow`] — explicit time integration of the inverse curvature flow with
//!   monotonicity and umbilicity diagnostics.
//! * [`verify`] — inequality reports over generated sample families, plus the
//!   round-sphere reference constants.
//!
//! All core math is generic over the scalar type: `f64`/`f32` for the fast
//! path and `BigRational` for the exact path. Concrete aliases for the two
//! working types live at the crate root.

pub mod combo;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod scalar;
pub mod symfunc;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar, Tolerances};

pub use num_rational::BigRational;

/// Principal-curvature vector over `f64`.
pub type CurvatureVector64 = symfunc::CurvatureVector<f64>;
/// Principal-curvature vector in exact rational arithmetic.
pub type RationalCurvatureVector = symfunc::CurvatureVector<BigRational>;
/// Symmetric-function table over `f64`.
pub type SymTable64 = symfunc::SymTable<f64>;
/// Symmetric-function table in exact rational arithmetic.
pub type RationalSymTable = symfunc::SymTable<BigRational>;
/// Radial-graph hypersurface over `f64`.
pub type Hypersurface64 = geometry::GraphHypersurface<f64>;
/// Flow state over `f64`.
pub type FlowState64 = flow::FlowState<f64>;
