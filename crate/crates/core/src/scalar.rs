//! Scalar abstractions: one trait for ring/field arithmetic shared by the
//! float and exact-rational paths, and a stricter trait for the geometry
//! layer, which needs transcendental functions.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Arithmetic required by the symmetric-function layer.
///
/// Implemented for `f32`, `f64` (fast path) and [`BigRational`] (exact path).
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + 'static
{
    /// True when arithmetic is exact and tolerances default to zero.
    const EXACT: bool;

    fn is_finite_val(&self) -> bool {
        true
    }

    /// Small signed integer, infallible for every scalar used here.
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("small integer representable")
    }

    /// Unsigned combinatorial count (binomials, factorials).
    fn from_count(v: u128) -> Self {
        Self::from_u128(v).expect("combinatorial count representable")
    }

    /// Lossy view for messages and reports.
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn is_finite_val(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn is_finite_val(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
}

/// Scalars usable by the geometry and flow layers: floating point with the
/// full transcendental repertoire.
pub trait Real: Scalar + Float + FloatConst + std::iter::Sum + Copy {
    fn from_f(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Tolerance bundle used by cone checks, equality flags and division guards.
///
/// The float path defaults to the documented values (cone 1e-9, relative
/// equality 1e-10, division guard 1e-12); the exact path uses zeros.
#[derive(Debug, Clone)]
pub struct Tolerances<S> {
    /// Slack admitted in cone membership tests (`kappa_min >= 1 - cone`).
    pub cone: S,
    /// Relative tolerance for equality flags on inequality margins.
    pub equality_rel: S,
    /// Guard below which quotients refuse to divide.
    pub eps_div: S,
}

impl<S: Scalar> Tolerances<S> {
    pub fn exact() -> Self {
        Tolerances {
            cone: S::zero(),
            equality_rel: S::zero(),
            eps_div: S::zero(),
        }
    }

    pub fn with_cone(mut self, cone: S) -> Self {
        self.cone = cone;
        self
    }
}

impl<S: Scalar> Default for Tolerances<S> {
    fn default() -> Self {
        if S::EXACT {
            Self::exact()
        } else {
            Tolerances {
                cone: S::from_f64(1e-9).expect("tolerance representable"),
                equality_rel: S::from_f64(1e-10).expect("tolerance representable"),
                eps_div: S::from_f64(1e-12).expect("tolerance representable"),
            }
        }
    }
}
