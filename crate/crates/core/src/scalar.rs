//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the solver is generic over.
///
/// Implemented for `f64` (the reference precision) and `f32`. Tolerances are
/// per-type: the 1e-12 simplex checks only make sense in double precision.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance for row-stochasticity and simplex checks.
    const SIMPLEX_TOL: f64;
    /// Sup-norm distance under which two strategy tables are treated as equal.
    const DEDUP_TOL: f64;
    /// Slack allowed when a best response appears to lose to the evaluated strategy.
    const CONSISTENCY_TOL: f64;

    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn simplex_tol() -> Self {
        Self::lit(Self::SIMPLEX_TOL)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const SIMPLEX_TOL: f64 = 1e-12;
    const DEDUP_TOL: f64 = 1e-9;
    const CONSISTENCY_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const SIMPLEX_TOL: f64 = 1e-5;
    const DEDUP_TOL: f64 = 1e-6;
    const CONSISTENCY_TOL: f64 = 1e-3;
}

/// Sum of a slice, accumulated left to right.
pub(crate) fn sum<T: Scalar>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, &v| acc + v)
}
