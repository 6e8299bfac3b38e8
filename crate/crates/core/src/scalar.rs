//! Scalar abstraction shared by the LP kernel and the quantile functionals.
//!
//! Floating types carry small positive default tolerances; exact types
//! (rationals) use zero tolerances so every comparison is decided exactly.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field element usable by the simplex kernel.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and tolerances are zero.
    const EXACT: bool;

    /// Entries at or below this magnitude are never used as pivots.
    fn default_pivot_tol() -> Self;

    /// Residual allowed on constraints and bounds of a reported solution.
    fn default_feas_tol() -> Self;

    /// Slack used when comparing accumulated probabilities to a level.
    fn probability_slack() -> Self;

    /// Lossy conversion from an `f64` literal. Panics on non-finite input.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn is_finite_value(&self) -> bool;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn default_pivot_tol() -> Self {
        1e-10
    }

    fn default_feas_tol() -> Self {
        1e-8
    }

    fn probability_slack() -> Self {
        1e-12
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn default_pivot_tol() -> Self {
        1e-6
    }

    fn default_feas_tol() -> Self {
        1e-4
    }

    fn probability_slack() -> Self {
        1e-6
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn default_pivot_tol() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }

    fn default_feas_tol() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }

    fn probability_slack() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Builds an exact rational `num / den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}
