//! Acceptance sets: monotone sets of positions containing `0`, deemed
//! acceptable by a regulator.

mod descriptor;
mod polyhedron;
mod quantile;
mod set;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::ScenarioSpace;

pub use descriptor::AcceptanceDescriptor;
pub use polyhedron::Polyhedron;
pub use quantile::{average_value_at_risk, value_at_risk};
pub use set::{
    augmented, avar_acceptance, cone_plus_span, halfspace_acceptance, intersect, oracle_acceptance,
    polyhedral_acceptance, polyhedron_acceptance, positive_cone, positive_cone_dim, var_acceptance,
    var_acceptance_with, AcceptanceSet, MemberFn, ScenarioUnion, SetFlags, Shape, TieRule, TriState,
    ACCEPT_TOL,
};
pub(crate) use set::induced_acceptance;
pub use validate::{validate_acceptance, AcceptanceReport, Counterexample, FlagCheck};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AcceptanceError {
    #[error("confidence level {0} is not in (0, 1)")]
    BadAlpha(f64),
    #[error("bad halfspace normal: {0}")]
    BadNormal(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty list of acceptance sets")]
    Empty,
    #[error("invalid acceptance set: {0}")]
    Invalid(String),
    #[error("cannot parse acceptance descriptor: {0}")]
    Parse(String),
}

/// `α ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConfidenceLevel(f64);

impl ConfidenceLevel {
    pub fn new(alpha: f64) -> Result<Self, AcceptanceError> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(AcceptanceError::BadAlpha(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ConfidenceLevel {
    type Error = AcceptanceError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<ConfidenceLevel> for f64 {
    fn from(a: ConfidenceLevel) -> f64 {
        a.0
    }
}

/// `VaR_α(X) = inf{m : P(X + m < 0) <= α}`.
pub fn compute_var(space: &ScenarioSpace, x: &[f64], alpha: ConfidenceLevel) -> f64 {
    assert_eq!(x.len(), space.n(), "position has wrong length");
    value_at_risk(space.probs(), x, &alpha.value())
}

/// `AVaR_α(X) = (1/α) ∫_0^α VaR_s(X) ds`.
pub fn compute_avar(space: &ScenarioSpace, x: &[f64], alpha: ConfidenceLevel) -> f64 {
    assert_eq!(x.len(), space.n(), "position has wrong length");
    average_value_at_risk(space.probs(), x, &alpha.value())
}

#[cfg(test)]
mod tests;
