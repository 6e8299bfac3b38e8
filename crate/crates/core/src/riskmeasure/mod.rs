//! Capital requirement `ρ(X) = inf{π(Z) : Z ∈ M, X + Z ∈ A}`: the cheapest
//! eligible payoff that makes a position acceptable.

mod extreal;
mod induced;
mod member;
mod solve;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acceptance::AcceptanceError;
use crate::linprog::LpError;
use crate::market::MarketError;

pub use extreal::ExtReal;
pub use induced::{induced_rho_acceptance, InducedSet};
pub use member::{member_a_plus_ker, member_shifted, Membership};
pub use solve::{
    check_certificate, domain_classify, rho, rho_direct_lp, rho_reduction, rho_var_exact, DomainClass,
    DomainEvidence,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("acceptance set has no polyhedral description")]
    NotPolyhedral,
    #[error("acceptance set is not a VaR scenario union")]
    NotScenarioUnion,
    #[error("{n} states exceed the enumeration limit of {limit}")]
    EnumerationTooLarge { n: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid options: {0}")]
    BadOptions(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Acceptance(#[from] AcceptanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    DirectLp,
    VarEnumeration,
    Reduction,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub lp_solves: usize,
    pub membership_calls: usize,
    pub bracket_steps: usize,
    pub bisection_steps: usize,
    pub subsets: usize,
    /// Some membership answer came from the grid search and may be a
    /// false negative.
    pub approximate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskResult {
    pub value: ExtReal,
    /// Eligible payoff `Z` with `X + Z ∈ A`. When not attained it is a
    /// feasible payoff whose price is within the bracket width of `value`.
    pub optimal_payoff: Option<Vec<f64>>,
    pub attained: bool,
    pub strategy: Strategy,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub m_bracket_init: f64,
    pub m_bracket_max: f64,
    pub bisect_tol: f64,
    /// Bound on kernel coordinates for the grid strategy.
    pub kernel_box: f64,
    /// Grid points per kernel axis.
    pub kernel_grid: usize,
    /// Largest state count for VaR subset enumeration.
    pub n_enum: usize,
    /// Fall back to the grid strategy for VaR sets with more than `n_enum`
    /// states instead of failing.
    pub allow_approximate: bool,
    /// Slack on acceptance constraints in membership LPs.
    pub member_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            m_bracket_init: 1.0,
            m_bracket_max: 2f64.powi(40),
            bisect_tol: 1e-7,
            kernel_box: 1e3,
            kernel_grid: 33,
            n_enum: 16,
            allow_approximate: false,
            member_tol: 1e-9,
        }
    }
}

impl SolveOptions {
    pub fn check(&self) -> Result<(), RiskError> {
        let positive = [
            self.m_bracket_init,
            self.m_bracket_max,
            self.bisect_tol,
            self.kernel_box,
            self.member_tol,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0);
        if !positive || self.kernel_grid < 2 || self.n_enum == 0 || self.n_enum > 30 {
            return Err(RiskError::BadOptions("values must be positive".into()));
        }
        if self.bisect_tol >= 1.0 {
            return Err(RiskError::BadOptions("bisect_tol must be below 1".into()));
        }
        if self.m_bracket_init > self.m_bracket_max {
            return Err(RiskError::BadOptions("m_bracket_init exceeds m_bracket_max".into()));
        }
        Ok(())
    }
}
