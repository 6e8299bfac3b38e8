//! Capital requirements over a finite-state one-period market.
//!
//! A position `X ∈ R^n` is acceptable when it lies in an acceptance set `A`;
//! the risk measure `ρ(X) = inf{π(Z) : Z ∈ M, X + Z ∈ A}` is the cheapest
//! eligible payoff that makes it so. The crate computes `ρ` by linear
//! programming, by VaR subset enumeration and by a one-dimensional search
//! along the numéraire, classifies infinite values, and checks the
//! structural properties of `ρ` on random instances.

pub mod acceptance;
pub mod directional;
pub mod fixtures;
pub mod linalg;
pub mod linprog;
pub mod market;
pub mod riskmeasure;
pub mod scalar;
pub mod verify;

use num_rational::BigRational;

pub use acceptance::{AcceptanceError, AcceptanceSet, ConfidenceLevel};
pub use market::{validate_market, Market, MarketError, ScenarioSpace, ValidatedMarket};
pub use riskmeasure::{rho, ExtReal, RiskError, RiskResult, SolveOptions};
pub use scalar::Scalar;

/// Scalar used by the market, acceptance and risk measure layers.
pub type Real = f64;

/// Floating point linear program.
pub type LpProblemF64 = linprog::LpProblem<f64>;

/// Exact rational linear program.
pub type LpProblemExact = linprog::LpProblem<BigRational>;

pub type LpOutcomeF64 = linprog::LpOutcome<f64>;

pub type LpOutcomeExact = linprog::LpOutcome<BigRational>;
