//! One-period market of eligible assets.
//!
//! Asset `i` costs `prices[i]` today and pays `payoffs[i][ω]` in state `ω`.
//! The payoffs span the space `M` of eligible payoffs; the linear price of a
//! payoff is the cost of any portfolio replicating it. Row 0 is the secure
//! asset (price 1, payoff 1 in every state) unless the market is explicitly
//! declared without one, in which case a numéraire payoff must be supplied.

mod arbitrage;
mod json;
mod space;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, dot, matrix_from_rows, sup_norm};
use crate::linprog::LpError;

pub use arbitrage::{check_monotone_pricing, check_no_arbitrage, ArbitrageKind, ArbitrageReport, MonotonePricing};
pub use json::{MarketFile, StateEntry, AssetEntry};
pub use space::ScenarioSpace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("eligible payoffs are linearly dependent (rank {rank} < {assets} assets)")]
    RankDeficient { rank: usize, assets: usize },
    #[error("asset 0 is not the secure asset: {0}")]
    BadSecureAsset(String),
    #[error("bad numeraire: {0}")]
    BadNumeraire(String),
    #[error("payoff is not eligible (distance to M is {residual:e})")]
    NotInSpan { residual: f64 },
    #[error("invalid market: {0}")]
    Invalid(String),
    #[error("cannot parse market: {0}")]
    Parse(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Unvalidated market data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Market {
    pub space: ScenarioSpace,
    pub names: Vec<String>,
    pub prices: Vec<f64>,
    /// One row per asset, one column per state.
    pub payoffs: Vec<Vec<f64>>,
    /// Caller-chosen numéraire payoff `U`; the constant one payoff if absent.
    pub numeraire: Option<Vec<f64>>,
    /// Whether row 0 is required to be the secure asset.
    pub secure_asset: bool,
}

impl Market {
    /// Market whose asset 0 is the secure asset. `risky` holds
    /// `(price, payoff)` for the remaining assets.
    pub fn with_secure_asset(space: ScenarioSpace, risky: &[(f64, Vec<f64>)]) -> Self {
        let n = space.n();
        let mut names = vec!["secure".to_string()];
        let mut prices = vec![1.0];
        let mut payoffs = vec![vec![1.0; n]];
        for (i, (price, payoff)) in risky.iter().enumerate() {
            names.push(format!("asset{}", i + 1));
            prices.push(*price);
            payoffs.push(payoff.clone());
        }
        Self {
            space,
            names,
            prices,
            payoffs,
            numeraire: None,
            secure_asset: true,
        }
    }

    /// Market without a secure asset; the numéraire is mandatory.
    pub fn general(
        space: ScenarioSpace,
        assets: &[(f64, Vec<f64>)],
        numeraire: Vec<f64>,
    ) -> Self {
        Self {
            space,
            names: (0..assets.len()).map(|i| format!("asset{i}")).collect(),
            prices: assets.iter().map(|a| a.0).collect(),
            payoffs: assets.iter().map(|a| a.1.clone()).collect(),
            numeraire: Some(numeraire),
            secure_asset: false,
        }
    }

    pub fn n_states(&self) -> usize {
        self.space.n()
    }

    pub fn n_assets(&self) -> usize {
        self.prices.len()
    }

    /// Payoff of the portfolio `x`.
    pub fn payoff_of(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.n_states()];
        for (xi, row) in x.iter().zip(&self.payoffs) {
            linalg::axpy(*xi, row, &mut z);
        }
        z
    }

    /// Cost of the portfolio `x`.
    pub fn cost_of(&self, x: &[f64]) -> f64 {
        dot(&self.prices, x)
    }
}

/// Market that passed validation, with `M`, `ker π` and `U` precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedMarket {
    market: Market,
    /// Orthonormal basis of `M`, one vector per row.
    m_basis: DMatrix<f64>,
    /// Representer `w ∈ M` of the price: `π(Z) = w·Z` on `M`.
    price_vector: Vec<f64>,
    /// Coordinates of `w` in `m_basis`.
    price_covector: Vec<f64>,
    /// Orthonormal basis of `ker π`, `dim M - 1` vectors.
    kernel: Vec<Vec<f64>>,
    numeraire: Vec<f64>,
    payoff_matrix: DMatrix<f64>,
}

/// Default tolerance for validation and pricing.
pub const MARKET_TOL: f64 = 1e-9;

/// Checks the market invariants and precomputes the eligible space.
pub fn validate_market(raw: Market, tol: f64) -> Result<ValidatedMarket, MarketError> {
    let n = raw.n_states();
    let assets = raw.n_assets();
    if raw.payoffs.len() != assets || raw.names.len() != assets {
        return Err(MarketError::Invalid(format!(
            "{assets} prices, {} payoff rows, {} names",
            raw.payoffs.len(),
            raw.names.len()
        )));
    }
    if let Some(row) = raw.payoffs.iter().position(|r| r.len() != n) {
        return Err(MarketError::Invalid(format!(
            "payoff of asset {row} has {} entries, expected {n}",
            raw.payoffs[row].len()
        )));
    }
    let all_finite = raw.prices.iter().all(|v| v.is_finite())
        && raw.payoffs.iter().flatten().all(|v| v.is_finite())
        && raw.numeraire.iter().flatten().all(|v| v.is_finite());
    if !all_finite {
        return Err(MarketError::Invalid("non-finite price or payoff".into()));
    }
    if assets < 2 {
        return Err(MarketError::Invalid(format!(
            "need at least two eligible assets, got {assets}"
        )));
    }
    if raw.secure_asset {
        if (raw.prices[0] - 1.0).abs() > tol {
            return Err(MarketError::BadSecureAsset(format!(
                "price {} instead of 1",
                raw.prices[0]
            )));
        }
        if raw.payoffs[0].iter().any(|v| (v - 1.0).abs() > tol) {
            return Err(MarketError::BadSecureAsset(
                "payoff is not the constant one".into(),
            ));
        }
    }
    if assets > n {
        return Err(MarketError::RankDeficient { rank: n, assets });
    }

    let payoff_matrix = matrix_from_rows(&raw.payoffs, n);
    let (rank, m_basis) = linalg::row_space(&payoff_matrix);
    if rank < assets {
        return Err(MarketError::RankDeficient { rank, assets });
    }

    // w = S1^T (S1 S1^T)^{-1} S0
    let gram = &payoff_matrix * payoff_matrix.transpose();
    let s0 = DVector::from_column_slice(&raw.prices);
    let v = gram
        .lu()
        .solve(&s0)
        .ok_or_else(|| MarketError::RankDeficient { rank, assets })?;
    let w = payoff_matrix.transpose() * v;
    let price_vector: Vec<f64> = w.iter().cloned().collect();
    let coords = &m_basis * &w;
    let price_covector: Vec<f64> = coords.iter().cloned().collect();

    let kernel: Vec<Vec<f64>> = if coords.norm() == 0.0 {
        return Err(MarketError::BadNumeraire("price functional is zero".into()));
    } else {
        linalg::complement_of_vector(&coords)
            .into_iter()
            .map(|z| (m_basis.transpose() * z).iter().cloned().collect())
            .collect()
    };

    let mut vm = ValidatedMarket {
        numeraire: vec![1.0; n],
        market: raw,
        m_basis,
        price_vector,
        price_covector,
        kernel,
        payoff_matrix,
    };

    match vm.market.numeraire.clone() {
        Some(u) => {
            if u.len() != n {
                return Err(MarketError::BadNumeraire(format!(
                    "{} entries, expected {n}",
                    u.len()
                )));
            }
            if let Some(v) = u.iter().find(|v| **v < -tol) {
                return Err(MarketError::BadNumeraire(format!("negative component {v}")));
            }
            if u.iter().all(|v| *v <= tol) {
                return Err(MarketError::BadNumeraire("numeraire is zero".into()));
            }
            let residual = vm.distance_to_m(&u);
            if residual > tol * (1.0 + sup_norm(&u)) {
                return Err(MarketError::BadNumeraire(format!(
                    "not an eligible payoff (distance {residual:e})"
                )));
            }
            let price = dot(&vm.price_vector, &u);
            if (price - 1.0).abs() > tol.max(MARKET_TOL) * (1.0 + sup_norm(&u)) {
                return Err(MarketError::BadNumeraire(format!("price {price} instead of 1")));
            }
            vm.numeraire = u;
        }
        None => {
            if !vm.market.secure_asset {
                return Err(MarketError::BadNumeraire(
                    "a market without secure asset needs an explicit numeraire".into(),
                ));
            }
        }
    }
    Ok(vm)
}

impl ValidatedMarket {
    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn space(&self) -> &ScenarioSpace {
        &self.market.space
    }

    pub fn n_states(&self) -> usize {
        self.market.n_states()
    }

    pub fn n_assets(&self) -> usize {
        self.market.n_assets()
    }

    pub fn dim_m(&self) -> usize {
        self.m_basis.nrows()
    }

    pub fn numeraire(&self) -> &[f64] {
        &self.numeraire
    }

    pub fn price_vector(&self) -> &[f64] {
        &self.price_vector
    }

    pub fn price_covector(&self) -> &[f64] {
        &self.price_covector
    }

    /// Orthonormal basis of `M`.
    pub fn m_basis(&self) -> Vec<Vec<f64>> {
        self.m_basis
            .row_iter()
            .map(|r| r.iter().cloned().collect())
            .collect()
    }

    /// `dim M - 1` orthonormal payoffs spanning `ker π`.
    pub fn kernel_basis(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    /// `Σ y_i k_i` for kernel coordinates `y`.
    pub fn kernel_element(&self, y: &[f64]) -> Vec<f64> {
        let mut k = vec![0.0; self.n_states()];
        for (yi, ki) in y.iter().zip(&self.kernel) {
            linalg::axpy(*yi, ki, &mut k);
        }
        k
    }

    /// Orthogonal projection onto `M`.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        let zv = DVector::from_column_slice(z);
        let p = self.m_basis.transpose() * (&self.m_basis * zv);
        p.iter().cloned().collect()
    }

    /// `‖Z - proj_M Z‖∞`.
    pub fn distance_to_m(&self, z: &[f64]) -> f64 {
        let p = self.project(z);
        z.iter().zip(&p).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Replicating portfolio of an eligible payoff (least squares otherwise).
    pub fn portfolio(&self, z: &[f64]) -> Vec<f64> {
        let a = self.payoff_matrix.transpose();
        let b = DVector::from_column_slice(z);
        let svd = a.svd(true, true);
        let x = svd.solve(&b, 1e-14).expect("SVD computed with U and V");
        x.iter().cloned().collect()
    }

    /// `π(Z)` via the price representer; no eligibility check.
    pub fn price_unchecked(&self, z: &[f64]) -> f64 {
        dot(&self.price_vector, z)
    }
}

/// `true` iff `‖Z - proj_M Z‖∞ <= tol`.
pub fn in_m(vm: &ValidatedMarket, z: &[f64], tol: f64) -> bool {
    z.len() == vm.n_states() && vm.distance_to_m(z) <= tol
}

/// Price `S0·x` of the portfolio replicating `Z`. The eligibility test is
/// relative: the distance to `M` may be at most `tol·(1 + ‖Z‖∞)`.
pub fn price(vm: &ValidatedMarket, z: &[f64], tol: f64) -> Result<f64, MarketError> {
    if z.len() != vm.n_states() {
        return Err(MarketError::Invalid(format!(
            "payoff has {} entries, expected {}",
            z.len(),
            vm.n_states()
        )));
    }
    let residual = vm.distance_to_m(z);
    if residual > tol * (1.0 + sup_norm(z)) {
        return Err(MarketError::NotInSpan { residual });
    }
    Ok(vm.market.cost_of(&vm.portfolio(z)))
}

/// Spanning set of `ker π` (see [`ValidatedMarket::kernel_basis`]).
pub fn kernel_basis(vm: &ValidatedMarket) -> Vec<Vec<f64>> {
    vm.kernel.clone()
}

#[cfg(test)]
mod tests;
