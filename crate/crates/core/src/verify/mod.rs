//! Property checks for risk measures built from an acceptance set and a
//! market. Every check draws its inputs from a seeded generator, so a
//! report is reproduced exactly by running the check again with the same
//! arguments, and each violation records the inputs that triggered it.

mod axioms;
mod levelset;
mod lemmas;
mod topology;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::directional::DirectionalProbe;
use crate::market::{MarketError, ValidatedMarket};
use crate::riskmeasure::{ExtReal, RiskError, SolveOptions};

pub use axioms::{check_acceptance_axioms, check_market_pricing, check_risk_measure_axioms};
pub use lemmas::{check_good_deal_lemma, check_induced_set_theorem, check_variation_lemma, check_variation_lemma_with};
pub use levelset::{check_degeneracy_lemmas, check_domain_theorem, check_levelset_theorem};
pub use topology::check_directional_vs_topological;

/// Largest inconclusive fraction a healthy run may report.
pub const MAX_INCONCLUSIVE_FRACTION: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("no polyhedral description of A + ker π")]
    NotPolyhedral,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error(transparent)]
    Market(#[from] MarketError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub message: String,
    pub inputs: Value,
    pub observed: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property_id: String,
    pub seed: u64,
    pub trials: usize,
    pub violations: Vec<Violation>,
    /// Trials skipped because a comparison fell inside the tolerance band
    /// or a solver failed.
    pub inconclusive: usize,
    pub notes: Vec<String>,
}

impl PropertyReport {
    pub fn new(property_id: &str, seed: u64) -> Self {
        Self {
            property_id: property_id.to_string(),
            seed,
            trials: 0,
            violations: Vec::new(),
            inconclusive: 0,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn inconclusive_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.inconclusive as f64 / self.trials as f64
        }
    }

    /// No violations and at most [`MAX_INCONCLUSIVE_FRACTION`] skipped.
    pub fn healthy(&self) -> bool {
        self.passed() && self.inconclusive_fraction() <= MAX_INCONCLUSIVE_FRACTION
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub(crate) fn violation(&mut self, trial: usize, message: impl Into<String>, inputs: Value, observed: Value) {
        self.violations.push(Violation {
            trial,
            message: message.into(),
            inputs,
            observed,
        });
    }

    /// Counts a solver failure as inconclusive and keeps the first few
    /// messages.
    pub(crate) fn solver_failure(&mut self, trial: usize, err: &dyn std::fmt::Display) {
        self.inconclusive += 1;
        if self.notes.len() < 8 {
            self.notes.push(format!("trial {trial}: solver failure: {err}"));
        }
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Concatenates reports in order; seeds and ids are taken from `self`.
    pub fn merge(mut self, other: PropertyReport) -> Self {
        self.trials += other.trials;
        self.violations.extend(other.violations);
        self.inconclusive += other.inconclusive;
        self.notes.extend(other.notes);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub solve: SolveOptions,
    pub probe: DirectionalProbe,
    /// Tolerance on compared values of `ρ`.
    pub tol: f64,
    /// Positions are drawn from `[-radius, radius]^n`.
    pub radius: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            probe: DirectionalProbe::default(),
            tol: 1e-5,
            radius: 5.0,
        }
    }
}

impl VerifyOptions {
    /// Half-width of the band around a decision boundary inside which a
    /// comparison is inconclusive.
    pub fn band(&self) -> f64 {
        10.0 * self.solve.bisect_tol
    }
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Structured positions first (zero, `±U`, kernel directions), uniform
/// draws afterwards.
pub(crate) fn sample_position(rng: &mut ChaCha8Rng, vm: &ValidatedMarket, trial: usize, radius: f64) -> Vec<f64> {
    let n = vm.n_states();
    let kernel = vm.kernel_basis();
    match trial {
        0 => vec![0.0; n],
        1 => vm.numeraire().to_vec(),
        2 => vm.numeraire().iter().map(|u| -u).collect(),
        t if t < 3 + kernel.len() => kernel[t - 3].clone(),
        _ => (0..n).map(|_| rng.gen_range(-radius..=radius)).collect(),
    }
}

/// Random eligible payoff and its price, from holdings in `[-2, 2]^N`.
pub(crate) fn sample_eligible(rng: &mut ChaCha8Rng, vm: &ValidatedMarket) -> (Vec<f64>, f64) {
    let market = vm.market();
    let x: Vec<f64> = (0..vm.n_assets()).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    (market.payoff_of(&x), market.cost_of(&x))
}

pub(crate) fn shifted(x: &[f64], u: &[f64], m: f64) -> Vec<f64> {
    x.iter().zip(u).map(|(a, b)| a + m * b).collect()
}

fn rank(v: ExtReal) -> u8 {
    match v {
        ExtReal::NegInf => 0,
        ExtReal::Finite(_) => 1,
        ExtReal::PosInf => 2,
    }
}

/// `a <= b` in the extended order, with slack on finite values.
pub(crate) fn ext_le(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => x <= y + tol * (1.0 + y.abs()),
        _ => rank(a) <= rank(b),
    }
}

/// Same tag and finite values within a relative tolerance.
pub(crate) fn ext_close(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())),
        _ => rank(a) == rank(b),
    }
}

pub(crate) fn check_dims(a_dim: usize, vm: &ValidatedMarket) -> Result<(), VerifyError> {
    if a_dim != vm.n_states() {
        return Err(VerifyError::DimensionMismatch(format!(
            "set over {a_dim} states, market over {}",
            vm.n_states()
        )));
    }
    Ok(())
}
