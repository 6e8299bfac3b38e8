use serde::{Deserialize, Serialize};

use super::MarketError;

/// Finite probability space: state labels with strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpace {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl ScenarioSpace {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self, MarketError> {
        if labels.len() != probs.len() {
            return Err(MarketError::Invalid(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if probs.len() < 2 {
            return Err(MarketError::Invalid("need at least two states".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(MarketError::Invalid(format!(
                "state probability {p} is not strictly positive"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOL {
            return Err(MarketError::Invalid(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { labels, probs })
    }

    /// `n` equally likely states labelled `w1..wn`.
    pub fn uniform(n: usize) -> Result<Self, MarketError> {
        let labels = (1..=n).map(|i| format!("w{i}")).collect();
        Self::new(labels, vec![1.0 / n as f64; n])
    }

    /// States `w1..wn` with the given weights, rescaled to sum to one.
    pub fn from_weights(weights: &[f64]) -> Result<Self, MarketError> {
        let total: f64 = weights.iter().sum();
        let labels = (1..=weights.len()).map(|i| format!("w{i}")).collect();
        Self::new(labels, weights.iter().map(|w| w / total).collect())
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Expectation of `x` under the state weights.
    pub fn expectation(&self, x: &[f64]) -> f64 {
        self.probs.iter().zip(x).map(|(p, v)| p * v).sum()
    }
}
