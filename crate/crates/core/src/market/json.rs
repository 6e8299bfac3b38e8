use serde::{Deserialize, Serialize};

use super::{Market, MarketError, ScenarioSpace};

/// Probability sums may be off by this much in a file; they are rescaled.
pub const FILE_PROB_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEntry {
    pub label: String,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetEntry {
    pub name: String,
    pub price: f64,
    pub payoff: Vec<f64>,
}

/// On-disk market description.
///
/// ```json
/// { "states": [{"label": "up", "prob": 0.5}, {"label": "down", "prob": 0.5}],
///   "assets": [{"name": "cash", "price": 1, "payoff": [1, 1]},
///              {"name": "stock", "price": 1, "payoff": [2, 0.5]}],
///   "numeraire": [1, 1] }
/// ```
///
/// `numeraire` is optional. `secure_asset` defaults to `true`; setting it to
/// `false` lifts the requirement that asset 0 is the secure asset and makes
/// `numeraire` mandatory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub states: Vec<StateEntry>,
    pub assets: Vec<AssetEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeraire: Option<Vec<f64>>,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub secure_asset: bool,
}

fn default_true() -> bool {
    true
}

fn is_true(v: &bool) -> bool {
    *v
}

impl MarketFile {
    pub fn from_json(text: &str) -> Result<Self, MarketError> {
        serde_json::from_str(text).map_err(|e| MarketError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("market serializes")
    }

    pub fn into_market(self) -> Result<Market, MarketError> {
        let finite = self.states.iter().all(|s| s.prob.is_finite())
            && self
                .assets
                .iter()
                .all(|a| a.price.is_finite() && a.payoff.iter().all(|v| v.is_finite()))
            && self.numeraire.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(MarketError::Parse("NaN or infinite number".into()));
        }
        if let Some(s) = self.states.iter().find(|s| s.prob < 0.0) {
            return Err(MarketError::Parse(format!(
                "negative probability {} for state {}",
                s.prob, s.label
            )));
        }
        let total: f64 = self.states.iter().map(|s| s.prob).sum();
        if (total - 1.0).abs() > FILE_PROB_TOL {
            return Err(MarketError::Parse(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let labels = self.states.iter().map(|s| s.label.clone()).collect();
        let probs = self.states.iter().map(|s| s.prob / total).collect();
        let space = ScenarioSpace::new(labels, probs)?;
        Ok(Market {
            space,
            names: self.assets.iter().map(|a| a.name.clone()).collect(),
            prices: self.assets.iter().map(|a| a.price).collect(),
            payoffs: self.assets.into_iter().map(|a| a.payoff).collect(),
            numeraire: self.numeraire,
            secure_asset: self.secure_asset,
        })
    }

    pub fn from_market(m: &Market) -> Self {
        Self {
            states: m
                .space
                .labels()
                .iter()
                .zip(m.space.probs())
                .map(|(label, prob)| StateEntry {
                    label: label.clone(),
                    prob: *prob,
                })
                .collect(),
            assets: m
                .names
                .iter()
                .zip(&m.prices)
                .zip(&m.payoffs)
                .map(|((name, price), payoff)| AssetEntry {
                    name: name.clone(),
                    price: *price,
                    payoff: payoff.clone(),
                })
                .collect(),
            numeraire: m.numeraire.clone(),
            secure_asset: m.secure_asset,
        }
    }
}

impl Market {
    pub fn from_json(text: &str) -> Result<Self, MarketError> {
        MarketFile::from_json(text)?.into_market()
    }
}
