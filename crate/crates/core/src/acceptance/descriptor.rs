use serde::{Deserialize, Serialize};

use super::{
    avar_acceptance, cone_plus_span, halfspace_acceptance, intersect, polyhedral_acceptance, positive_cone,
    var_acceptance_with, AcceptanceError, AcceptanceSet, ConfidenceLevel, TieRule,
};
use crate::market::ScenarioSpace;

/// On-disk acceptance set description.
///
/// ```json
/// {"type": "intersection",
///  "parts": [{"type": "positive_cone"}, {"type": "avar", "alpha": 0.5}]}
/// ```
///
/// Types: `positive_cone`, `var` (`alpha`, optional `tie_rule`), `avar`
/// (`alpha`), `halfspace` (`normal`), `intersection` (`parts`),
/// `polyhedral` (`rows`, `rhs`, read as `rows·Y >= rhs`) and
/// `cone_plus_span` (`directions`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceDescriptor {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<AcceptanceDescriptor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_rule: Option<TieRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
}

fn missing(field: &str, kind: &str) -> AcceptanceError {
    AcceptanceError::Parse(format!("`{field}` is required for type `{kind}`"))
}

impl AcceptanceDescriptor {
    pub fn of_type(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            alpha: None,
            normal: None,
            parts: None,
            tie_rule: None,
            rows: None,
            rhs: None,
            directions: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, AcceptanceError> {
        serde_json::from_str(text).map_err(|e| AcceptanceError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn build(&self, space: &ScenarioSpace) -> Result<AcceptanceSet, AcceptanceError> {
        let n = space.n();
        let alpha = || {
            self.alpha
                .ok_or_else(|| missing("alpha", &self.kind))
                .and_then(ConfidenceLevel::new)
        };
        let check_len = |len: usize, what: &str| {
            if len == n {
                Ok(())
            } else {
                Err(AcceptanceError::DimensionMismatch(format!(
                    "{what} has {len} entries, market has {n} states"
                )))
            }
        };
        match self.kind.as_str() {
            "positive_cone" => Ok(positive_cone(space)),
            "var" => Ok(var_acceptance_with(space, alpha()?, self.tie_rule.unwrap_or_default())),
            "avar" => Ok(avar_acceptance(space, alpha()?)),
            "halfspace" => {
                let normal = self.normal.clone().ok_or_else(|| missing("normal", "halfspace"))?;
                check_len(normal.len(), "normal")?;
                halfspace_acceptance(normal)
            }
            "intersection" => {
                let parts = self.parts.as_ref().ok_or_else(|| missing("parts", "intersection"))?;
                let sets = parts
                    .iter()
                    .map(|p| p.build(space))
                    .collect::<Result<Vec<_>, _>>()?;
                intersect(sets)
            }
            "polyhedral" => {
                let rows = self.rows.clone().ok_or_else(|| missing("rows", "polyhedral"))?;
                let rhs = self.rhs.clone().ok_or_else(|| missing("rhs", "polyhedral"))?;
                for r in &rows {
                    check_len(r.len(), "row")?;
                }
                polyhedral_acceptance(rows, rhs)
            }
            "cone_plus_span" => {
                let dirs = self
                    .directions
                    .clone()
                    .ok_or_else(|| missing("directions", "cone_plus_span"))?;
                cone_plus_span(n, &dirs)
            }
            other => Err(AcceptanceError::Parse(format!("unknown acceptance type `{other}`"))),
        }
    }
}
