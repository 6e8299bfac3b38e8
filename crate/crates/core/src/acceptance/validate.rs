use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AcceptanceSet, TriState};
use crate::market::ScenarioSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagCheck {
    pub asserted: TriState,
    /// Found regardless of the asserted value.
    pub counterexample: Option<Counterexample>,
}

impl FlagCheck {
    /// Asserted true but falsified.
    pub fn violated(&self) -> bool {
        self.asserted.is_true() && self.counterexample.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub samples: usize,
    pub contains_zero: bool,
    pub non_member: Option<Vec<f64>>,
    pub proper: bool,
    pub monotonicity_violations: Vec<Counterexample>,
    pub convexity: FlagCheck,
    pub cone: FlagCheck,
    pub additivity: FlagCheck,
}

impl AcceptanceReport {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !self.contains_zero {
            v.push("0 is not acceptable".to_string());
        }
        if !self.proper {
            v.push("no confirmed non-member".to_string());
        }
        if !self.monotonicity_violations.is_empty() {
            v.push(format!(
                "{} monotonicity violations",
                self.monotonicity_violations.len()
            ));
        }
        for (name, f) in [
            ("convexity", &self.convexity),
            ("cone", &self.cone),
            ("closure under addition", &self.additivity),
        ] {
            if f.violated() {
                v.push(format!("asserted {name} falsified"));
            }
        }
        v
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

fn uniform_point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..=r)).collect()
}

/// Moves `x` up along the constant payoff until it is acceptable.
fn lift(a: &AcceptanceSet, x: Vec<f64>) -> Option<Vec<f64>> {
    if a.member(&x) {
        return Some(x);
    }
    let mut c = 0.25;
    while c <= 64.0 {
        let y: Vec<f64> = x.iter().map(|v| v + c).collect();
        if a.member(&y) {
            return Some(y);
        }
        c *= 2.0;
    }
    None
}

fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// Checks `0 ∈ A`, properness and monotonicity on random acceptable
/// positions, and searches for counterexamples to convexity, the cone
/// property and closure under addition.
pub fn validate_acceptance(a: &AcceptanceSet, space: &ScenarioSpace, sample_count: usize, seed: u64) -> AcceptanceReport {
    let n = space.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = vec![0.0; n];
    let contains_zero = a.member(&zero);
    let non_member = a.non_member().map(|x| x.to_vec());
    let proper = non_member.as_ref().is_some_and(|x| x.len() == n && !a.member(x));

    let mut pool = vec![];
    if contains_zero {
        pool.push(zero);
    }
    let mut attempts = 0;
    while pool.len() < sample_count.max(2) && attempts < 4 * sample_count.max(2) {
        attempts += 1;
        let x = uniform_point(&mut rng, n, 5.0);
        if let Some(y) = lift(a, x) {
            pool.push(y);
        }
    }

    let mut monotonicity_violations = Vec::new();
    for x in &pool {
        let delta: Vec<f64> = if rng.gen_bool(0.5) {
            (0..n).map(|_| rng.gen_range(0.0..3.0)).collect()
        } else {
            let mut d = vec![0.0; n];
            d[rng.gen_range(0..n)] = rng.gen_range(0.0..3.0);
            d
        };
        if !a.member(&add(x, &delta)) {
            monotonicity_violations.push(Counterexample {
                check: "monotonicity".into(),
                points: vec![x.clone(), delta],
            });
        }
    }

    let mut convex = None;
    let mut additive = None;
    let mut cone = None;
    for (i, x) in pool.iter().enumerate() {
        for lambda in [0.5, 2.0] {
            let y: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            if cone.is_none() && !a.member(&y) {
                cone = Some(Counterexample {
                    check: format!("cone (scaling by {lambda})"),
                    points: vec![x.clone()],
                });
            }
        }
        for y in pool.iter().skip(i + 1).take(8) {
            if convex.is_none() {
                let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
                if !a.member(&mid) {
                    convex = Some(Counterexample {
                        check: "convexity (midpoint)".into(),
                        points: vec![x.clone(), y.clone()],
                    });
                }
            }
            if additive.is_none() && !a.member(&add(x, y)) {
                additive = Some(Counterexample {
                    check: "closure under addition".into(),
                    points: vec![x.clone(), y.clone()],
                });
            }
        }
    }

    let flags = a.flags();
    AcceptanceReport {
        seed,
        samples: pool.len(),
        contains_zero,
        non_member,
        proper,
        monotonicity_violations,
        convexity: FlagCheck {
            asserted: flags.convex,
            counterexample: convex,
        },
        cone: FlagCheck {
            asserted: flags.cone,
            counterexample: cone,
        },
        additivity: FlagCheck {
            asserted: flags.closed_under_addition,
            counterexample: additive,
        },
    }
}
