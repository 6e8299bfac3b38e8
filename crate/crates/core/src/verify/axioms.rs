use rand::Rng;
use serde_json::json;

use super::{check_dims, ext_close, ext_le, sample_eligible, sample_position, trial_rng, PropertyReport, VerifyError, VerifyOptions};
use crate::acceptance::{validate_acceptance, AcceptanceSet};
use crate::market::{check_monotone_pricing, check_no_arbitrage, ArbitrageKind, ScenarioSpace, ValidatedMarket, MARKET_TOL};
use crate::riskmeasure::rho;

/// Monotonicity `Y >= X ⇒ ρ(Y) <= ρ(X)` and translation invariance
/// `ρ(X + Z) = ρ(X) - π(Z)` for `Z ∈ M`, with infinite tags compared
/// exactly.
pub fn check_risk_measure_axioms(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    trials: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    let mut report = PropertyReport::new("risk_measure_axioms", seed);
    let n = vm.n_states();
    for trial in 0..trials {
        report.trials += 1;
        let mut rng = trial_rng(seed, trial);
        let x = sample_position(&mut rng, vm, trial, opts.radius);
        let only = rng.gen_range(0..=n);
        let delta: Vec<f64> = (0..n)
            .map(|i| if only == n || only == i { rng.gen_range(0.0..=3.0) } else { 0.0 })
            .collect();
        let y: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let (z, pz) = sample_eligible(&mut rng, vm);
        let xz: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a + b).collect();

        let values = [&x, &y, &xz].map(|p| rho(a, vm, p, &opts.solve));
        let [rx, ry, rxz] = match values {
            [Ok(a), Ok(b), Ok(c)] => [a.value, b.value, c.value],
            [a, b, c] => {
                let err = [a, b, c].into_iter().find_map(|r| r.err()).expect("one failed");
                report.solver_failure(trial, &err);
                continue;
            }
        };
        let inputs = json!({ "x": x, "y": y, "z": z, "price_z": pz });
        if !ext_le(ry, rx, opts.tol) {
            report.violation(
                trial,
                "monotonicity: Y >= X but ρ(Y) > ρ(X)",
                inputs.clone(),
                json!({ "rho_x": rx, "rho_y": ry }),
            );
        }
        let expected = rx.shift(-pz);
        if !ext_close(rxz, expected, opts.tol) {
            report.violation(
                trial,
                "translation: ρ(X + Z) != ρ(X) - π(Z)",
                inputs,
                json!({ "rho_x": rx, "rho_x_plus_z": rxz, "expected": expected }),
            );
        }
    }
    Ok(report)
}

/// Samples the acceptance axioms (zero accepted, a non-member exists,
/// monotone) and the structural flags the set asserts.
pub fn check_acceptance_axioms(a: &AcceptanceSet, space: &ScenarioSpace, trials: usize, seed: u64) -> PropertyReport {
    let r = validate_acceptance(a, space, trials, seed);
    let mut report = PropertyReport::new("acceptance_axioms", seed);
    report.trials = r.samples;
    for (i, msg) in r.violations().into_iter().enumerate() {
        let points = r
            .monotonicity_violations
            .first()
            .filter(|_| msg.contains("monotonicity"))
            .map(|c| c.points.clone())
            .or_else(|| {
                [&r.convexity, &r.cone, &r.additivity]
                    .iter()
                    .find(|f| f.violated() && msg.contains("falsified"))
                    .and_then(|f| f.counterexample.as_ref())
                    .map(|c| c.points.clone())
            });
        report.violation(i, msg, json!({ "set": a.label(), "seed": seed }), json!({ "points": points }));
    }
    report
}

/// The market admits strictly positive state prices; a free lunch or free
/// lottery is a violation carrying the witness portfolio.
pub fn check_market_pricing(vm: &ValidatedMarket, seed: u64) -> Result<PropertyReport, VerifyError> {
    let mut report = PropertyReport::new("market_pricing", seed);
    report.trials = 1;
    let arb = check_no_arbitrage(vm, MARKET_TOL)?;
    let mono = check_monotone_pricing(vm, MARKET_TOL)?;
    if arb.kind != ArbitrageKind::None {
        report.violation(
            0,
            format!("arbitrage: {:?}", arb.kind),
            json!({ "prices": vm.market().prices, "payoffs": vm.market().payoffs }),
            json!({ "witness": arb.witness(), "monotone_pricing": mono.monotone }),
        );
    } else {
        report.note(format!("state prices {:?}", arb.state_prices.unwrap_or_default()));
    }
    Ok(report)
}
