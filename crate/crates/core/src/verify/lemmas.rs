use rand::Rng;
use serde_json::json;

use super::{check_dims, ext_close, sample_position, shifted, trial_rng, PropertyReport, VerifyError, VerifyOptions};
use crate::acceptance::{augmented, AcceptanceSet};
use crate::linalg::sup_norm;
use crate::market::ValidatedMarket;
use crate::riskmeasure::{induced_rho_acceptance, rho, ExtReal};

/// Number of boundary points added to `A` by [`check_variation_lemma`].
const BOUNDARY_POINTS: usize = 3;

/// `ρ` is unchanged when `A` is enlarged by points of the directional
/// boundary of `A + ker π`. The points are `X + ρ(X)U` for sampled `X`.
pub fn check_variation_lemma(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    trials: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    if a.polyhedral().is_none() {
        return Err(VerifyError::NotPolyhedral);
    }
    let mut points = Vec::new();
    for k in 0..4 * BOUNDARY_POINTS {
        if points.len() == BOUNDARY_POINTS {
            break;
        }
        let mut rng = trial_rng(seed ^ 0xb0, k);
        let x = sample_position(&mut rng, vm, k + 16, opts.radius);
        if let Ok(r) = rho(a, vm, &x, &opts.solve) {
            if let ExtReal::Finite(v) = r.value {
                points.push(shifted(&x, vm.numeraire(), v));
            }
        }
    }
    let mut report = check_variation_lemma_with(a, vm, &points, trials, seed, opts)?;
    report.note(format!("{} boundary points added", points.len()));
    Ok(report)
}

/// Compares `ρ` for `A` and for `D = A ∪ (points + X_+)` on sampled
/// positions. Agreement is expected exactly when every point lies in the
/// directional closure of `A + ker π`.
pub fn check_variation_lemma_with(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    points: &[Vec<f64>],
    trials: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    let d = augmented(a.clone(), points.to_vec()).map_err(|e| VerifyError::DimensionMismatch(e.to_string()))?;
    let mut report = PropertyReport::new("variation_lemma", seed);
    let tol = opts.band();
    for trial in 0..trials {
        report.trials += 1;
        let mut rng = trial_rng(seed, trial);
        let x = sample_position(&mut rng, vm, trial, opts.radius);
        let (ra, rd) = match (rho(a, vm, &x, &opts.solve), rho(&d, vm, &x, &opts.solve)) {
            (Ok(ra), Ok(rd)) => (ra.value, rd.value),
            (Err(e), _) | (_, Err(e)) => {
                report.solver_failure(trial, &e);
                continue;
            }
        };
        let agree = match (ra, rd) {
            (ExtReal::Finite(p), ExtReal::Finite(q)) => (p - q).abs() <= tol * (1.0 + p.abs()),
            _ => ra == rd,
        };
        if !agree {
            report.violation(
                trial,
                "ρ over the enlarged set differs from ρ over A",
                json!({ "x": x, "points": points }),
                json!({ "rho_a": ra, "rho_d": rd }),
            );
        }
    }
    Ok(report)
}

/// Holdings per asset on the good-deal grid.
const HOLDING_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Under `A ∩ (-R_{>0} U) = ∅`: an acceptable nonzero eligible payoff of
/// nonpositive price exists iff an acceptable nonzero payoff of price zero
/// exists. Every good deal found is turned into a price-zero payoff by
/// adding cash; failure to do so is a violation.
pub fn check_good_deal_lemma(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    let mut report = PropertyReport::new("good_deal_lemma", seed);
    let u = vm.numeraire();
    let market = vm.market();
    let n_assets = vm.n_assets();

    if let Some(t) = [1e-6, 1e-3, 1.0, 1e3].into_iter().find(|&t| a.member(&shifted(&vec![0.0; u.len()], u, -t))) {
        report.note(format!("hypothesis fails: -{t}·U is acceptable; biconditional not asserted"));
        return Ok(report);
    }

    let mut holdings: Vec<Vec<f64>> = Vec::new();
    if HOLDING_GRID.len().pow(n_assets as u32) <= 4096 {
        for mut idx in 0..HOLDING_GRID.len().pow(n_assets as u32) {
            holdings.push(
                (0..n_assets)
                    .map(|_| {
                        let h = HOLDING_GRID[idx % HOLDING_GRID.len()];
                        idx /= HOLDING_GRID.len();
                        h
                    })
                    .collect(),
            );
        }
    }
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        holdings.push((0..n_assets).map(|_| rng.gen_range(-1.0..=1.0)).collect());
    }

    let nonzero = |z: &[f64]| sup_norm(z) > 1e-9;
    let mut good_deal: Option<Vec<f64>> = None;
    let mut kernel: Option<Vec<f64>> = None;
    for (trial, h) in holdings.iter().enumerate() {
        report.trials += 1;
        let z = market.payoff_of(h);
        let p = market.cost_of(h);
        if !nonzero(&z) || p > 1e-12 || !a.member(&z) {
            continue;
        }
        if good_deal.is_none() {
            good_deal = Some(z.clone());
        }
        let k = shifted(&z, u, -p);
        if nonzero(&k) && a.member(&k) {
            kernel.get_or_insert(k);
        } else {
            report.violation(
                trial,
                "good deal found but no acceptable nonzero payoff of price zero",
                json!({ "holdings": h }),
                json!({ "payoff": z, "price": p, "shifted": k }),
            );
        }
    }
    for b in vm.kernel_basis() {
        for s in [1.0, -1.0] {
            let k: Vec<f64> = b.iter().map(|v| s * v).collect();
            if a.member(&k) {
                kernel.get_or_insert(k.clone());
                good_deal.get_or_insert(k);
            }
            report.trials += 1;
        }
    }
    report.note(format!(
        "good deal witness: {}; kernel witness: {}",
        json!(good_deal),
        json!(kernel)
    ));
    Ok(report)
}

/// `ρ(X) <= m ⇔ X + mU ∈ A_ρ`, and `ρ` built from `A_ρ` equals `ρ` built
/// from `A`.
pub fn check_induced_set_theorem(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    trials: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    let induced = induced_rho_acceptance(a, vm, &opts.solve)?;
    let mut report = PropertyReport::new("induced_set_theorem", seed);
    let u = vm.numeraire();
    let band = opts.band();
    for trial in 0..trials {
        report.trials += 1;
        let mut rng = trial_rng(seed, trial);
        let x = sample_position(&mut rng, vm, trial, opts.radius);
        let m = if trial % 4 == 0 { 0.0 } else { rng.gen_range(-opts.radius..=opts.radius) };
        let (r, ri) = match (rho(a, vm, &x, &opts.solve), rho(&induced, vm, &x, &opts.solve)) {
            (Ok(r), Ok(ri)) => (r.value, ri.value),
            (Err(e), _) | (_, Err(e)) => {
                report.solver_failure(trial, &e);
                continue;
            }
        };
        let inputs = json!({ "x": x, "m": m });
        match r {
            ExtReal::Finite(v) if (v - m).abs() <= band => report.inconclusive += 1,
            _ => {
                let below = r.to_f64() <= m;
                let member = induced.member(&shifted(&x, u, m));
                if below != member {
                    report.violation(
                        trial,
                        "ρ(X) <= m disagrees with X + mU ∈ A_ρ",
                        inputs.clone(),
                        json!({ "rho": r, "member": member }),
                    );
                }
            }
        }
        if !ext_close(r, ri, opts.tol) {
            report.violation(trial, "ρ over A_ρ differs from ρ over A", inputs, json!({ "rho_a": r, "rho_induced": ri }));
        }
    }
    Ok(report)
}
