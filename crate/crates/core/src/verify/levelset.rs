use serde_json::json;

use super::{check_dims, sample_position, shifted, trial_rng, PropertyReport, VerifyError, VerifyOptions};
use crate::acceptance::{AcceptanceSet, TriState};
use crate::directional::{dir_bd_member, dir_cl_member, dir_int_member, rec_member, APlusKer, Region};
use crate::market::ValidatedMarket;
use crate::riskmeasure::{member_shifted, rho, ExtReal};

/// Strict, weak and exact level sets of `ρ` against the directional
/// interior, closure and boundary of `A + ker π` shifted by `-mU`.
///
/// Each grid point and level is one trial. Points with `|ρ(X) - m|` inside
/// the band count as agreeing when `X + mU` is on the directional boundary
/// and as inconclusive otherwise.
pub fn check_levelset_theorem(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    m_values: &[f64],
    grid: &[Vec<f64>],
    seed: u64,
    opts: &VerifyOptions,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    let mut report = PropertyReport::new("levelset_theorem", seed);
    let b = APlusKer { a, vm, opts: &opts.solve };
    let u = vm.numeraire();
    let band = opts.band();
    for (i, x) in grid.iter().enumerate() {
        let r = match rho(a, vm, x, &opts.solve) {
            Ok(r) => r.value,
            Err(e) => {
                report.trials += m_values.len();
                report.solver_failure(i, &e);
                report.inconclusive += m_values.len() - 1;
                continue;
            }
        };
        for (j, &m) in m_values.iter().enumerate() {
            let trial = i * m_values.len() + j;
            report.trials += 1;
            let p = shifted(x, u, m);
            let (expect_int, expect_outside) = match r {
                ExtReal::NegInf => (true, false),
                ExtReal::PosInf => (false, true),
                ExtReal::Finite(v) if v < m - band => (true, false),
                ExtReal::Finite(v) if v > m + band => (false, true),
                ExtReal::Finite(_) => {
                    if !dir_bd_member(&b, u, &p, &opts.probe) {
                        report.inconclusive += 1;
                    }
                    continue;
                }
            };
            if expect_int && !dir_int_member(&b, u, &p, &opts.probe) {
                report.violation(
                    trial,
                    "ρ(X) < m but X + mU is not in the directional interior",
                    json!({ "x": x, "m": m }),
                    json!({ "rho": r }),
                );
            }
            if expect_outside && dir_cl_member(&b, u, &p, &opts.probe) {
                report.violation(
                    trial,
                    "ρ(X) > m but X + mU is in the directional closure",
                    json!({ "x": x, "m": m }),
                    json!({ "rho": r }),
                );
            }
        }
    }
    Ok(report)
}

/// `ρ(X) < +∞` iff some `X + mU` with `m <= m_bracket_max` lies in
/// `A + ker π`; `ρ(X) = -∞` iff `X - m_bracket_max·U` does. A finite value
/// should put `X + ρ(X)U` on the directional boundary; trials where it
/// does not are counted as inconclusive.
pub fn check_domain_theorem(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    trials: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    let mut report = PropertyReport::new("domain_theorem", seed);
    let b = APlusKer { a, vm, opts: &opts.solve };
    let u = vm.numeraire();
    let bound = opts.solve.m_bracket_max;
    for trial in 0..trials {
        report.trials += 1;
        let mut rng = trial_rng(seed, trial);
        let x = sample_position(&mut rng, vm, trial, opts.radius);
        let outcome = rho(a, vm, &x, &opts.solve).and_then(|r| {
            let up = member_shifted(a, vm, &x, bound, &opts.solve)?;
            let down = member_shifted(a, vm, &x, -bound, &opts.solve)?;
            Ok((r.value, up.member, down.member))
        });
        let (r, up, down) = match outcome {
            Ok(v) => v,
            Err(e) => {
                report.solver_failure(trial, &e);
                continue;
            }
        };
        let observed = json!({ "rho": r, "member_at_upper": up, "member_at_lower": down });
        if (r != ExtReal::PosInf) != up {
            report.violation(trial, "ρ(X) < +∞ disagrees with X + mU ∈ A + ker π", json!({ "x": x }), observed.clone());
        }
        if (r == ExtReal::NegInf) != down {
            report.violation(trial, "ρ(X) = -∞ disagrees with X - mU ∈ A + ker π", json!({ "x": x }), observed);
        }
        if let ExtReal::Finite(v) = r {
            if !dir_bd_member(&b, u, &shifted(&x, u, v), &opts.probe) {
                report.inconclusive += 1;
            }
        }
    }
    Ok(report)
}

/// Side of the box whose corners are probed for `A + ker π = X`.
const COVER_BOX: f64 = 1e3;

/// If `A + ker π` is the whole space, every probe is `-∞`. If `-U` is a
/// recession direction of `A`, no probe is finite.
pub fn check_degeneracy_lemmas(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    grid: &[Vec<f64>],
    seed: u64,
    opts: &VerifyOptions,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    let mut report = PropertyReport::new("degeneracy_lemmas", seed);
    let n = vm.n_states();
    let b = APlusKer { a, vm, opts: &opts.solve };

    let convex = a.polyhedral().is_some() || a.flags().convex == TriState::True;
    let covers = convex
        && n <= 16
        && (0..1u64 << n).all(|mask| {
            let corner: Vec<f64> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { COVER_BOX } else { -COVER_BOX })
                .collect();
            b.contains(&corner)
        });
    let minus_u: Vec<f64> = vm.numeraire().iter().map(|u| -u).collect();
    let members: Vec<Vec<f64>> = grid.iter().filter(|x| a.member(x)).cloned().collect();
    let recedes = rec_member(a, &minus_u, &members, &[1.0, 10.0, 100.0, 1e3]).answer == TriState::True;
    report.note(format!("A + ker π covers the box: {covers}; -U recedes in A: {recedes}"));

    let mut finite = 0usize;
    for (trial, x) in grid.iter().enumerate() {
        report.trials += 1;
        let r = match rho(a, vm, x, &opts.solve) {
            Ok(r) => r.value,
            Err(e) => {
                report.solver_failure(trial, &e);
                continue;
            }
        };
        if r.is_finite() {
            finite += 1;
        }
        if covers && r != ExtReal::NegInf {
            report.violation(trial, "A + ker π is the whole space but ρ(X) > -∞", json!({ "x": x }), json!({ "rho": r }));
        }
        if recedes && r.is_finite() {
            report.violation(trial, "-U recedes in A but ρ(X) is finite", json!({ "x": x }), json!({ "rho": r }));
        }
    }
    if !covers && !recedes {
        report.note(format!("no degeneracy hypothesis holds; {finite} finite values"));
    }
    Ok(report)
}
