use serde::{Deserialize, Serialize};

use super::member::{member_shifted, Membership};
use super::{Diagnostics, ExtReal, RiskError, RiskResult, SolveOptions, Strategy};
use crate::acceptance::{AcceptanceSet, Polyhedron};
use crate::linalg::sup_norm;
use crate::linprog::{solve_lp, LpOptions, LpStatus};
use crate::market::{price, ValidatedMarket};

fn check_dims(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64]) -> Result<(), RiskError> {
    if x.len() != vm.n_states() || a.dim() != vm.n_states() {
        return Err(RiskError::DimensionMismatch(format!(
            "position has {} entries, set {} and market {} states",
            x.len(),
            a.dim(),
            vm.n_states()
        )));
    }
    Ok(())
}

/// `ρ(X)` by the most accurate strategy available for `A`: a single LP for
/// polyhedral sets, subset enumeration for VaR sets, bracketing otherwise.
pub fn rho(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64], opts: &SolveOptions) -> Result<RiskResult, RiskError> {
    if a.polyhedral().is_some() {
        return rho_direct_lp(a, vm, x);
    }
    if a.scenario_union().is_some() && vm.n_states() <= opts.n_enum {
        return rho_var_exact(a, vm, x, opts);
    }
    rho_reduction(a, vm, x, opts)
}

enum PieceOutcome {
    Optimal(f64, Vec<f64>),
    Unbounded,
    Infeasible,
}

/// `min S0·x  s.t.  X + S1^T x ∈ P`.
fn cheapest_hedge(p: &Polyhedron, vm: &ValidatedMarket, x: &[f64]) -> Result<PieceOutcome, RiskError> {
    let market = vm.market();
    let mut lp = p.preimage_lp(x, &market.payoffs, 0.0);
    lp.objective[..market.prices.len()].copy_from_slice(&market.prices);
    let out = solve_lp(&lp, &LpOptions::default())?;
    Ok(match out.status {
        LpStatus::Optimal => {
            let sol = out.x.expect("optimal");
            let holdings = &sol[..market.prices.len()];
            PieceOutcome::Optimal(market.cost_of(holdings), market.payoff_of(holdings))
        }
        LpStatus::Unbounded => PieceOutcome::Unbounded,
        LpStatus::Infeasible => PieceOutcome::Infeasible,
    })
}

/// `ρ(X)` as one LP over portfolios, for sets with a polyhedral description.
pub fn rho_direct_lp(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64]) -> Result<RiskResult, RiskError> {
    check_dims(a, vm, x)?;
    let p = a.polyhedral().ok_or(RiskError::NotPolyhedral)?;
    let diagnostics = Diagnostics {
        lp_solves: 1,
        ..Diagnostics::default()
    };
    let (value, optimal_payoff, attained) = match cheapest_hedge(&p, vm, x)? {
        PieceOutcome::Optimal(v, z) => (ExtReal::Finite(v), Some(z), true),
        PieceOutcome::Unbounded => (ExtReal::NegInf, None, false),
        PieceOutcome::Infeasible => (ExtReal::PosInf, None, false),
    };
    Ok(RiskResult {
        value,
        optimal_payoff,
        attained,
        strategy: Strategy::DirectLp,
        diagnostics,
    })
}

/// `ρ(X)` for VaR acceptance (possibly intersected with polyhedral sets)
/// as the least cost over the admissible loss sets `J`. Only maximal `J`
/// are solved; among equal costs the smallest bitmask wins.
pub fn rho_var_exact(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64], opts: &SolveOptions) -> Result<RiskResult, RiskError> {
    check_dims(a, vm, x)?;
    let union = a.scenario_union().ok_or(RiskError::NotScenarioUnion)?;
    if union.dim() > opts.n_enum {
        return Err(RiskError::EnumerationTooLarge {
            n: union.dim(),
            limit: opts.n_enum,
        });
    }
    let mut diagnostics = Diagnostics::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in union.maximal_subsets() {
        diagnostics.subsets += 1;
        diagnostics.lp_solves += 1;
        match cheapest_hedge(&union.piece(mask), vm, x)? {
            PieceOutcome::Unbounded => {
                return Ok(RiskResult {
                    value: ExtReal::NegInf,
                    optimal_payoff: None,
                    attained: false,
                    strategy: Strategy::VarEnumeration,
                    diagnostics,
                })
            }
            PieceOutcome::Optimal(v, z) => {
                let better = match &best {
                    None => true,
                    Some((b, _)) => v < b - 1e-12 * (1.0 + b.abs()),
                };
                if better {
                    best = Some((v, z));
                }
            }
            PieceOutcome::Infeasible => {}
        }
    }
    Ok(match best {
        Some((v, z)) => RiskResult {
            value: ExtReal::Finite(v),
            optimal_payoff: Some(z),
            attained: true,
            strategy: Strategy::VarEnumeration,
            diagnostics,
        },
        None => RiskResult {
            value: ExtReal::PosInf,
            optimal_payoff: None,
            attained: false,
            strategy: Strategy::VarEnumeration,
            diagnostics,
        },
    })
}

/// `ρ(X) = inf{m : X + m·U ∈ A + ker π}` by a doubling bracket and
/// bisection. The value is the midpoint of the final bracket and is never
/// reported as attained; the payoff returned is feasible at the upper end.
pub fn rho_reduction(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64], opts: &SolveOptions) -> Result<RiskResult, RiskError> {
    check_dims(a, vm, x)?;
    opts.check()?;
    let mut diagnostics = Diagnostics::default();
    let probe = |m: f64, diag: &mut Diagnostics| -> Result<Membership, RiskError> {
        let r = member_shifted(a, vm, x, m, opts)?;
        diag.membership_calls += 1;
        diag.lp_solves += r.lp_solves;
        if !r.exact {
            diag.approximate = true;
        }
        Ok(r)
    };
    let infinite = |value: ExtReal, diagnostics: Diagnostics| RiskResult {
        value,
        optimal_payoff: None,
        attained: false,
        strategy: Strategy::Reduction,
        diagnostics,
    };

    let max = opts.m_bracket_max;
    let at_zero = probe(0.0, &mut diagnostics)?;
    let (mut lo, mut hi, mut hi_shift);
    let mut step = opts.m_bracket_init;
    if at_zero.member {
        hi = 0.0;
        hi_shift = at_zero.shift;
        loop {
            diagnostics.bracket_steps += 1;
            let m = -step.min(max);
            let r = probe(m, &mut diagnostics)?;
            if !r.member {
                lo = m;
                break;
            }
            hi = m;
            hi_shift = r.shift;
            if step >= max {
                return Ok(infinite(ExtReal::NegInf, diagnostics));
            }
            step *= 2.0;
        }
    } else {
        lo = 0.0;
        loop {
            diagnostics.bracket_steps += 1;
            let m = step.min(max);
            let r = probe(m, &mut diagnostics)?;
            if r.member {
                hi = m;
                hi_shift = r.shift;
                break;
            }
            lo = m;
            if step >= max {
                return Ok(infinite(ExtReal::PosInf, diagnostics));
            }
            step *= 2.0;
        }
    }
    while hi - lo > opts.bisect_tol {
        diagnostics.bisection_steps += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = probe(mid, &mut diagnostics)?;
        if r.member {
            hi = mid;
            hi_shift = r.shift;
        } else {
            lo = mid;
        }
    }
    let k = hi_shift.unwrap_or_else(|| vec![0.0; x.len()]);
    let payoff: Vec<f64> = vm.numeraire().iter().zip(&k).map(|(u, k)| hi * u - k).collect();
    Ok(RiskResult {
        value: ExtReal::Finite(0.5 * (lo + hi)),
        optimal_payoff: Some(payoff),
        attained: false,
        strategy: Strategy::Reduction,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainClass {
    Finite,
    PosInf,
    NegInf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainEvidence {
    pub class: DomainClass,
    pub bound: f64,
    /// `X + bound·U ∈ A + ker π`.
    pub member_at_upper: bool,
    /// `X - bound·U ∈ A + ker π`.
    pub member_at_lower: bool,
    pub exact: bool,
}

/// Classifies `ρ(X)` by probing `A + ker π` at `X ± m_bracket_max·U`.
pub fn domain_classify(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64], opts: &SolveOptions) -> Result<DomainEvidence, RiskError> {
    check_dims(a, vm, x)?;
    let bound = opts.m_bracket_max;
    let up = member_shifted(a, vm, x, bound, opts)?;
    let down = member_shifted(a, vm, x, -bound, opts)?;
    let class = if !up.member {
        DomainClass::PosInf
    } else if down.member {
        DomainClass::NegInf
    } else {
        DomainClass::Finite
    };
    Ok(DomainEvidence {
        class,
        bound,
        member_at_upper: up.member,
        member_at_lower: down.member,
        exact: up.exact && down.exact,
    })
}

/// Re-checks an attained result: the payoff is eligible, `X + Z ∈ A` with
/// tolerance `tol`, and its price matches the value.
pub fn check_certificate(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64], result: &RiskResult, tol: f64) -> bool {
    if !result.attained {
        return true;
    }
    let (Some(v), Some(z)) = (result.value.finite(), &result.optimal_payoff) else {
        return false;
    };
    let Ok(p) = price(vm, z, tol) else {
        return false;
    };
    let y: Vec<f64> = x.iter().zip(z).map(|(a, b)| a + b).collect();
    let accepted = a.clone().with_tol(tol * (1.0 + sup_norm(&y))).member(&y);
    accepted && (p - v).abs() <= tol * (1.0 + v.abs())
}
