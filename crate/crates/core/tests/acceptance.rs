//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use acceptrisk::acceptance::{
    avar_acceptance, compute_avar, compute_var, cone_plus_span, halfspace_acceptance, polyhedral_acceptance,
    positive_cone, var_acceptance, var_acceptance_with, ConfidenceLevel, TieRule,
};
use acceptrisk::fixtures;
use acceptrisk::market::{check_monotone_pricing, check_no_arbitrage, ArbitrageKind, MARKET_TOL};
use acceptrisk::riskmeasure::{rho_direct_lp, rho_reduction, rho_var_exact, ExtReal, RiskResult};
use acceptrisk::verify::{
    check_acceptance_axioms, check_domain_theorem, check_levelset_theorem, check_market_pricing,
    check_risk_measure_axioms, VerifyOptions,
};
use acceptrisk::{rho, validate_market, Market, ScenarioSpace, SolveOptions, ValidatedMarket};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn alpha(a: f64) -> ConfidenceLevel {
    ConfidenceLevel::new(a).unwrap()
}

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> ScenarioSpace {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    ScenarioSpace::from_weights(&w).unwrap()
}

/// Secure asset plus `risky` assets priced by a planted state-price
/// vector `ψ > 0` with `Σψ = 1`.
fn planted_market(rng: &mut ChaCha8Rng, n: usize, risky: usize) -> (Market, Vec<f64>) {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let psi: Vec<f64> = w.iter().map(|v| v / total).collect();
    let assets: Vec<(f64, Vec<f64>)> = (0..risky)
        .map(|_| {
            let payoff: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
            let price = payoff.iter().zip(&psi).map(|(a, b)| a * b).sum();
            (price, payoff)
        })
        .collect();
    (Market::with_secure_asset(random_space(rng, n), &assets), psi)
}

fn random_x(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..=r)).collect()
}

fn agree(a: &RiskResult, b: &RiskResult, tol: f64) -> bool {
    match (a.value, b.value) {
        (ExtReal::Finite(p), ExtReal::Finite(q)) => (p - q).abs() <= tol,
        (p, q) => p == q,
    }
}

fn grid21() -> Vec<Vec<f64>> {
    let mut g = Vec::new();
    for i in 0..21 {
        for j in 0..21 {
            g.push(vec![-5.0 + 0.5 * i as f64, -5.0 + 0.5 * j as f64]);
        }
    }
    g
}

fn incomplete3() -> ValidatedMarket {
    let space = ScenarioSpace::uniform(3).unwrap();
    validate_market(Market::with_secure_asset(space, &[(1.0, vec![1.5, 1.0, 0.5])]), MARKET_TOL).unwrap()
}

fn strategy_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let opts = SolveOptions::default();
    let mut markets = 0;
    let mut compared = [0usize; 3];
    let mut worst = 0.0f64;
    while markets < 500 {
        let n = rng.gen_range(2..=8);
        let risky = rng.gen_range(1..=4usize).min(n - 1);
        let (m, _) = planted_market(&mut rng, n, risky);
        let Ok(vm) = validate_market(m, MARKET_TOL) else {
            continue;
        };
        markets += 1;
        let x = random_x(&mut rng, n, 5.0);
        let a = alpha(rng.gen_range(0.05..0.95));
        let sets = [positive_cone(vm.space()), avar_acceptance(vm.space(), a), var_acceptance(vm.space(), a)];
        for (k, set) in sets.iter().enumerate() {
            let exact = if k < 2 {
                rho_direct_lp(set, &vm, &x)
            } else {
                rho_var_exact(set, &vm, &x, &opts)
            }
            .map_err(|e| format!("market {markets}, family {k}: {e}"))?;
            let red = rho_reduction(set, &vm, &x, &opts).map_err(|e| format!("market {markets}, family {k}: {e}"))?;
            if let (ExtReal::Finite(p), ExtReal::Finite(q)) = (exact.value, red.value) {
                worst = worst.max((p - q).abs());
            }
            if !agree(&exact, &red, 1e-5) {
                return Err(format!(
                    "market {markets}, family {k}, x = {x:?}: {:?} vs {:?}",
                    exact.value, red.value
                ));
            }
            compared[k] += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 60.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!(
        "{markets} markets, {compared:?} comparisons (cone, AVaR, VaR), max gap {worst:.1e}, {secs:.1}s"
    ))
}

fn axioms() -> Outcome {
    let opts = VerifyOptions::default();
    let binomial = fixtures::binomial();
    let inc = incomplete3();
    let cases = [
        ("cone", positive_cone(inc.space()), inc.clone()),
        ("avar", avar_acceptance(inc.space(), alpha(0.3)), inc.clone()),
        ("var", var_acceptance(inc.space(), alpha(0.4)), inc.clone()),
        ("avar binomial", avar_acceptance(binomial.space(), alpha(0.6)), binomial),
        ("halfplane", halfspace_acceptance(vec![1.0, 0.0]).unwrap(), fixtures::symmetric()),
        ("line", cone_plus_span(3, &[vec![0.0, 0.0, 1.0]]).unwrap(), fixtures::plane()),
    ];
    let mut parts = Vec::new();
    for (i, (name, a, vm)) in cases.iter().enumerate() {
        let r = check_risk_measure_axioms(a, vm, 1000, 100 + i as u64, &opts).map_err(|e| e.to_string())?;
        if !r.passed() || r.trials != 1000 {
            return Err(format!("{name}: {:?}", r.violations.first()));
        }
        parts.push(format!("{name} {}/{}", r.trials - r.inconclusive, r.trials));
    }
    Ok(parts.join(", "))
}

fn levelsets() -> Outcome {
    let opts = VerifyOptions::default();
    let binomial = fixtures::binomial();
    let inc = incomplete3();
    let plane_grid: Vec<Vec<f64>> = grid21()
        .into_iter()
        .map(|mut p| {
            p.push(0.5 * p[0] - p[1]);
            p
        })
        .collect();
    let cases = [
        ("cone", positive_cone(binomial.space()), binomial.clone(), grid21()),
        ("avar", avar_acceptance(binomial.space(), alpha(0.3)), binomial.clone(), grid21()),
        ("halfplane", halfspace_acceptance(vec![1.0, 0.0]).unwrap(), fixtures::symmetric(), grid21()),
        ("var binomial", var_acceptance(binomial.space(), alpha(0.6)), binomial.clone(), grid21()),
        ("var 3 states", var_acceptance(inc.space(), alpha(0.4)), inc.clone(), plane_grid),
    ];
    let mut parts = Vec::new();
    for (name, a, vm, grid) in &cases {
        let r = check_levelset_theorem(a, vm, &[-1.0, 0.0, 1.0], grid, 0, &opts).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("{name}: {:?}", r.violations.first()));
        }
        if !r.healthy() {
            return Err(format!("{name}: {} of {} inconclusive", r.inconclusive, r.trials));
        }
        parts.push(format!("{name} {} inconclusive/{}", r.inconclusive, r.trials));
    }
    Ok(parts.join(", "))
}

fn counterexamples() -> Outcome {
    let opts = SolveOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);

    let half = halfspace_acceptance(vec![1.0, 0.0]).unwrap();
    let sym = fixtures::symmetric();
    let mut probes = grid21();
    probes.extend((0..200).map(|_| random_x(&mut rng, 2, 100.0)));
    for x in &probes {
        for r in [rho(&half, &sym, x, &opts), rho_reduction(&half, &sym, x, &opts)] {
            let v = r.map_err(|e| e.to_string())?.value;
            if v != ExtReal::NegInf {
                return Err(format!("halfplane: ρ({x:?}) = {v}"));
            }
        }
    }

    let a2 = cone_plus_span(3, &[vec![0.0, 0.0, 1.0]]).unwrap();
    let plane = fixtures::plane();
    let mut split = [0usize; 2];
    let mut xs: Vec<Vec<f64>> = (0..300).map(|_| random_x(&mut rng, 3, 5.0)).collect();
    xs.push(vec![0.0, -4.0, 2.0]);
    for x in &xs {
        let expected = if x[0] >= 0.0 { ExtReal::NegInf } else { ExtReal::PosInf };
        for r in [rho(&a2, &plane, x, &opts), rho_reduction(&a2, &plane, x, &opts)] {
            let v = r.map_err(|e| e.to_string())?.value;
            if v != expected {
                return Err(format!("A2: ρ({x:?}) = {v}, expected {expected}"));
            }
        }
        split[usize::from(x[0] < 0.0)] += 1;
    }

    let second = fixtures::second_state();
    let arb = check_no_arbitrage(&second, MARKET_TOL).map_err(|e| e.to_string())?;
    let mono = check_monotone_pricing(&second, MARKET_TOL).map_err(|e| e.to_string())?;
    if arb.kind != ArbitrageKind::FreeLottery || !mono.monotone {
        return Err(format!("π(Z) = Z2: kind {:?}, monotone {}", arb.kind, mono.monotone));
    }
    Ok(format!(
        "halfplane -inf on {} probes; A2 -inf/+inf on {}/{} probes; π(Z)=Z2 FreeLottery with monotone pricing",
        probes.len(),
        split[0],
        split[1]
    ))
}

fn finiteness() -> Outcome {
    let opts = VerifyOptions::default();
    let binomial = fixtures::binomial();
    let inc = incomplete3();
    let cases = [
        ("cone", positive_cone(inc.space()), inc.clone()),
        ("avar", avar_acceptance(inc.space(), alpha(0.3)), inc.clone()),
        ("var", var_acceptance(binomial.space(), alpha(0.6)), binomial),
        ("line", cone_plus_span(3, &[vec![0.0, 0.0, 1.0]]).unwrap(), fixtures::plane()),
        ("halfplane", halfspace_acceptance(vec![1.0, 0.0]).unwrap(), fixtures::symmetric()),
    ];
    let mut parts = Vec::new();
    for (i, (name, a, vm)) in cases.iter().enumerate() {
        let r = check_domain_theorem(a, vm, 500, 50 + i as u64, &opts).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("{name}: {:?}", r.violations.first()));
        }
        let consistent = 1.0 - r.inconclusive_fraction();
        if consistent < 0.95 {
            return Err(format!("{name}: boundary consistent in {:.1}%", 100.0 * consistent));
        }
        parts.push(format!("{name} {:.1}%", 100.0 * consistent));
    }
    Ok(format!("500 trials each, 0 violations; boundary consistency {}", parts.join(", ")))
}

fn arbitrage_detector() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_psi = 0.0f64;
    let mut complete = 0;
    let mut made = 0;
    while made < 200 {
        let n = rng.gen_range(2..=8);
        let risky = if made % 2 == 0 { n - 1 } else { rng.gen_range(1..n) };
        let (m, psi) = planted_market(&mut rng, n, risky);
        let Ok(vm) = validate_market(m, MARKET_TOL) else {
            continue;
        };
        made += 1;
        let r = check_no_arbitrage(&vm, MARKET_TOL).map_err(|e| e.to_string())?;
        let Some(found) = r.state_prices.filter(|_| r.kind == ArbitrageKind::None) else {
            return Err(format!("planted market {made} reported {:?}", r.kind));
        };
        let market = vm.market();
        for (payoff, price) in market.payoffs.iter().zip(&market.prices) {
            let implied: f64 = payoff.iter().zip(&found).map(|(a, b)| a * b).sum();
            worst_psi = worst_psi.max((implied - price).abs());
        }
        if found.iter().any(|v| *v <= 0.0) {
            return Err(format!("market {made}: state prices not positive"));
        }
        if vm.dim_m() == n {
            complete += 1;
            worst_psi = found.iter().zip(&psi).fold(worst_psi, |w, (a, b)| w.max((a - b).abs()));
        }
    }
    if worst_psi > 1e-6 {
        return Err(format!("state prices off by {worst_psi:e}"));
    }

    let mut lunches = 0;
    while lunches < 200 {
        let n = rng.gen_range(2..=6);
        let risky = rng.gen_range(1..n).max(1);
        let (mut m, _) = planted_market(&mut rng, n, risky);
        // Plant x* with S1ᵀx* >= 0 and S0·x* < 0 by repricing the last asset.
        let x: Vec<f64> = (0..=risky).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if x[risky].abs() < 0.2 {
            continue;
        }
        let target: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        let mut last = target.clone();
        for (i, xi) in x.iter().enumerate().take(risky) {
            for (l, p) in last.iter_mut().zip(&m.payoffs[i]) {
                *l -= xi * p;
            }
        }
        last.iter_mut().for_each(|v| *v /= x[risky]);
        m.payoffs[risky] = last;
        let others: f64 = x.iter().zip(&m.prices).take(risky).map(|(a, b)| a * b).sum();
        let cost = -rng.gen_range(0.01..1.0);
        m.prices[risky] = (cost - others) / x[risky];
        let Ok(vm) = validate_market(m, MARKET_TOL) else {
            continue;
        };
        lunches += 1;
        let r = check_no_arbitrage(&vm, MARKET_TOL).map_err(|e| e.to_string())?;
        let Some(w) = r.free_lunch.as_ref() else {
            return Err(format!("planted free lunch {lunches} not found ({:?})", r.kind));
        };
        let market = vm.market();
        let payoff = market.payoff_of(w);
        if market.cost_of(w) >= -1e-8 || payoff.iter().any(|v| *v < -1e-9) {
            return Err(format!("bad witness {w:?}"));
        }
    }
    Ok(format!(
        "200 planted ψ ({complete} complete) recovered within {worst_psi:.1e}; 200/200 planted free lunches found"
    ))
}

fn avar_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut worst_cash = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let space = random_space(&mut rng, n);
        let x = random_x(&mut rng, n, 1.0);
        let a = rng.gen_range(0.05..0.95);
        let k = 10_000;
        let h = a / k as f64;
        let quad: f64 = (0..k)
            .map(|i| compute_var(&space, &x, alpha((i as f64 + 0.5) * h)))
            .sum::<f64>()
            * h
            / a;
        let exact = compute_avar(&space, &x, alpha(a));
        worst = worst.max((exact - quad).abs());
        let c = rng.gen_range(-1.0..1.0);
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        worst_cash = worst_cash.max((compute_avar(&space, &shifted, alpha(a)) - (exact - c)).abs());
    }
    if worst > 1e-4 || worst_cash > 1e-12 {
        return Err(format!("quadrature gap {worst:e}, cash invariance gap {worst_cash:e}"));
    }
    Ok(format!("200 positions, quadrature gap {worst:.1e}, cash invariance gap {worst_cash:.1e}"))
}

fn negative_controls() -> Outcome {
    let opts = VerifyOptions::default();
    let three = fixtures::three_state();
    let broken = polyhedral_acceptance(vec![vec![1.0, -1.0, 0.0]], vec![0.0]).unwrap();
    let r1 = check_risk_measure_axioms(&broken, &three, 100, 8, &opts).map_err(|e| e.to_string())?;
    let r2 = check_market_pricing(&fixtures::free_lunch(), 8).map_err(|e| e.to_string())?;
    let tie = var_acceptance_with(three.space(), alpha(0.4), TieRule::ZeroIsLoss);
    let r3 = check_acceptance_axioms(&tie, three.space(), 300, 8);
    let counts = [r1.violations.len(), r2.violations.len(), r3.violations.len()];
    if counts.iter().any(|c| *c == 0) {
        return Err(format!("violations per fixture {counts:?}"));
    }
    Ok(format!(
        "violations: non-monotone set {}, mispriced market {}, zero-is-loss VaR {}",
        counts[0], counts[1], counts[2]
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("strategy equivalence", strategy_equivalence),
        ("risk-measure axioms", axioms),
        ("level-set theorem", levelsets),
        ("counterexamples reproduced", counterexamples),
        ("finiteness theorem", finiteness),
        ("arbitrage detector soundness", arbitrage_detector),
        ("AVaR quadrature cross-check", avar_quadrature),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
