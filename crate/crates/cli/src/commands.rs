use std::fmt::Debug;
use std::path::Path;

use acceptrisk::acceptance::{AcceptanceDescriptor, AcceptanceSet};
use acceptrisk::directional::{dir_bd_member, APlusKer, DirectionalProbe};
use acceptrisk::market::{check_monotone_pricing, check_no_arbitrage, price, ArbitrageKind, MarketFile};
use acceptrisk::riskmeasure::{rho_direct_lp, rho_reduction, rho_var_exact, ExtReal, RiskResult};
use acceptrisk::verify::{self, PropertyReport, VerifyError, VerifyOptions};
use acceptrisk::{rho, validate_market, SolveOptions, ValidatedMarket};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Cli, Command, StrategyArg, Suite};

/// Largest number of points `levelset` will classify.
const MAX_POINTS: usize = 1_000_000;

pub struct Outcome {
    pub body: Value,
    pub code: u8,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Self { body, code: 0 }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl CliError {
    fn usage(kind: &str, message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: kind.into(),
            message: message.into(),
        }
    }

    fn domain<E: Debug + std::fmt::Display>(e: E) -> Self {
        Self {
            code: 1,
            kind: variant(&e),
            message: e.to_string(),
        }
    }

    pub fn body(&self) -> Value {
        json!({ "error": self.kind, "message": self.message })
    }
}

/// Name of an enum variant from its `Debug` form.
fn variant<E: Debug>(e: &E) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage("Io", format!("{}: {e}", path.display())))
}

fn load_market(path: &Path, tol: f64) -> Result<ValidatedMarket, CliError> {
    let file = MarketFile::from_json(&read(path)?).map_err(|e| CliError::usage("Parse", e.to_string()))?;
    let market = file.into_market().map_err(|e| match e {
        acceptrisk::MarketError::Parse(_) => CliError::usage("Parse", e.to_string()),
        other => CliError::domain(other),
    })?;
    validate_market(market, tol).map_err(CliError::domain)
}

fn load_acceptance(path: &Path, vm: &ValidatedMarket, tol: f64) -> Result<AcceptanceSet, CliError> {
    let d = AcceptanceDescriptor::from_json(&read(path)?).map_err(|e| CliError::usage("Parse", e.to_string()))?;
    let a = d.build(vm.space()).map_err(|e| CliError::usage(&variant(&e), e.to_string()))?;
    Ok(a.with_tol(tol))
}

fn parse_vector(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::usage("Parse", format!("{what}: {e}")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::usage(
            "DimensionMismatch",
            format!("{what} needs {n} finite entries, got `{s}`"),
        ));
    }
    Ok(v)
}

fn solve_options(cli: &Cli) -> Result<SolveOptions, CliError> {
    let opts = SolveOptions {
        m_bracket_max: cli.bracket_max,
        m_bracket_init: 1f64.min(cli.bracket_max),
        member_tol: cli.tol,
        ..SolveOptions::default()
    };
    opts.check().map_err(|e| CliError::usage("BadOptions", e.to_string()))?;
    Ok(opts)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::usage("BadOptions", "--tol must be positive"));
    }
    match &cli.command {
        Command::Validate { market } => validate(cli, market),
        Command::Price { market, payoff } => {
            let vm = load_market(market, cli.tol)?;
            let z = parse_vector(payoff, vm.n_states(), "payoff")?;
            let p = price(&vm, &z, cli.tol.max(1e-9)).map_err(CliError::domain)?;
            Ok(Outcome::ok(json!({ "price": p, "holdings": vm.portfolio(&z) })))
        }
        Command::Arbitrage { market } => {
            let vm = load_market(market, cli.tol)?;
            let arb = check_no_arbitrage(&vm, cli.tol).map_err(CliError::domain)?;
            let mono = check_monotone_pricing(&vm, cli.tol).map_err(CliError::domain)?;
            Ok(Outcome::ok(json!({ "arbitrage": arb, "monotone_pricing": mono })))
        }
        Command::Requirement {
            market,
            acceptance,
            x,
            strategy,
            allow_approximate,
        } => {
            let vm = load_market(market, cli.tol)?;
            let a = load_acceptance(acceptance, &vm, cli.tol)?;
            let x = parse_vector(x, vm.n_states(), "x")?;
            let opts = SolveOptions {
                allow_approximate: *allow_approximate,
                ..solve_options(cli)?
            };
            let r = match strategy {
                StrategyArg::Auto => rho(&a, &vm, &x, &opts),
                StrategyArg::Direct => rho_direct_lp(&a, &vm, &x),
                StrategyArg::Var => rho_var_exact(&a, &vm, &x, &opts),
                StrategyArg::Reduction => rho_reduction(&a, &vm, &x, &opts),
            }
            .map_err(CliError::domain)?;
            Ok(Outcome::ok(requirement_body(&r)))
        }
        Command::Portfolio { market, acceptance, x } => {
            let vm = load_market(market, cli.tol)?;
            let a = load_acceptance(acceptance, &vm, cli.tol)?;
            let x = parse_vector(x, vm.n_states(), "x")?;
            let r = rho(&a, &vm, &x, &solve_options(cli)?).map_err(CliError::domain)?;
            let holdings = r.optimal_payoff.as_ref().map(|z| vm.portfolio(z));
            let cost = holdings.as_ref().map(|h| vm.market().cost_of(h));
            let accepted = r.optimal_payoff.as_ref().map(|z| {
                let y: Vec<f64> = x.iter().zip(z).map(|(a, b)| a + b).collect();
                a.member(&y)
            });
            Ok(Outcome::ok(json!({
                "value": r.value,
                "attained": r.attained,
                "payoff": r.optimal_payoff,
                "holdings": holdings,
                "names": vm.market().names,
                "cost": cost,
                "accepted": accepted,
            })))
        }
        Command::Levelset {
            market,
            acceptance,
            m,
            grid,
            points,
        } => levelset(cli, market, acceptance, *m, grid.as_deref(), points.as_deref()),
        Command::Properties {
            market,
            acceptance,
            suite,
            trials,
            m,
        } => properties(cli, market, acceptance, *suite, *trials, m),
    }
}

fn requirement_body(r: &RiskResult) -> Value {
    json!({
        "value": r.value,
        "attained": r.attained,
        "payoff": r.optimal_payoff,
        "strategy": r.strategy,
        "diagnostics": r.diagnostics,
    })
}

fn validate(cli: &Cli, market: &Path) -> Result<Outcome, CliError> {
    let vm = load_market(market, cli.tol)?;
    let arb = check_no_arbitrage(&vm, cli.tol).map_err(CliError::domain)?;
    let mono = check_monotone_pricing(&vm, cli.tol).map_err(CliError::domain)?;
    let body = json!({
        "valid": true,
        "n_states": vm.n_states(),
        "n_assets": vm.n_assets(),
        "dim_m": vm.dim_m(),
        "numeraire": vm.numeraire(),
        "arbitrage": arb.kind,
        "state_prices": arb.state_prices,
        "witness": arb.witness(),
        "monotone_pricing": mono.monotone,
    });
    Ok(Outcome {
        body,
        code: if arb.kind == ArbitrageKind::None { 0 } else { 1 },
    })
}

/// `k^n` points on `[lo, hi]^n`.
fn cube_grid(lo: f64, hi: f64, k: usize, n: usize) -> Vec<Vec<f64>> {
    let coord = |i: usize| if k == 1 { lo } else { lo + (hi - lo) * i as f64 / (k - 1) as f64 };
    let total = k.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            // Last coordinate varies fastest.
            let mut p = vec![0.0; n];
            for slot in p.iter_mut().rev() {
                *slot = coord(idx % k);
                idx /= k;
            }
            p
        })
        .collect()
}

fn parse_grid(spec: &str, n: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::usage("Parse", format!("grid `{spec}` is not lo:hi:k"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let k: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && k >= 1) {
        return Err(bad());
    }
    if !(2..=3).contains(&n) {
        return Err(CliError::usage("GridTooLarge", format!("grids need 2 or 3 states, market has {n}; use --points")));
    }
    if (k as f64).powi(n as i32) > MAX_POINTS as f64 {
        return Err(CliError::usage("GridTooLarge", format!("{k}^{n} points exceed {MAX_POINTS}")));
    }
    Ok(cube_grid(lo, hi, k, n))
}

fn levelset(
    cli: &Cli,
    market: &Path,
    acceptance: &Path,
    m: f64,
    grid: Option<&str>,
    points: Option<&str>,
) -> Result<Outcome, CliError> {
    let vm = load_market(market, cli.tol)?;
    let a = load_acceptance(acceptance, &vm, cli.tol)?;
    let opts = solve_options(cli)?;
    let n = vm.n_states();
    let pts = match (grid, points) {
        (Some(g), None) => parse_grid(g, n)?,
        (None, Some(p)) => {
            let pts = p
                .split(';')
                .map(|s| parse_vector(s, n, "point"))
                .collect::<Result<Vec<_>, _>>()?;
            if pts.len() > MAX_POINTS {
                return Err(CliError::usage("GridTooLarge", "too many points"));
            }
            pts
        }
        _ => return Err(CliError::usage("Usage", "give exactly one of --grid and --points")),
    };
    if !m.is_finite() {
        return Err(CliError::usage("Parse", "m must be finite"));
    }
    let b = APlusKer { a: &a, vm: &vm, opts: &opts };
    let u = vm.numeraire();
    let band = 10.0 * opts.bisect_tol;
    let probe = DirectionalProbe::default();
    let mut counts = [0usize; 4];
    let mut rows = Vec::with_capacity(pts.len());
    for x in &pts {
        let (value, tag) = match rho(&a, &vm, x, &opts) {
            Err(e) => (Value::String(e.to_string()), 3),
            Ok(r) => {
                let tag = match r.value {
                    ExtReal::NegInf => 0,
                    ExtReal::PosInf => 2,
                    ExtReal::Finite(v) if v < m - band => 0,
                    ExtReal::Finite(v) if v > m + band => 2,
                    ExtReal::Finite(_) => {
                        let p: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + m * b).collect();
                        if dir_bd_member(&b, u, &p, &probe) {
                            1
                        } else {
                            3
                        }
                    }
                };
                (json!(r.value), tag)
            }
        };
        counts[tag] += 1;
        let name = ["below", "boundary", "above", "inconclusive"][tag];
        rows.push(json!({ "x": x, "rho": value, "tag": name }));
    }
    Ok(Outcome::ok(json!({
        "m": m,
        "points": rows,
        "counts": {
            "below": counts[0],
            "boundary": counts[1],
            "above": counts[2],
            "inconclusive": counts[3],
        },
    })))
}

/// Grid for the level-set and degeneracy suites: a cube for two or three
/// states, seeded uniform points otherwise.
fn suite_points(n: usize, per_axis: [usize; 2], count: usize, seed: u64) -> Vec<Vec<f64>> {
    match n {
        2 => cube_grid(-5.0, 5.0, per_axis[0], 2),
        3 => cube_grid(-5.0, 5.0, per_axis[1], 3),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| (0..n).map(|_| rng.gen_range(-5.0..=5.0)).collect()).collect()
        }
    }
}

fn properties(
    cli: &Cli,
    market: &Path,
    acceptance: &Path,
    suite: Suite,
    trials: usize,
    m: &str,
) -> Result<Outcome, CliError> {
    let vm = load_market(market, cli.tol)?;
    let a = load_acceptance(acceptance, &vm, cli.tol)?;
    let opts = VerifyOptions {
        solve: solve_options(cli)?,
        ..VerifyOptions::default()
    };
    let m_values: Vec<f64> = m
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::usage("Parse", format!("m: {e}")))?;
    let seed = cli.seed;
    let n = vm.n_states();
    let selected = |s: Suite| suite == s || suite == Suite::All;
    let skipped = |id: &str, why: &str| {
        let mut r = PropertyReport::new(id, seed);
        r.notes.push(format!("skipped: {why}"));
        r
    };
    let polyhedral = a.polyhedral().is_some();

    let mut reports: Vec<Result<PropertyReport, VerifyError>> = Vec::new();
    if selected(Suite::Market) {
        reports.push(verify::check_market_pricing(&vm, seed));
    }
    if selected(Suite::Acceptance) {
        reports.push(Ok(verify::check_acceptance_axioms(&a, vm.space(), trials.max(50), seed)));
    }
    if selected(Suite::Axioms) {
        reports.push(verify::check_risk_measure_axioms(&a, &vm, trials, seed, &opts));
    }
    if selected(Suite::Levelsets) {
        let grid = suite_points(n, [21, 9], trials, seed);
        reports.push(verify::check_levelset_theorem(&a, &vm, &m_values, &grid, seed, &opts));
    }
    if selected(Suite::Domain) {
        reports.push(verify::check_domain_theorem(&a, &vm, trials, seed, &opts));
    }
    if selected(Suite::Degeneracy) {
        let grid = suite_points(n, [11, 5], trials, seed);
        reports.push(verify::check_degeneracy_lemmas(&a, &vm, &grid, seed, &opts));
    }
    if selected(Suite::Induced) {
        reports.push(verify::check_induced_set_theorem(&a, &vm, trials.min(50), seed, &opts));
    }
    if selected(Suite::Variation) {
        reports.push(if polyhedral {
            verify::check_variation_lemma(&a, &vm, trials.min(50), seed, &opts)
        } else {
            Ok(skipped("variation_lemma", "acceptance set is not polyhedral"))
        });
    }
    if selected(Suite::GoodDeal) {
        reports.push(verify::check_good_deal_lemma(&a, &vm, trials, seed));
    }
    if selected(Suite::Topology) {
        reports.push(if polyhedral {
            let grid = suite_points(n, [11, 5], trials, seed);
            verify::check_directional_vs_topological(&a, &vm, &grid, &opts)
        } else {
            Ok(skipped("directional_vs_topological", "acceptance set is not polyhedral"))
        });
    }
    let reports: Vec<PropertyReport> = reports
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(CliError::domain)?;
    let passed = reports.iter().all(PropertyReport::passed);
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "property_id": r.property_id,
                "trials": r.trials,
                "violations": r.violations.len(),
                "inconclusive": r.inconclusive,
            })
        })
        .collect();
    Ok(Outcome {
        body: json!({ "passed": passed, "seed": seed, "summary": summary, "reports": reports }),
        code: if passed { 0 } else { 1 },
    })
}
