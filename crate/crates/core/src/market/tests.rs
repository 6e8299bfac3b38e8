use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fixtures;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn binomial_market_validates() {
    let vm = fixtures::binomial();
    assert_eq!(vm.dim_m(), 2);
    assert_eq!(vm.kernel_basis().len(), 1);
    assert_eq!(vm.numeraire(), &[1.0, 1.0]);
}

#[test]
fn parallel_payoff_is_rank_deficient() {
    let m = Market::with_secure_asset(ScenarioSpace::uniform(2).unwrap(), &[(2.0, vec![2.0, 2.0])]);
    assert!(matches!(
        validate_market(m, MARKET_TOL),
        Err(MarketError::RankDeficient { rank: 1, assets: 2 })
    ));
}

#[test]
fn too_many_assets_is_rank_deficient() {
    let m = Market::with_secure_asset(
        ScenarioSpace::uniform(2).unwrap(),
        &[(1.0, vec![2.0, 0.5]), (1.0, vec![0.0, 3.0])],
    );
    assert!(matches!(
        validate_market(m, MARKET_TOL),
        Err(MarketError::RankDeficient { .. })
    ));
}

#[test]
fn secure_asset_is_checked() {
    let mut m = fixtures::binomial_market();
    m.prices[0] = 0.9;
    assert!(matches!(
        validate_market(m, MARKET_TOL),
        Err(MarketError::BadSecureAsset(_))
    ));
    let mut m = fixtures::binomial_market();
    m.payoffs[0] = vec![1.0, 1.1];
    assert!(matches!(
        validate_market(m, MARKET_TOL),
        Err(MarketError::BadSecureAsset(_))
    ));
}

#[test]
fn numeraire_checks() {
    let mut m = fixtures::binomial_market();
    m.numeraire = Some(vec![1.0, 1.0]);
    assert!(validate_market(m, MARKET_TOL).is_ok());

    // (2, 0.5) prices to 1 as well and is nonnegative.
    let mut m = fixtures::binomial_market();
    m.numeraire = Some(vec![2.0, 0.5]);
    assert_eq!(validate_market(m, MARKET_TOL).unwrap().numeraire(), &[2.0, 0.5]);

    let mut m = fixtures::binomial_market();
    m.numeraire = Some(vec![2.0, 2.0]);
    assert!(matches!(validate_market(m, MARKET_TOL), Err(MarketError::BadNumeraire(_))));

    // 3*1 - 2*(2, 0.5) = (-1, 2): eligible, price 1, but negative.
    let mut m = fixtures::binomial_market();
    m.numeraire = Some(vec![-1.0, 2.0]);
    assert!(matches!(validate_market(m, MARKET_TOL), Err(MarketError::BadNumeraire(_))));

    let mut m = fixtures::plane_market();
    m.numeraire = Some(vec![1.0, 0.0, 1.0]);
    assert!(matches!(validate_market(m, MARKET_TOL), Err(MarketError::BadNumeraire(_))));

    let mut m = fixtures::plane_market();
    m.numeraire = None;
    assert!(matches!(validate_market(m, MARKET_TOL), Err(MarketError::BadNumeraire(_))));
}

#[test]
fn pricing_examples() {
    let vm = fixtures::binomial();
    assert!(close(price(&vm, &[1.0, 1.0], 1e-9).unwrap(), 1.0, 1e-12));
    assert!(close(price(&vm, &[0.0, 0.0], 1e-9).unwrap(), 0.0, 1e-12));
    assert!(close(price(&vm, &[2.0, 0.5], 1e-9).unwrap(), 1.0, 1e-12));
    // ψ = (1/3, 2/3)
    assert!(close(price(&vm, &[3.0, 0.0], 1e-9).unwrap(), 1.0, 1e-12));
}

#[test]
fn non_eligible_payoff_is_rejected() {
    let vm = fixtures::three_state();
    // M = span{1, e3}; (1, -1, 0)/√2 is orthogonal to M.
    let z = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
    assert!(!in_m(&vm, &z, 1e-9));
    assert!(matches!(price(&vm, &z, 1e-9), Err(MarketError::NotInSpan { .. })));
}

#[test]
fn membership_in_m() {
    let vm = fixtures::three_state();
    let u = vm.numeraire().to_vec();
    assert!(in_m(&vm, &u, 1e-9));
    let z: Vec<f64> = (0..3).map(|w| 3.0 * u[w] - 2.0 * [0.0, 0.0, 1.0][w]).collect();
    assert!(in_m(&vm, &z, 1e-9));
}

fn assert_spans(basis: &[Vec<f64>], expected: &[f64]) {
    assert_eq!(basis.len(), 1);
    let b = &basis[0];
    let scale = b.iter().zip(expected).find(|(_, e)| e.abs() > 0.0).map(|(b, e)| b / e).unwrap();
    for (bi, ei) in b.iter().zip(expected) {
        assert!(close(*bi, scale * ei, 1e-12), "{b:?} not parallel to {expected:?}");
    }
}

#[test]
fn kernel_examples() {
    assert_spans(kernel_basis(&fixtures::symmetric()).as_slice(), &[1.0, -1.0]);
    assert_spans(kernel_basis(&fixtures::plane()).as_slice(), &[0.0, 1.0, 0.0]);
    let vm = fixtures::binomial();
    let k = kernel_basis(&vm);
    assert_eq!(k.len(), 1);
    assert!(close(price(&vm, &k[0], 1e-9).unwrap(), 0.0, 1e-12));
}

#[test]
fn binomial_market_is_arbitrage_free() {
    let report = check_no_arbitrage(&fixtures::binomial(), 1e-8).unwrap();
    assert_eq!(report.kind, ArbitrageKind::None);
    let psi = report.state_prices.unwrap();
    assert!(close(psi[0], 1.0 / 3.0, 1e-9) && close(psi[1], 2.0 / 3.0, 1e-9));
}

#[test]
fn second_state_pricing_is_a_free_lottery_but_monotone() {
    let vm = fixtures::second_state();
    let report = check_no_arbitrage(&vm, 1e-8).unwrap();
    assert_eq!(report.kind, ArbitrageKind::FreeLottery);
    let x = report.witness().unwrap();
    let payoff = vm.market().payoff_of(x);
    assert!(close(vm.market().cost_of(x), 0.0, 1e-12));
    assert!(close(payoff[0], 1.0, 1e-9) && close(payoff[1], 0.0, 1e-9));
    assert!(check_monotone_pricing(&vm, 1e-8).unwrap().monotone);
}

#[test]
fn underpriced_stock_is_a_free_lunch() {
    let vm = fixtures::free_lunch();
    let report = check_no_arbitrage(&vm, 1e-8).unwrap();
    assert_eq!(report.kind, ArbitrageKind::FreeLunch);
    let x = report.witness().unwrap();
    assert!(vm.market().cost_of(x) < -1e-8);
    assert!(vm.market().payoff_of(x).iter().all(|v| *v >= -1e-12));
    // The lottery search succeeds as well and is reported alongside.
    assert!(report.free_lottery.is_some());

    let mono = check_monotone_pricing(&vm, 1e-8).unwrap();
    assert!(!mono.monotone);
    assert!(close(mono.min_price, -0.5, 1e-9));
    let z = mono.witness.unwrap();
    assert!(z.iter().all(|v| *v >= -1e-12));
    assert!(price(&vm, &z, 1e-9).unwrap() < 0.0);
}

#[test]
fn arbitrage_free_market_prices_monotonically() {
    assert!(check_monotone_pricing(&fixtures::binomial(), 1e-8).unwrap().monotone);
}

fn random_free_market(rng: &mut ChaCha8Rng) -> (ValidatedMarket, Vec<f64>) {
    loop {
        let n = rng.gen_range(2..7);
        let k = rng.gen_range(1..n);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
        let space = ScenarioSpace::from_weights(&weights).unwrap();
        let raw_psi: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw_psi.iter().sum();
        let psi: Vec<f64> = raw_psi.iter().map(|v| v / total).collect();
        let risky: Vec<(f64, Vec<f64>)> = (0..k)
            .map(|_| {
                let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
                (dot(&z, &psi), z)
            })
            .collect();
        if let Ok(vm) = validate_market(Market::with_secure_asset(space, &risky), MARKET_TOL) {
            return (vm, psi);
        }
    }
}

fn random_eligible(vm: &ValidatedMarket, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x: Vec<f64> = (0..vm.n_assets()).map(|_| rng.gen_range(-3.0..3.0)).collect();
    vm.market().payoff_of(&x)
}

#[test]
fn pricing_is_monotone_on_random_arbitrage_free_markets() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut pairs = 0;
    while pairs < 1000 {
        let (vm, _) = random_free_market(&mut rng);
        for _ in 0..20 {
            let z1 = random_eligible(&vm, &mut rng);
            // Z2 = Z1 + d with d >= 0 eligible: take d = c·U + nonnegative kernel-free part
            let d: Vec<f64> = {
                let z = random_eligible(&vm, &mut rng);
                let m = z.iter().cloned().fold(f64::INFINITY, f64::min);
                z.iter().map(|v| v - m.min(0.0)).collect()
            };
            let z2: Vec<f64> = z1.iter().zip(&d).map(|(a, b)| a + b).collect();
            let p1 = price(&vm, &z1, 1e-9).unwrap();
            let p2 = price(&vm, &z2, 1e-9).unwrap();
            assert!(p2 >= p1 - 1e-9, "{p2} < {p1}");
            pairs += 1;
        }
    }
}

#[test]
fn state_prices_reproduce_prices() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let (vm, _) = random_free_market(&mut rng);
        let report = check_no_arbitrage(&vm, 1e-8).unwrap();
        assert_eq!(report.kind, ArbitrageKind::None);
        let psi = report.state_prices.unwrap();
        assert!(psi.iter().all(|v| *v > 1e-8));
        for _ in 0..10 {
            let z = random_eligible(&vm, &mut rng);
            let p = price(&vm, &z, 1e-9).unwrap();
            assert!(close(p, dot(&psi, &z), 1e-8 * (1.0 + sup_norm(&z))));
        }
    }
}

#[test]
fn price_level_sets_are_shifted_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let (vm, _) = random_free_market(&mut rng);
        let m = rng.gen_range(-5.0..5.0);
        let y: Vec<f64> = (0..vm.kernel_basis().len()).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut z = vm.kernel_element(&y);
        linalg::axpy(m, vm.numeraire(), &mut z);
        assert!(close(price(&vm, &z, 1e-9).unwrap(), m, 1e-9));
        for k in vm.kernel_basis() {
            assert!(in_m(&vm, k, 1e-9));
            assert!(close(vm.price_unchecked(k), 0.0, 1e-9));
        }
    }
}

#[test]
fn law_of_one_price_across_solve_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let (vm, _) = random_free_market(&mut rng);
        let z = random_eligible(&vm, &mut rng);
        let via_portfolio = vm.market().cost_of(&vm.portfolio(&z));
        let via_representer = vm.price_unchecked(&z);
        assert!(close(via_portfolio, via_representer, 1e-9 * (1.0 + sup_norm(&z))));
    }
}

#[test]
fn market_file_round_trip_and_rejections() {
    let text = r#"{"states":[{"label":"up","prob":0.5},{"label":"down","prob":0.5}],
        "assets":[{"name":"cash","price":1,"payoff":[1,1]},{"name":"stock","price":1,"payoff":[2,0.5]}]}"#;
    let m = Market::from_json(text).unwrap();
    assert_eq!(m, {
        let mut b = fixtures::binomial_market();
        b.space = ScenarioSpace::new(vec!["up".into(), "down".into()], vec![0.5, 0.5]).unwrap();
        b.names = vec!["cash".into(), "stock".into()];
        b
    });
    let back = Market::from_json(&MarketFile::from_market(&m).to_json()).unwrap();
    assert_eq!(back, m);

    let bad_sum = text.replace("\"prob\":0.5}]", "\"prob\":0.6}]");
    assert!(matches!(Market::from_json(&bad_sum), Err(MarketError::Parse(_))));
    let negative = text.replace("\"prob\":0.5}]", "\"prob\":-0.5}]");
    assert!(matches!(Market::from_json(&negative), Err(MarketError::Parse(_))));
    assert!(matches!(Market::from_json("{\"states\": [NaN]}"), Err(MarketError::Parse(_))));
    assert!(matches!(Market::from_json("{"), Err(MarketError::Parse(_))));
}
