//! Small markets and sets used throughout the tests, the acceptance suite
//! and the CLI examples.

use crate::market::{validate_market, Market, ScenarioSpace, ValidatedMarket, MARKET_TOL};

fn validated(m: Market) -> ValidatedMarket {
    validate_market(m, MARKET_TOL).expect("fixture market is valid")
}

/// Two equally likely states, secure asset and a stock paying `(2, 0.5)`
/// for price 1. State prices `(1/3, 2/3)`.
pub fn binomial_market() -> Market {
    Market::with_secure_asset(
        ScenarioSpace::uniform(2).unwrap(),
        &[(1.0, vec![2.0, 0.5])],
    )
}

pub fn binomial() -> ValidatedMarket {
    validated(binomial_market())
}

/// `X = M = R^2` with `π(Z) = (Z1 + Z2)/2`: secure asset plus an
/// Arrow security for state 1 priced 1/2.
pub fn symmetric_market() -> Market {
    Market::with_secure_asset(
        ScenarioSpace::uniform(2).unwrap(),
        &[(0.5, vec![1.0, 0.0])],
    )
}

pub fn symmetric() -> ValidatedMarket {
    validated(symmetric_market())
}

/// `X = M = R^2` with `π(Z) = Z2`: the Arrow security for state 1 is free.
/// Pricing is monotone but the market has a free lottery.
pub fn second_state_market() -> Market {
    Market::with_secure_asset(
        ScenarioSpace::uniform(2).unwrap(),
        &[(0.0, vec![1.0, 0.0])],
    )
}

pub fn second_state() -> ValidatedMarket {
    validated(second_state_market())
}

/// `X = R^3`, `M = {0} x R x R`, `π(Z) = Z3`, numéraire `U = (0, 0, 1)`.
/// No secure asset.
pub fn plane_market() -> Market {
    Market::general(
        ScenarioSpace::uniform(3).unwrap(),
        &[(0.0, vec![0.0, 1.0, 0.0]), (1.0, vec![0.0, 0.0, 1.0])],
        vec![0.0, 0.0, 1.0],
    )
}

pub fn plane() -> ValidatedMarket {
    validated(plane_market())
}

/// Two states; the stock pays at least the secure asset in every state
/// but costs only 1/2. Buying it and selling the secure asset is a free
/// lunch.
pub fn free_lunch_market() -> Market {
    Market::with_secure_asset(
        ScenarioSpace::uniform(2).unwrap(),
        &[(0.5, vec![1.0, 2.0])],
    )
}

pub fn free_lunch() -> ValidatedMarket {
    validated(free_lunch_market())
}

/// Complete market on `n` equally likely states whose state prices equal
/// the probabilities: secure asset plus Arrow securities for states
/// `1..n-1`, each priced `1/n`.
pub fn uniform_complete_market(n: usize) -> Market {
    let risky: Vec<(f64, Vec<f64>)> = (0..n - 1)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            (1.0 / n as f64, e)
        })
        .collect();
    Market::with_secure_asset(ScenarioSpace::uniform(n).unwrap(), &risky)
}

pub fn uniform_complete(n: usize) -> ValidatedMarket {
    validated(uniform_complete_market(n))
}

/// Three equally likely states, secure asset and an Arrow security on
/// state 3 priced 1/2. Used by the non-monotone negative control.
pub fn three_state_market() -> Market {
    Market::with_secure_asset(
        ScenarioSpace::uniform(3).unwrap(),
        &[(0.5, vec![0.0, 0.0, 1.0])],
    )
}

pub fn three_state() -> ValidatedMarket {
    validated(three_state_market())
}
