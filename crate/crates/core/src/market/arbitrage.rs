use serde::{Deserialize, Serialize};

use super::{MarketError, ValidatedMarket};
use crate::linprog::{solve_lp, LpOptions, LpProblem, LpStatus, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArbitrageKind {
    None,
    FreeLunch,
    FreeLottery,
}

/// Outcome of the arbitrage scan.
///
/// Both witnesses are reported when both searches succeed; `kind` names the
/// stronger one (a free lunch).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArbitrageReport {
    pub kind: ArbitrageKind,
    /// Strictly positive `ψ` with `S1 ψ = S0`, present iff `kind == None`.
    pub state_prices: Option<Vec<f64>>,
    /// Portfolio with negative cost and nonnegative payoff.
    pub free_lunch: Option<Vec<f64>>,
    /// Portfolio with nonpositive cost and nonnegative, nonzero payoff.
    pub free_lottery: Option<Vec<f64>>,
    /// Largest achievable minimum state price.
    pub min_state_price: Option<f64>,
}

impl ArbitrageReport {
    /// Witness portfolio for `kind`.
    pub fn witness(&self) -> Option<&[f64]> {
        match self.kind {
            ArbitrageKind::None => None,
            ArbitrageKind::FreeLunch => self.free_lunch.as_deref(),
            ArbitrageKind::FreeLottery => self.free_lottery.as_deref(),
        }
    }
}

/// Searches for strictly positive state prices, and otherwise for a free
/// lunch or free lottery inside the box `‖x‖∞ <= 1`.
pub fn check_no_arbitrage(vm: &ValidatedMarket, tol: f64) -> Result<ArbitrageReport, MarketError> {
    let market = vm.market();
    let n = vm.n_states();
    let k = vm.n_assets();
    let lp = LpOptions::default();

    // max s  s.t.  S1 ψ = S0,  ψ_ω - s >= 0,  s <= 1
    let mut p = LpProblem::free(n + 1);
    p.objective[n] = -1.0;
    p.set_bounds(n, None, Some(1.0));
    for i in 0..k {
        let mut row = market.payoffs[i].clone();
        row.push(0.0);
        p.add_constraint(row, Sense::Eq, market.prices[i]);
    }
    for w in 0..n {
        let mut row = vec![0.0; n + 1];
        row[w] = 1.0;
        row[n] = -1.0;
        p.add_constraint(row, Sense::Ge, 0.0);
    }
    let out = solve_lp(&p, &lp)?;
    let (min_state_price, psi) = match out.status {
        LpStatus::Optimal => {
            let x = out.x.expect("optimal");
            (Some(x[n]), Some(x[..n].to_vec()))
        }
        _ => (None, None),
    };

    // min S0·x  s.t.  S1^T x >= 0,  -1 <= x <= 1
    let mut lunch = LpProblem::free(k);
    lunch.objective = market.prices.clone();
    for j in 0..k {
        lunch.set_bounds(j, Some(-1.0), Some(1.0));
    }
    for w in 0..n {
        let row = (0..k).map(|i| market.payoffs[i][w]).collect();
        lunch.add_constraint(row, Sense::Ge, 0.0);
    }
    let out = solve_lp(&lunch, &lp)?;
    let free_lunch = match (out.objective_value, out.x) {
        (Some(v), Some(x)) if v < -tol => Some(x),
        _ => None,
    };

    // max E[S1^T x]  s.t.  S0·x <= 0,  S1^T x >= 0,  -1 <= x <= 1
    let mut lottery = lunch.clone();
    lottery.objective = (0..k)
        .map(|i| -vm.space().expectation(&market.payoffs[i]))
        .collect();
    lottery.add_constraint(market.prices.clone(), Sense::Le, 0.0);
    let out = solve_lp(&lottery, &lp)?;
    let lottery_gain = out.objective_value.map(|v| -v);
    let mut free_lottery = match (lottery_gain, &out.x) {
        (Some(g), Some(x)) if g > tol => Some(x.clone()),
        _ => None,
    };

    let positive = matches!(min_state_price, Some(s) if s > tol);
    let kind = if free_lunch.is_some() {
        ArbitrageKind::FreeLunch
    } else if free_lottery.is_some() {
        ArbitrageKind::FreeLottery
    } else if positive {
        ArbitrageKind::None
    } else {
        // No strictly positive state prices but only a gain below `tol`:
        // still an arbitrage, report the best lottery found.
        free_lottery = out.x;
        ArbitrageKind::FreeLottery
    };
    Ok(ArbitrageReport {
        kind,
        state_prices: if kind == ArbitrageKind::None { psi } else { None },
        free_lunch,
        free_lottery,
        min_state_price,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonePricing {
    pub monotone: bool,
    /// Minimum price of a nonnegative eligible payoff with unit total mass.
    pub min_price: f64,
    /// Violating payoff `Z >= 0` with `π(Z) < 0`, present iff not monotone.
    pub witness: Option<Vec<f64>>,
}

/// Decides whether `π` is increasing on `M` by minimising the price over
/// nonnegative eligible payoffs normalised to total mass one.
pub fn check_monotone_pricing(vm: &ValidatedMarket, tol: f64) -> Result<MonotonePricing, MarketError> {
    let market = vm.market();
    let n = vm.n_states();
    let k = vm.n_assets();
    let mut p = LpProblem::free(k);
    p.objective = market.prices.clone();
    for w in 0..n {
        let row = (0..k).map(|i| market.payoffs[i][w]).collect();
        p.add_constraint(row, Sense::Ge, 0.0);
    }
    let mass = (0..k).map(|i| market.payoffs[i].iter().sum()).collect();
    p.add_constraint(mass, Sense::Eq, 1.0);
    let out = solve_lp(&p, &LpOptions::default())?;
    match out.status {
        LpStatus::Optimal => {
            let v = out.objective_value.expect("optimal");
            let x = out.x.expect("optimal");
            Ok(MonotonePricing {
                monotone: v >= -tol,
                min_price: v,
                witness: (v < -tol).then(|| market.payoff_of(&x)),
            })
        }
        // Only reachable for dependent payoffs, which validation rejects.
        LpStatus::Unbounded => Ok(MonotonePricing {
            monotone: false,
            min_price: f64::NEG_INFINITY,
            witness: None,
        }),
        // No nonnegative eligible payoff besides zero: vacuously monotone.
        LpStatus::Infeasible => Ok(MonotonePricing {
            monotone: true,
            min_price: f64::INFINITY,
            witness: None,
        }),
    }
}
