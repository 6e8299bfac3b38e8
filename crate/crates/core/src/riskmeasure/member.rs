use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RiskError, SolveOptions};
use crate::acceptance::{AcceptanceSet, Polyhedron, Shape};
use crate::linprog::{solve_lp, LpOptions};
use crate::market::ValidatedMarket;

/// Answer to "is `X ∈ A + ker π`?".
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// `k ∈ ker π` with `X - k ∈ A`, when found.
    pub shift: Option<Vec<f64>>,
    /// `false` when a negative answer came from the grid search.
    pub exact: bool,
    pub lp_solves: usize,
}

impl Membership {
    fn yes(shift: Vec<f64>, lp_solves: usize) -> Self {
        Self {
            member: true,
            shift: Some(shift),
            exact: true,
            lp_solves,
        }
    }

    fn no(exact: bool, lp_solves: usize) -> Self {
        Self {
            member: false,
            shift: None,
            exact,
            lp_solves,
        }
    }
}

/// Decides `∃ k ∈ ker π : X - k ∈ A`.
///
/// Polyhedral sets and VaR scenario unions are decided by linear programs
/// over kernel coordinates. Other sets are searched on nested grids in the
/// box `[-kernel_box, kernel_box]^{dim ker π}`, which can miss members.
pub fn member_a_plus_ker(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    x: &[f64],
    opts: &SolveOptions,
) -> Result<Membership, RiskError> {
    if x.len() != vm.n_states() || a.dim() != vm.n_states() {
        return Err(RiskError::DimensionMismatch(format!(
            "position has {} entries, set {} and market {} states",
            x.len(),
            a.dim(),
            vm.n_states()
        )));
    }
    decide(a, vm, x, opts)
}

/// `X + m·U ∈ A + ker π`.
pub fn member_shifted(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    x: &[f64],
    m: f64,
    opts: &SolveOptions,
) -> Result<Membership, RiskError> {
    let y: Vec<f64> = x.iter().zip(vm.numeraire()).map(|(a, u)| a + m * u).collect();
    member_a_plus_ker(a, vm, &y, opts)
}

fn decide(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64], opts: &SolveOptions) -> Result<Membership, RiskError> {
    let kernel = vm.kernel_basis();
    if kernel.is_empty() {
        return Ok(if a.member(x) {
            Membership::yes(vec![0.0; x.len()], 0)
        } else {
            Membership::no(true, 0)
        });
    }
    if let Shape::Induced(ind) = a.shape() {
        // Translation by kernel elements leaves ρ unchanged.
        if ind.market() == vm {
            return Ok(if a.member(x) {
                Membership::yes(vec![0.0; x.len()], 0)
            } else {
                Membership::no(ind.exact(), 0)
            });
        }
    }
    if let Some(p) = a.polyhedral() {
        return polyhedral(&p, vm, x, opts, 0);
    }
    if let Some(u) = a.scenario_union() {
        if u.dim() <= opts.n_enum {
            let mut solves = 0;
            for mask in u.maximal_subsets() {
                let r = polyhedral(&u.piece(mask), vm, x, opts, solves)?;
                solves = r.lp_solves;
                if r.member {
                    return Ok(r);
                }
            }
            return Ok(Membership::no(true, solves));
        }
        if !opts.allow_approximate {
            return Err(RiskError::EnumerationTooLarge {
                n: u.dim(),
                limit: opts.n_enum,
            });
        }
    }
    if let Shape::Augmented { base, points } = a.shape() {
        let r = decide(base, vm, x, opts)?;
        if r.member {
            return Ok(r);
        }
        let mut solves = r.lp_solves;
        let orthant = Polyhedron::orthant(x.len());
        for p in points {
            let shifted: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
            let q = polyhedral(&orthant, vm, &shifted, opts, solves)?;
            solves = q.lp_solves;
            if q.member {
                return Ok(q);
            }
        }
        return Ok(Membership::no(r.exact, solves));
    }
    Ok(grid(a, vm, x, opts))
}

fn polyhedral(
    p: &Polyhedron,
    vm: &ValidatedMarket,
    x: &[f64],
    opts: &SolveOptions,
    solves: usize,
) -> Result<Membership, RiskError> {
    let dirs: Vec<Vec<f64>> = vm
        .kernel_basis()
        .iter()
        .map(|k| k.iter().map(|v| -v).collect())
        .collect();
    let lp = p.preimage_lp(x, &dirs, opts.member_tol);
    let out = solve_lp(&lp, &LpOptions::default())?;
    Ok(match out.x {
        Some(sol) => Membership::yes(vm.kernel_element(&sol[..dirs.len()]), solves + 1),
        None => Membership::no(true, solves + 1),
    })
}

const GRID_BUDGET: usize = 4096;

fn grid(a: &AcceptanceSet, vm: &ValidatedMarket, x: &[f64], opts: &SolveOptions) -> Membership {
    let d = vm.kernel_basis().len();
    let ones = vec![1.0; x.len()];
    let shifted = |y: &[f64], s: f64| -> (Vec<f64>, Vec<f64>) {
        let k = vm.kernel_element(y);
        let z = x.iter().zip(&k).zip(&ones).map(|((a, b), o)| a - b + s * o).collect();
        (k, z)
    };
    // Least cash top-up making `X - k + s·1` acceptable; zero means member.
    let score = |y: &[f64]| -> Result<f64, Vec<f64>> {
        let (k, z) = shifted(y, 0.0);
        if a.member(&z) {
            return Err(k);
        }
        let mut hi = 1e-3;
        while !a.member(&shifted(y, hi).1) {
            hi *= 4.0;
            if hi > 1e15 {
                return Ok(f64::INFINITY);
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-10 * (1.0 + hi) {
            let mid = 0.5 * (lo + hi);
            if a.member(&shifted(y, mid).1) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    };
    let mut best = vec![0.0; d];
    let mut best_score = match score(&best) {
        Err(k) => return Membership::yes(k, 0),
        Ok(s) => s,
    };
    if d == 0 {
        return Membership::no(true, 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut scale = opts.kernel_box;
    let mut g = opts.kernel_grid;
    while scale >= 1e-9 {
        let center = best.clone();
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        if (g as f64).powi(d as i32) <= GRID_BUDGET as f64 {
            let mut idx = vec![0usize; d];
            loop {
                candidates.push(
                    idx.iter()
                        .zip(&center)
                        .map(|(&i, c)| c + scale * (2.0 * i as f64 / (g - 1) as f64 - 1.0))
                        .collect(),
                );
                let mut j = 0;
                while j < d {
                    idx[j] += 1;
                    if idx[j] < g {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == d {
                    break;
                }
            }
        } else {
            for _ in 0..GRID_BUDGET {
                candidates.push(center.iter().map(|c| c + rng.gen_range(-scale..=scale)).collect());
            }
        }
        for y in candidates {
            match score(&y) {
                Err(k) => return Membership::yes(k, 0),
                Ok(s) if s < best_score => {
                    best_score = s;
                    best = y;
                }
                Ok(_) => {}
            }
        }
        scale /= 4.0;
        g = 5;
    }
    Membership::no(false, 0)
}
