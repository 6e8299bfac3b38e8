//! Closure, interior and boundary of a set along the direction `-U`.
//!
//! For `K = -U` the directional closure is `{X : X + t·U ∈ B for all t > 0}`
//! and the directional interior is `B + R_{>0}·U`. When `U` is a recession
//! direction of `B`, both reduce to probing a single line through `X`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acceptance::{AcceptanceSet, Polyhedron, TriState};
use crate::market::ValidatedMarket;
use crate::riskmeasure::{member_a_plus_ker, SolveOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DirectionalError {
    #[error("epsilon ladder must be nonempty, positive and strictly decreasing")]
    BadLadder,
}

/// Membership oracle, optionally with a polyhedral description.
pub trait Region {
    fn contains(&self, x: &[f64]) -> bool;

    fn polyhedron(&self) -> Option<Polyhedron> {
        None
    }
}

impl<F: Fn(&[f64]) -> bool> Region for F {
    fn contains(&self, x: &[f64]) -> bool {
        self(x)
    }
}

impl Region for AcceptanceSet {
    fn contains(&self, x: &[f64]) -> bool {
        self.member(x)
    }

    fn polyhedron(&self) -> Option<Polyhedron> {
        self.polyhedral()
    }
}

/// `A + ker π` as a region.
pub struct APlusKer<'a> {
    pub a: &'a AcceptanceSet,
    pub vm: &'a ValidatedMarket,
    pub opts: &'a SolveOptions,
}

impl Region for APlusKer<'_> {
    /// Solver errors count as non-membership.
    fn contains(&self, x: &[f64]) -> bool {
        member_a_plus_ker(self.a, self.vm, x, self.opts).is_ok_and(|m| m.member)
    }

    /// `{Y : ∃ y, w : C_Y (Y - K y) + C_w w >= d}` with the kernel
    /// coordinates `y` placed in front of the set's own auxiliaries.
    fn polyhedron(&self) -> Option<Polyhedron> {
        let p = self.a.polyhedral()?;
        let kernel = self.vm.kernel_basis();
        let (n, d) = (p.dim, kernel.len());
        let rows = p
            .rows
            .iter()
            .map(|r| {
                let mut row = r[..n].to_vec();
                row.extend(kernel.iter().map(|k| -crate::linalg::dot(&r[..n], k)));
                row.extend_from_slice(&r[n..]);
                row
            })
            .collect();
        Some(Polyhedron {
            dim: n,
            n_aux: d + p.n_aux,
            rows,
            rhs: p.rhs.clone(),
        })
    }
}

/// Decreasing positive step sizes `t_1 > t_2 > … > t_final`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalProbe {
    ladder: Vec<f64>,
}

impl Default for DirectionalProbe {
    /// `1, 1/2, …, 2^-24`.
    fn default() -> Self {
        Self {
            ladder: (0..=24).map(|k| 2f64.powi(-k)).collect(),
        }
    }
}

impl DirectionalProbe {
    pub fn new(ladder: Vec<f64>) -> Result<Self, DirectionalError> {
        let ok = !ladder.is_empty()
            && ladder.iter().all(|t| t.is_finite() && *t > 0.0)
            && ladder.windows(2).all(|w| w[0] > w[1]);
        if ok {
            Ok(Self { ladder })
        } else {
            Err(DirectionalError::BadLadder)
        }
    }

    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    pub fn final_scale(&self) -> f64 {
        *self.ladder.last().expect("nonempty ladder")
    }
}

fn along(x: &[f64], u: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(u).map(|(a, b)| a + t * b).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureProbe {
    pub member: bool,
    /// Rungs `t1 < t2` with `X + t1·U ∈ B` but `X + t2·U ∉ B`, which means
    /// `U` is not a recession direction of `B`.
    pub monotonicity_violation: Option<(f64, f64)>,
}

/// Directional closure test with the recession diagnostic.
pub fn dir_cl_probe<B: Region + ?Sized>(b: &B, u: &[f64], x: &[f64], probe: &DirectionalProbe) -> ClosureProbe {
    let t = probe.final_scale();
    let member = b.contains(x) || b.contains(&along(x, u, t));
    let ladder = probe.ladder();
    let mut monotonicity_violation = None;
    if ladder.len() >= 2 {
        let (t1, t2) = (ladder[ladder.len() / 2], ladder[0]);
        if t1 < t2 && b.contains(&along(x, u, t1)) && !b.contains(&along(x, u, t2)) {
            monotonicity_violation = Some((t1, t2));
        }
    }
    ClosureProbe {
        member,
        monotonicity_violation,
    }
}

/// `X ∈ cl_{-U}(B)`, assuming `U ∈ rec B`.
pub fn dir_cl_member<B: Region + ?Sized>(b: &B, u: &[f64], x: &[f64], probe: &DirectionalProbe) -> bool {
    b.contains(x) || b.contains(&along(x, u, probe.final_scale()))
}

/// `X ∈ int_{-U}(B) = B + R_{>0}·U`: some rung `t` has `X - t·U ∈ B`.
pub fn dir_int_member<B: Region + ?Sized>(b: &B, u: &[f64], x: &[f64], probe: &DirectionalProbe) -> bool {
    probe.ladder().iter().any(|t| b.contains(&along(x, u, -t)))
}

/// `X ∈ bd_{-U}(B)`: in the closure but not in the interior.
pub fn dir_bd_member<B: Region + ?Sized>(b: &B, u: &[f64], x: &[f64], probe: &DirectionalProbe) -> bool {
    dir_cl_member(b, u, x, probe) && !dir_int_member(b, u, x, probe)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecessionAnswer {
    /// `True` only when certified on a polyhedral description.
    pub answer: TriState,
    /// `(Y, λ)` with `Y ∈ B` and `Y + λ·V ∉ B`.
    pub witness: Option<(Vec<f64>, f64)>,
}

/// `V ∈ rec B`, tested on `Y + λ·V` for the given base points and scalings
/// and certified by `C_Y V + C_w w >= 0` when `B` is polyhedral.
pub fn rec_member<B: Region + ?Sized>(b: &B, v: &[f64], base_points: &[Vec<f64>], lambdas: &[f64]) -> RecessionAnswer {
    let mut witness = None;
    'outer: for y in base_points.iter().filter(|y| b.contains(y)) {
        for &lambda in lambdas {
            if !b.contains(&along(y, v, lambda)) {
                witness = Some((y.clone(), lambda));
                break 'outer;
            }
        }
    }
    if witness.is_some() {
        return RecessionAnswer {
            answer: TriState::False,
            witness,
        };
    }
    let answer = match b.polyhedron().map(|p| p.recedes_along(v, 1e-9)) {
        Some(Ok(true)) => TriState::True,
        Some(Ok(false)) => TriState::False,
        _ => TriState::Unknown,
    };
    RecessionAnswer { answer, witness }
}
