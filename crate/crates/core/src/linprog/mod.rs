//! Dense linear programming kernel.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    c·x
//! subject to  a_i·x (<= | = | >=) b_i      for every row i
//!             lower_j <= x_j <= upper_j    (either side may be infinite)
//! ```
//!
//! and solved by a two-phase dense tableau simplex with Bland's rule, so
//! identical inputs always follow the identical pivot sequence. The kernel is
//! generic over [`Scalar`]: `f64` for the solvers, `BigRational` when an
//! exact answer is wanted.

mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use simplex::solve_lp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    MalformedProblem(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

/// Row sense of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Dense linear program. `None` bounds are infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<S> {
    pub objective: Vec<S>,
    pub rows: Vec<Vec<S>>,
    pub rhs: Vec<S>,
    pub senses: Vec<Sense>,
    pub lower: Vec<Option<S>>,
    pub upper: Vec<Option<S>>,
}

impl<S: Scalar> LpProblem<S> {
    /// Empty problem over `n` free variables with zero objective.
    pub fn free(n: usize) -> Self {
        Self {
            objective: vec![S::zero(); n],
            rows: Vec::new(),
            rhs: Vec::new(),
            senses: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    /// Empty problem over `n` nonnegative variables with the given objective.
    pub fn nonnegative(objective: Vec<S>) -> Self {
        let n = objective.len();
        Self {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
            senses: Vec::new(),
            lower: vec![Some(S::zero()); n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends a variable and returns its index.
    pub fn add_var(&mut self, cost: S, lower: Option<S>, upper: Option<S>) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        for row in &mut self.rows {
            row.push(S::zero());
        }
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<S>, sense: Sense, rhs: S) -> &mut Self {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<S>, upper: Option<S>) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    /// Checks the dimension and finiteness invariants.
    pub fn check(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        let m = self.rows.len();
        if self.rhs.len() != m || self.senses.len() != m {
            return Err(LpError::MalformedProblem(format!(
                "{m} rows but {} right-hand sides and {} senses",
                self.rhs.len(),
                self.senses.len()
            )));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::MalformedProblem(format!(
                "{n} variables but {} lower and {} upper bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::MalformedProblem(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
        }
        let finite = self.objective.iter().all(S::is_finite_value)
            && self.rhs.iter().all(S::is_finite_value)
            && self.rows.iter().flatten().all(S::is_finite_value)
            && self.lower.iter().flatten().all(S::is_finite_value)
            && self.upper.iter().flatten().all(S::is_finite_value);
        if !finite {
            return Err(LpError::MalformedProblem("non-finite coefficient".into()));
        }
        Ok(())
    }

    /// Largest violation of rows and bounds at `x`, each scaled by the
    /// magnitude of the terms involved.
    pub fn scaled_residual(&self, x: &[S]) -> S {
        let mut worst = S::zero();
        for ((row, b), sense) in self.rows.iter().zip(&self.rhs).zip(&self.senses) {
            let mut ax = S::zero();
            let mut scale = S::one() + b.abs();
            for (a, v) in row.iter().zip(x) {
                let t = a.clone() * v.clone();
                scale = scale + t.abs();
                ax = ax + t;
            }
            let viol = match sense {
                Sense::Le => ax - b.clone(),
                Sense::Ge => b.clone() - ax,
                Sense::Eq => (ax - b.clone()).abs(),
            };
            worst = S::max_of(worst, viol / scale);
        }
        for (j, v) in x.iter().enumerate() {
            if let Some(lo) = &self.lower[j] {
                let scale = S::one() + lo.abs();
                worst = S::max_of(worst, (lo.clone() - v.clone()) / scale);
            }
            if let Some(hi) = &self.upper[j] {
                let scale = S::one() + hi.abs();
                worst = S::max_of(worst, (v.clone() - hi.clone()) / scale);
            }
        }
        worst
    }

    /// Lower bound on the optimal value implied by row multipliers `y`
    /// (Lagrangian weak duality). Returns `None` when `y` has the wrong sign
    /// for some row or the bound is `-inf` because a needed variable bound is
    /// missing.
    pub fn dual_bound(&self, y: &[S], tol: &S) -> Option<S> {
        if y.len() != self.rows.len() {
            return None;
        }
        for (yi, sense) in y.iter().zip(&self.senses) {
            let ok = match sense {
                Sense::Ge => *yi >= -tol.clone(),
                Sense::Le => *yi <= tol.clone(),
                Sense::Eq => true,
            };
            if !ok {
                return None;
            }
        }
        let mut bound = S::zero();
        for (yi, b) in y.iter().zip(&self.rhs) {
            bound = bound + yi.clone() * b.clone();
        }
        for j in 0..self.num_vars() {
            let mut r = self.objective[j].clone();
            for (row, yi) in self.rows.iter().zip(y) {
                r = r - row[j].clone() * yi.clone();
            }
            if r > tol.clone() {
                bound = bound + r * self.lower[j].clone()?;
            } else if r < -tol.clone() {
                bound = bound + r * self.upper[j].clone()?;
            }
        }
        Some(bound)
    }
}

/// Solver tolerances. Defaults come from the scalar type.
#[derive(Debug, Clone, PartialEq)]
pub struct LpOptions<S> {
    pub pivot_tol: S,
    pub feas_tol: S,
    pub max_iterations: usize,
}

impl<S: Scalar> Default for LpOptions<S> {
    fn default() -> Self {
        Self {
            pivot_tol: S::default_pivot_tol(),
            feas_tol: S::default_feas_tol(),
            max_iterations: 50_000,
        }
    }
}

impl<S: Scalar> LpOptions<S> {
    pub fn with_feas_tol(feas_tol: S) -> Self {
        Self {
            feas_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome<S> {
    pub status: LpStatus,
    /// Primal solution, present iff `Optimal`.
    pub x: Option<Vec<S>>,
    /// Optimal objective value, present iff `Optimal`.
    pub objective_value: Option<S>,
    /// Row multipliers certifying optimality, present iff `Optimal`.
    pub duals: Option<Vec<S>>,
    /// Improving direction of the feasible set, present iff `Unbounded`.
    pub ray: Option<Vec<S>>,
    pub iterations: usize,
}

impl<S: Scalar> LpOutcome<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// `true` iff the constraint system of `p` has a point, i.e. the zero
/// objective problem is `Optimal`.
pub fn feasible<S: Scalar>(p: &LpProblem<S>, opts: &LpOptions<S>) -> Result<bool, LpError> {
    let mut zero = p.clone();
    zero.objective.iter_mut().for_each(|c| *c = S::zero());
    Ok(solve_lp(&zero, opts)?.is_optimal())
}
