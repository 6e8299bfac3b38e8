use crate::linalg::dot;
use crate::linprog::{feasible, LpError, LpOptions, LpProblem, Sense};

use super::AcceptanceError;

/// Relative size below which a derived LP coefficient is treated as zero.
const COEF_EPS: f64 = 1e-12;

/// `{Y ∈ R^dim : ∃ w ∈ R^n_aux, C_Y·Y + C_w·w >= d}`.
///
/// Every row has `dim + n_aux` entries; the auxiliary variables are free and
/// any sign restriction on them is one of the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    pub dim: usize,
    pub n_aux: usize,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl Polyhedron {
    pub fn new(dim: usize, n_aux: usize, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self, AcceptanceError> {
        if rows.len() != rhs.len() {
            return Err(AcceptanceError::DimensionMismatch(format!(
                "{} rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != dim + n_aux) {
            return Err(AcceptanceError::DimensionMismatch(format!(
                "row of length {}, expected {}",
                r.len(),
                dim + n_aux
            )));
        }
        if rows.iter().flatten().chain(&rhs).any(|v| !v.is_finite()) {
            return Err(AcceptanceError::Invalid("non-finite polyhedron entry".into()));
        }
        Ok(Self { dim, n_aux, rows, rhs })
    }

    /// `X_+ = {Y : Y >= 0}`.
    pub fn orthant(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| {
                let mut r = vec![0.0; dim];
                r[i] = 1.0;
                r
            })
            .collect();
        Self { dim, n_aux: 0, rows, rhs: vec![0.0; dim] }
    }

    /// `{Y : Y_ω >= 0 for every ω not in mask}`.
    pub fn orthant_except(dim: usize, mask: u64) -> Self {
        let mut p = Self::orthant(dim);
        let keep: Vec<bool> = (0..dim).map(|i| mask & (1 << i) == 0).collect();
        let mut k = keep.iter();
        p.rows.retain(|_| *k.next().unwrap());
        p.rhs.truncate(p.rows.len());
        p
    }

    /// Intersection. Auxiliary blocks are laid out side by side.
    pub fn stack(parts: &[Polyhedron]) -> Self {
        let dim = parts.first().map_or(0, |p| p.dim);
        let n_aux: usize = parts.iter().map(|p| p.n_aux).sum();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut offset = 0;
        for p in parts {
            debug_assert_eq!(p.dim, dim);
            for (r, b) in p.rows.iter().zip(&p.rhs) {
                let mut row = vec![0.0; dim + n_aux];
                row[..dim].copy_from_slice(&r[..dim]);
                row[dim + offset..dim + offset + p.n_aux].copy_from_slice(&r[dim..]);
                rows.push(row);
                rhs.push(*b);
            }
            offset += p.n_aux;
        }
        Self { dim, n_aux, rows, rhs }
    }

    pub fn has_aux(&self) -> bool {
        self.n_aux > 0
    }

    /// Largest violation `max_i (d_i - C_i·Y)` for a set without auxiliary
    /// variables; nonpositive inside.
    pub fn violation(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(self.n_aux, 0);
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| b - dot(r, y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        if !self.has_aux() {
            return self.rows.is_empty() || self.violation(y) <= tol;
        }
        let lp = self.preimage_lp(y, &[], tol);
        feasible(&lp, &LpOptions::default()).unwrap_or(false)
    }

    /// Constraint system over `(v, w)` for `Y = y0 + Σ v_j dirs_j`:
    /// `C_Y·(y0 + D v) + C_w·w >= d - slack`. Variables are free, the
    /// objective is zero and the `v` block comes first.
    pub fn preimage_lp(&self, y0: &[f64], dirs: &[Vec<f64>], slack: f64) -> LpProblem<f64> {
        let k = dirs.len();
        let mut lp = LpProblem::free(k + self.n_aux);
        for (r, b) in self.rows.iter().zip(&self.rhs) {
            let cy = &r[..self.dim];
            let mut row = Vec::with_capacity(k + self.n_aux);
            row.extend(dirs.iter().map(|d| dot(cy, d)));
            row.extend_from_slice(&r[self.dim..]);
            // Round-off in a product must not become a steep constraint.
            let scale = cy.iter().chain(dirs.iter().flatten()).fold(1.0f64, |m, v| m.max(v.abs()));
            for v in row.iter_mut().take(k) {
                if v.abs() <= COEF_EPS * scale {
                    *v = 0.0;
                }
            }
            lp.add_constraint(row, Sense::Ge, b - dot(cy, y0) - slack);
        }
        lp
    }

    /// `true` iff `V` lies in the recession cone, which for a nonempty
    /// polyhedron is `{V : ∃ w, C_Y V + C_w w >= 0}`.
    pub fn recedes_along(&self, v: &[f64], tol: f64) -> Result<bool, LpError> {
        if !self.has_aux() {
            return Ok(self.rows.iter().all(|r| dot(r, v) >= -tol));
        }
        let homogeneous = Self {
            rhs: vec![0.0; self.rhs.len()],
            ..self.clone()
        };
        feasible(&homogeneous.preimage_lp(v, &[], tol), &LpOptions::default())
    }
}
