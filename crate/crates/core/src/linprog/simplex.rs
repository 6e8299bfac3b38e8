use super::{LpError, LpOptions, LpOutcome, LpProblem, LpStatus, Sense};
use crate::scalar::Scalar;

/// How an original variable is expressed through nonnegative tableau columns.
#[derive(Debug, Clone)]
enum VarMap<S> {
    /// x = lo + col
    Shift { col: usize, lo: S },
    /// x = hi - col
    Mirror { col: usize, hi: S },
    /// x = pos - neg
    Split { pos: usize, neg: usize },
}

struct Tableau<S> {
    /// Row-major, `width = ncols + 1`, last entry is the right-hand side.
    cells: Vec<S>,
    m: usize,
    ncols: usize,
    basis: Vec<usize>,
    /// Phase-one reduced costs (artificial cost 1), same width.
    phase1: Vec<S>,
    /// Phase-two reduced costs, same width.
    phase2: Vec<S>,
    /// First artificial column; columns at or after it never re-enter in phase two.
    first_artificial: usize,
    pivot_tol: S,
    iterations: usize,
    max_iterations: usize,
}

enum Phase {
    One,
    Two,
}

enum LoopEnd {
    Optimal,
    Unbounded(usize),
}

impl<S: Scalar> Tableau<S> {
    fn width(&self) -> usize {
        self.ncols + 1
    }

    fn at(&self, i: usize, j: usize) -> &S {
        &self.cells[i * (self.ncols + 1) + j]
    }

    fn rhs(&self, i: usize) -> &S {
        self.at(i, self.ncols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.cells[r * w + c].clone();
        for j in 0..w {
            let v = self.cells[r * w + j].clone() / p.clone();
            self.cells[r * w + j] = v;
        }
        let pivot_row: Vec<S> = self.cells[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.cells[i * w + c].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..w {
                let v = self.cells[i * w + j].clone() - f.clone() * pivot_row[j].clone();
                self.cells[i * w + j] = v;
            }
            // Drop round-off in the matrix part; the pivot column is exact.
            for j in 0..self.ncols {
                if self.cells[i * w + j].abs() <= self.pivot_tol {
                    self.cells[i * w + j] = S::zero();
                }
            }
            self.cells[i * w + c] = S::zero();
        }
        for obj in [&mut self.phase1, &mut self.phase2] {
            let f = obj[c].clone();
            if !f.is_zero() {
                for j in 0..w {
                    obj[j] = obj[j].clone() - f.clone() * pivot_row[j].clone();
                }
            }
            obj[c] = S::zero();
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index improving column, ratio-test ties broken by
    /// lowest basic index.
    fn run(&mut self, phase: Phase, cost_tol: &S) -> Result<LoopEnd, LpError> {
        let allowed = match phase {
            Phase::One => self.ncols,
            Phase::Two => self.first_artificial,
        };
        loop {
            let obj = match phase {
                Phase::One => &self.phase1,
                Phase::Two => &self.phase2,
            };
            let entering = (0..allowed).find(|&j| obj[j] < -cost_tol.clone());
            let Some(c) = entering else {
                return Ok(LoopEnd::Optimal);
            };
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(LpError::NumericalBreakdown(format!(
                    "iteration limit {} exceeded",
                    self.max_iterations
                )));
            }
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if *a <= self.pivot_tol {
                    continue;
                }
                let rhs = S::max_of(self.rhs(i).clone(), S::zero());
                let ratio = rhs / a.clone();
                leave = match leave {
                    Some((bi, best)) if ratio > best || (ratio == best && self.basis[i] > self.basis[bi]) => {
                        Some((bi, best))
                    }
                    _ => Some((i, ratio)),
                };
            }
            match leave {
                None => return Ok(LoopEnd::Unbounded(c)),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Solves `p` with a two-phase dense simplex.
///
/// `Optimal` solutions are re-checked against the original rows and bounds;
/// `Unbounded` outcomes carry a ray that is re-checked the same way. A failed
/// re-check is reported as [`LpError::NumericalBreakdown`].
pub fn solve_lp<S: Scalar>(p: &LpProblem<S>, opts: &LpOptions<S>) -> Result<LpOutcome<S>, LpError> {
    p.check()?;
    if opts.pivot_tol < S::zero() || opts.feas_tol < S::zero() {
        return Err(LpError::MalformedProblem("negative tolerance".into()));
    }
    let n = p.num_vars();

    // Column mapping for the original variables.
    let mut maps = Vec::with_capacity(n);
    let mut ncols_struct = 0usize;
    let mut bound_rows: Vec<(usize, S)> = Vec::new();
    for j in 0..n {
        match (&p.lower[j], &p.upper[j]) {
            (Some(lo), hi) => {
                let col = ncols_struct;
                ncols_struct += 1;
                if let Some(hi) = hi {
                    bound_rows.push((col, hi.clone() - lo.clone()));
                }
                maps.push(VarMap::Shift {
                    col,
                    lo: lo.clone(),
                });
            }
            (None, Some(hi)) => {
                maps.push(VarMap::Mirror {
                    col: ncols_struct,
                    hi: hi.clone(),
                });
                ncols_struct += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split {
                    pos: ncols_struct,
                    neg: ncols_struct + 1,
                });
                ncols_struct += 2;
            }
        }
    }

    // Rows over structural columns, right-hand side made nonnegative.
    struct StdRow<S> {
        coeffs: Vec<S>,
        sense: Sense,
        rhs: S,
        flipped: bool,
    }
    let mut std_rows: Vec<StdRow<S>> = Vec::with_capacity(p.num_rows() + bound_rows.len());
    for ((row, b), sense) in p.rows.iter().zip(&p.rhs).zip(&p.senses) {
        let mut coeffs = vec![S::zero(); ncols_struct];
        let mut rhs = b.clone();
        for (j, a) in row.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match &maps[j] {
                VarMap::Shift { col, lo } => {
                    coeffs[*col] = a.clone();
                    rhs = rhs - a.clone() * lo.clone();
                }
                VarMap::Mirror { col, hi } => {
                    coeffs[*col] = -a.clone();
                    rhs = rhs - a.clone() * hi.clone();
                }
                VarMap::Split { pos, neg } => {
                    coeffs[*pos] = a.clone();
                    coeffs[*neg] = -a.clone();
                }
            }
        }
        std_rows.push(StdRow {
            coeffs,
            sense: *sense,
            rhs,
            flipped: false,
        });
    }
    for (col, width) in bound_rows {
        let mut coeffs = vec![S::zero(); ncols_struct];
        coeffs[col] = S::one();
        std_rows.push(StdRow {
            coeffs,
            sense: Sense::Le,
            rhs: width,
            flipped: false,
        });
    }
    for row in &mut std_rows {
        if row.rhs < S::zero() {
            row.coeffs.iter_mut().for_each(|a| *a = -a.clone());
            row.rhs = -row.rhs.clone();
            row.sense = match row.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
            row.flipped = true;
        }
    }

    // Layout: structural | slack/surplus | artificial.
    let m = std_rows.len();
    let n_slack = std_rows.iter().filter(|r| r.sense != Sense::Eq).count();
    let n_art = std_rows.iter().filter(|r| r.sense != Sense::Le).count();
    let first_artificial = ncols_struct + n_slack;
    let ncols = first_artificial + n_art;
    let w = ncols + 1;
    let mut cells = vec![S::zero(); m * w];
    let mut basis = vec![0usize; m];
    let mut identity_col = vec![0usize; m];
    let mut next_slack = ncols_struct;
    let mut next_art = first_artificial;
    for (i, row) in std_rows.iter().enumerate() {
        for (j, a) in row.coeffs.iter().enumerate() {
            cells[i * w + j] = a.clone();
        }
        cells[i * w + ncols] = row.rhs.clone();
        match row.sense {
            Sense::Le => {
                cells[i * w + next_slack] = S::one();
                basis[i] = next_slack;
                identity_col[i] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                cells[i * w + next_slack] = -S::one();
                next_slack += 1;
                cells[i * w + next_art] = S::one();
                basis[i] = next_art;
                identity_col[i] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                cells[i * w + next_art] = S::one();
                basis[i] = next_art;
                identity_col[i] = next_art;
                next_art += 1;
            }
        }
    }

    let mut phase1 = vec![S::zero(); w];
    for j in first_artificial..ncols {
        phase1[j] = S::one();
    }
    for i in 0..m {
        if basis[i] >= first_artificial {
            for j in 0..w {
                phase1[j] = phase1[j].clone() - cells[i * w + j].clone();
            }
        }
    }
    let mut phase2 = vec![S::zero(); w];
    for (j, map) in maps.iter().enumerate() {
        let c = p.objective[j].clone();
        match map {
            VarMap::Shift { col, .. } => phase2[*col] = c,
            VarMap::Mirror { col, .. } => phase2[*col] = -c,
            VarMap::Split { pos, neg } => {
                phase2[*pos] = c.clone();
                phase2[*neg] = -c;
            }
        }
    }

    let original = cells.clone();
    let mut t = Tableau {
        cells,
        m,
        ncols,
        basis,
        phase1,
        phase2,
        first_artificial,
        pivot_tol: opts.pivot_tol.clone(),
        iterations: 0,
        max_iterations: opts.max_iterations,
    };
    let cost_tol = opts.feas_tol.clone();

    if n_art > 0 {
        match t.run(Phase::One, &cost_tol)? {
            LoopEnd::Optimal => {}
            LoopEnd::Unbounded(_) => {
                return Err(LpError::NumericalBreakdown(
                    "phase one reported unbounded".into(),
                ))
            }
        }
        // Each leftover artificial is judged against its own row's scale.
        let infeasible = (0..m).any(|i| {
            let col = t.basis[i];
            col >= first_artificial && {
                let row = identity_col.iter().position(|&c| c == col).expect("artificial row");
                *t.rhs(i) > opts.feas_tol.clone() * (S::one() + std_rows[row].rhs.clone())
            }
        });
        if infeasible {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                x: None,
                objective_value: None,
                duals: None,
                ray: None,
                iterations: t.iterations,
            });
        }
        // Pivot remaining artificials out of the basis where possible; rows
        // with no usable entry are redundant and keep their zero artificial.
        for i in 0..m {
            if t.basis[i] >= first_artificial {
                let w = ncols + 1;
                t.cells[i * w + ncols] = S::zero();
                let col = (0..first_artificial)
                    .filter(|&j| t.at(i, j).abs() > t.pivot_tol)
                    .max_by(|&x, &y| {
                        t.at(i, x)
                            .abs()
                            .partial_cmp(&t.at(i, y).abs())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    });
                if let Some(c) = col {
                    t.pivot(i, c);
                }
            }
        }
    }

    match t.run(Phase::Two, &cost_tol)? {
        LoopEnd::Unbounded(c) => {
            let mut dir = vec![S::zero(); ncols];
            dir[c] = S::one();
            for i in 0..m {
                dir[t.basis[i]] = -t.at(i, c).clone();
            }
            let ray = map_back(&maps, &dir, false);
            verify_ray(p, &ray, opts)?;
            Ok(LpOutcome {
                status: LpStatus::Unbounded,
                x: None,
                objective_value: None,
                duals: None,
                ray: Some(ray),
                iterations: t.iterations,
            })
        }
        LoopEnd::Optimal => {
            let refined = refine_basic_solution(&original, m, ncols, &t.basis);
            let candidate = |source: Option<&Vec<S>>| {
                let mut values = vec![S::zero(); ncols];
                for i in 0..m {
                    let v = match source {
                        Some(r) => r[i].clone(),
                        None => t.rhs(i).clone(),
                    };
                    values[t.basis[i]] = S::max_of(v, S::zero());
                }
                let x = map_back(&maps, &values, true);
                let residual = p.scaled_residual(&x);
                (x, residual)
            };
            let (mut x, mut residual) = candidate(None);
            if let Some(r) = &refined {
                let (rx, rres) = candidate(Some(r));
                if rres <= residual {
                    x = rx;
                    residual = rres;
                }
            }
            if residual > opts.feas_tol {
                return Err(LpError::NumericalBreakdown(format!(
                    "solution residual {residual:?} exceeds feasibility tolerance"
                )));
            }
            let mut objective_value = S::zero();
            for (c, v) in p.objective.iter().zip(&x) {
                objective_value = objective_value + c.clone() * v.clone();
            }
            let duals = (0..p.num_rows())
                .map(|i| {
                    let y = -t.phase2[identity_col[i]].clone();
                    if std_rows[i].flipped {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            Ok(LpOutcome {
                status: LpStatus::Optimal,
                x: Some(x),
                objective_value: Some(objective_value),
                duals: Some(duals),
                ray: None,
                iterations: t.iterations,
            })
        }
    }
}

/// Maps tableau column values back to original variables; `affine` adds
/// the bound offsets (points), otherwise the map is linear (directions).
fn map_back<S: Scalar>(maps: &[VarMap<S>], cols: &[S], affine: bool) -> Vec<S> {
    maps.iter()
        .map(|map| match map {
            VarMap::Shift { col, lo } => {
                if affine {
                    lo.clone() + cols[*col].clone()
                } else {
                    cols[*col].clone()
                }
            }
            VarMap::Mirror { col, hi } => {
                if affine {
                    hi.clone() - cols[*col].clone()
                } else {
                    -cols[*col].clone()
                }
            }
            VarMap::Split { pos, neg } => cols[*pos].clone() - cols[*neg].clone(),
        })
        .collect()
}

fn verify_ray<S: Scalar>(p: &LpProblem<S>, ray: &[S], opts: &LpOptions<S>) -> Result<(), LpError> {
    let norm = ray.iter().fold(S::zero(), |acc, v| S::max_of(acc, v.abs()));
    let tol = opts.feas_tol.clone() * (S::one() + norm);
    let mut descent = S::zero();
    for (c, v) in p.objective.iter().zip(ray) {
        descent = descent + c.clone() * v.clone();
    }
    let mut ok = descent < S::zero();
    for (row, sense) in p.rows.iter().zip(&p.senses) {
        let mut ar = S::zero();
        for (a, v) in row.iter().zip(ray) {
            ar = ar + a.clone() * v.clone();
        }
        ok &= match sense {
            Sense::Le => ar <= tol.clone(),
            Sense::Ge => ar >= -tol.clone(),
            Sense::Eq => ar.abs() <= tol.clone(),
        };
    }
    for (j, v) in ray.iter().enumerate() {
        if p.lower[j].is_some() {
            ok &= *v >= -tol.clone();
        }
        if p.upper[j].is_some() {
            ok &= *v <= tol.clone();
        }
    }
    if ok {
        Ok(())
    } else {
        Err(LpError::NumericalBreakdown(
            "unbounded ray failed verification".into(),
        ))
    }
}

/// Recomputes the basic variables from the original rows, `B x_B = b`, by
/// Gaussian elimination with partial pivoting. Removes the round-off that
/// accumulates in the tableau over many pivots.
fn refine_basic_solution<S: Scalar>(cells: &[S], m: usize, ncols: usize, basis: &[usize]) -> Option<Vec<S>> {
    let w = ncols + 1;
    let mut a: Vec<Vec<S>> = (0..m)
        .map(|i| {
            let mut row: Vec<S> = basis.iter().map(|&j| cells[i * w + j].clone()).collect();
            row.push(cells[i * w + ncols].clone());
            row
        })
        .collect();
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| {
            a[x][col]
                .abs()
                .partial_cmp(&a[y][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(col, piv);
        for i in col + 1..m {
            let f = a[i][col].clone() / a[col][col].clone();
            if f.is_zero() {
                continue;
            }
            for j in col..=m {
                let v = a[i][j].clone() - f.clone() * a[col][j].clone();
                a[i][j] = v;
            }
        }
    }
    let mut x = vec![S::zero(); m];
    for i in (0..m).rev() {
        let mut acc = a[i][m].clone();
        for j in i + 1..m {
            acc = acc - a[i][j].clone() * x[j].clone();
        }
        x[i] = acc / a[i][i].clone();
    }
    x.iter().all(|v| v.is_finite_value()).then_some(x)
}
