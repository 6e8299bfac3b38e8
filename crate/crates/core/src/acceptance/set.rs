use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::polyhedron::Polyhedron;
use super::quantile::average_value_at_risk;
use super::{AcceptanceError, ConfidenceLevel};
use crate::market::ScenarioSpace;
use crate::riskmeasure::InducedSet;

/// Default membership tolerance.
pub const ACCEPT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriState {
    True,
    False,
    Unknown,
}

impl TriState {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TriState::True
        } else {
            TriState::False
        }
    }

    pub fn is_true(self) -> bool {
        self == TriState::True
    }

    /// `True` only if both are `True`.
    pub fn both(self, other: Self) -> Self {
        if self.is_true() && other.is_true() {
            TriState::True
        } else {
            TriState::Unknown
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFlags {
    pub convex: TriState,
    pub cone: TriState,
    pub closed_under_addition: TriState,
}

impl SetFlags {
    pub const ALL_TRUE: SetFlags = SetFlags {
        convex: TriState::True,
        cone: TriState::True,
        closed_under_addition: TriState::True,
    };

    pub const UNKNOWN: SetFlags = SetFlags {
        convex: TriState::Unknown,
        cone: TriState::Unknown,
        closed_under_addition: TriState::Unknown,
    };

    fn both(self, other: Self) -> Self {
        SetFlags {
            convex: self.convex.both(other.convex),
            cone: self.cone.both(other.cone),
            closed_under_addition: self.closed_under_addition.both(other.closed_under_addition),
        }
    }
}

/// Which outcomes count as losses in the VaR acceptance test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Only strictly negative outcomes are losses.
    #[default]
    Strict,
    /// Zero outcomes are losses too. Breaks `0 ∈ A`; kept as a negative
    /// control for the validators.
    ZeroIsLoss,
}

pub type MemberFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Shape {
    PositiveCone,
    Halfspace { normal: Vec<f64> },
    Var { probs: Vec<f64>, alpha: ConfidenceLevel, tie: TieRule },
    Avar { probs: Vec<f64>, alpha: ConfidenceLevel },
    /// Caller-supplied `{C·Y >= d}`, possibly with auxiliary variables.
    Polyhedral(Polyhedron),
    Intersection(Vec<AcceptanceSet>),
    /// `base ∪ (points + X_+)`.
    Augmented { base: Box<AcceptanceSet>, points: Vec<Vec<f64>> },
    Induced(Arc<InducedSet>),
    Oracle(MemberFn),
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::PositiveCone => write!(f, "PositiveCone"),
            Shape::Halfspace { normal } => f.debug_struct("Halfspace").field("normal", normal).finish(),
            Shape::Var { alpha, tie, .. } => f
                .debug_struct("Var")
                .field("alpha", &alpha.value())
                .field("tie", tie)
                .finish(),
            Shape::Avar { alpha, .. } => f.debug_struct("Avar").field("alpha", &alpha.value()).finish(),
            Shape::Polyhedral(p) => f.debug_tuple("Polyhedral").field(p).finish(),
            Shape::Intersection(parts) => f.debug_tuple("Intersection").field(parts).finish(),
            Shape::Augmented { base, points } => f
                .debug_struct("Augmented")
                .field("base", base)
                .field("points", points)
                .finish(),
            Shape::Induced(_) => write!(f, "Induced"),
            Shape::Oracle(_) => write!(f, "Oracle"),
        }
    }
}

/// Finite union of polyhedra `⋃_J {Y : Y_ω >= 0 for ω ∉ J} ∩ base` over
/// the state sets `J` with `P(J) <= α`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioUnion {
    pub probs: Vec<f64>,
    pub alpha: f64,
    pub base: Option<Polyhedron>,
}

impl ScenarioUnion {
    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    fn mass(&self, mask: u64) -> f64 {
        (0..self.dim())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.probs[i])
            .sum()
    }

    fn admissible(&self, mask: u64) -> bool {
        self.mass(mask) <= self.alpha + 1e-12
    }

    /// Inclusion-maximal admissible state sets, in increasing bitmask order.
    /// Their pieces cover the whole union.
    pub fn maximal_subsets(&self) -> Vec<u64> {
        let n = self.dim();
        (0..1u64 << n)
            .filter(|&m| {
                self.admissible(m)
                    && (0..n).all(|i| m & (1 << i) != 0 || !self.admissible(m | (1 << i)))
            })
            .collect()
    }

    pub fn piece(&self, mask: u64) -> Polyhedron {
        let orthant = Polyhedron::orthant_except(self.dim(), mask);
        match &self.base {
            Some(b) => Polyhedron::stack(&[orthant, b.clone()]),
            None => orthant,
        }
    }
}

/// Monotone set of acceptable positions with `0 ∈ A`, together with a
/// point outside it and structural flags.
#[derive(Debug, Clone)]
pub struct AcceptanceSet {
    dim: usize,
    shape: Shape,
    flags: SetFlags,
    non_member: Option<Vec<f64>>,
    tol: f64,
    label: String,
}

impl AcceptanceSet {
    fn build(dim: usize, shape: Shape, flags: SetFlags, label: impl Into<String>) -> Self {
        let mut set = Self {
            dim,
            shape,
            flags,
            non_member: None,
            tol: ACCEPT_TOL,
            label: label.into(),
        };
        set.non_member = set.search_non_member();
        set
    }

    fn search_non_member(&self) -> Option<Vec<f64>> {
        [1.0, 10.0, 1e3, 1e6]
            .iter()
            .map(|s| vec![-s; self.dim])
            .find(|x| !self.member(x))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn flags(&self) -> SetFlags {
        self.flags
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Stored point outside the set.
    pub fn non_member(&self) -> Option<&[f64]> {
        self.non_member.as_deref()
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_flags(mut self, flags: SetFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Replaces the stored non-member; it is not checked here.
    pub fn with_non_member(mut self, x: Vec<f64>) -> Self {
        self.non_member = Some(x);
        self
    }

    pub fn member(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        let tol = self.tol;
        match &self.shape {
            Shape::PositiveCone => x.iter().all(|v| *v >= -tol),
            Shape::Halfspace { normal } => crate::linalg::dot(normal, x) >= -tol,
            Shape::Var { probs, alpha, tie } => {
                let lost: f64 = x
                    .iter()
                    .zip(probs)
                    .filter(|(v, _)| match tie {
                        TieRule::Strict => **v < -tol,
                        TieRule::ZeroIsLoss => **v <= 0.0,
                    })
                    .map(|(_, p)| p)
                    .sum();
                lost <= alpha.value() + f64_slack()
            }
            Shape::Avar { probs, alpha } => average_value_at_risk(probs, x, &alpha.value()) <= tol,
            Shape::Polyhedral(p) => p.contains(x, tol),
            Shape::Intersection(parts) => parts.iter().all(|a| a.member(x)),
            Shape::Augmented { base, points } => {
                base.member(x) || points.iter().any(|p| x.iter().zip(p).all(|(a, b)| a - b >= -tol))
            }
            Shape::Induced(ind) => ind.member(x),
            Shape::Oracle(f) => f(x),
        }
    }

    /// Polyhedral description when the set has one.
    pub fn polyhedral(&self) -> Option<Polyhedron> {
        match &self.shape {
            Shape::PositiveCone => Some(Polyhedron::orthant(self.dim)),
            Shape::Halfspace { normal } => Some(Polyhedron {
                dim: self.dim,
                n_aux: 0,
                rows: vec![normal.clone()],
                rhs: vec![0.0],
            }),
            Shape::Avar { probs, alpha } => Some(avar_block(probs, alpha.value())),
            Shape::Polyhedral(p) => Some(p.clone()),
            Shape::Intersection(parts) => {
                let polys: Option<Vec<Polyhedron>> = parts.iter().map(|a| a.polyhedral()).collect();
                polys.map(|p| Polyhedron::stack(&p))
            }
            Shape::Var { probs, alpha, .. } if alpha.value() < min_prob(probs) - f64_slack() => {
                Some(Polyhedron::orthant(self.dim))
            }
            _ => None,
        }
    }

    /// Union-of-polyhedra description of VaR acceptance, possibly
    /// intersected with polyhedral parts.
    pub fn scenario_union(&self) -> Option<ScenarioUnion> {
        match &self.shape {
            Shape::Var {
                probs,
                alpha,
                tie: TieRule::Strict,
            } => Some(ScenarioUnion {
                probs: probs.clone(),
                alpha: alpha.value(),
                base: None,
            }),
            Shape::Intersection(parts) => {
                let mut union: Option<ScenarioUnion> = None;
                let mut polys = Vec::new();
                for part in parts {
                    if let Some(p) = part.polyhedral() {
                        polys.push(p);
                    } else if let (None, Some(u)) = (&union, part.scenario_union()) {
                        if let Some(b) = &u.base {
                            polys.push(b.clone());
                        }
                        union = Some(ScenarioUnion { base: None, ..u });
                    } else {
                        return None;
                    }
                }
                let mut u = union?;
                if !polys.is_empty() {
                    u.base = Some(Polyhedron::stack(&polys));
                }
                Some(u)
            }
            _ => None,
        }
    }
}

fn f64_slack() -> f64 {
    1e-12
}

fn min_prob(probs: &[f64]) -> f64 {
    probs.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `{X : ∃ t, u: u >= 0, u_ω + X_ω + t >= 0, -t - (1/α) p·u >= 0}`,
/// auxiliary order `(t, u_1, …, u_n)`.
fn avar_block(probs: &[f64], alpha: f64) -> Polyhedron {
    let n = probs.len();
    let width = 2 * n + 1;
    let mut rows = Vec::with_capacity(2 * n + 1);
    for w in 0..n {
        let mut r = vec![0.0; width];
        r[w] = 1.0;
        r[n] = 1.0;
        r[n + 1 + w] = 1.0;
        rows.push(r);
    }
    for w in 0..n {
        let mut r = vec![0.0; width];
        r[n + 1 + w] = 1.0;
        rows.push(r);
    }
    let mut r = vec![0.0; width];
    r[n] = -1.0;
    for w in 0..n {
        r[n + 1 + w] = -probs[w] / alpha;
    }
    rows.push(r);
    Polyhedron {
        dim: n,
        n_aux: n + 1,
        rhs: vec![0.0; rows.len()],
        rows,
    }
}

/// `X_+`, the smallest acceptance set.
pub fn positive_cone(space: &ScenarioSpace) -> AcceptanceSet {
    positive_cone_dim(space.n())
}

pub fn positive_cone_dim(n: usize) -> AcceptanceSet {
    AcceptanceSet::build(n, Shape::PositiveCone, SetFlags::ALL_TRUE, "positive_cone")
}

/// `{X : P(X < 0) <= α}`.
pub fn var_acceptance(space: &ScenarioSpace, alpha: ConfidenceLevel) -> AcceptanceSet {
    var_acceptance_with(space, alpha, TieRule::Strict)
}

pub fn var_acceptance_with(space: &ScenarioSpace, alpha: ConfidenceLevel, tie: TieRule) -> AcceptanceSet {
    let probs = space.probs().to_vec();
    // Below the smallest state probability no state may be a loss and the
    // set is the positive cone.
    let orthant = alpha.value() < min_prob(&probs) - f64_slack();
    let flags = SetFlags {
        convex: TriState::from_bool(orthant),
        cone: TriState::True,
        closed_under_addition: TriState::from_bool(orthant),
    };
    let flags = if tie == TieRule::Strict { flags } else { SetFlags::UNKNOWN };
    AcceptanceSet::build(
        space.n(),
        Shape::Var { probs, alpha, tie },
        flags,
        format!("var({})", alpha.value()),
    )
}

/// `{X : AVaR_α(X) <= 0}`.
pub fn avar_acceptance(space: &ScenarioSpace, alpha: ConfidenceLevel) -> AcceptanceSet {
    AcceptanceSet::build(
        space.n(),
        Shape::Avar {
            probs: space.probs().to_vec(),
            alpha,
        },
        SetFlags::ALL_TRUE,
        format!("avar({})", alpha.value()),
    )
}

/// `{X : w·X >= 0}` for a nonnegative, nonzero normal.
pub fn halfspace_acceptance(normal: Vec<f64>) -> Result<AcceptanceSet, AcceptanceError> {
    if normal.is_empty() || normal.iter().any(|v| !v.is_finite()) {
        return Err(AcceptanceError::BadNormal("empty or non-finite normal".into()));
    }
    if let Some(v) = normal.iter().find(|v| **v < 0.0) {
        return Err(AcceptanceError::BadNormal(format!("negative component {v}")));
    }
    if normal.iter().all(|v| *v == 0.0) {
        return Err(AcceptanceError::BadNormal("zero normal".into()));
    }
    Ok(AcceptanceSet::build(
        normal.len(),
        Shape::Halfspace { normal },
        SetFlags::ALL_TRUE,
        "halfspace",
    ))
}

/// Conjunction of acceptance sets over the same states.
pub fn intersect(sets: Vec<AcceptanceSet>) -> Result<AcceptanceSet, AcceptanceError> {
    let first = sets.first().ok_or(AcceptanceError::Empty)?;
    let dim = first.dim;
    if let Some(s) = sets.iter().find(|s| s.dim != dim) {
        return Err(AcceptanceError::DimensionMismatch(format!(
            "sets over {dim} and {} states",
            s.dim
        )));
    }
    let flags = sets
        .iter()
        .skip(1)
        .fold(first.flags, |acc, s| acc.both(s.flags));
    let label = format!(
        "intersection({})",
        sets.iter().map(|s| s.label.as_str()).collect::<Vec<_>>().join(",")
    );
    let non_member = sets.iter().find_map(|s| s.non_member.clone());
    let mut set = AcceptanceSet::build(dim, Shape::Intersection(sets), flags, label);
    if set.non_member.is_none() {
        set.non_member = non_member;
    }
    Ok(set)
}

/// `{Y : C·Y >= d}` exactly as given. Monotonicity and `0 ∈ A` are not
/// enforced, which makes this the entry point for deliberately broken sets.
pub fn polyhedral_acceptance(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<AcceptanceSet, AcceptanceError> {
    let dim = rows.first().map(|r| r.len()).ok_or(AcceptanceError::Empty)?;
    let poly = Polyhedron::new(dim, 0, rows, rhs)?;
    Ok(polyhedron_acceptance(poly))
}

/// Acceptance set with a given polyhedral description.
pub fn polyhedron_acceptance(poly: Polyhedron) -> AcceptanceSet {
    let homogeneous = poly.rhs.iter().all(|b| *b == 0.0);
    let flags = SetFlags {
        convex: TriState::True,
        cone: if homogeneous { TriState::True } else { TriState::Unknown },
        closed_under_addition: if poly.rhs.iter().all(|b| *b <= 0.0) {
            TriState::True
        } else {
            TriState::Unknown
        },
    };
    AcceptanceSet::build(poly.dim, Shape::Polyhedral(poly), flags, "polyhedral")
}

/// `span(directions) + X_+`.
pub fn cone_plus_span(dim: usize, directions: &[Vec<f64>]) -> Result<AcceptanceSet, AcceptanceError> {
    if let Some(d) = directions.iter().find(|d| d.len() != dim) {
        return Err(AcceptanceError::DimensionMismatch(format!(
            "direction of length {}, expected {dim}",
            d.len()
        )));
    }
    let k = directions.len();
    let rows = (0..dim)
        .map(|w| {
            let mut r = vec![0.0; dim + k];
            r[w] = 1.0;
            for (j, d) in directions.iter().enumerate() {
                r[dim + j] = -d[w];
            }
            r
        })
        .collect();
    let poly = Polyhedron::new(dim, k, rows, vec![0.0; dim])?;
    Ok(polyhedron_acceptance(poly).with_label("cone_plus_span"))
}

/// `base ∪ (points + X_+)`.
pub fn augmented(base: AcceptanceSet, points: Vec<Vec<f64>>) -> Result<AcceptanceSet, AcceptanceError> {
    if let Some(p) = points.iter().find(|p| p.len() != base.dim) {
        return Err(AcceptanceError::DimensionMismatch(format!(
            "point of length {}, expected {}",
            p.len(),
            base.dim
        )));
    }
    let label = format!("augmented({})", base.label);
    Ok(AcceptanceSet::build(
        base.dim,
        Shape::Augmented {
            base: Box::new(base),
            points,
        },
        SetFlags::UNKNOWN,
        label,
    ))
}

/// Black-box acceptance set. The caller vouches for the flags.
pub fn oracle_acceptance(
    dim: usize,
    member: MemberFn,
    non_member: Option<Vec<f64>>,
    flags: SetFlags,
    label: impl Into<String>,
) -> AcceptanceSet {
    let mut set = AcceptanceSet::build(dim, Shape::Oracle(member), flags, label);
    if non_member.is_some() {
        set.non_member = non_member;
    }
    set
}

pub(crate) fn induced_acceptance(dim: usize, induced: InducedSet, flags: SetFlags) -> AcceptanceSet {
    AcceptanceSet::build(dim, Shape::Induced(Arc::new(induced)), flags, "induced")
}
