use serde_json::json;

use super::{check_dims, shifted, PropertyReport, VerifyError, VerifyOptions};
use crate::acceptance::{AcceptanceSet, Polyhedron};
use crate::directional::{dir_bd_member, dir_cl_member, dir_int_member, APlusKer, Region};
use crate::market::ValidatedMarket;

/// Offset used to decide whether a disagreement sits on the boundary.
const NEAR: f64 = 1e-6;

struct Topological<'a> {
    poly: &'a Polyhedron,
    tol: f64,
    radius: f64,
}

impl Topological<'_> {
    /// Polyhedra are closed, so the closure is the set itself.
    fn contains(&self, y: &[f64]) -> bool {
        self.poly.contains(y, self.tol)
    }

    /// The cross-polytope of the given radius around `y` lies inside. For
    /// a convex set this holds for some radius iff `y` is interior, and it
    /// is monotone in the radius.
    fn interior(&self, y: &[f64]) -> bool {
        if !self.contains(y) {
            return false;
        }
        (0..y.len()).all(|i| {
            [self.radius, -self.radius].iter().all(|r| {
                let mut v = y.to_vec();
                v[i] += r;
                self.contains(&v)
            })
        })
    }
}

/// Checks `A + ker π + R_{>0}U ⊆ int(A + ker π)` and
/// `cl(A + ker π) + R_{>0}U ⊆ A + ker π` at the members among `grid`; when
/// both hold, the directional interior, closure and boundary must match
/// the topological ones at every grid point. A failed hypothesis is
/// reported in the notes and the comparison is skipped.
pub fn check_directional_vs_topological(
    a: &AcceptanceSet,
    vm: &ValidatedMarket,
    grid: &[Vec<f64>],
    opts: &VerifyOptions,
) -> Result<PropertyReport, VerifyError> {
    check_dims(a.dim(), vm)?;
    let b = APlusKer { a, vm, opts: &opts.solve };
    let poly = b.polyhedron().ok_or(VerifyError::NotPolyhedral)?;
    let topo = Topological {
        poly: &poly,
        tol: opts.solve.member_tol,
        radius: opts.probe.final_scale(),
    };
    let u = vm.numeraire();
    let mut report = PropertyReport::new("directional_vs_topological", 0);

    let mut points = vec![vec![0.0; vm.n_states()]];
    points.extend(grid.iter().cloned());
    for p in points.iter().filter(|p| topo.contains(p)) {
        for t in [1.0, 1e-3] {
            let q = shifted(p, u, t);
            if !topo.interior(&q) {
                report.note(format!("hypothesis A + ker π + tU ⊆ int fails at {p:?}, t = {t}; comparison skipped"));
                return Ok(report);
            }
            if !topo.contains(&q) {
                report.note(format!("hypothesis cl + tU ⊆ A + ker π fails at {p:?}, t = {t}; comparison skipped"));
                return Ok(report);
            }
        }
    }

    for (trial, p) in grid.iter().enumerate() {
        report.trials += 1;
        let dir = [
            dir_int_member(&b, u, p, &opts.probe),
            dir_cl_member(&b, u, p, &opts.probe),
            dir_bd_member(&b, u, p, &opts.probe),
        ];
        let int = topo.interior(p);
        let cl = topo.contains(p);
        let top = [int, cl, cl && !int];
        if dir == top {
            continue;
        }
        if topo.contains(&shifted(p, u, NEAR)) != topo.contains(&shifted(p, u, -NEAR)) {
            report.inconclusive += 1;
            continue;
        }
        report.violation(
            trial,
            "directional and topological operators disagree",
            json!({ "x": p }),
            json!({ "directional": { "int": dir[0], "cl": dir[1], "bd": dir[2] },
                    "topological": { "int": top[0], "cl": top[1], "bd": top[2] } }),
        );
    }
    Ok(report)
}
