//! Small dense helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff used for every rank decision.
pub const RANK_RTOL: f64 = 1e-9;

pub fn matrix_from_rows(rows: &[Vec<f64>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Numerical rank of `m` and an orthonormal basis of its row space
/// (one basis vector per row of the returned matrix).
pub fn row_space(m: &DMatrix<f64>) -> (usize, DMatrix<f64>) {
    let ncols = m.ncols();
    if m.nrows() == 0 || ncols == 0 {
        return (0, DMatrix::zeros(0, ncols));
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| sigma_max > 0.0 && svd.singular_values[i] > RANK_RTOL * sigma_max)
        .collect();
    let mut basis = DMatrix::zeros(keep.len(), ncols);
    for (r, &i) in keep.iter().enumerate() {
        basis.set_row(r, &v_t.row(i));
    }
    (keep.len(), basis)
}

/// Orthonormal basis of the orthogonal complement of the unit vector `c`
/// inside `R^d`, by Gram–Schmidt on the standard basis.
pub fn complement_of_vector(c: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = c.len();
    let mut accepted: Vec<DVector<f64>> = vec![c.normalize()];
    let mut out = Vec::with_capacity(d.saturating_sub(1));
    // Prefer standard vectors least aligned with c.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs()));
    for i in order {
        if out.len() + 1 == d {
            break;
        }
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        for _ in 0..2 {
            for q in &accepted {
                let proj = q.dot(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            let v = v / norm;
            accepted.push(v.clone());
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let m = matrix_from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]], 2);
        assert_eq!(row_space(&m).0, 1);
        let m = matrix_from_rows(&[vec![1.0, 1.0], vec![2.0, 0.5]], 2);
        assert_eq!(row_space(&m).0, 2);
    }

    #[test]
    fn complement_is_orthonormal() {
        let c = DVector::from_vec(vec![1.0, 2.0, -1.0, 0.5]).normalize();
        let comp = complement_of_vector(&c);
        assert_eq!(comp.len(), 3);
        for (i, a) in comp.iter().enumerate() {
            assert!(a.dot(&c).abs() < 1e-12);
            for b in &comp[i + 1..] {
                assert!(a.dot(b).abs() < 1e-12);
            }
            assert!((a.norm() - 1.0).abs() < 1e-12);
        }
    }
}
