//! Value at risk and average value at risk on a finite probability space.
//!
//! `VaR_α(X) = inf{m : P(X + m < 0) <= α}`. On finitely many states this is
//! `-v` for the largest outcome `v` with `P(X < v) <= α`, and `s ↦ VaR_s(X)`
//! is a right-continuous staircase, so the tail average
//! `(1/α) ∫_0^α VaR_s(X) ds` is a finite sum over the sorted outcomes.

use crate::scalar::Scalar;

/// Distinct outcomes in increasing order with their total probability.
fn staircase<S: Scalar>(probs: &[S], x: &[S]) -> Vec<(S, S)> {
    debug_assert_eq!(probs.len(), x.len());
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("comparable outcomes"));
    let mut steps: Vec<(S, S)> = Vec::with_capacity(x.len());
    for i in idx {
        match steps.last_mut() {
            Some((v, q)) if *v == x[i] => *q = q.clone() + probs[i].clone(),
            _ => steps.push((x[i].clone(), probs[i].clone())),
        }
    }
    steps
}

/// `VaR_α(X)` with the strict loss convention `X + m < 0`.
pub fn value_at_risk<S: Scalar>(probs: &[S], x: &[S], alpha: &S) -> S {
    let level = alpha.clone() + S::probability_slack();
    let mut below = S::zero();
    let mut answer = None;
    for (v, q) in staircase(probs, x) {
        if below > level {
            break;
        }
        answer = Some(-v);
        below = below + q;
    }
    answer.expect("at least one state")
}

/// `AVaR_α(X) = (1/α) ∫_0^α VaR_s(X) ds`, integrated exactly over the
/// staircase.
pub fn average_value_at_risk<S: Scalar>(probs: &[S], x: &[S], alpha: &S) -> S {
    let mut below = S::zero();
    let mut integral = S::zero();
    for (v, q) in staircase(probs, x) {
        if below >= *alpha {
            break;
        }
        let upper = S::min_of(below.clone() + q, alpha.clone());
        integral = integral - v * (upper.clone() - below);
        below = upper;
    }
    integral / alpha.clone()
}
