use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn alpha(a: f64) -> ConfidenceLevel {
    ConfidenceLevel::new(a).unwrap()
}

fn uniform(n: usize) -> ScenarioSpace {
    ScenarioSpace::uniform(n).unwrap()
}

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> ScenarioSpace {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    ScenarioSpace::from_weights(&w).unwrap()
}

/// Midpoint rule for `(1/α) ∫_0^α VaR_s ds` with `k` nodes.
fn avar_by_quadrature(space: &ScenarioSpace, x: &[f64], a: f64, k: usize) -> f64 {
    let h = a / k as f64;
    (0..k)
        .map(|i| value_at_risk(space.probs(), x, &((i as f64 + 0.5) * h)))
        .sum::<f64>()
        * h
        / a
}

#[test]
fn confidence_level_bounds() {
    assert!(ConfidenceLevel::new(0.0).is_err());
    assert!(ConfidenceLevel::new(1.0).is_err());
    assert!(ConfidenceLevel::new(f64::NAN).is_err());
    assert_eq!(ConfidenceLevel::new(0.25).unwrap().value(), 0.25);
}

#[test]
fn positive_cone_examples() {
    let a = positive_cone(&uniform(2));
    assert!(a.member(&[0.0, 0.0]));
    assert!(!a.member(&[1.0, -0.1]));
    assert!(a.member(&[2.0, 3.0]));
    assert_eq!(a.flags(), SetFlags::ALL_TRUE);
    assert_eq!(a.polyhedral().unwrap(), Polyhedron::orthant(2));
}

#[test]
fn var_examples() {
    let s = uniform(2);
    assert!(var_acceptance(&s, alpha(0.6)).member(&[-5.0, 1.0]));
    assert!(!var_acceptance(&s, alpha(0.4)).member(&[-5.0, 1.0]));
    assert!(var_acceptance(&s, alpha(0.4)).member(&[0.0, 0.0]));
    assert_eq!(compute_var(&s, &[-1.0, 2.0], alpha(0.1)), 1.0);
    let s4 = uniform(4);
    assert_eq!(compute_var(&s4, &[-2.0, -1.0, 1.0, 3.0], alpha(0.5)), -1.0);
    let a = var_acceptance(&uniform(3), alpha(0.4));
    assert!(a.flags().cone.is_true());
    assert_eq!(a.flags().convex, TriState::False);
}

#[test]
fn var_membership_matches_var_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let n = rng.gen_range(2..7);
        let s = random_space(&mut rng, n);
        let al = alpha(rng.gen_range(0.05..0.95));
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let a = var_acceptance(&s, al);
        assert_eq!(a.member(&x), compute_var(&s, &x, al) <= 1e-9, "{x:?}");
    }
}

#[test]
fn avar_examples() {
    let s4 = uniform(4);
    let x = [-2.0, -1.0, 1.0, 3.0];
    assert_eq!(compute_avar(&s4, &x, alpha(0.5)), 1.5);
    assert!((avar_by_quadrature(&s4, &x, 0.5, 10_000) - 1.5).abs() < 1e-4);
    assert!((compute_avar(&uniform(3), &[-0.7; 3], alpha(0.2)) - 0.7).abs() < 1e-15);

    let a = avar_acceptance(&s4, alpha(0.5));
    assert!(a.member(&[0.0; 4]));
    assert!(!a.member(&x));
    let lifted: Vec<f64> = x.iter().map(|v| v + 1.5).collect();
    assert!(a.member(&lifted));
    assert_eq!(a.flags(), SetFlags::ALL_TRUE);
}

#[test]
fn avar_dominates_var_and_is_coherent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let n = rng.gen_range(2..8);
        let s = random_space(&mut rng, n);
        let al = alpha(rng.gen_range(0.05..0.95));
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let ax = compute_avar(&s, &x, al);
        assert!(ax >= compute_var(&s, &x, al) - 1e-12);
        for lambda in [0.5, 2.0] {
            let lx: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            assert!((compute_avar(&s, &lx, al) - lambda * ax).abs() < 1e-12);
        }
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        assert!(compute_avar(&s, &sum, al) <= ax + compute_avar(&s, &y, al) + 1e-12);
    }
}

#[test]
fn avar_staircase_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.gen_range(2..9);
        let s = random_space(&mut rng, n);
        let a = rng.gen_range(0.05..0.95);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let exact = compute_avar(&s, &x, alpha(a));
        assert!((exact - avar_by_quadrature(&s, &x, a, 10_000)).abs() < 1e-4);
    }
}

#[test]
fn polyhedral_rows_agree_with_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let s = random_space(&mut rng, 4);
    let avar = avar_acceptance(&s, alpha(0.3));
    let block = avar.polyhedral().unwrap();
    assert_eq!(block.n_aux, 5);
    let mut disagreements = 0;
    for _ in 0..10_000 {
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
        if block.contains(&x, 1e-9) != avar.member(&x) {
            // Only tolerance-band points may disagree.
            assert!(compute_avar(&s, &x, alpha(0.3)).abs() < 1e-6, "{x:?}");
            disagreements += 1;
        }
    }
    assert!(disagreements < 5);

    let both = intersect(vec![positive_cone(&s), halfspace_acceptance(vec![1.0, 2.0, 0.0, 1.0]).unwrap()]).unwrap();
    let rows = both.polyhedral().unwrap();
    for _ in 0..10_000 {
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..3.0)).collect();
        assert_eq!(rows.contains(&x, 1e-9), both.member(&x));
    }
}

#[test]
fn intersection_examples() {
    let s = uniform(2);
    let a = intersect(vec![positive_cone(&s), avar_acceptance(&s, alpha(0.5))]).unwrap();
    assert!(a.member(&[1.0, 1.0]));
    assert!(!a.member(&[-0.1, 5.0]));
    assert_eq!(a.flags(), SetFlags::ALL_TRUE);
    assert!(a.polyhedral().is_some());

    let single = intersect(vec![avar_acceptance(&uniform(3), alpha(0.3))]).unwrap();
    let base = avar_acceptance(&uniform(3), alpha(0.3));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
        assert_eq!(single.member(&x), base.member(&x));
    }

    assert!(matches!(
        intersect(vec![positive_cone(&s), positive_cone(&uniform(3))]),
        Err(AcceptanceError::DimensionMismatch(_))
    ));
    assert_eq!(intersect(vec![]).unwrap_err(), AcceptanceError::Empty);
}

#[test]
fn var_intersection_is_a_scenario_union() {
    let s = uniform(3);
    let a = intersect(vec![var_acceptance(&s, alpha(0.4)), halfspace_acceptance(vec![1.0, 1.0, 1.0]).unwrap()]).unwrap();
    let u = a.scenario_union().unwrap();
    assert_eq!(u.maximal_subsets(), vec![1, 2, 4]);
    assert!(u.base.is_some());
    assert!(a.polyhedral().is_none());
}

#[test]
fn halfspace_examples() {
    let a = halfspace_acceptance(vec![1.0, 0.0]).unwrap();
    assert!(a.member(&[0.0, -7.0]));
    assert!(!a.member(&[-1.0, 100.0]));
    assert!(halfspace_acceptance(vec![1.0, 1.0]).unwrap().member(&[-1.0, 2.0]));
    assert!(matches!(halfspace_acceptance(vec![1.0, -0.5]), Err(AcceptanceError::BadNormal(_))));
    assert!(matches!(halfspace_acceptance(vec![0.0, 0.0]), Err(AcceptanceError::BadNormal(_))));
}

#[test]
fn cone_plus_line() {
    let a = cone_plus_span(3, &[vec![0.0, 0.0, 1.0]]).unwrap();
    assert!(a.member(&[0.0, 2.0, -1e6]));
    assert!(!a.member(&[-1.0, 2.0, 5.0]));
    assert!(!a.member(a.non_member().unwrap()));
    let p = a.polyhedral().unwrap();
    assert!(p.recedes_along(&[0.0, 0.0, -1.0], 1e-9).unwrap());
    assert!(!p.recedes_along(&[-1.0, 0.0, 0.0], 1e-9).unwrap());
}

#[test]
fn validator_accepts_standard_sets() {
    let s = uniform(3);
    for a in [
        positive_cone(&s),
        avar_acceptance(&s, alpha(0.3)),
        var_acceptance(&s, alpha(0.4)),
        halfspace_acceptance(vec![0.0, 1.0, 2.0]).unwrap(),
    ] {
        let r = validate_acceptance(&a, &s, 200, 9);
        assert!(r.passed(), "{}: {:?}", a.label(), r.violations());
    }
}

#[test]
fn validator_falsifies_var_convexity() {
    let s = uniform(3);
    let r = validate_acceptance(&var_acceptance(&s, alpha(0.4)), &s, 200, 1);
    let c = r.convexity.counterexample.expect("midpoint violation");
    let (x, y) = (&c.points[0], &c.points[1]);
    let a = var_acceptance(&s, alpha(0.4));
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    assert!(a.member(x) && a.member(y) && !a.member(&mid));
    // With α below every state probability the set is the positive cone.
    let r = validate_acceptance(&var_acceptance(&s, alpha(0.3)), &s, 200, 1);
    assert!(r.convexity.counterexample.is_none());
}

#[test]
fn validator_confirms_stored_non_member() {
    let a = halfspace_acceptance(vec![1.0, 0.0]).unwrap().with_non_member(vec![-1.0, 0.0]);
    let r = validate_acceptance(&a, &uniform(2), 50, 0);
    assert!(r.proper && r.passed());
    let fake = a.with_non_member(vec![1.0, 0.0]);
    assert!(!validate_acceptance(&fake, &uniform(2), 50, 0).proper);
}

#[test]
fn validator_catches_broken_sets() {
    let s = uniform(3);
    let tie = var_acceptance_with(&s, alpha(0.4), TieRule::ZeroIsLoss);
    let r = validate_acceptance(&tie, &s, 100, 4);
    assert!(!r.contains_zero && !r.passed());

    // {X1 >= X2} is not monotone.
    let skew = polyhedral_acceptance(vec![vec![1.0, -1.0, 0.0]], vec![0.0]).unwrap();
    let r = validate_acceptance(&skew, &s, 200, 4);
    assert!(!r.monotonicity_violations.is_empty());

    let mut asserted = SetFlags::ALL_TRUE;
    asserted.convex = TriState::True;
    let lying = var_acceptance(&s, alpha(0.4)).with_flags(asserted);
    assert!(validate_acceptance(&lying, &s, 200, 1).convexity.violated());
}

#[test]
fn descriptors_build_sets() {
    let s = uniform(2);
    let d = AcceptanceDescriptor::from_json(
        r#"{"type": "intersection", "parts": [{"type": "positive_cone"}, {"type": "avar", "alpha": 0.5}]}"#,
    )
    .unwrap();
    let a = d.build(&s).unwrap();
    assert!(a.member(&[1.0, 1.0]) && !a.member(&[-0.1, 5.0]));
    assert_eq!(AcceptanceDescriptor::from_json(&d.to_json()).unwrap(), d);

    let h = AcceptanceDescriptor::from_json(r#"{"type": "halfspace", "normal": [1, 0]}"#).unwrap();
    assert!(h.build(&s).unwrap().member(&[0.0, -7.0]));
    let v = AcceptanceDescriptor::from_json(r#"{"type": "var", "alpha": 0.4, "tie_rule": "zero_is_loss"}"#).unwrap();
    assert!(!v.build(&s).unwrap().member(&[0.0, 0.0]));

    for bad in [
        r#"{"type": "var"}"#,
        r#"{"type": "avar", "alpha": 1.5}"#,
        r#"{"type": "halfspace", "normal": [1, 0, 0]}"#,
        r#"{"type": "cube"}"#,
    ] {
        assert!(AcceptanceDescriptor::from_json(bad).unwrap().build(&s).is_err(), "{bad}");
    }
    assert!(AcceptanceDescriptor::from_json(r#"{"type": "var", "beta": 1}"#).is_err());
}

proptest! {
    #[test]
    fn var_and_avar_are_cash_invariant(
        x in prop::collection::vec(-5.0f64..5.0, 2..8),
        m in -3.0f64..3.0,
        a in 0.01f64..0.99,
    ) {
        let s = uniform(x.len());
        let shifted: Vec<f64> = x.iter().map(|v| v + m).collect();
        let var = compute_var(&s, &x, alpha(a));
        prop_assert!((compute_var(&s, &shifted, alpha(a)) - (var - m)).abs() <= 1e-12 * (1.0 + var.abs() + m.abs()));
        let avar = compute_avar(&s, &x, alpha(a));
        prop_assert!((compute_avar(&s, &shifted, alpha(a)) - (avar - m)).abs() <= 1e-12 * (1.0 + avar.abs() + m.abs()) * 8.0);
    }

    #[test]
    fn constructors_are_monotone(
        x in prop::collection::vec(-5.0f64..5.0, 3),
        d in prop::collection::vec(0.0f64..3.0, 3),
        a in 0.05f64..0.95,
    ) {
        let s = uniform(3);
        let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        for set in [positive_cone(&s), var_acceptance(&s, alpha(a)), avar_acceptance(&s, alpha(a))] {
            if set.member(&x) {
                prop_assert!(set.member(&y));
            }
        }
    }
}
