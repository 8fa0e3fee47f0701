//! Property tests for the geometric and symbolic kernels.

use proptest::prelude::*;

use snostat_core::expr::{self, Expr};
use snostat_core::problem::ConeKind;

fn arb_cone() -> impl Strategy<Value = ConeKind> {
    prop_oneof![
        Just(ConeKind::Complementarity),
        Just(ConeKind::Vanishing),
        Just(ConeKind::Orthogonality),
        Just(ConeKind::Switching),
        Just(ConeKind::Disjunctive),
    ]
}

/// Small polynomial trees over two variables.
fn arb_poly() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (1usize..=2).prop_map(Expr::var),
        (-20i32..=20).prop_map(|k| Expr::constant(k as f64 / 10.0)),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), 2i32..=3).prop_map(|(a, k)| Expr::pow(a, k)),
            inner.prop_map(Expr::neg),
        ]
    })
}

proptest! {
    #[test]
    fn projection_lands_in_cone_and_is_idempotent(
        cone in arb_cone(),
        a1 in -5.0f64..5.0,
        a2 in -5.0f64..5.0,
    ) {
        let p = cone.project((a1, a2));
        prop_assert!(cone.contains(p, 1e-12), "{cone:?}: {p:?} outside");
        let pp = cone.project(p);
        prop_assert!((p.0 - pp.0).abs() <= 1e-12 && (p.1 - pp.1).abs() <= 1e-12);
        if cone.contains((a1, a2), 0.0) {
            prop_assert_eq!(p, (a1, a2));
        }
        // No boundary sample may be strictly closer than the projection.
        let d = f64::hypot(a1 - p.0, a2 - p.1);
        for i in 0..40 {
            let s = -5.0 + 10.0 * (i as f64) / 39.0;
            for q in [(s, 0.0), (0.0, s), (s.abs(), -s.abs())] {
                if cone.contains(q, 0.0) {
                    let dq = f64::hypot(a1 - q.0, a2 - q.1);
                    prop_assert!(dq + 1e-9 >= d, "{cone:?}: {q:?} closer than projection");
                }
            }
        }
    }

    #[test]
    fn membership_monotone_in_tolerance(
        cone in arb_cone(),
        a1 in -2.0f64..2.0,
        a2 in -2.0f64..2.0,
        t1 in 0.0f64..0.5,
        t2 in 0.0f64..0.5,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        if cone.contains((a1, a2), lo) {
            prop_assert!(cone.contains((a1, a2), hi));
        }
    }

    #[test]
    fn distance_vanishes_exactly_on_members(
        cone in arb_cone(),
        a1 in -3.0f64..3.0,
        a2 in -3.0f64..3.0,
    ) {
        let d = cone.distance((a1, a2));
        prop_assert!(d >= 0.0);
        prop_assert_eq!(cone.contains((a1, a2), 0.0), d == 0.0);
    }

    #[test]
    fn symbolic_gradient_matches_central_differences(
        e in arb_poly(),
        x1 in -0.9f64..0.9,
        x2 in -0.9f64..0.9,
    ) {
        let x = [x1, x2];
        let value = e.eval(&x).unwrap();
        let grad = e.gradient_at(2, &x).unwrap();
        let scale = grad.iter().fold(value.abs(), |m, g| m.max(g.abs()));
        prop_assume!(scale <= 100.0);
        let h = 1e-5;
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fd = (e.eval(&xp).unwrap() - e.eval(&xm).unwrap()) / (2.0 * h);
            prop_assert!(
                (grad[j] - fd).abs() <= 1e-5 * (1.0 + value.abs()),
                "d/dx{} of {e}: symbolic {} vs fd {fd}",
                j + 1,
                grad[j]
            );
        }
    }

    #[test]
    fn hessian_symmetric_and_mixed_partials_commute(
        e in arb_poly(),
        x1 in -0.9f64..0.9,
        x2 in -0.9f64..0.9,
    ) {
        let x = [x1, x2];
        let h = e.hessian_at(2, &x).unwrap();
        prop_assume!((0..2).all(|i| (0..2).all(|j| h[(i, j)].abs() <= 1e6)));
        prop_assert!((h[(0, 1)] - h[(1, 0)]).abs() <= 1e-12 * (1.0 + h[(0, 1)].abs()));
        let d12 = e.diff(1).diff(2).eval(&x).unwrap();
        let d21 = e.diff(2).diff(1).eval(&x).unwrap();
        prop_assert!((d12 - d21).abs() <= 1e-12 * (1.0 + d12.abs()));
    }

    #[test]
    fn printed_expressions_reparse_to_the_same_function(
        e in arb_poly(),
        x1 in -0.9f64..0.9,
        x2 in -0.9f64..0.9,
    ) {
        let text = e.to_string();
        let reparsed = expr::parse(&text, 2).unwrap();
        let x = [x1, x2];
        let a = e.eval(&x).unwrap();
        let b = reparsed.eval(&x).unwrap();
        prop_assert!(
            (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
            "{text}: {a} vs {b}"
        );
    }
}
