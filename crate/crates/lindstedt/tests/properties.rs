//! Randomized invariants of the series algebra.

use lindstedt::fourier::{BetaPoly, TrigPoly};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn arb_real_trigpoly(d: usize, max_mode: i64, terms: usize) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec(
        (
            prop::collection::vec(-max_mode..=max_mode, d),
            -max_mode..=max_mode,
            -1.0f64..1.0,
            -1.0f64..1.0,
        ),
        1..=terms,
    )
    .prop_map(move |entries| {
        let mut p = TrigPoly::new(d);
        for (nu, m, re, im) in entries {
            let c = C64::new(0.5 * re, 0.5 * im);
            let neg: Vec<i64> = nu.iter().map(|x| -x).collect();
            p.insert(nu, m, c);
            p.insert(neg, -m, c.conj());
        }
        p
    })
}

fn arb_beta_poly(max_mode: i64, terms: usize) -> impl Strategy<Value = BetaPoly> {
    prop::collection::vec(((-max_mode..=max_mode), -1.0f64..1.0, -1.0f64..1.0), 1..=terms)
        .prop_map(|entries| {
            let mut p = BetaPoly::new();
            for (m, re, im) in entries {
                p.insert(m, C64::new(re, im));
            }
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_evaluates_pointwise(
        a in arb_real_trigpoly(2, 2, 4),
        b in arb_real_trigpoly(2, 2, 4),
        a1 in 0.0f64..6.28,
        a2 in 0.0f64..6.28,
        beta in 0.0f64..6.28,
    ) {
        let prod = a.mul(&b);
        let alpha = [a1, a2];
        let lhs = prod.eval(&alpha, beta);
        let rhs = a.eval(&alpha, beta) * b.eval(&alpha, beta);
        let scale = 1.0 + lhs.norm().max(rhs.norm());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn reality_propagates_through_products_and_derivatives(
        a in arb_real_trigpoly(2, 2, 4),
        b in arb_real_trigpoly(2, 2, 4),
        a1 in 0.0f64..6.28,
        a2 in 0.0f64..6.28,
        beta in 0.0f64..6.28,
    ) {
        let prod = a.mul(&b);
        prop_assert!(prod.reality_defect() <= 1e-12);
        let alpha = [a1, a2];
        let v = prod.eval(&alpha, beta);
        prop_assert!(v.im.abs() <= 1e-12 * (1.0 + v.norm()));
        let dv = prod.deriv_alpha(0).deriv_beta().eval(&alpha, beta);
        prop_assert!(dv.im.abs() <= 1e-10 * (1.0 + dv.norm()));
    }

    #[test]
    fn beta_product_evaluates_pointwise(
        a in arb_beta_poly(3, 5),
        b in arb_beta_poly(3, 5),
        beta in 0.0f64..6.28,
    ) {
        let lhs = a.mul(&b).eval(beta);
        let rhs = a.eval(beta) * b.eval(beta);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm().max(rhs.norm())));
    }

    #[test]
    fn conjugate_reflection_is_involutive_and_matches_conjugation(
        a in arb_beta_poly(3, 5),
        beta in 0.0f64..6.28,
    ) {
        let r = a.conj_reflect();
        prop_assert_eq!(r.conj_reflect(), a.clone());
        let lhs = r.eval(beta);
        let rhs = a.eval(beta).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
}
