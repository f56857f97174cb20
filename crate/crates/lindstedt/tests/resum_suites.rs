//! Symmetry, structure and regularisation suites on the resummed
//! self-energies, plus the inverse-class closure on random matrices.

mod common;

use common::{golden_scales, standard_f};
use lindstedt::jet::Jet2;
use lindstedt::linalg::JMat;
use lindstedt::resum::{
    class_closure_check, class_defect, property_monitor, resummed_structure_suite,
    resummed_symmetry_suite, scaling_exponents, ResumParams, ResumState,
};
use lindstedt::trees::{Enumerator, Rules};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn params(k: usize, beta0: f64, eps: f64, k0: usize) -> ResumParams {
    ResumParams {
        k_eps: k,
        n_max: 8,
        k0,
        eps,
        beta0,
        convex_sign_flip: false,
    }
}

/// Random polynomial matrix in the transpose/parity class of dimension d+1.
fn random_class_matrix(rng: &mut StdRng, d: usize, degree: usize) -> Vec<Vec<Vec<C64>>> {
    // coeffs[i][j][p] of x^p; constraints wired in by construction:
    // fast block B_ij(-x) = B_ji(x); slow entry even; cross blocks odd-linked.
    let n = d + 1;
    let mut raw = vec![vec![vec![C64::new(0.0, 0.0); degree + 1]; n]; n];
    let mut c = |rng: &mut StdRng| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for i in 0..d {
        for j in 0..d {
            for p in 0..=degree {
                raw[i][j][p] = c(rng);
            }
        }
        for p in 0..=degree {
            raw[i][d][p] = c(rng);
        }
    }
    for p in (0..=degree).step_by(2) {
        raw[d][d][p] = c(rng);
        // strong even diagonal keeps the samples invertible
    }
    raw[d][d][0] += C64::new(4.0, 0.0);
    let mut out = vec![vec![vec![C64::new(0.0, 0.0); degree + 1]; n]; n];
    for i in 0..d {
        for j in 0..d {
            for p in 0..=degree {
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                out[i][j][p] = raw[i][j][p] + sign * raw[j][i][p];
            }
            out[i][j][0] += if i == j { C64::new(4.0, 0.0) } else { C64::new(0.0, 0.0) };
        }
        for p in 0..=degree {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            out[i][d][p] = raw[i][d][p];
            out[d][i][p] = -sign * raw[i][d][p];
        }
    }
    for p in 0..=degree {
        out[d][d][p] = raw[d][d][p];
    }
    out
}

fn eval_poly_matrix(coeffs: &[Vec<Vec<C64>>], x: f64) -> JMat {
    let n = coeffs.len();
    let mut m = JMat::zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            let mut pw = 1.0;
            for c in &coeffs[i][j] {
                acc += c * pw;
                pw *= x;
            }
            m[(i, j)] = Jet2::constant(acc);
        }
    }
    m
}

#[test]
fn identity_and_diagonal_matrices_close_trivially() {
    let xs: Vec<f64> = (1..10).map(|i| 0.1 * i as f64).collect();
    let (res, skipped) = class_closure_check(|_x| JMat::identity(3), &xs, 1e-12);
    assert!(res.pass && skipped == 0);
    // diagonal matrix of even polynomials
    let (res, _) = class_closure_check(
        |x| {
            let mut m = JMat::identity(3);
            m[(0, 0)] = Jet2::constant_re(2.0 + x * x);
            m[(1, 1)] = Jet2::constant_re(1.0 + 3.0 * x * x);
            m[(2, 2)] = Jet2::constant_re(4.0 - 0.5 * x * x);
            m
        },
        &xs,
        1e-12,
    );
    assert!(res.pass);
}

#[test]
fn random_class_matrices_close_under_inversion() {
    let mut rng = StdRng::seed_from_u64(17);
    let xs: Vec<f64> = (1..=10).map(|i| 0.07 * i as f64).collect();
    for d in [2usize, 3] {
        for _case in 0..100 {
            let coeffs = random_class_matrix(&mut rng, d, 3);
            // sanity: built member really is in the class
            let bp = eval_poly_matrix(&coeffs, 0.4);
            let bm = eval_poly_matrix(&coeffs, -0.4);
            assert!(class_defect(&bp, &bm) <= 1e-12 * bp.norm_max());
            let (res, _) = class_closure_check(|x| eval_poly_matrix(&coeffs, x), &xs, 1e-10);
            assert!(res.pass, "closure failed: dev {}", res.max_dev);
        }
    }
}

#[test]
fn resummed_symmetries_and_structure() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    let st = ResumState::new(&en, &f, params(2, 0.8, 1e-3, 0));
    let xs: Vec<f64> = {
        let lo = scales.alpha_scale(5).unwrap() / 8.0;
        let hi = scales.alpha_scale(0).unwrap() / 2.0;
        (0..20)
            .map(|i| lo * (hi / lo).powf((i as f64 + 0.5) / 20.0))
            .collect()
    };
    for n in -1..=4i64 {
        for r in resummed_symmetry_suite(&st, n, &xs, 1e-9).unwrap() {
            assert!(r.pass, "{} at {}: dev {}", r.name, r.context, r.max_dev);
        }
        for r in resummed_structure_suite(&st, n, 1e-9).unwrap() {
            assert!(r.pass, "{} at {}: dev {}", r.name, r.context, r.max_dev);
        }
    }
}

#[test]
fn block_scaling_exponents_over_a_decade() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    let st = ResumState::new(&en, &f, params(2, 0.8, 1e-3, 0));
    // one decade of small arguments at the origin side
    let xs: Vec<f64> = (0..12).map(|i| 1e-3 * 10f64.powf(i as f64 / 11.0)).collect();
    let (fast_slope, cross_slope) = scaling_exponents(&st, 4, &xs).unwrap();
    assert!(
        fast_slope >= 1.9 || fast_slope == f64::INFINITY,
        "fast block slope {fast_slope}"
    );
    assert!(
        cross_slope >= 0.9 || cross_slope == f64::INFINITY,
        "cross block slope {cross_slope}"
    );
}

#[test]
fn determinant_split_and_norm_monitor() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    let st = ResumState::new(&en, &f, params(2, 0.8, 1e-3, 0));
    let xs: Vec<f64> = (1..=10).map(|i| 0.02 * i as f64).collect();
    for n in 1..=4i64 {
        let (res, events) = property_monitor(&st, n, &xs, 1e-3, 4.0, 1e-9).unwrap();
        assert!(res.pass, "det split dev {}", res.max_dev);
        assert!(events.is_empty(), "norm events: {events:?}");
    }
}

#[test]
fn switch_chain_is_unity_at_negative_gap() {
    // At a slow phase where the slow-slow self-energy is negative, every
    // switch evaluates to one and the regularised chain never trips.
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    // at beta0 = 0 the second slow derivative of the zero section is -1
    let st = ResumState::new(&en, &f, params(3, 0.0, 1e-3, 0));
    for n in 0..=8i64 {
        let delta = st.delta(n - 1).unwrap();
        assert!(delta < 0.0, "gap should be negative, got {delta} at n={n}");
        assert_eq!(st.xi_at(n - 1).unwrap(), 1.0);
        // regularised propagators stay finite on a sample grid
        for &x in &[0.02, 0.07, 0.2] {
            st.propagator_reg(n, Jet2::variable(x)).unwrap();
        }
    }
    assert!(st.property_log.borrow().is_empty());
}

#[test]
fn zero_coupling_gap_vanishes() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    let st = ResumState::new(&en, &f, params(2, 1.1, 0.0, 0));
    for n in -1..=4i64 {
        assert_eq!(st.delta(n).unwrap(), 0.0);
        assert_eq!(st.xi_at(n).unwrap(), 1.0);
    }
}
