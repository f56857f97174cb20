//! Re-expansion oracle: expanding the resummed objects in powers of the
//! coupling must reproduce the plain expansion exactly, order by order.

mod common;

use common::{golden_scales, standard_f};
use lindstedt::jet::Jet2;
use lindstedt::resum::{ResumParams, ResumState};
use lindstedt::series::compute_series;
use lindstedt::trees::{Comp, Enumerator, Rules};

fn params(k: usize, beta0: f64) -> ResumParams {
    ResumParams {
        k_eps: k,
        n_max: 8,
        k0: 0,
        eps: 1e-3,
        beta0,
        convex_sign_flip: false,
    }
}

#[test]
fn propagator_at_zero_coupling_is_scalar() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    let st = ResumState::new(&en, &f, params(2, 0.4));
    for n in 0..=4i64 {
        for &x in &[0.03, 0.1, 0.3] {
            let p = st.propagator_sym(n, Jet2::variable(x)).unwrap();
            let psi = scales.big_psi_n(n as usize, x).unwrap();
            let zero_order = p.order(0);
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { psi / (x * x) } else { 0.0 };
                    assert!(
                        (zero_order[(i, j)].v.re - expect).abs() <= 1e-12 * (1.0 + expect.abs()),
                        "entry ({i},{j}) at n={n} x={x}"
                    );
                    assert!(zero_order[(i, j)].v.im.abs() <= 1e-14);
                }
            }
        }
    }
}

#[test]
fn reexpansion_matches_plain_series() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let table = compute_series(&f, scales.freq(), 3).unwrap();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    let beta0 = 0.9;
    let st = ResumState::new(&en, &f, params(3, beta0));

    let mut compared = 0usize;
    for nu in [vec![1i64, 0], vec![0, 1], vec![1, 1], vec![2, 0], vec![1, -1]] {
        for h in [Comp::Alpha(0), Comp::Alpha(1), Comp::Beta] {
            let total = st.resummed_range_total(&nu, h).unwrap();
            for k in 1..=3usize {
                let plain = match h {
                    Comp::Alpha(j) => table
                        .a(k, &nu)
                        .map(|v| v[j].eval(beta0))
                        .unwrap_or_default(),
                    Comp::Beta => table.b(k, &nu).map(|p| p.eval(beta0)).unwrap_or_default(),
                };
                let res = total.c[k].v;
                let scale = table.order_scale(k);
                assert!(
                    (res - plain).norm() <= 1e-8 * scale,
                    "order {k} mismatch at nu={nu:?} h={h:?}: {res} vs {plain} (scale {scale})"
                );
                compared += 1;
            }
        }
    }
    assert!(compared >= 45);
}

#[test]
fn reexpansion_matches_bifurcation_series() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let table = compute_series(&f, scales.freq(), 3).unwrap();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    for &beta0 in &[0.4, 2.2] {
        let st = ResumState::new(&en, &f, params(3, beta0));
        let g = st.g_resummed(None).unwrap();
        for k in 0..=2usize {
            let plain = table.zero_mode_beta(k).eval(beta0);
            let res = g.c[k].v;
            assert!(
                (res - plain).norm() <= 1e-8 * table.order_scale(k).max(1.0),
                "bifurcation order {k} at beta0={beta0}: {res} vs {plain}"
            );
        }
    }
}

#[test]
fn first_order_resummed_equals_plain_without_slow_zero_mode() {
    // f = cos(a1 + b) has no zero-mode section, so the base self-energy
    // vanishes and the order-1 resummed coefficient is exactly plain.
    let scales = golden_scales(8, 16);
    let mut f = lindstedt::fourier::TrigPoly::new(2);
    f.add_cos(vec![1, 0], 1, 1.0);
    let table = compute_series(&f, scales.freq(), 1).unwrap();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::renormalised(), 2_000_000);
    let beta0 = 1.3;
    let st = ResumState::new(&en, &f, params(2, beta0));
    let co = st.resummed_range(1, &[1, 0], Comp::Beta).unwrap();
    let plain = table.b(1, &[1, 0]).unwrap().eval(beta0);
    assert!((co.c[0].v - plain).norm() <= 1e-14 * plain.norm());
    for k in 1..=2 {
        assert!(co.c[k].norm_max() <= 1e-14, "unexpected higher order {k}");
    }
}
