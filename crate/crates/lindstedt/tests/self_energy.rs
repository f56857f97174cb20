//! Structure and symmetry of the self-energy matrices built from cluster
//! enumeration, checked against the identities they are proved to satisfy.

mod common;

use common::{golden_scales, standard_f};
use lindstedt::jet::Jet2;
use lindstedt::series::compute_series;
use lindstedt::trees::checks;
use lindstedt::trees::value::{self_energy_matrix, self_energy_total, ClusterValues};
use lindstedt::trees::{Enumerator, Rules};

#[test]
fn single_node_cluster_matrix() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    let b0 = 0.37;
    let ev = ClusterValues::new(&en, &f, b0);
    let m = self_energy_matrix(&ev, 1, -1, Jet2::variable(0.01), scales.n_max()).unwrap();
    // Only the slow-slow entry survives: the second slow derivative of the
    // zero-mode section, here -cos(b0).
    let d = 2;
    for i in 0..=d {
        for j in 0..=d {
            let v = m[(i, j)].v;
            if i == d && j == d {
                assert!((v.re + b0.cos()).abs() < 1e-14, "got {v}");
                assert!(v.im.abs() < 1e-14);
            } else {
                assert!(v.norm() < 1e-14, "entry ({i},{j}) should vanish: {v}");
            }
        }
    }
    // No order-1 clusters exist on scales >= 0.
    for n in 0..=4i64 {
        let mn = self_energy_matrix(&ev, 1, n, Jet2::variable(0.01), scales.n_max()).unwrap();
        assert!(mn.norm_max() == 0.0);
    }
}

#[test]
fn symmetry_and_slope_suites() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    let ev = ClusterValues::new(&en, &f, 0.7);
    let xs = checks::sample_points(&en, 20).unwrap();
    for k in 1..=3usize {
        for n in -1..=4i64 {
            let res = checks::symmetry_suite(&ev, k, n, &xs, 1e-9).unwrap();
            for r in &res {
                assert!(r.pass, "{} failed at {}: dev {}", r.name, r.context, r.max_dev);
            }
            let res = checks::slope_suite(&ev, k, n, 1e-9).unwrap();
            for r in &res {
                assert!(r.pass, "{} failed at {}: dev {}", r.name, r.context, r.max_dev);
            }
        }
    }
}

#[test]
fn zero_mode_derivative_match() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let table = compute_series(&f, scales.freq(), 3).unwrap();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    for &b0 in &[0.3, 1.4, 2.9] {
        let ev = ClusterValues::new(&en, &f, b0);
        for k in 1..=3usize {
            let res = checks::zero_mode_derivative_suite(&ev, &table, k, 1e-9).unwrap();
            for r in &res {
                assert!(r.pass, "{} failed at {}: dev {}", r.name, r.context, r.max_dev);
            }
        }
    }
}

#[test]
fn scale_sum_terminates_exactly() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    let ev = ClusterValues::new(&en, &f, 1.1);
    for k in 1..=3usize {
        let (_, last_nonzero, _) = self_energy_total(&ev, k, Jet2::variable(0.0)).unwrap();
        // The mode budget kills every deep scale: the stationary tail must
        // start well below the cap.
        assert!(
            last_nonzero < scales.n_max() as i64 - 1,
            "scale sum for k={k} still alive at {last_nonzero}"
        );
    }
}

#[test]
fn counting_bounds_hold() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    let ev = ClusterValues::new(&en, &f, 0.9);
    let (tree_res, trees_checked) = checks::tree_counting_suite(&ev, 3, 1e-14).unwrap();
    assert!(tree_res.pass, "{} violations", tree_res.max_dev);
    assert!(trees_checked > 100);
    let xs = checks::sample_points(&en, 8).unwrap();
    let (cl_res, clusters_checked) =
        checks::cluster_counting_suite(&ev, 3, 4, &xs, 1e-14).unwrap();
    assert!(cl_res.pass, "{} violations", cl_res.max_dev);
    assert!(clusters_checked > 20, "checked {clusters_checked}");
}

#[test]
fn decomposition_reconstructs() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    let ev = ClusterValues::new(&en, &f, 0.8);
    // Points inside the first supports, small enough for the quadratic
    // remainder to be meaningful.
    let a1 = scales.alpha_scale(1).unwrap();
    let xs = [a1 / 40.0, a1 / 15.0, a1 / 7.0];
    for k in 1..=2usize {
        let r = checks::decomposition_suite(&ev, k, &xs, 1e-8).unwrap();
        assert!(r.pass, "decomposition residual {} at k={k}", r.max_dev);
    }
}
