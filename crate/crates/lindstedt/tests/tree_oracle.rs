//! Two-route test: the labeled-tree sums must reproduce the recursion
//! coefficients exactly, and vice versa.

mod common;

use common::{beta_samples, golden_scales, standard_f};
use lindstedt::series::compute_series;
use lindstedt::trees::value::TreeValues;
use lindstedt::trees::{Comp, Enumerator, Rules};

#[test]
fn tree_sums_match_recursion() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let table = compute_series(&f, scales.freq(), 3).unwrap();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    let tv = TreeValues::new(&en, &f);
    let betas = beta_samples();

    let mut compared = 0usize;
    for k in 1..=3usize {
        for nu in table.modes_at_order(k) {
            let l1: i64 = nu.iter().map(|x| x.abs()).sum();
            if l1 > 3 {
                continue;
            }
            let a = table.a(k, &nu).unwrap();
            let b = table.b(k, &nu).unwrap();
            for (h, expect) in (0..2)
                .map(|j| (Comp::Alpha(j), a[j].clone()))
                .chain(std::iter::once((Comp::Beta, b.clone())))
            {
                let tree_sum = tv.sum_range(k, &nu, h).unwrap();
                for &b0 in &betas {
                    let lhs = tree_sum.eval(b0);
                    let rhs = expect.eval(b0);
                    let scale = rhs.norm().max(table.order_scale(k));
                    assert!(
                        (lhs - rhs).norm() <= 1e-10 * scale,
                        "mismatch k={k} nu={nu:?} h={h:?} b0={b0}: {lhs} vs {rhs}"
                    );
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 100, "too few comparisons ran: {compared}");
}

#[test]
fn zero_mode_tree_sums_match_brackets() {
    let scales = golden_scales(8, 16);
    let f = standard_f();
    let table = compute_series(&f, scales.freq(), 3).unwrap();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    let tv = TreeValues::new(&en, &f);
    for k in 1..=4usize {
        // Trees of order k with zero momentum carry the bracket of order k-1.
        let g_trees = tv.sum_zero_mode(k, Comp::Beta).unwrap();
        let g_rec = table.zero_mode_beta(k - 1);
        let diff = g_trees.add(&g_rec.scale(num_complex::Complex64::new(-1.0, 0.0)));
        assert!(
            diff.norm_inf() <= 1e-10 * table.order_scale(k - 1).max(1.0),
            "slow zero mode mismatch at order {k}"
        );
        for j in 0..2 {
            let fa_trees = tv.sum_zero_mode(k, Comp::Alpha(j)).unwrap();
            let fa_rec = table.zero_mode_alpha(k - 1)[j].clone();
            let diff = fa_trees.add(&fa_rec.scale(num_complex::Complex64::new(1.0, 0.0)));
            // zero_mode_alpha returns the negated bracket; trees carry the
            // node-factor sign already, so the two must cancel.
            assert!(
                diff.norm_inf() <= 1e-10 * table.order_scale(k - 1).max(1.0),
                "fast zero mode mismatch at order {k} component {j}"
            );
        }
    }
}

#[test]
fn two_node_chain_example() {
    // f = cos(a1 + b) alone: trees at k = 2, nu = (2,0) are the two-node
    // chains with both modes (1,0); their summed value matches the
    // recursion entry.
    let scales = golden_scales(8, 16);
    let mut f = lindstedt::fourier::TrigPoly::new(2);
    f.add_cos(vec![1, 0], 1, 1.0);
    let table = compute_series(&f, scales.freq(), 2).unwrap();
    let en = Enumerator::new(&scales, f.alpha_modes(), Rules::plain(), 2_000_000);
    let tv = TreeValues::new(&en, &f);
    for h in [Comp::Alpha(0), Comp::Beta] {
        let classes = en.classes(2, &[2, 0], h).unwrap();
        assert!(!classes.is_empty());
        for c in &classes {
            assert_eq!(c.mode, vec![1, 0]);
            assert_eq!(c.children.len(), 1);
            assert_eq!(c.children[0].sub.mode, vec![1, 0]);
        }
        let sum = tv.sum_range(2, &[2, 0], h).unwrap();
        let expect = match h {
            Comp::Alpha(0) => table.a(2, &[2, 0]).unwrap()[0].clone(),
            Comp::Beta => table.b(2, &[2, 0]).unwrap().clone(),
            _ => unreachable!(),
        };
        let diff = sum.add(&expect.scale(num_complex::Complex64::new(-1.0, 0.0)));
        assert!(diff.norm_inf() <= 1e-12 * expect.norm_inf().max(1e-12));
    }
}
