//! Machine checks of the structural identities carried by the self-energy
//! matrices and the enumerated trees: transpose/parity/conjugation
//! relations, vanishing slopes at zero, zero-mode derivative matches,
//! counting bounds, and the decomposition residual.

use super::value::{
    decompose_at, self_energy_cumulative, self_energy_matrix, self_energy_total, ClusterValues,
};
use super::{flat, Comp, Enumerator};
use crate::error::Result;
use crate::jet::Jet2;
use crate::series::CoeffTable;
use serde::Serialize;

/// Outcome of one identity check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub context: String,
    pub max_dev: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(name: &str, context: String, max_dev: f64, tol: f64) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            context,
            max_dev,
            tol,
            pass: max_dev <= tol,
        }
    }
}

pub fn all_pass(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.pass)
}

/// Sample points for the symmetry relations: positive values spread across
/// the supports of the first few partition members, away from zero.
pub fn sample_points(en: &Enumerator, count: usize) -> Result<Vec<f64>> {
    let lo = en.scales.alpha_scale(en.scales.n_max() as i64)? / 8.0;
    let hi = en.scales.alpha_scale(0)? / 2.0;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let t = (i as f64 + 0.5) / count as f64;
        out.push(lo * (hi / lo).powf(t));
    }
    Ok(out)
}

/// Transpose / parity / conjugation relations of the per-scale self-energy
/// matrices, checked entrywise at the given sample points.
pub fn symmetry_suite(
    ev: &ClusterValues,
    k: usize,
    n: i64,
    xs: &[f64],
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let d = ev.tv.enumr.d;
    let cap = ev.tv.enumr.scales.n_max();
    let mut dev_transpose = 0.0f64;
    let mut dev_conj = 0.0f64;
    let mut dev_beta_parity = 0.0f64;
    let mut dev_beta_conj = 0.0f64;
    let mut dev_cross = 0.0f64;
    let mut dev_cross_conj = 0.0f64;
    let mut scale_ref = 0.0f64;

    for &x in xs {
        let mp = self_energy_matrix(ev, k, n, Jet2::variable(x), cap)?;
        let mm = self_energy_matrix(ev, k, n, Jet2::variable(-x), cap)?;
        scale_ref = scale_ref.max(mp.norm_max()).max(mm.norm_max());
        for i in 0..d {
            for j in 0..d {
                dev_transpose = dev_transpose.max((mp[(i, j)].v - mm[(j, i)].v).norm());
                dev_conj = dev_conj.max((mp[(i, j)].v - mp[(j, i)].v.conj()).norm());
            }
        }
        dev_beta_parity = dev_beta_parity.max((mp[(d, d)].v - mm[(d, d)].v).norm());
        dev_beta_conj = dev_beta_conj.max((mp[(d, d)].v - mp[(d, d)].v.conj()).norm());
        for i in 0..d {
            dev_cross = dev_cross.max((mp[(i, d)].v + mm[(d, i)].v).norm());
            dev_cross_conj = dev_cross_conj.max((mp[(i, d)].v + mp[(d, i)].v.conj()).norm());
        }
    }
    let s = scale_ref.max(1e-30);
    let ctx = format!("k={k} n={n}");
    Ok(vec![
        CheckResult::new("fast_block_transpose_parity", ctx.clone(), dev_transpose / s, tol),
        CheckResult::new("fast_block_conjugation", ctx.clone(), dev_conj / s, tol),
        CheckResult::new("slow_entry_parity", ctx.clone(), dev_beta_parity / s, tol),
        CheckResult::new("slow_entry_real", ctx.clone(), dev_beta_conj / s, tol),
        CheckResult::new("cross_block_antisymmetry", ctx.clone(), dev_cross / s, tol),
        CheckResult::new("cross_block_conjugation", ctx, dev_cross_conj / s, tol),
    ])
}

/// Slopes at zero of the cumulative matrices: the fast block and the slow
/// diagonal entry are flat at the origin; the cross slopes are mutual
/// negative conjugates.
pub fn slope_suite(ev: &ClusterValues, k: usize, n: i64, tol: f64) -> Result<Vec<CheckResult>> {
    let d = ev.tv.enumr.d;
    let cap = ev.tv.enumr.scales.n_max();
    let m = self_energy_cumulative(ev, k, n, Jet2::variable(0.0), cap)?;
    let scale = m.norm_max().max(1e-30);
    let mut dev_fast = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            dev_fast = dev_fast.max(m[(i, j)].d1.norm());
        }
    }
    let dev_slow = m[(d, d)].d1.norm();
    let mut dev_cross = 0.0f64;
    for i in 0..d {
        dev_cross = dev_cross.max((m[(i, d)].d1 + m[(d, i)].d1.conj()).norm());
    }
    let ctx = format!("k={k} n={n}");
    Ok(vec![
        CheckResult::new("fast_block_slope_vanishes", ctx.clone(), dev_fast / scale, tol),
        CheckResult::new("slow_entry_slope_vanishes", ctx.clone(), dev_slow / scale, tol),
        CheckResult::new("cross_slope_conjugate_antisymmetry", ctx, dev_cross / scale, tol),
    ])
}

/// The full-scale-sum matrix at zero against the slow-phase derivative of
/// the zero-mode functions one order below, plus the vanishing of every
/// remaining entry at zero.
pub fn zero_mode_derivative_suite(
    ev: &ClusterValues,
    table: &CoeffTable,
    k: usize,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let d = ev.tv.enumr.d;
    let (m, _, _) = self_energy_total(ev, k, Jet2::variable(0.0))?;
    let scale = m.norm_max().max(table.order_scale(k - 1)).max(1e-30);
    let g_deriv = table.zero_mode_beta(k - 1).deriv(1).eval(ev.beta0);
    let dev_bb = (m[(d, d)].v - g_deriv).norm();
    let za = table.zero_mode_alpha(k - 1);
    let mut dev_ab = 0.0f64;
    for i in 0..d {
        let rhs = za[i].deriv(1).eval(ev.beta0);
        dev_ab = dev_ab.max((m[(i, d)].v - rhs).norm());
    }
    // Entries against a fast entering component vanish with the phases.
    let mut dev_fast_col = 0.0f64;
    for u in 0..=d {
        for j in 0..d {
            dev_fast_col = dev_fast_col.max(m[(u, j)].v.norm());
        }
    }
    let ctx = format!("k={k} beta0={:.3}", ev.beta0);
    Ok(vec![
        CheckResult::new("slow_slow_matches_zero_mode_derivative", ctx.clone(), dev_bb / scale, tol),
        CheckResult::new("fast_slow_matches_zero_mode_derivative", ctx.clone(), dev_ab / scale, tol),
        CheckResult::new("fast_entering_column_vanishes", ctx, dev_fast_col / scale, tol),
    ])
}

/// Counting bounds over every enumerated tree: for each scale `n >= 0`,
/// the number of non-resonant lines with minimum scale at least `n` is
/// bounded by `2^{-(m_n - 2)} K`.
pub fn tree_counting_suite(
    ev: &ClusterValues,
    k_max: usize,
    value_floor: f64,
) -> Result<(CheckResult, usize)> {
    let en = ev.tv.enumr;
    let mut violations = 0usize;
    let mut checked = 0usize;
    for k in 1..=k_max {
        let lvl = en.level(k)?;
        for class in &lvl.classes {
            let val = ev.tv.value(class)?;
            if val.norm_inf() <= value_floor {
                continue;
            }
            let root_scales: Vec<i64> = if class.is_zero_momentum() {
                vec![-1]
            } else {
                let x = en.scales.freq().dot(&class.momentum);
                en.scales
                    .admissible_scales(x)?
                    .into_iter()
                    .map(|n| n as i64)
                    .collect()
            };
            for rs in root_scales {
                let g = flat::flatten_subtree(class, rs);
                let (k_norm, stats) = flat::counting(&g, en.scales, None, true, 0.0);
                checked += 1;
                for n in 0..=en.scales.n_max() {
                    let m_n = en.scales.m_seq()[n];
                    let bound = 2.0f64.powi(-(m_n as i32 - 2)) * k_norm as f64;
                    let count = stats
                        .iter()
                        .filter(|l| {
                            !l.resonant && l.scale >= 0 && l.zeta.map(|z| z >= n).unwrap_or(false)
                        })
                        .count();
                    if count as f64 > bound {
                        violations += 1;
                    }
                }
            }
        }
    }
    Ok((
        CheckResult::new(
            "tree_scale_counting_bound",
            format!("k<= {k_max}, {checked} trees"),
            violations as f64,
            0.0,
        ),
        checked,
    ))
}

/// Counting bounds over every enumerated cluster with nonvanishing value at
/// some sample point: total mode norm exceeds `2^{m_n - 1}` and the
/// per-scale line counts obey `2^{-(m_p - 3)} K`.
pub fn cluster_counting_suite(
    ev: &ClusterValues,
    k_max: usize,
    n_cap: usize,
    xs: &[f64],
    value_floor: f64,
) -> Result<(CheckResult, usize)> {
    let en = ev.tv.enumr;
    let mut violations = 0usize;
    let mut checked = 0usize;
    for k in 1..=k_max {
        let by_scale = en.clusters(k, n_cap)?;
        for (n, frags) in &by_scale {
            if *n < 0 {
                continue;
            }
            let m_n = en.scales.m_seq()[*n as usize];
            for f in frags {
                for &x in xs {
                    let mut live = false;
                    for e in Comp::all(en.d) {
                        if ev
                            .fragment_value(f, e, Jet2::variable(x))?
                            .v
                            .norm()
                            > value_floor
                        {
                            live = true;
                        }
                    }
                    if !live {
                        continue;
                    }
                    checked += 1;
                    let (g, enter) = flat::flatten_fragment(f);
                    let (k_norm, stats) = flat::counting(&g, en.scales, Some(enter), false, x);
                    if (k_norm as f64) <= 2.0f64.powi(m_n as i32 - 1) {
                        violations += 1;
                    }
                    for p in 0..=(*n as usize) {
                        let m_p = en.scales.m_seq()[p];
                        let bound = 2.0f64.powi(-(m_p as i32 - 3)) * k_norm as f64;
                        let count = stats
                            .iter()
                            .filter(|l| {
                                !l.resonant
                                    && l.scale >= 0
                                    && l.zeta.map(|z| z >= p).unwrap_or(false)
                            })
                            .count();
                        if count as f64 > bound {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    Ok((
        CheckResult::new(
            "cluster_counting_bounds",
            format!("k<= {k_max}, {checked} live cluster evaluations"),
            violations as f64,
            0.0,
        ),
        checked,
    ))
}

/// Residual of reconstructing the full-scale-sum matrix from its value,
/// slope and quadrature remainder at the given points.
pub fn decomposition_suite(
    ev: &ClusterValues,
    k: usize,
    xs: &[f64],
    tol: f64,
) -> Result<CheckResult> {
    let d = ev.tv.enumr.d;
    let mut worst = 0.0f64;
    let mut scale = 1e-30f64;
    for &x in xs {
        let dec = decompose_at(ev, k, x, 8, 24)?;
        let (mx, _, _) = self_energy_total(ev, k, Jet2::variable(x))?;
        scale = scale.max(mx.norm_max());
        for i in 0..(d + 1) * (d + 1) {
            let rebuilt = dec.at_zero.a[i].v + dec.slope.a[i].v * x + dec.quad.a[i].v * x * x;
            worst = worst.max((mx.a[i].v - rebuilt).norm());
        }
    }
    Ok(CheckResult::new(
        "small_argument_decomposition",
        format!("k={k}, {} points", xs.len()),
        worst / scale,
        tol,
    ))
}

/// Optional cross-identity between the frequency-contracted cross slopes
/// and the zero-mode functions; reported with both order pairings, never
/// asserted.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeIdentityReport {
    pub k: usize,
    pub beta0: f64,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub dev_same_order: f64,
    pub dev_shifted_order: f64,
}

pub fn slope_identity_report(
    ev: &ClusterValues,
    table: &CoeffTable,
    k: usize,
) -> Result<SlopeIdentityReport> {
    let d = ev.tv.enumr.d;
    let (m, _, _) = self_energy_total(ev, k, Jet2::variable(0.0))?;
    let omega = ev.tv.enumr.scales.freq().omega().to_vec();
    let mut lhs = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..d {
        lhs += m[(i, d)].d1 * omega[i];
    }
    let factor = num_complex::Complex64::new(0.0, 2.0 * (k as f64 - 1.0));
    let same = table.zero_mode_beta(k).eval(ev.beta0) * factor;
    let shifted = table.zero_mode_beta(k - 1).eval(ev.beta0) * factor;
    Ok(SlopeIdentityReport {
        k,
        beta0: ev.beta0,
        lhs_re: lhs.re,
        lhs_im: lhs.im,
        dev_same_order: (lhs - same).norm(),
        dev_shifted_order: (lhs - shifted).norm(),
    })
}
