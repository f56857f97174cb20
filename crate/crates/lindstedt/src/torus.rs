//! Bifurcation analysis and the final artifact: locate the slow phases the
//! surviving torus bifurcates from, continue them in the coupling, assemble
//! the truncated parametrization and verify it against the equations of
//! motion, both in residual form and against a direct integration.

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::series::CoeffTable;
use crate::smalldiv::Frequency;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// Which mechanism settles the bifurcation equation, scanning orders from
/// zero upward.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Regime {
    /// Some order of the bifurcation function survives: the generic case,
    /// solved by choosing the slow phase.
    Condition2 { k0: usize },
    /// Every bifurcation order vanishes but a cross-block slope survives;
    /// the torus exists for every slow phase through the determinant gain.
    Condition3 { k1: usize },
    /// Everything checked vanishes; consistent with persistence of the
    /// whole family, honestly labeled with the depth of the check.
    Condition1Consistent { up_to: usize },
}

/// Threshold logic: a slow-phase series "vanishes at order k" when its
/// largest coefficient is below `rel_tol` times the largest magnitude seen
/// at that order.
pub fn vanishes(norm: f64, order_scale: f64, rel_tol: f64) -> bool {
    norm <= rel_tol * order_scale
}

/// Classifies the regime from the computed bifurcation orders and the
/// sampled cross-block slopes (one row per order, one entry per sample).
pub fn classify_from(
    g_norms: &[f64],
    order_scales: &[f64],
    cross_slopes: &[Vec<f64>],
    cross_scales: &[f64],
    rel_tol: f64,
) -> Regime {
    for (k, norm) in g_norms.iter().enumerate() {
        if !vanishes(*norm, order_scales[k].max(1e-300), rel_tol) {
            return Regime::Condition2 { k0: k };
        }
    }
    for (k, slopes) in cross_slopes.iter().enumerate() {
        let top = slopes.iter().cloned().fold(0.0f64, f64::max);
        if !vanishes(top, cross_scales[k].max(1e-300), rel_tol) {
            return Regime::Condition3 { k1: k };
        }
    }
    Regime::Condition1Consistent {
        up_to: g_norms.len().saturating_sub(1),
    }
}

/// Regime decision from a coefficient table alone (bifurcation orders) and
/// optional cross-slope samples from the self-energy side.
pub fn classify_condition(
    table: &CoeffTable,
    cross_slopes: &[Vec<f64>],
    cross_scales: &[f64],
    rel_tol: f64,
) -> Regime {
    let k_top = table.k_max();
    let g_norms: Vec<f64> = (0..=k_top).map(|k| table.zero_mode_beta(k).norm_inf()).collect();
    let scales: Vec<f64> = (0..=k_top).map(|k| table.order_scale(k)).collect();
    classify_from(&g_norms, &scales, cross_slopes, cross_scales, rel_tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct RootInfo {
    pub beta0: f64,
    /// Order of the first non-vanishing slow derivative at the root.
    pub odd_order: usize,
    /// Branch signs this root serves, per the sign selection rule.
    pub sigma: Vec<i8>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub root_index: usize,
    pub sigma: i8,
    /// Sampled continuation curve (coupling, slow phase).
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationResult {
    pub k0: usize,
    pub roots: Vec<RootInfo>,
    pub branches: Vec<Branch>,
}

/// Real value of the order-`k0` bifurcation function at a slow phase.
fn g_at(table: &CoeffTable, k: usize, beta0: f64) -> f64 {
    table.zero_mode_beta(k).eval(beta0).re
}

/// Truncated bifurcation function with the leading power divided out:
/// `sum_{k >= k0} eps^{k-k0} G^(k)(beta0)`.
fn g_truncated(table: &CoeffTable, k0: usize, eps: f64, beta0: f64) -> f64 {
    let mut acc = 0.0;
    let mut pw = 1.0;
    for k in k0..=table.k_max() {
        acc += pw * g_at(table, k, beta0);
        pw *= eps;
    }
    acc
}

fn g_truncated_slope(table: &CoeffTable, k0: usize, eps: f64, beta0: f64) -> f64 {
    let mut acc = 0.0;
    let mut pw = 1.0;
    for k in k0..=table.k_max() {
        acc += pw * table.zero_mode_beta(k).deriv(1).eval(beta0).re;
        pw *= eps;
    }
    acc
}

/// Locates the zeros of the leading bifurcation order on a uniform grid,
/// refines them by bisection and polishes by Newton steps, then continues
/// each root to the requested coupling values.
pub fn solve_bifurcation(
    table: &CoeffTable,
    k0: usize,
    grid: usize,
    eps_targets: &[f64],
) -> Result<BifurcationResult> {
    let g = table.zero_mode_beta(k0);
    if g.reality_defect() > 1e-10 {
        return Err(Error::Config(
            "bifurcation function is not real on real phases".into(),
        ));
    }
    let scale = g.norm_inf().max(1e-300);
    let f = |b: f64| g.eval(b).re;
    let mut roots: Vec<RootInfo> = Vec::new();
    for i in 0..grid {
        let a = TAU * i as f64 / grid as f64;
        let b = TAU * (i + 1) as f64 / grid as f64;
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            push_root(&mut roots, table, k0, a, scale);
            continue;
        }
        if fa * fb < 0.0 {
            let mut lo = a;
            let mut hi = b;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            let mut r = 0.5 * (lo + hi);
            // Newton polish.
            for _ in 0..50 {
                let d = g.deriv(1).eval(r).re;
                if d == 0.0 {
                    break;
                }
                let step = f(r) / d;
                r -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            push_root(&mut roots, table, k0, r.rem_euclid(TAU), scale);
        }
    }
    roots.sort_by(|a, b| a.beta0.partial_cmp(&b.beta0).unwrap());
    roots.dedup_by(|a, b| (a.beta0 - b.beta0).abs() < 1e-9);

    let mut branches = Vec::new();
    for (ri, root) in roots.iter().enumerate() {
        if root.degenerate {
            continue;
        }
        for &sigma in &root.sigma {
            let mut samples = Vec::new();
            let mut ok = true;
            for &et in eps_targets {
                if (et > 0.0) != (sigma > 0) && et != 0.0 {
                    continue;
                }
                match continue_to(table, k0, root.beta0, et) {
                    Some(b) => samples.push((et, b)),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && !samples.is_empty() {
                branches.push(Branch {
                    root_index: ri,
                    sigma,
                    samples,
                });
            }
        }
    }
    Ok(BifurcationResult {
        k0,
        roots,
        branches,
    })
}

fn push_root(roots: &mut Vec<RootInfo>, table: &CoeffTable, k0: usize, r: f64, scale: f64) {
    let g = table.zero_mode_beta(k0);
    // first non-vanishing slow derivative at the root
    let mut odd_order = 0usize;
    let mut lead = 0.0f64;
    for q in 1..=8usize {
        let v = g.deriv(q).eval(r).re;
        if v.abs() > 1e-8 * scale {
            odd_order = q;
            lead = v;
            break;
        }
    }
    let degenerate = odd_order == 0 || odd_order % 2 == 0;
    // Sign rule: sigma^(k0+1) * lead < 0 selects the branch sign(s).
    let mut sigma = Vec::new();
    if !degenerate {
        for s in [1i8, -1i8] {
            let pow = if (k0 + 1) % 2 == 0 {
                1.0
            } else {
                s as f64
            };
            if pow * lead < 0.0 {
                sigma.push(s);
            }
        }
    }
    roots.push(RootInfo {
        beta0: r,
        odd_order,
        sigma,
        degenerate,
    });
}

/// Newton continuation of the truncated bifurcation equation from the root
/// to the target coupling, in geometric steps with halving on failure.
pub fn continue_to(table: &CoeffTable, k0: usize, root: f64, eps_target: f64) -> Option<f64> {
    if eps_target == 0.0 {
        return Some(root);
    }
    let mut beta = root;
    let mut reached = 0.0f64;
    let mut step = eps_target;
    let mut guard = 0usize;
    while (reached - eps_target).abs() > 0.0 {
        guard += 1;
        if guard > 500 {
            return None;
        }
        let mut next = reached + step;
        if (eps_target > 0.0 && next > eps_target) || (eps_target < 0.0 && next < eps_target) {
            next = eps_target;
        }
        match newton_at(table, k0, next, beta) {
            Some(b) => {
                beta = b;
                reached = next;
                step = eps_target - reached;
            }
            None => {
                step *= 0.5;
                if step.abs() < 1e-12 * eps_target.abs() {
                    return None;
                }
            }
        }
    }
    Some(beta)
}

fn newton_at(table: &CoeffTable, k0: usize, eps: f64, start: f64) -> Option<f64> {
    let mut b = start;
    for _ in 0..80 {
        let v = g_truncated(table, k0, eps, b);
        let d = g_truncated_slope(table, k0, eps, b);
        if d == 0.0 {
            return None;
        }
        let step = v / d;
        b -= step;
        if step.abs() < 1e-14 {
            let res = g_truncated(table, k0, eps, b).abs();
            return if res <= 1e-12 { Some(b) } else { None };
        }
    }
    None
}

/// Residual of the truncated bifurcation equation along a continued branch.
pub fn branch_residual(table: &CoeffTable, k0: usize, eps: f64, beta0: f64) -> f64 {
    g_truncated(table, k0, eps, beta0).abs()
}

/// Sign of the selection criterion along a branch: the coupling times the
/// slope of the truncated bifurcation function at the solution.
pub fn branch_slope_sign(table: &CoeffTable, k0: usize, eps: f64, beta0: f64) -> f64 {
    eps * eps.powi(k0 as i32) * g_truncated_slope(table, k0, eps, beta0)
}

/// The assembled torus: truncated evaluators for the angle corrections and
/// their flow derivatives.
#[derive(Debug, Clone)]
pub struct TorusSolution {
    pub eps: f64,
    pub beta0: f64,
    pub k_max: usize,
    d: usize,
    omega: Vec<f64>,
    /// summed coefficients per fast mode: (mode, fast components, slow)
    coeffs: Vec<(Vec<i64>, Vec<C64>, C64)>,
}

impl TorusSolution {
    /// Fast-angle and slow-angle corrections at a fast phase.
    pub fn eval(&self, psi: &[f64]) -> (Vec<f64>, f64) {
        let (a, b, _, _) = self.eval_full(psi);
        (a, b)
    }

    /// Corrections and their first flow derivatives.
    pub fn eval_full(&self, psi: &[f64]) -> (Vec<f64>, f64, Vec<f64>, f64) {
        let mut a = vec![C64::new(0.0, 0.0); self.d];
        let mut b = C64::new(0.0, 0.0);
        let mut da = vec![C64::new(0.0, 0.0); self.d];
        let mut db = C64::new(0.0, 0.0);
        for (nu, ca, cb) in &self.coeffs {
            let phase: f64 = nu.iter().zip(psi).map(|(n, p)| *n as f64 * p).sum();
            let e = C64::new(0.0, phase).exp();
            let wdot: f64 = nu
                .iter()
                .zip(&self.omega)
                .map(|(n, w)| *n as f64 * w)
                .sum();
            let iw = C64::new(0.0, wdot);
            for j in 0..self.d {
                a[j] += ca[j] * e;
                da[j] += ca[j] * e * iw;
            }
            b += cb * e;
            db += cb * e * iw;
        }
        let re = |v: &Vec<C64>| v.iter().map(|c| c.re).collect::<Vec<f64>>();
        (re(&a), b.re, re(&da), db.re)
    }

    /// Second flow derivative of the corrections.
    pub fn eval_dd(&self, psi: &[f64]) -> (Vec<f64>, f64) {
        let mut dda = vec![C64::new(0.0, 0.0); self.d];
        let mut ddb = C64::new(0.0, 0.0);
        for (nu, ca, cb) in &self.coeffs {
            let phase: f64 = nu.iter().zip(psi).map(|(n, p)| *n as f64 * p).sum();
            let e = C64::new(0.0, phase).exp();
            let wdot: f64 = nu
                .iter()
                .zip(&self.omega)
                .map(|(n, w)| *n as f64 * w)
                .sum();
            let m = -wdot * wdot;
            for j in 0..self.d {
                dda[j] += ca[j] * e * m;
            }
            ddb += cb * e * m;
        }
        (dda.iter().map(|c| c.re).collect(), ddb.re)
    }

    /// Largest imaginary part left over at a real phase; a reality check.
    pub fn imag_defect(&self, psi: &[f64]) -> f64 {
        let mut a = vec![C64::new(0.0, 0.0); self.d];
        let mut b = C64::new(0.0, 0.0);
        for (nu, ca, cb) in &self.coeffs {
            let phase: f64 = nu.iter().zip(psi).map(|(n, p)| *n as f64 * p).sum();
            let e = C64::new(0.0, phase).exp();
            for j in 0..self.d {
                a[j] += ca[j] * e;
            }
            b += cb * e;
        }
        a.iter()
            .map(|c| c.im.abs())
            .fold(b.im.abs(), f64::max)
    }
}

/// Sums the coefficient tables into a concrete truncated parametrization.
pub fn assemble(table: &CoeffTable, freq: &Frequency, eps: f64, beta0: f64, k_max: usize) -> TorusSolution {
    let d = table.d();
    let mut acc: std::collections::BTreeMap<Vec<i64>, (Vec<C64>, C64)> = Default::default();
    for k in 1..=k_max.min(table.k_max()) {
        let pw = eps.powi(k as i32);
        for nu in table.modes_at_order(k) {
            let a = table.a(k, &nu).unwrap();
            let b = table.b(k, &nu).unwrap();
            let entry = acc
                .entry(nu.clone())
                .or_insert_with(|| (vec![C64::new(0.0, 0.0); d], C64::new(0.0, 0.0)));
            for j in 0..d {
                entry.0[j] += a[j].eval(beta0) * pw;
            }
            entry.1 += b.eval(beta0) * pw;
        }
    }
    TorusSolution {
        eps,
        beta0,
        k_max,
        d,
        omega: freq.omega().to_vec(),
        coeffs: acc
            .into_iter()
            .map(|(nu, (a, b))| (nu, a, b))
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub r_range: f64,
    pub r_bif_alpha: f64,
    pub r_bif_beta: f64,
}

/// Residual of the equations of motion over a uniform fast-phase grid:
/// the sup norm of the oscillating part and the magnitudes of the two
/// grid-averaged constraints.
pub fn verify_residual(sol: &TorusSolution, f: &TrigPoly, grid: usize) -> Residuals {
    let d = sol.d;
    let eps = sol.eps;
    let grads: Vec<TrigPoly> = (0..d).map(|j| f.deriv_alpha(j)).collect();
    let gbeta = f.deriv_beta();
    let pts: Vec<Vec<usize>> = grid_indices(d, grid);
    let results: Vec<(f64, Vec<f64>, f64)> = pts
        .par_iter()
        .map(|idx| {
            let psi: Vec<f64> = idx.iter().map(|i| TAU * *i as f64 / grid as f64).collect();
            let (a, b) = sol.eval(&psi);
            let (dda, ddb) = sol.eval_dd(&psi);
            let angle: Vec<f64> = psi.iter().zip(&a).map(|(p, ai)| p + ai).collect();
            let beta = sol.beta0 + b;
            let mut worst = 0.0f64;
            let mut ga = vec![0.0; d];
            for j in 0..d {
                ga[j] = grads[j].eval(&angle, beta).re;
                worst = worst.max((dda[j] - eps * ga[j]).abs());
            }
            let gb = gbeta.eval(&angle, beta).re;
            worst = worst.max((ddb + eps * gb).abs());
            (worst, ga, gb)
        })
        .collect();
    let mut r_range = 0.0f64;
    let mut avg_a = vec![0.0f64; d];
    let mut avg_b = 0.0f64;
    for (w, ga, gb) in &results {
        r_range = r_range.max(*w);
        for j in 0..d {
            avg_a[j] += ga[j];
        }
        avg_b += gb;
    }
    let n = results.len() as f64;
    let r_bif_alpha = avg_a.iter().map(|v| (eps * v / n).abs()).fold(0.0, f64::max);
    let r_bif_beta = (eps * avg_b / n).abs();
    Residuals {
        r_range,
        r_bif_alpha,
        r_bif_beta,
    }
}

fn grid_indices(d: usize, grid: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * grid);
        for base in &out {
            for i in 0..grid {
                let mut v = base.clone();
                v.push(i);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeReport {
    pub max_deviation: f64,
    pub escape_time: Option<f64>,
    pub steps: usize,
}

/// Integrates the equations of motion from initial data read off the torus
/// at the given fast phase and compares against the quasi-periodic
/// prediction. Classical fourth-order one-step method.
pub fn verify_ode(
    sol: &TorusSolution,
    f: &TrigPoly,
    t_end: f64,
    h: f64,
    psi0: &[f64],
) -> OdeReport {
    let d = sol.d;
    let eps = sol.eps;
    let grads: Vec<TrigPoly> = (0..d).map(|j| f.deriv_alpha(j)).collect();
    let gbeta = f.deriv_beta();
    let force = |y: &[f64], out: &mut [f64]| {
        // y = (alpha, beta, dalpha, dbeta)
        let angle = &y[0..d];
        let beta = y[d];
        for j in 0..d {
            out[j] = y[d + 1 + j];
        }
        out[d] = y[2 * d + 1];
        for j in 0..d {
            out[d + 1 + j] = eps * grads[j].eval(angle, beta).re;
        }
        out[2 * d + 1] = -eps * gbeta.eval(angle, beta).re;
    };

    let (a0, b0, da0, db0) = sol.eval_full(psi0);
    let mut y = vec![0.0f64; 2 * (d + 1)];
    for j in 0..d {
        y[j] = psi0[j] + a0[j];
        y[d + 1 + j] = sol.omega[j] + da0[j];
    }
    y[d] = sol.beta0 + b0;
    y[2 * d + 1] = db0;

    let dim = y.len();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    let steps = (t_end / h).round() as usize;
    let mut worst = 0.0f64;
    for s in 0..steps {
        let t = s as f64 * h;
        // deviation from the prediction before stepping
        let psi_t: Vec<f64> = psi0
            .iter()
            .zip(&sol.omega)
            .map(|(p, w)| p + w * t)
            .collect();
        let (at, bt) = sol.eval(&psi_t);
        let mut dev = 0.0f64;
        for j in 0..d {
            dev = dev.max((y[j] - (psi_t[j] + at[j])).abs());
        }
        dev = dev.max((y[d] - (sol.beta0 + bt)).abs());
        worst = worst.max(dev);
        if !dev.is_finite() || dev > 1e6 {
            return OdeReport {
                max_deviation: f64::INFINITY,
                escape_time: Some(t),
                steps: s,
            };
        }
        force(&y, &mut k1);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        force(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        force(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + h * k3[i];
        }
        force(&tmp, &mut k4);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    OdeReport {
        max_deviation: worst,
        escape_time: None,
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::compute_series;
    use crate::smalldiv::Frequency;

    fn golden() -> Frequency {
        Frequency::golden2(10, 50_000_000).unwrap()
    }

    fn standard_f() -> TrigPoly {
        let mut f = TrigPoly::new(2);
        f.add_cos(vec![1, 0], 1, 1.0);
        f.add_cos(vec![0, 1], 0, 1.0);
        f.add_cos(vec![0, 0], 1, 1.0);
        f
    }

    #[test]
    fn classify_standard_example() {
        let t = compute_series(&standard_f(), &golden(), 3).unwrap();
        let r = classify_condition(&t, &[], &[], 1e-10);
        assert_eq!(r, Regime::Condition2 { k0: 0 });
    }

    #[test]
    fn classify_slow_independent_coupling() {
        let mut f = TrigPoly::new(2);
        f.add_cos(vec![1, 0], 0, 1.0);
        f.add_cos(vec![0, 1], 0, 0.5);
        let t = compute_series(&f, &golden(), 3).unwrap();
        let slopes = vec![vec![0.0]; 3];
        let r = classify_condition(&t, &slopes, &[1.0; 3], 1e-10);
        assert_eq!(r, Regime::Condition1Consistent { up_to: 3 });
    }

    #[test]
    fn classify_synthetic_cross_slope() {
        // all bifurcation orders vanish, a cross slope survives at order 2
        let r = classify_from(
            &[0.0, 0.0, 0.0],
            &[1.0, 1.0, 1.0],
            &[vec![0.0], vec![1e-13], vec![0.4]],
            &[1.0, 1.0, 1.0],
            1e-10,
        );
        assert_eq!(r, Regime::Condition3 { k1: 2 });
    }

    #[test]
    fn roots_of_leading_bifurcation_order() {
        let t = compute_series(&standard_f(), &golden(), 3).unwrap();
        let res = solve_bifurcation(&t, 0, 2048, &[1e-3, -1e-3]).unwrap();
        assert_eq!(res.roots.len(), 2);
        assert!(res.roots[0].beta0.abs() < 1e-12 || (res.roots[0].beta0 - TAU).abs() < 1e-12);
        assert!((res.roots[1].beta0 - std::f64::consts::PI).abs() < 1e-12);
        for r in &res.roots {
            assert_eq!(r.odd_order, 1);
            assert_eq!(r.sigma.len(), 1);
        }
        // G^(0) = -sin: root 0 has slope -1 -> sigma = +; root pi -> sigma = -.
        assert_eq!(res.roots[0].sigma[0], 1);
        assert_eq!(res.roots[1].sigma[0], -1);
        for b in &res.branches {
            for (eps, beta) in &b.samples {
                assert!(branch_residual(&t, 0, *eps, *beta) <= 1e-12);
                assert!(branch_slope_sign(&t, 0, *eps, *beta) <= 0.0);
            }
        }
    }

    #[test]
    fn assemble_first_order_closed_form() {
        let freq = golden();
        let t = compute_series(&standard_f(), &freq, 1).unwrap();
        let eps = 1e-2;
        let b0 = 0.4;
        let sol = assemble(&t, &freq, eps, b0, 1);
        let psi = vec![0.7, 1.9];
        let (a, b) = sol.eval(&psi);
        let g = freq.omega()[1];
        // a1 = eps sin(psi1 + b0), a2 = eps sin(psi2)/g^2, b = -eps sin(psi1+b0)
        assert!((a[0] - eps * (psi[0] + b0).sin()).abs() < 1e-14);
        assert!((a[1] - eps * psi[1].sin() / (g * g)).abs() < 1e-14);
        assert!((b + eps * (psi[0] + b0).sin()).abs() < 1e-14);
        assert!(sol.imag_defect(&psi) < 1e-14);
    }

    #[test]
    fn zero_coupling_solution_is_trivial() {
        let freq = golden();
        let t = compute_series(&standard_f(), &freq, 2).unwrap();
        let sol = assemble(&t, &freq, 0.0, 0.3, 2);
        let (a, b) = sol.eval(&[1.0, 2.0]);
        assert!(a.iter().all(|v| *v == 0.0) && b == 0.0);
        let res = verify_residual(&sol, &standard_f(), 16);
        assert_eq!(res.r_range, 0.0);
        let ode = verify_ode(&sol, &standard_f(), 10.0, 1e-3, &[0.0, 0.0]);
        assert!(ode.max_deviation <= 1e-10, "dev {}", ode.max_deviation);
    }
}
