//! Order-by-order solution of the range equations.
//!
//! With the phase normalization `alpha_0 = 0`, every coefficient is a finite
//! Fourier series in the slow phase `beta_0`. The recursion keeps one table
//! per order; nothing depends on the coupling strength here, so a single
//! table serves every evaluation downstream.

use crate::error::{Error, Result};
use crate::fourier::{BetaPoly, TrigPoly};
use crate::smalldiv::Frequency;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::io::Write;

const I: C64 = C64::new(0.0, 1.0);

/// Coefficient tables of the formal expansion.
///
/// `a[(k, nu)]` is the d-vector of fast-angle coefficients at order `k` and
/// mode `nu != 0`; `b[(k, nu)]` the slow-angle coefficient. The derivative
/// brackets feeding the recursion are kept alongside, including the zero
/// mode, which carries the bifurcation functions.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    d: usize,
    k_max: usize,
    alpha_degree: usize,
    a: BTreeMap<(usize, Vec<i64>), Vec<BetaPoly>>,
    b: BTreeMap<(usize, Vec<i64>), BetaPoly>,
    bracket_alpha: BTreeMap<(usize, Vec<i64>), Vec<BetaPoly>>,
    bracket_beta: BTreeMap<(usize, Vec<i64>), BetaPoly>,
    order_scale: Vec<f64>,
}

impl CoeffTable {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn alpha_degree(&self) -> usize {
        self.alpha_degree
    }

    pub fn a(&self, k: usize, nu: &[i64]) -> Option<&Vec<BetaPoly>> {
        self.a.get(&(k, nu.to_vec()))
    }

    pub fn b(&self, k: usize, nu: &[i64]) -> Option<&BetaPoly> {
        self.b.get(&(k, nu.to_vec()))
    }

    pub fn modes_at_order(&self, k: usize) -> Vec<Vec<i64>> {
        self.a
            .range((k, vec![i64::MIN; 0])..)
            .take_while(|((kk, _), _)| *kk == k)
            .map(|((_, nu), _)| nu.clone())
            .collect()
    }

    pub fn bracket_alpha(&self, k: usize, nu: &[i64]) -> Option<&Vec<BetaPoly>> {
        self.bracket_alpha.get(&(k, nu.to_vec()))
    }

    pub fn bracket_beta(&self, k: usize, nu: &[i64]) -> Option<&BetaPoly> {
        self.bracket_beta.get(&(k, nu.to_vec()))
    }

    /// Largest coefficient magnitude seen while building order `k`; the
    /// reference scale for "vanishes at this order" decisions.
    pub fn order_scale(&self, k: usize) -> f64 {
        self.order_scale.get(k).copied().unwrap_or(0.0).max(1e-300)
    }

    /// Zero mode of the fast-angle bracket at order `k`, negated. Expected
    /// to cancel identically at every order: the root-detachment symmetry.
    pub fn zero_mode_alpha(&self, k: usize) -> Vec<BetaPoly> {
        match self.bracket_alpha(k, &vec![0; self.d]) {
            Some(v) => v.iter().map(|p| p.scale(C64::new(-1.0, 0.0))).collect(),
            None => vec![BetaPoly::new(); self.d],
        }
    }

    /// The order-`k` bifurcation function `G^(k)(beta_0)`: zero mode of the
    /// slow-angle bracket.
    pub fn zero_mode_beta(&self, k: usize) -> BetaPoly {
        self.bracket_beta(k, &vec![0; self.d])
            .cloned()
            .unwrap_or_default()
    }

    /// Rows `(k, nu, h, m, re, im)` for CSV export; `h` is `a0..a{d-1}`
    /// for the fast components and `b` for the slow one.
    pub fn csv_rows(&self) -> Vec<(usize, Vec<i64>, String, i64, f64, f64)> {
        let mut rows = Vec::new();
        for ((k, nu), polys) in &self.a {
            for (j, p) in polys.iter().enumerate() {
                for (m, c) in p.iter() {
                    rows.push((*k, nu.clone(), format!("a{j}"), *m, c.re, c.im));
                }
            }
        }
        for ((k, nu), p) in &self.b {
            for (m, c) in p.iter() {
                rows.push((*k, nu.clone(), "b".to_string(), *m, c.re, c.im));
            }
        }
        rows
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,nu,h,m,re,im")?;
        for (k, nu, h, m, re, im) in self.csv_rows() {
            let nu_s: Vec<String> = nu.iter().map(|x| x.to_string()).collect();
            writeln!(w, "{},{},{},{},{:.16e},{:.16e}", k, nu_s.join(" "), h, m, re, im)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .csv_rows()
            .into_iter()
            .map(|(k, nu, h, m, re, im)| {
                serde_json::json!({"k": k, "nu": nu, "h": h, "m": m, "re": re, "im": im})
            })
            .collect();
        serde_json::json!({
            "d": self.d,
            "k_max": self.k_max,
            "entries": rows,
        })
    }
}

/// Bracket pair at fixed order: the fast-gradient components and the slow
/// derivative, per mode.
struct BracketLevel {
    alpha: BTreeMap<Vec<i64>, Vec<BetaPoly>>,
    beta: BTreeMap<Vec<i64>, BetaPoly>,
}

/// Computes the expansion through order `k_max`.
///
/// The order-k coefficients solve
/// `(omega.nu)^2 a = -[grad_alpha f]^(k-1)` and
/// `(omega.nu)^2 b = +[d_beta f]^(k-1)` mode by mode; brackets convolve the
/// lower orders with the sections of `f` through a multiset exponential, so
/// repeated factors carry their exact multinomial weight.
pub fn compute_series(f: &TrigPoly, freq: &Frequency, k_max: usize) -> Result<CoeffTable> {
    if k_max == 0 {
        return Err(Error::Config("series order must be at least 1".into()));
    }
    let d = freq.d();
    if f.d() != d {
        return Err(Error::Dimension {
            expected: d,
            got: f.d(),
        });
    }
    let mut table = CoeffTable {
        d,
        k_max,
        alpha_degree: f.alpha_degree(),
        a: BTreeMap::new(),
        b: BTreeMap::new(),
        bracket_alpha: BTreeMap::new(),
        bracket_beta: BTreeMap::new(),
        order_scale: vec![0.0; k_max + 1],
    };
    let sections: BTreeMap<Vec<i64>, BetaPoly> = f
        .alpha_modes()
        .into_iter()
        .map(|nu| {
            let s = f.project_mode(&nu);
            (nu, s)
        })
        .collect();

    for k in 1..=k_max {
        let level = brackets_at_order(&table, &sections, k - 1, d);
        store_brackets(&mut table, k - 1, level);
        solve_order(&mut table, freq, k)?;
    }
    // Brackets at the top order feed the zero modes.
    let level = brackets_at_order(&table, &sections, k_max, d);
    store_brackets(&mut table, k_max, level);
    Ok(table)
}

fn store_brackets(table: &mut CoeffTable, k: usize, level: BracketLevel) {
    let mut scale = table.order_scale[k];
    for (nu, v) in level.alpha {
        for p in &v {
            scale = scale.max(p.norm_inf());
        }
        table.bracket_alpha.insert((k, nu), v);
    }
    for (nu, p) in level.beta {
        scale = scale.max(p.norm_inf());
        table.bracket_beta.insert((k, nu), p);
    }
    table.order_scale[k] = scale;
}

fn solve_order(table: &mut CoeffTable, freq: &Frequency, k: usize) -> Result<()> {
    let keys: Vec<Vec<i64>> = table
        .bracket_alpha
        .range((k - 1, vec![])..)
        .take_while(|((kk, _), _)| *kk == k - 1)
        .map(|((_, nu), _)| nu.clone())
        .collect();
    let mut scale = table.order_scale[k];
    for nu in keys {
        if nu.iter().all(|x| *x == 0) {
            continue;
        }
        let div = freq.dot(&nu);
        if div == 0.0 {
            return Err(Error::Resonant { nu });
        }
        let inv = C64::new(1.0 / (div * div), 0.0);
        let ba = table.bracket_alpha[&(k - 1, nu.clone())].clone();
        let bb = table.bracket_beta[&(k - 1, nu.clone())].clone();
        let a: Vec<BetaPoly> = ba.iter().map(|p| p.scale(-inv)).collect();
        let b = bb.scale(inv);
        for p in &a {
            scale = scale.max(p.norm_inf());
        }
        scale = scale.max(b.norm_inf());
        table.a.insert((k, nu.clone()), a);
        table.b.insert((k, nu), b);
    }
    table.order_scale[k] = scale;
    Ok(())
}

/// All brackets of order `k` (using solution orders `<= k`), for every
/// reachable mode including zero.
fn brackets_at_order(
    table: &CoeffTable,
    sections: &BTreeMap<Vec<i64>, BetaPoly>,
    k: usize,
    d: usize,
) -> BracketLevel {
    let mut alpha: BTreeMap<Vec<i64>, Vec<BetaPoly>> = BTreeMap::new();
    let mut beta: BTreeMap<Vec<i64>, BetaPoly> = BTreeMap::new();

    for (nu0, section) in sections {
        // Multiset exponential over the solved lower orders, with each
        // fast item contracted against i*nu0.
        let env = multiset_env(table, nu0, k, d);
        // beta-derivatives of the section, cached up to the largest q.
        let q_top = env.keys().map(|(_, _, q)| *q).max().unwrap_or(0);
        let mut dsec = Vec::with_capacity(q_top + 2);
        dsec.push(section.clone());
        for q in 1..=q_top + 1 {
            dsec.push(section.deriv(q));
        }
        for ((kk, mu, q), weight) in &env {
            if *kk != k {
                continue;
            }
            let nu: Vec<i64> = nu0.iter().zip(mu).map(|(x, y)| x + y).collect();
            // fast gradient: i nu0_j  *  d_beta^q section  *  weight
            let base_a = dsec[*q].mul(weight);
            let entry = alpha
                .entry(nu.clone())
                .or_insert_with(|| vec![BetaPoly::new(); d]);
            for (j, w0) in nu0.iter().enumerate() {
                if *w0 != 0 {
                    entry[j].add_assign(&base_a.scale(I * (*w0 as f64)));
                }
            }
            // slow derivative: d_beta^{q+1} section * weight
            let base_b = dsec[q + 1].mul(weight);
            beta.entry(nu).or_default().add_assign(&base_b);
        }
    }
    // Ensure the zero-mode rows exist even when empty.
    alpha
        .entry(vec![0; d])
        .or_insert_with(|| vec![BetaPoly::new(); d]);
    beta.entry(vec![0; d]).or_default();
    BracketLevel { alpha, beta }
}

/// Key: (total order, total mode, number of slow factors); value: the
/// weighted product of lower-order coefficients. Each distinct item may
/// repeat; a repetition of multiplicity m carries 1/m!.
fn multiset_env(
    table: &CoeffTable,
    nu0: &[i64],
    k: usize,
    d: usize,
) -> BTreeMap<(usize, Vec<i64>, usize), BetaPoly> {
    let mut env: BTreeMap<(usize, Vec<i64>, usize), BetaPoly> = BTreeMap::new();
    env.insert((0, vec![0; d], 0), BetaPoly::one());
    if k == 0 {
        return env;
    }

    // Items: for every solved (k', nu'), the contracted fast factor and the
    // slow factor.
    let mut items: Vec<(usize, Vec<i64>, usize, BetaPoly)> = Vec::new();
    for ((kp, nup), av) in &table.a {
        if *kp > k {
            continue;
        }
        let mut contracted = BetaPoly::new();
        for (j, w0) in nu0.iter().enumerate() {
            if *w0 != 0 {
                contracted.add_assign(&av[j].scale(I * (*w0 as f64)));
            }
        }
        if !contracted.is_zero() {
            items.push((*kp, nup.clone(), 0, contracted));
        }
    }
    for ((kp, nup), bv) in &table.b {
        if *kp > k || bv.is_zero() {
            continue;
        }
        items.push((*kp, nup.clone(), 1, bv.clone()));
    }

    for (kp, nup, dq, poly) in items {
        let snapshot: Vec<((usize, Vec<i64>, usize), BetaPoly)> =
            env.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        for ((k0, mu0, q0), val) in snapshot {
            let mut power = val;
            let mut fact = 1.0f64;
            let mut m = 1usize;
            while k0 + m * kp <= k {
                power = power.mul(&poly);
                fact *= m as f64;
                let key = (
                    k0 + m * kp,
                    mu0.iter().zip(&nup).map(|(x, y)| x + y * m as i64).collect(),
                    q0 + m * dq,
                );
                let contrib = power.scale(C64::new(1.0 / fact, 0.0));
                env.entry(key).or_default().add_assign(&contrib);
                m += 1;
            }
        }
    }
    env
}

/// Residual of the range identity re-derived from the stored table:
/// max over orders and modes of
/// `|(omega.nu)^2 a + bracket_alpha| / scale` and the slow analogue.
pub fn range_identity_defect(table: &CoeffTable, freq: &Frequency) -> f64 {
    let mut worst = 0.0f64;
    for ((k, nu), av) in &table.a {
        let div = freq.dot(nu);
        let ba = &table.bracket_alpha[&(k - 1, nu.clone())];
        let bb = &table.bracket_beta[&(k - 1, nu.clone())];
        let bv = &table.b[&(*k, nu.clone())];
        let scale = table.order_scale(*k);
        for j in 0..av.len() {
            let lhs = av[j].scale(C64::new(div * div, 0.0)).add(&ba[j]);
            worst = worst.max(lhs.norm_inf() / scale);
        }
        let lhs_b = bv
            .scale(C64::new(div * div, 0.0))
            .add(&bb.scale(C64::new(-1.0, 0.0)));
        worst = worst.max(lhs_b.norm_inf() / scale);
    }
    worst
}
