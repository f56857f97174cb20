//! Finite Fourier series on the product of the fast torus and the slow
//! angle, and single-angle series for everything downstream of the phase
//! normalization. Supports are exact: products convolve, nothing truncates.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A finite Fourier series `sum f_{nu,m} e^{i(nu.alpha + m beta)}` with
/// complex coefficients, sparse over its support. Exact zeros are pruned.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    d: usize,
    coeffs: BTreeMap<(Vec<i64>, i64), C64>,
}

/// Serialized form of one coefficient.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigCoeffRecord {
    pub nu: Vec<i64>,
    pub m: i64,
    pub re: f64,
    pub im: f64,
}

impl TrigPoly {
    pub fn new(d: usize) -> Self {
        TrigPoly {
            d,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn insert(&mut self, nu: Vec<i64>, m: i64, c: C64) {
        assert_eq!(nu.len(), self.d);
        if c != C64::new(0.0, 0.0) {
            let e = self.coeffs.entry((nu, m)).or_insert(C64::new(0.0, 0.0));
            *e += c;
            if *e == C64::new(0.0, 0.0) {
                // re-fetch key to remove; BTreeMap entry API gives no key back
            }
        }
        self.prune();
    }

    /// Adds `amp * cos(nu . alpha + m beta)` as the two conjugate modes.
    pub fn add_cos(&mut self, nu: Vec<i64>, m: i64, amp: f64) {
        let half = C64::new(0.5 * amp, 0.0);
        let neg: Vec<i64> = nu.iter().map(|x| -x).collect();
        self.insert(nu, m, half);
        self.insert(neg, -m, half);
    }

    /// Adds `amp * sin(nu . alpha + m beta)`.
    pub fn add_sin(&mut self, nu: Vec<i64>, m: i64, amp: f64) {
        let half = C64::new(0.0, -0.5 * amp);
        let neg: Vec<i64> = nu.iter().map(|x| -x).collect();
        self.insert(nu, m, half);
        self.insert(neg, -m, -half);
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
    }

    pub fn coeff(&self, nu: &[i64], m: i64) -> C64 {
        self.coeffs
            .get(&(nu.to_vec(), m))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<i64>, i64), &C64)> {
        self.coeffs.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        assert_eq!(self.d, other.d);
        let mut out = TrigPoly::new(self.d);
        for ((nu_a, m_a), ca) in &self.coeffs {
            for ((nu_b, m_b), cb) in &other.coeffs {
                let nu: Vec<i64> = nu_a.iter().zip(nu_b).map(|(x, y)| x + y).collect();
                let key = (nu, m_a + m_b);
                *out.coeffs.entry(key).or_insert(C64::new(0.0, 0.0)) += ca * cb;
            }
        }
        out.prune();
        out
    }

    pub fn deriv_alpha(&self, j: usize) -> TrigPoly {
        assert!(j < self.d);
        let mut out = TrigPoly::new(self.d);
        for ((nu, m), c) in &self.coeffs {
            let f = C64::new(0.0, nu[j] as f64);
            if f != C64::new(0.0, 0.0) {
                out.coeffs.insert((nu.clone(), *m), c * f);
            }
        }
        out
    }

    pub fn deriv_beta(&self) -> TrigPoly {
        let mut out = TrigPoly::new(self.d);
        for ((nu, m), c) in &self.coeffs {
            let f = C64::new(0.0, *m as f64);
            if f != C64::new(0.0, 0.0) {
                out.coeffs.insert((nu.clone(), *m), c * f);
            }
        }
        out
    }

    pub fn eval(&self, alpha: &[f64], beta: f64) -> C64 {
        assert_eq!(alpha.len(), self.d);
        let mut s = C64::new(0.0, 0.0);
        for ((nu, m), c) in &self.coeffs {
            let phase: f64 = nu
                .iter()
                .zip(alpha)
                .map(|(n, a)| *n as f64 * a)
                .sum::<f64>()
                + *m as f64 * beta;
            s += c * C64::new(0.0, phase).exp();
        }
        s
    }

    /// The section `f_hat_nu(beta)` as a single-angle series.
    pub fn project_mode(&self, nu: &[i64]) -> BetaPoly {
        let mut out = BetaPoly::new();
        for ((key_nu, m), c) in &self.coeffs {
            if key_nu == nu {
                out.insert(*m, *c);
            }
        }
        out
    }

    /// Distinct fast modes carrying a nonzero section.
    pub fn alpha_modes(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = Vec::new();
        for ((nu, _), _) in &self.coeffs {
            if out.last() != Some(nu) && !out.contains(nu) {
                out.push(nu.clone());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Largest `|nu|_1` in the support.
    pub fn alpha_degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|(nu, _)| nu.iter().map(|x| x.unsigned_abs() as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Checks `f_{-nu,-m} = conj(f_{nu,m})` within `tol` (relative to the
    /// largest coefficient).
    pub fn reality_defect(&self) -> f64 {
        let scale = self
            .coeffs
            .values()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut worst = 0.0f64;
        for ((nu, m), c) in &self.coeffs {
            let neg: Vec<i64> = nu.iter().map(|x| -x).collect();
            let mirror = self.coeff(&neg, -m);
            worst = worst.max((mirror - c.conj()).norm() / scale);
        }
        worst
    }

    pub fn to_records(&self) -> Vec<TrigCoeffRecord> {
        self.coeffs
            .iter()
            .map(|((nu, m), c)| TrigCoeffRecord {
                nu: nu.clone(),
                m: *m,
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    /// Loader for the JSON record form; rejects non-real series.
    pub fn from_records(d: usize, records: &[TrigCoeffRecord]) -> Result<Self> {
        let mut out = TrigPoly::new(d);
        for r in records {
            if r.nu.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    got: r.nu.len(),
                });
            }
            out.insert(r.nu.clone(), r.m, C64::new(r.re, r.im));
        }
        if out.reality_defect() > 1e-12 {
            return Err(Error::Config(
                "coefficients violate the reality constraint f(-nu,-m) = conj(f(nu,m))".into(),
            ));
        }
        Ok(out)
    }
}

/// A finite Fourier series in the single slow angle.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BetaPoly {
    coeffs: BTreeMap<i64, C64>,
}

impl BetaPoly {
    pub fn new() -> Self {
        BetaPoly {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        let mut p = BetaPoly::new();
        p.insert(0, C64::new(1.0, 0.0));
        p
    }

    pub fn constant(c: C64) -> Self {
        let mut p = BetaPoly::new();
        p.insert(0, c);
        p
    }

    pub fn insert(&mut self, m: i64, c: C64) {
        if c != C64::new(0.0, 0.0) {
            let e = self.coeffs.entry(m).or_insert(C64::new(0.0, 0.0));
            *e += c;
        }
        self.coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
    }

    pub fn coeff(&self, m: i64) -> C64 {
        self.coeffs.get(&m).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &C64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &BetaPoly) -> BetaPoly {
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            let e = out.coeffs.entry(*m).or_insert(C64::new(0.0, 0.0));
            *e += c;
        }
        out.coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        out
    }

    pub fn add_assign(&mut self, other: &BetaPoly) {
        for (m, c) in &other.coeffs {
            let e = self.coeffs.entry(*m).or_insert(C64::new(0.0, 0.0));
            *e += c;
        }
        self.coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
    }

    pub fn mul(&self, other: &BetaPoly) -> BetaPoly {
        let mut out = BetaPoly::new();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &other.coeffs {
                let e = out.coeffs.entry(ma + mb).or_insert(C64::new(0.0, 0.0));
                *e += ca * cb;
            }
        }
        out.coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        out
    }

    pub fn scale(&self, c: C64) -> BetaPoly {
        if c == C64::new(0.0, 0.0) {
            return BetaPoly::new();
        }
        BetaPoly {
            coeffs: self.coeffs.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Term-by-term q-th derivative in the angle.
    pub fn deriv(&self, q: usize) -> BetaPoly {
        let mut out = BetaPoly::new();
        for (m, c) in &self.coeffs {
            let f = C64::new(0.0, *m as f64).powu(q as u32);
            let v = c * f;
            if v != C64::new(0.0, 0.0) {
                out.coeffs.insert(*m, v);
            }
        }
        out
    }

    pub fn eval(&self, beta: f64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (m, c) in &self.coeffs {
            s += c * C64::new(0.0, *m as f64 * beta).exp();
        }
        s
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// The series with `m -> -m` and conjugated coefficients; equals the
    /// original exactly when the series is real-valued on real angles.
    pub fn conj_reflect(&self) -> BetaPoly {
        BetaPoly {
            coeffs: self.coeffs.iter().map(|(m, c)| (-m, c.conj())).collect(),
        }
    }

    pub fn reality_defect(&self) -> f64 {
        let scale = self.norm_inf().max(1e-300);
        let mut worst = 0.0f64;
        for (m, c) in &self.coeffs {
            worst = worst.max((self.coeff(-m) - c.conj()).norm() / scale);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos_poly(d: usize, nu: Vec<i64>, m: i64) -> TrigPoly {
        let mut p = TrigPoly::new(d);
        p.add_cos(nu, m, 1.0);
        p
    }

    #[test]
    fn cosine_squared() {
        let p = cos_poly(2, vec![1, 0], 0);
        let sq = p.mul(&p);
        // cos^2 = 1/2 + 1/2 cos(2 a1)
        assert_eq!(sq.coeff(&[0, 0], 0), C64::new(0.5, 0.0));
        assert_eq!(sq.coeff(&[2, 0], 0), C64::new(0.25, 0.0));
        assert_eq!(sq.coeff(&[-2, 0], 0), C64::new(0.25, 0.0));
        let mixed = cos_poly(2, vec![1, 0], 1);
        let sq2 = mixed.mul(&mixed);
        assert_eq!(sq2.coeff(&[0, 0], 0), C64::new(0.5, 0.0));
        assert_eq!(sq2.coeff(&[2, 0], 2), C64::new(0.25, 0.0));
    }

    #[test]
    fn empty_product_annihilates() {
        let p = cos_poly(2, vec![1, 0], 1);
        let empty = TrigPoly::new(2);
        assert!(p.mul(&empty).is_empty());
    }

    #[test]
    fn derivatives() {
        let p = cos_poly(2, vec![1, 0], 0);
        let dp = p.deriv_alpha(0);
        // d/da1 cos(a1) = -sin(a1)
        assert!((dp.eval(&[0.3, 0.0], 0.0).re + 0.3f64.sin()).abs() < 1e-15);
        assert!(p.deriv_alpha(1).is_empty());
        let q = cos_poly(2, vec![0, 0], 1);
        assert!((q.deriv_beta().eval(&[0.0, 0.0], 0.4).re + 0.4f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn projection() {
        let p = cos_poly(2, vec![1, 0], 1); // cos(a1 + b)
        let s = p.project_mode(&[1, 0]);
        assert_eq!(s.coeff(1), C64::new(0.5, 0.0));
        assert!(s.coeff(-1) == C64::new(0.0, 0.0));
        assert!(p.project_mode(&[0, 1]).is_zero());
        let q = cos_poly(2, vec![0, 0], 1);
        let s0 = q.project_mode(&[0, 0]);
        assert_eq!(s0.coeff(1), C64::new(0.5, 0.0));
        assert_eq!(s0.coeff(-1), C64::new(0.5, 0.0));
    }

    #[test]
    fn beta_poly_eval_and_derivs() {
        let mut cosb = BetaPoly::new();
        cosb.insert(1, C64::new(0.5, 0.0));
        cosb.insert(-1, C64::new(0.5, 0.0));
        assert!((cosb.eval(0.0).re - 1.0).abs() < 1e-15);
        let d2 = cosb.deriv(2);
        assert!((d2.eval(0.7).re + 0.7f64.cos()).abs() < 1e-15);
        assert_eq!(BetaPoly::new().eval(123.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn record_roundtrip_and_reality_rejection() {
        let mut p = TrigPoly::new(2);
        p.add_cos(vec![1, 0], 1, 1.0);
        p.add_cos(vec![0, 1], 0, 1.0);
        p.add_cos(vec![0, 0], 1, 1.0);
        let rec = p.to_records();
        let q = TrigPoly::from_records(2, &rec).unwrap();
        assert_eq!(p, q);

        let bad = vec![TrigCoeffRecord {
            nu: vec![1, 0],
            m: 0,
            re: 1.0,
            im: 0.0,
        }];
        assert!(TrigPoly::from_records(2, &bad).is_err());
    }
}
