//! Small-divisor machinery: the divisor minima `alpha_m`, Bryuno partial
//! sums, the scale sequences `{m_n, p_n}` and the smooth cutoff family used
//! by every propagator.
//!
//! All quantities are exact up to floating point: `alpha_m` is the true
//! minimum of `|omega . nu|` over the l1 ball `0 < |nu|_1 <= 2^m`, found by
//! enumerating the outer d-1 coordinates and solving the innermost one in
//! closed form. Exceeding a budget is a hard error, never a truncation.

use crate::error::{Error, Result};

/// Rotation vector of the fast angles, validated to be non-resonant on the
/// lattice ball used by the configured scale table.
#[derive(Debug, Clone, PartialEq)]
pub struct Frequency {
    omega: Vec<f64>,
}

/// One row of the divisor table: the minimum and a vector attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaEntry {
    pub value: f64,
    pub minimizer: Vec<i64>,
}

impl Frequency {
    /// Builds a frequency and checks `omega . nu != 0` for all
    /// `0 < |nu|_1 <= 2^m_check`.
    pub fn new(omega: Vec<f64>, m_check: usize, budget: u64) -> Result<Self> {
        if omega.is_empty() || omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config(
                "omega must be a non-empty vector of finite reals".into(),
            ));
        }
        if omega.iter().all(|w| *w == 0.0) {
            return Err(Error::Resonant {
                nu: vec![1; omega.len()],
            });
        }
        let freq = Frequency { omega };
        let entry = alpha_m(&freq, m_check, budget)?;
        if entry.value == 0.0 {
            return Err(Error::Resonant {
                nu: entry.minimizer,
            });
        }
        Ok(freq)
    }

    pub fn d(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn dot(&self, nu: &[i64]) -> f64 {
        debug_assert_eq!(nu.len(), self.omega.len());
        self.omega
            .iter()
            .zip(nu)
            .map(|(w, n)| w * *n as f64)
            .sum()
    }

    /// The golden-mean pair `(1, (sqrt(5)-1)/2)` used as the workhorse
    /// two-frequency vector.
    pub fn golden2(m_check: usize, budget: u64) -> Result<Self> {
        Frequency::new(vec![1.0, 0.5 * (5.0f64.sqrt() - 1.0)], m_check, budget)
    }
}

/// Exact minimum of `|omega . nu|` over `0 < |nu|_1 <= 2^m`, with a
/// minimizer. The innermost coordinate (largest `|omega_i|`) is solved by
/// rounding; the remaining `d-1` coordinates are enumerated exhaustively.
pub fn alpha_m(freq: &Frequency, m: usize, budget: u64) -> Result<AlphaEntry> {
    if m >= 63 {
        return Err(Error::Budget {
            what: format!("alpha_{m} radius 2^{m}"),
            needed: u64::MAX,
            limit: budget,
        });
    }
    let radius = 1i64 << m;
    let d = freq.d();
    // Outer enumeration size: (2R+1)^(d-1) lattice points.
    let mut needed = 1u128;
    for _ in 1..d {
        needed = needed.saturating_mul((2 * radius + 1) as u128);
    }
    if needed > budget as u128 {
        return Err(Error::Budget {
            what: format!("alpha_{m} outer enumeration"),
            needed: needed.min(u64::MAX as u128) as u64,
            limit: budget,
        });
    }

    let pivot = (0..d)
        .max_by(|a, b| {
            freq.omega[*a]
                .abs()
                .partial_cmp(&freq.omega[*b].abs())
                .unwrap()
        })
        .unwrap();
    let w_pivot = freq.omega[pivot];
    let outer: Vec<usize> = (0..d).filter(|i| *i != pivot).collect();

    let mut best = f64::INFINITY;
    let mut best_nu = vec![0i64; d];
    let mut nu = vec![0i64; d];

    // Depth-first walk over the outer coordinates within the l1 ball.
    fn walk(
        idx: usize,
        rem: i64,
        outer: &[usize],
        nu: &mut Vec<i64>,
        freq: &Frequency,
        pivot: usize,
        w_pivot: f64,
        best: &mut f64,
        best_nu: &mut Vec<i64>,
    ) {
        if idx == outer.len() {
            let c: f64 = outer
                .iter()
                .map(|i| freq.omega[*i] * nu[*i] as f64)
                .sum();
            let rest_zero = outer.iter().all(|i| nu[*i] == 0);
            let mut consider = |k: i64| {
                if k.abs() > rem || (rest_zero && k == 0) {
                    return;
                }
                let v = (w_pivot * k as f64 + c).abs();
                if v < *best {
                    *best = v;
                    nu[pivot] = k;
                    best_nu.clone_from(nu);
                    nu[pivot] = 0;
                }
            };
            if rest_zero {
                consider(1);
                consider(-1);
            } else {
                let t = -c / w_pivot;
                let lo = t.floor() as i64;
                for k in [lo, lo + 1, -rem, rem, 0] {
                    consider(k.clamp(-rem, rem));
                }
            }
            return;
        }
        let i = outer[idx];
        for v in -rem..=rem {
            nu[i] = v;
            walk(
                idx + 1,
                rem - v.abs(),
                outer,
                nu,
                freq,
                pivot,
                w_pivot,
                best,
                best_nu,
            );
        }
        nu[i] = 0;
    }

    walk(
        0, radius, &outer, &mut nu, freq, pivot, w_pivot, &mut best, &mut best_nu,
    );
    Ok(AlphaEntry {
        value: best,
        minimizer: best_nu,
    })
}

/// Partial Bryuno sum `sum_{m=0}^{M} 2^{-m} log(1/alpha_m)`.
pub fn bryuno_partial(freq: &Frequency, m_upper: usize, budget: u64) -> Result<f64> {
    let mut total = 0.0;
    for m in 0..=m_upper {
        let a = alpha_m(freq, m, budget)?.value;
        total += (1.0 / a).ln() / (1u64 << m) as f64;
    }
    Ok(total)
}

/// The divisor table, the scale sequences and every cutoff.
///
/// `m_seq[0] = 0` and `m_seq[n+1] = m_seq[n] + p_seq[n] + 1`, where
/// `p_seq[n]` is the largest `q >= 0` with `alpha[m_n] < 2 alpha[m_n + q]`.
/// The subsequence `alpha[m_n]` then at least halves at every step; a
/// failure of that halving is logged, never asserted.
#[derive(Debug, Clone)]
pub struct ScaleSystem {
    freq: Frequency,
    alpha: Vec<f64>,
    minimizers: Vec<Vec<i64>>,
    m_seq: Vec<usize>,
    p_seq: Vec<usize>,
    n_max: usize,
    halving_failures: Vec<usize>,
}

impl ScaleSystem {
    /// Builds the alpha table up to `m_max` and the scale sequences up to
    /// `n_max`. Fails with a budget error naming the needed table size when
    /// `m_max` cannot resolve every `p_n`.
    pub fn build(freq: Frequency, n_max: usize, m_max: usize, budget: u64) -> Result<Self> {
        let mut alpha = Vec::with_capacity(m_max + 1);
        let mut minimizers = Vec::with_capacity(m_max + 1);
        for m in 0..=m_max {
            let e = alpha_m(&freq, m, budget)?;
            if e.value == 0.0 {
                return Err(Error::Resonant { nu: e.minimizer });
            }
            if let Some(prev) = alpha.last() {
                debug_assert!(e.value <= *prev * (1.0 + 1e-14));
            }
            alpha.push(e.value);
            minimizers.push(e.minimizer);
        }
        Self::from_table(freq, alpha, minimizers, n_max)
    }

    /// Builds a system from an explicit positive non-increasing alpha table;
    /// used for synthetic cutoff experiments.
    pub fn from_alpha_table(freq: Frequency, alpha: Vec<f64>, n_max: usize) -> Result<Self> {
        if alpha.is_empty() || alpha.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Config("alpha table must be positive".into()));
        }
        if alpha.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Config("alpha table must be non-increasing".into()));
        }
        let minimizers = vec![Vec::new(); alpha.len()];
        Self::from_table(freq, alpha, minimizers, n_max)
    }

    fn from_table(
        freq: Frequency,
        alpha: Vec<f64>,
        minimizers: Vec<Vec<i64>>,
        n_max: usize,
    ) -> Result<Self> {
        let m_max = alpha.len() - 1;
        let mut m_seq = vec![0usize];
        let mut p_seq = Vec::new();
        let mut halving_failures = Vec::new();
        for n in 0..n_max {
            let m_n = m_seq[n];
            // p_n = max { q >= 0 : alpha[m_n] < 2 alpha[m_n + q] }.
            let mut p = None;
            for q in 0.. {
                if m_n + q > m_max {
                    return Err(Error::ScaleBudget {
                        needed: m_n + q,
                        have: m_max,
                    });
                }
                if !(alpha[m_n] < 2.0 * alpha[m_n + q]) {
                    break;
                }
                p = Some(q);
            }
            let p = p.ok_or_else(|| {
                Error::Config(format!(
                    "alpha table violates alpha[m_{n}] < 2 alpha[m_{n}] at q = 0"
                ))
            })?;
            let m_next = m_n + p + 1;
            if m_next > m_max {
                return Err(Error::ScaleBudget {
                    needed: m_next,
                    have: m_max,
                });
            }
            if alpha[m_next] > alpha[m_n] / 2.0 {
                log::warn!(
                    "halving failed at n = {n}: alpha[m_{}] = {} > alpha[m_{n}]/2 = {}",
                    m_next,
                    alpha[m_next],
                    alpha[m_n] / 2.0
                );
                halving_failures.push(n);
            }
            p_seq.push(p);
            m_seq.push(m_next);
        }
        Ok(ScaleSystem {
            freq,
            alpha,
            minimizers,
            m_seq,
            p_seq,
            n_max,
            halving_failures,
        })
    }

    pub fn freq(&self) -> &Frequency {
        &self.freq
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn alpha(&self, m: usize) -> Result<f64> {
        self.alpha.get(m).copied().ok_or(Error::ScaleBudget {
            needed: m,
            have: self.m_max(),
        })
    }

    pub fn alpha_table(&self) -> &[f64] {
        &self.alpha
    }

    pub fn minimizer(&self, m: usize) -> &[i64] {
        &self.minimizers[m]
    }

    pub fn m_seq(&self) -> &[usize] {
        &self.m_seq
    }

    pub fn p_seq(&self) -> &[usize] {
        &self.p_seq
    }

    pub fn halving_failures(&self) -> &[usize] {
        &self.halving_failures
    }

    /// `alpha[m_n]`, with `n = -1` mapped to +infinity.
    pub fn alpha_scale(&self, n: i64) -> Result<f64> {
        if n < -1 {
            return Err(Error::ScaleIndex {
                n,
                n_max: self.n_max,
            });
        }
        if n == -1 {
            return Ok(f64::INFINITY);
        }
        let n = n as usize;
        if n >= self.m_seq.len() {
            return Err(Error::ScaleIndex {
                n: n as i64,
                n_max: self.n_max,
            });
        }
        Ok(self.alpha[self.m_seq[n]])
    }

    /// `chi_n(x) = chi(8x / alpha[m_n])`; `chi_{-1} = 1`.
    pub fn chi_n(&self, n: i64, x: f64) -> Result<f64> {
        if n == -1 {
            return Ok(1.0);
        }
        let a = self.alpha_scale(n)?;
        Ok(chi(8.0 * x / a))
    }

    /// Value and first two derivatives of `chi_n` at `x`.
    pub fn chi_n_derivs(&self, n: i64, x: f64) -> Result<(f64, f64, f64)> {
        if n == -1 {
            return Ok((1.0, 0.0, 0.0));
        }
        let a = self.alpha_scale(n)?;
        let s = 8.0 / a;
        let (c0, c1, c2) = chi_derivs(s * x);
        Ok((c0, c1 * s, c2 * s * s))
    }

    pub fn psi_n(&self, n: usize, x: f64) -> Result<f64> {
        Ok(1.0 - self.chi_n(n as i64, x)?)
    }

    /// `Psi_n = chi_{n-1} (1 - chi_n)`, the n-th partition member.
    pub fn big_psi_n(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.chi_n(n as i64 - 1, x)? * (1.0 - self.chi_n(n as i64, x)?))
    }

    /// Value and two derivatives of `Psi_n` at `x`.
    pub fn big_psi_n_derivs(&self, n: usize, x: f64) -> Result<(f64, f64, f64)> {
        let (a0, a1, a2) = self.chi_n_derivs(n as i64 - 1, x)?;
        let (b0, b1, b2) = self.chi_n_derivs(n as i64, x)?;
        let (p0, p1, p2) = (1.0 - b0, -b1, -b2);
        Ok((a0 * p0, a1 * p0 + a0 * p1, a2 * p0 + 2.0 * a1 * p1 + a0 * p2))
    }

    /// Support interval of `Psi_n`: nonzero only for
    /// `alpha[m_n]/16 < |x| < alpha[m_{n-1}]/8` (upper bound +inf for n = 0).
    pub fn psi_support(&self, n: usize) -> Result<(f64, f64)> {
        let lo = self.alpha_scale(n as i64)? / 16.0;
        let hi = self.alpha_scale(n as i64 - 1)? / 8.0;
        Ok((lo, hi))
    }

    /// Scales `n <= n_max` with `Psi_n(x) != 0`; at most two for x away
    /// from zero.
    pub fn admissible_scales(&self, x: f64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for n in 0..=self.n_max {
            let (lo, hi) = self.psi_support(n)?;
            let ax = x.abs();
            if ax > lo && ax < hi {
                out.push(n);
            }
        }
        Ok(out)
    }

    /// Smooth switch for the regularised propagators: 1 below
    /// `alpha[m_{n+1}]^2 / 2^12`, 0 above `alpha[m_{n+1}]^2 / 2^11`;
    /// `xi_{-1} = 1`. The argument is a signed real, so any sufficiently
    /// negative input gives 1.
    pub fn xi_n(&self, n: i64, x: f64) -> Result<f64> {
        if n == -1 {
            return Ok(1.0);
        }
        let a = self.alpha_scale(n + 1)?;
        let lo = a * a / 4096.0;
        let hi = a * a / 2048.0;
        // Decreasing transition from 1 at lo to 0 at hi.
        let t = (x - lo) / (hi - lo);
        let gu = bump(1.0 - t);
        let gl = bump(t);
        Ok(gu / (gu + gl))
    }

    /// Sum of the partition members `Psi_0..Psi_{n_max}` at `x`; equals 1
    /// exactly once `|x| >= alpha[m_{n_max}]/8`.
    pub fn partition_sum(&self, x: f64) -> Result<f64> {
        let mut s = 0.0;
        for n in 0..=self.n_max {
            s += self.big_psi_n(n, x)?;
        }
        Ok(s)
    }
}

// chi is built from the standard flat bump g(t) = exp(-1/t) (t > 0):
// chi(x) = g(1-|x|) / (g(1-|x|) + g(|x|-1/2)), which is C-infinity, even,
// exactly 1 for |x| <= 1/2 and exactly 0 for |x| >= 1.

fn bump(t: f64) -> f64 {
    // exp(-1/t) underflows to 0 for t < ~1.35e-3; return exact 0 there.
    if t < 1.4e-3 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn bump_d1(t: f64) -> f64 {
    if t < 1.4e-3 {
        0.0
    } else {
        (-1.0 / t).exp() / (t * t)
    }
}

fn bump_d2(t: f64) -> f64 {
    if t < 1.4e-3 {
        0.0
    } else {
        (-1.0 / t).exp() * (1.0 - 2.0 * t) / (t * t * t * t)
    }
}

/// The reference cutoff: even, 1 on `|x| <= 1/2`, 0 on `|x| >= 1`.
pub fn chi(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 0.5 {
        return 1.0;
    }
    if ax >= 1.0 {
        return 0.0;
    }
    let u = bump(1.0 - ax);
    let v = bump(ax - 0.5);
    u / (u + v)
}

/// `chi` with its first two derivatives.
pub fn chi_derivs(x: f64) -> (f64, f64, f64) {
    let ax = x.abs();
    if ax <= 0.5 {
        return (1.0, 0.0, 0.0);
    }
    if ax >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let u = bump(1.0 - ax);
    let du = -bump_d1(1.0 - ax);
    let ddu = bump_d2(1.0 - ax);
    let v = bump(ax - 0.5);
    let dv = bump_d1(ax - 0.5);
    let ddv = bump_d2(ax - 0.5);
    let s = u + v;
    let ds = du + dv;
    let dds = ddu + ddv;
    let c0 = u / s;
    let c1 = (du * s - u * ds) / (s * s);
    let c2 = (ddu * s - u * dds) / (s * s) - 2.0 * c1 * ds / s;
    if x >= 0.0 {
        (c0, c1, c2)
    } else {
        (c0, -c1, c2)
    }
}
