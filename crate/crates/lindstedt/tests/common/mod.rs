//! Shared fixtures and independent oracles for the integration tests.

use lindstedt::fourier::TrigPoly;
use lindstedt::smalldiv::{Frequency, ScaleSystem};

pub const BUDGET: u64 = 50_000_000;

/// d = 2, omega = (1, (sqrt(5)-1)/2), f = cos(a1+b) + cos(a2) + cos(b).
pub fn standard_f() -> TrigPoly {
    let mut f = TrigPoly::new(2);
    f.add_cos(vec![1, 0], 1, 1.0);
    f.add_cos(vec![0, 1], 0, 1.0);
    f.add_cos(vec![0, 0], 1, 1.0);
    f
}

pub fn golden() -> Frequency {
    Frequency::golden2(10, BUDGET).unwrap()
}

pub fn golden_scales(n_max: usize, m_max: usize) -> ScaleSystem {
    ScaleSystem::build(golden(), n_max, m_max, BUDGET).unwrap()
}

/// Exhaustive minimum of |omega . nu| over 0 < |nu|_1 <= 2^m, the
/// independent route the reduced enumeration is checked against.
#[allow(dead_code)]
pub fn alpha_brute(omega: &[f64], m: usize) -> (f64, Vec<i64>) {
    let radius = 1i64 << m;
    let d = omega.len();
    let mut best = f64::INFINITY;
    let mut best_nu = vec![0i64; d];
    let mut nu = vec![0i64; d];
    fn rec(
        idx: usize,
        rem: i64,
        omega: &[f64],
        nu: &mut Vec<i64>,
        best: &mut f64,
        best_nu: &mut Vec<i64>,
    ) {
        if idx == omega.len() {
            if nu.iter().any(|x| *x != 0) {
                let v: f64 = omega
                    .iter()
                    .zip(nu.iter())
                    .map(|(w, n)| w * *n as f64)
                    .sum::<f64>()
                    .abs();
                if v < *best {
                    *best = v;
                    best_nu.clone_from(nu);
                }
            }
            return;
        }
        for v in -rem..=rem {
            nu[idx] = v;
            rec(idx + 1, rem - v.abs(), omega, nu, best, best_nu);
            nu[idx] = 0;
        }
    }
    rec(0, radius, omega, &mut nu, &mut best, &mut best_nu);
    (best, best_nu)
}

/// Eight evenly spread slow-phase samples avoiding special angles.
#[allow(dead_code)]
pub fn beta_samples() -> Vec<f64> {
    (0..8).map(|i| 0.3 + i as f64 * 0.7).collect()
}
