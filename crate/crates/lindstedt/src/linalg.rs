//! Dense square matrices over the jet ring, sized (d+1) x (d+1). Inversion
//! is a direct LU with partial pivoting on the value magnitude.

use crate::error::{Error, Result};
use crate::jet::Jet2;
use num_complex::Complex64 as C64;

#[derive(Clone, Debug, PartialEq)]
pub struct JMat {
    pub n: usize,
    pub a: Vec<Jet2>,
}

impl JMat {
    pub fn zero(n: usize) -> JMat {
        JMat {
            n,
            a: vec![Jet2::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> JMat {
        let mut m = JMat::zero(n);
        for i in 0..n {
            m[(i, i)] = Jet2::ONE;
        }
        m
    }

    pub fn scale(&self, s: Jet2) -> JMat {
        JMat {
            n: self.n,
            a: self.a.iter().map(|x| *x * s).collect(),
        }
    }

    pub fn add(&self, other: &JMat) -> JMat {
        JMat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| *x + *y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &JMat) -> JMat {
        JMat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| *x - *y)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &JMat) -> JMat {
        let n = self.n;
        let mut out = JMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let v = self[(i, k)];
                if v == Jet2::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + v * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn norm_max(&self) -> f64 {
        self.a.iter().map(|x| x.norm_max()).fold(0.0, f64::max)
    }

    /// LU inverse with partial pivoting; fails on a numerically zero pivot.
    pub fn inverse(&self) -> Result<JMat> {
        let n = self.n;
        let mut a = self.a.clone();
        let mut inv = JMat::identity(n);
        for col in 0..n {
            let (mut best, mut best_mag) = (col, a[col * n + col].v.norm());
            for r in col + 1..n {
                let mag = a[r * n + col].v.norm();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            if best_mag < 1e-280 {
                return Err(Error::SingularPropagator {
                    n: -1,
                    x: f64::NAN,
                    pivot: best_mag,
                });
            }
            if best != col {
                for j in 0..n {
                    a.swap(col * n + j, best * n + j);
                    inv.a.swap(col * n + j, best * n + j);
                }
            }
            let piv = a[col * n + col];
            let pinv = piv.recip();
            for j in 0..n {
                a[col * n + j] = a[col * n + j] * pinv;
                inv.a[col * n + j] = inv.a[col * n + j] * pinv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == Jet2::ZERO {
                    continue;
                }
                for j in 0..n {
                    let s = a[col * n + j] * f;
                    a[r * n + j] = a[r * n + j] - s;
                    let s2 = inv.a[col * n + j] * f;
                    inv.a[r * n + j] = inv.a[r * n + j] - s2;
                }
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Jet2 {
        let n = self.n;
        let mut a = self.a.clone();
        let mut det = Jet2::ONE;
        for col in 0..n {
            let (mut best, mut best_mag) = (col, a[col * n + col].v.norm());
            for r in col + 1..n {
                let mag = a[r * n + col].v.norm();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            if best_mag == 0.0 {
                return Jet2::ZERO;
            }
            if best != col {
                for j in 0..n {
                    a.swap(col * n + j, best * n + j);
                }
                det = -det;
            }
            let piv = a[col * n + col];
            det = det * piv;
            let pinv = piv.recip();
            for r in col + 1..n {
                let f = a[r * n + col] * pinv;
                if f == Jet2::ZERO {
                    continue;
                }
                for j in col..n {
                    let s = a[col * n + j] * f;
                    a[r * n + j] = a[r * n + j] - s;
                }
            }
        }
        det
    }

    /// Plain complex view of the values (jets dropped).
    pub fn values(&self) -> Vec<C64> {
        self.a.iter().map(|x| x.v).collect()
    }
}

impl std::ops::Index<(usize, usize)> for JMat {
    type Output = Jet2;
    fn index(&self, (i, j): (usize, usize)) -> &Jet2 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for JMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Jet2 {
        &mut self.a[i * self.n + j]
    }
}
