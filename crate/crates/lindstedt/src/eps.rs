//! Truncated power series in the coupling strength with jet-valued
//! coefficients, and square matrices over that ring. Order tracking is
//! exact bookkeeping: products convolve and truncate, nothing is estimated
//! numerically.

use crate::error::Result;
use crate::jet::Jet2;
use crate::linalg::JMat;
use num_complex::Complex64 as C64;

/// Coefficients `c[k]` of powers 0..=K of the coupling strength.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsPoly {
    pub c: Vec<Jet2>,
}

impl EpsPoly {
    pub fn zero(k_max: usize) -> EpsPoly {
        EpsPoly {
            c: vec![Jet2::ZERO; k_max + 1],
        }
    }

    pub fn constant(k_max: usize, v: Jet2) -> EpsPoly {
        let mut p = EpsPoly::zero(k_max);
        p.c[0] = v;
        p
    }

    pub fn k_max(&self) -> usize {
        self.c.len() - 1
    }

    pub fn add(&self, o: &EpsPoly) -> EpsPoly {
        EpsPoly {
            c: self.c.iter().zip(&o.c).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, o: &EpsPoly) -> EpsPoly {
        EpsPoly {
            c: self.c.iter().zip(&o.c).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn neg(&self) -> EpsPoly {
        EpsPoly {
            c: self.c.iter().map(|a| -*a).collect(),
        }
    }

    pub fn mul(&self, o: &EpsPoly) -> EpsPoly {
        let k = self.k_max();
        let mut out = EpsPoly::zero(k);
        for i in 0..=k {
            if self.c[i] == Jet2::ZERO {
                continue;
            }
            for j in 0..=k - i {
                if o.c[j] == Jet2::ZERO {
                    continue;
                }
                out.c[i + j] = out.c[i + j] + self.c[i] * o.c[j];
            }
        }
        out
    }

    pub fn scale(&self, s: Jet2) -> EpsPoly {
        EpsPoly {
            c: self.c.iter().map(|a| *a * s).collect(),
        }
    }

    /// Multiplication by the k-th power of the coupling (drops overflow).
    pub fn shift(&self, k: usize) -> EpsPoly {
        let km = self.k_max();
        let mut out = EpsPoly::zero(km);
        for i in 0..=km {
            if i + k <= km {
                out.c[i + k] = self.c[i];
            }
        }
        out
    }

    /// Numeric evaluation at a concrete coupling value (values only).
    pub fn eval(&self, eps: f64) -> Jet2 {
        let mut acc = Jet2::ZERO;
        let mut pw = 1.0f64;
        for c in &self.c {
            acc = acc + c.scale(C64::new(pw, 0.0));
            pw *= eps;
        }
        acc
    }

    pub fn norm_max(&self) -> f64 {
        self.c.iter().map(|c| c.norm_max()).fold(0.0, f64::max)
    }
}

/// Square matrix with series entries.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsMat {
    pub n: usize,
    pub a: Vec<EpsPoly>,
}

impl EpsMat {
    pub fn zero(n: usize, k_max: usize) -> EpsMat {
        EpsMat {
            n,
            a: vec![EpsPoly::zero(k_max); n * n],
        }
    }

    pub fn identity(n: usize, k_max: usize) -> EpsMat {
        let mut m = EpsMat::zero(n, k_max);
        for i in 0..n {
            m[(i, i)] = EpsPoly::constant(k_max, Jet2::ONE);
        }
        m
    }

    pub fn k_max(&self) -> usize {
        self.a[0].k_max()
    }

    pub fn add(&self, o: &EpsMat) -> EpsMat {
        EpsMat {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x.add(y)).collect(),
        }
    }

    pub fn sub(&self, o: &EpsMat) -> EpsMat {
        EpsMat {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x.sub(y)).collect(),
        }
    }

    pub fn scale_jet(&self, s: Jet2) -> EpsMat {
        EpsMat {
            n: self.n,
            a: self.a.iter().map(|x| x.scale(s)).collect(),
        }
    }

    pub fn shift(&self, k: usize) -> EpsMat {
        EpsMat {
            n: self.n,
            a: self.a.iter().map(|x| x.shift(k)).collect(),
        }
    }

    pub fn matmul(&self, o: &EpsMat) -> EpsMat {
        let n = self.n;
        let mut out = EpsMat::zero(n, self.k_max());
        for i in 0..n {
            for k in 0..n {
                let v = &self[(i, k)];
                if v.norm_max() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let t = v.mul(&o[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&t);
                }
            }
        }
        out
    }

    /// Coefficient matrix of one power of the coupling.
    pub fn order(&self, k: usize) -> JMat {
        JMat {
            n: self.n,
            a: self.a.iter().map(|p| p.c[k]).collect(),
        }
    }

    pub fn eval(&self, eps: f64) -> JMat {
        JMat {
            n: self.n,
            a: self.a.iter().map(|p| p.eval(eps)).collect(),
        }
    }

    pub fn norm_max(&self) -> f64 {
        self.a.iter().map(|p| p.norm_max()).fold(0.0, f64::max)
    }

    /// Series inverse by a Neumann split around the order-zero part, which
    /// must itself be invertible (for the propagators it is a multiple of
    /// the identity away from the origin).
    pub fn inverse(&self) -> Result<EpsMat> {
        let km = self.k_max();
        let a0 = self.order(0);
        let a0_inv_j = a0.inverse()?;
        let a0_inv = from_jmat(&a0_inv_j, km);
        let rest = self.sub(&from_jmat(&a0, km));
        // terms: T_0 = A0^-1; T_j = -A0^-1 * rest * T_{j-1}; rest is O(eps).
        let mut total = a0_inv.clone();
        let mut term = a0_inv.clone();
        for _ in 1..=km {
            term = a0_inv.matmul(&rest.matmul(&term)).neg();
            if term.norm_max() == 0.0 {
                break;
            }
            total = total.add(&term);
        }
        Ok(total)
    }

    fn neg(&self) -> EpsMat {
        EpsMat {
            n: self.n,
            a: self.a.iter().map(|p| p.neg()).collect(),
        }
    }
}

pub fn from_jmat(m: &JMat, k_max: usize) -> EpsMat {
    EpsMat {
        n: m.n,
        a: m.a.iter().map(|v| EpsPoly::constant(k_max, *v)).collect(),
    }
}

impl std::ops::Index<(usize, usize)> for EpsMat {
    type Output = EpsPoly;
    fn index(&self, (i, j): (usize, usize)) -> &EpsPoly {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for EpsMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut EpsPoly {
        &mut self.a[i * self.n + j]
    }
}
