//! Second-order forward-mode jets in one real parameter. Derivatives of the
//! cutoff functions enter through [`Jet2::compose_real`] with analytically
//! coded derivative triples, never through finite differences.

use num_complex::Complex64 as C64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: C64,
    pub d1: C64,
    pub d2: C64,
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        v: C64::new(0.0, 0.0),
        d1: C64::new(0.0, 0.0),
        d2: C64::new(0.0, 0.0),
    };

    pub const ONE: Jet2 = Jet2 {
        v: C64::new(1.0, 0.0),
        d1: C64::new(0.0, 0.0),
        d2: C64::new(0.0, 0.0),
    };

    pub fn constant(v: C64) -> Self {
        Jet2 {
            v,
            d1: C64::new(0.0, 0.0),
            d2: C64::new(0.0, 0.0),
        }
    }

    pub fn constant_re(v: f64) -> Self {
        Self::constant(C64::new(v, 0.0))
    }

    /// The identity jet at the point x: value x, slope 1.
    pub fn variable(x: f64) -> Self {
        Jet2 {
            v: C64::new(x, 0.0),
            d1: C64::new(1.0, 0.0),
            d2: C64::new(0.0, 0.0),
        }
    }

    pub fn conj(self) -> Self {
        Jet2 {
            v: self.v.conj(),
            d1: self.d1.conj(),
            d2: self.d2.conj(),
        }
    }

    pub fn recip(self) -> Self {
        let iv = C64::new(1.0, 0.0) / self.v;
        let iv2 = iv * iv;
        Jet2 {
            v: iv,
            d1: -self.d1 * iv2,
            d2: (2.0 * self.d1 * self.d1 / self.v - self.d2) * iv2,
        }
    }

    pub fn scale(self, c: C64) -> Self {
        Jet2 {
            v: self.v * c,
            d1: self.d1 * c,
            d2: self.d2 * c,
        }
    }

    /// Chain rule through a real scalar function given by its value and two
    /// derivatives at `inner.v`. The inner jet must be real-valued.
    pub fn compose_real(outer: (f64, f64, f64), inner: Jet2) -> Self {
        debug_assert!(inner.v.im.abs() <= 1e-12 * (1.0 + inner.v.re.abs()));
        let (f0, f1, f2) = outer;
        Jet2 {
            v: C64::new(f0, 0.0),
            d1: inner.d1 * f1,
            d2: inner.d2 * f1 + inner.d1 * inner.d1 * f2,
        }
    }

    pub fn norm_max(self) -> f64 {
        self.v.norm().max(self.d1.norm()).max(self.d2.norm())
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smalldiv::chi_derivs;

    fn var(x: f64) -> Jet2 {
        Jet2::variable(x)
    }

    #[test]
    fn product_and_quotient_rules() {
        let x = var(0.7);
        let f = x * x * x; // x^3
        assert!((f.v.re - 0.343).abs() < 1e-15);
        assert!((f.d1.re - 3.0 * 0.49).abs() < 1e-14);
        assert!((f.d2.re - 6.0 * 0.7).abs() < 1e-14);

        let g = Jet2::ONE / (x * x); // x^-2
        assert!((g.v.re - 1.0 / 0.49).abs() < 1e-12);
        assert!((g.d1.re + 2.0 / 0.7f64.powi(3)).abs() < 1e-12);
        assert!((g.d2.re - 6.0 / 0.7f64.powi(4)).abs() < 1e-11);
    }

    #[test]
    fn smooth_function_matches_central_differences() {
        // g(x) = sin(2x + 0.1) * (x^2 + 1), all derivatives O(1): the plain
        // central stencils at step 1e-4 must agree within 1e-6 / 1e-4.
        let h = 1e-4;
        let g = |x: f64| (2.0 * x + 0.1).sin() * (x * x + 1.0);
        for &x0 in &[0.0, 0.37, 1.1, -0.6] {
            let x = var(x0);
            let inner = x.scale(num_complex::Complex64::new(2.0, 0.0)) + Jet2::constant_re(0.1);
            let y = inner.v.re;
            let s = Jet2::compose_real((y.sin(), y.cos(), -y.sin()), inner);
            let jet = s * (x * x + Jet2::ONE);
            let fd1 = (g(x0 + h) - g(x0 - h)) / (2.0 * h);
            let fd2 = (g(x0 + h) - 2.0 * g(x0) + g(x0 - h)) / (h * h);
            assert!((jet.d1.re - fd1).abs() <= 1e-6, "d1 at {x0}");
            assert!((jet.d2.re - fd2).abs() <= 1e-4, "d2 at {x0}");
        }
    }

    #[test]
    fn chi_composition_matches_refined_differences() {
        // The cutoff has large third derivatives, so compare against a
        // fourth-order stencil with a tolerance scaled to the local slope.
        let h = 1e-4;
        for &x0 in &[0.2, 0.31, 0.38, 0.44] {
            let inner = var(x0).scale(num_complex::Complex64::new(2.0, 0.0))
                + Jet2::constant_re(0.1);
            let jet = Jet2::compose_real(chi_derivs(inner.v.re), inner);
            let f = |x: f64| crate::smalldiv::chi(2.0 * x + 0.1);
            let fd1 = (8.0 * (f(x0 + h) - f(x0 - h)) - (f(x0 + 2.0 * h) - f(x0 - 2.0 * h)))
                / (12.0 * h);
            let fd2 = (16.0 * (f(x0 + h) + f(x0 - h))
                - (f(x0 + 2.0 * h) + f(x0 - 2.0 * h))
                - 30.0 * f(x0))
                / (12.0 * h * h);
            let scale = 1.0 + jet.d1.re.abs() + jet.d2.re.abs();
            assert!(
                (jet.d1.re - fd1).abs() <= 1e-7 * scale,
                "d1 mismatch at {x0}: {} vs {}",
                jet.d1.re,
                fd1
            );
            assert!(
                (jet.d2.re - fd2).abs() <= 1e-4 * scale,
                "d2 mismatch at {x0}: {} vs {}",
                jet.d2.re,
                fd2
            );
        }
    }
}
