//! Values of trees and self-energy clusters under the plain rules: scalar
//! propagators `Psi_n(x)/x^2`, node factors built from the sections of the
//! coupling, symmetry weights folded in per node.

use super::flat;
use super::{Comp, Enumerator, Fragment, Subtree};
use crate::error::{Error, Result};
use crate::fourier::{BetaPoly, TrigPoly};
use crate::jet::Jet2;
use crate::linalg::JMat;
use num_complex::Complex64 as C64;
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

const I: C64 = C64::new(0.0, 1.0);

/// Evaluator producing slow-phase-symbolic values (one Fourier series in
/// the slow phase per tree class).
pub struct TreeValues<'a> {
    pub enumr: &'a Enumerator<'a>,
    pub f: &'a TrigPoly,
    pub alpha_sign: f64,
    sections: RefCell<HashMap<(Vec<i64>, usize), Rc<BetaPoly>>>,
    cache: RefCell<HashMap<Vec<i64>, Rc<BetaPoly>>>,
}

impl<'a> TreeValues<'a> {
    pub fn new(enumr: &'a Enumerator<'a>, f: &'a TrigPoly) -> TreeValues<'a> {
        TreeValues {
            enumr,
            f,
            alpha_sign: -1.0,
            sections: RefCell::new(HashMap::new()),
            cache: RefCell::new(HashMap::new()),
        }
    }

    /// `d^q/d beta^q` of the section of `f` at the given fast mode.
    pub fn section(&self, nu: &[i64], q: usize) -> Rc<BetaPoly> {
        let key = (nu.to_vec(), q);
        if let Some(s) = self.sections.borrow().get(&key) {
            return s.clone();
        }
        let s = Rc::new(self.f.project_mode(nu).deriv(q));
        self.sections.borrow_mut().insert(key, s.clone());
        s
    }

    /// Scalar propagator of an internal line.
    pub fn propagator(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.enumr.scales.big_psi_n(n, x)? / (x * x))
    }

    /// Node factor of a subtree root as (scalar prefactor, derivative count).
    fn node_factor(&self, s: &Subtree) -> (C64, usize) {
        let mut scalar = C64::new(s.sym, 0.0);
        let mut q = 0usize;
        match s.comp {
            Comp::Alpha(i) => {
                scalar *= C64::new(self.alpha_sign, 0.0) * I * s.mode[i] as f64;
            }
            Comp::Beta => {
                q += 1;
            }
        }
        for c in &s.children {
            match c.e {
                Comp::Alpha(j) => scalar *= I * s.mode[j] as f64,
                Comp::Beta => q += 1,
            }
        }
        (scalar, q)
    }

    /// Value of a subtree class including the propagators of its internal
    /// lines but not of the line exiting its root.
    pub fn value(&self, s: &Rc<Subtree>) -> Result<Rc<BetaPoly>> {
        if let Some(v) = self.cache.borrow().get(&s.key) {
            return Ok(v.clone());
        }
        let (scalar, q) = self.node_factor(s);
        let mut val = self.section(&s.mode, q).scale(scalar);
        for c in &s.children {
            let x = self.enumr.scales.freq().dot(&c.sub.momentum);
            let g = self.propagator(c.scale, x)?;
            let child = self.value(&c.sub)?;
            val = val.mul(&child).scale(C64::new(g, 0.0));
        }
        let rc = Rc::new(val);
        self.cache.borrow_mut().insert(s.key.clone(), rc.clone());
        Ok(rc)
    }

    /// Sum over all trees with momentum `nu != 0` and total component `h`,
    /// including the root-line propagators summed over admissible scales.
    /// Fails if the cutoff partition does not resolve some line momentum
    /// within the built scales.
    pub fn sum_range(&self, k: usize, nu: &[i64], h: Comp) -> Result<BetaPoly> {
        let x = self.enumr.scales.freq().dot(nu);
        self.check_partition(x)?;
        let mut total = BetaPoly::new();
        for c in self.enumr.classes(k, nu, h)? {
            self.check_partition_subtree(&c)?;
            let v = self.value(&c)?;
            for n in self.enumr.scales.admissible_scales(x)? {
                let g = self.propagator(n, x)?;
                total.add_assign(&v.scale(C64::new(g, 0.0)));
            }
        }
        Ok(total)
    }

    /// Sum over zero-momentum trees (root propagator 1).
    pub fn sum_zero_mode(&self, k: usize, h: Comp) -> Result<BetaPoly> {
        let zero = vec![0i64; self.enumr.d];
        let mut total = BetaPoly::new();
        for c in self.enumr.classes(k, &zero, h)? {
            self.check_partition_subtree(&c)?;
            let v = self.value(&c)?;
            total.add_assign(&v);
        }
        Ok(total)
    }

    fn check_partition(&self, x: f64) -> Result<()> {
        let s = self.enumr.scales.partition_sum(x)?;
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Budget {
                what: format!(
                    "cutoff partition incomplete at |x| = {:.3e} (sum = {s}); deeper scales needed",
                    x.abs()
                ),
                needed: self.enumr.scales.n_max() as u64 + 1,
                limit: self.enumr.scales.n_max() as u64,
            });
        }
        Ok(())
    }

    fn check_partition_subtree(&self, s: &Rc<Subtree>) -> Result<()> {
        for c in &s.children {
            self.check_partition(self.enumr.scales.freq().dot(&c.sub.momentum))?;
            self.check_partition_subtree(&c.sub)?;
        }
        Ok(())
    }
}

/// Evaluator for self-energy clusters at a fixed slow phase, carrying
/// second-order jets in the external parameter.
pub struct ClusterValues<'a> {
    pub tv: TreeValues<'a>,
    pub beta0: f64,
    subtree_at: RefCell<HashMap<Vec<i64>, C64>>,
}

impl<'a> ClusterValues<'a> {
    pub fn new(enumr: &'a Enumerator<'a>, f: &'a TrigPoly, beta0: f64) -> ClusterValues<'a> {
        ClusterValues {
            tv: TreeValues::new(enumr, f),
            beta0,
            subtree_at: RefCell::new(HashMap::new()),
        }
    }

    fn enumr(&self) -> &'a Enumerator<'a> {
        self.tv.enumr
    }

    fn subtree_value_at(&self, s: &Rc<Subtree>) -> Result<C64> {
        if let Some(v) = self.subtree_at.borrow().get(&s.key) {
            return Ok(*v);
        }
        let v = self.tv.value(s)?.eval(self.beta0);
        self.subtree_at.borrow_mut().insert(s.key.clone(), v);
        Ok(v)
    }

    /// Jet-valued scalar propagator at a path line.
    fn propagator_jet(&self, n: usize, x: Jet2) -> Result<Jet2> {
        let psi = self.enumr().scales.big_psi_n_derivs(n, x.v.re)?;
        let num = Jet2::compose_real(psi, x);
        Ok(num / (x * x))
    }

    /// Value of a cluster fragment as a function of the entering parameter,
    /// for an entering line of component `e`.
    pub fn fragment_value(&self, f: &Fragment, e_enter: Comp, x: Jet2) -> Result<Jet2> {
        let mut q = 0usize;
        let mut scalar = C64::new(f.sym, 0.0);
        match f.comp {
            Comp::Alpha(i) => {
                scalar *= C64::new(self.tv.alpha_sign, 0.0) * I * f.mode[i] as f64;
            }
            Comp::Beta => q += 1,
        }
        for c in &f.plain_children {
            match c.e {
                Comp::Alpha(j) => scalar *= I * f.mode[j] as f64,
                Comp::Beta => q += 1,
            }
        }
        if let Some(me) = &f.marked {
            match me.e {
                Comp::Alpha(j) => scalar *= I * f.mode[j] as f64,
                Comp::Beta => q += 1,
            }
        }
        if f.entered_here {
            match e_enter {
                Comp::Alpha(j) => scalar *= I * f.mode[j] as f64,
                Comp::Beta => q += 1,
            }
        }
        let section = self.tv.section(&f.mode, q).eval(self.beta0);
        let mut val = Jet2::constant(scalar * section);
        for c in &f.plain_children {
            let xm = self.enumr().scales.freq().dot(&c.sub.momentum);
            let g = self.tv.propagator(c.scale, xm)?;
            let sub = self.subtree_value_at(&c.sub)?;
            val = val.scale(sub * g);
        }
        if let Some(me) = &f.marked {
            let base = self.enumr().scales.freq().dot(&me.frag.mode_sum);
            let arg = x + Jet2::constant_re(base);
            let g = self.propagator_jet(me.scale, arg)?;
            let sub = self.fragment_value(&me.frag, e_enter, x)?;
            val = val * g * sub;
        }
        Ok(val)
    }
}

/// `M^(k)(x, n)`: the order-k self-energy matrix at cluster scale `n`
/// (`n = -1` holds the single-node term). Indices follow [`Comp::index`]:
/// rows are the exit component, columns the entering one.
pub fn self_energy_matrix(
    ev: &ClusterValues,
    k: usize,
    n: i64,
    x: Jet2,
    cluster_cap: usize,
) -> Result<JMat> {
    let d = ev.enumr().d;
    let mut m = JMat::zero(d + 1);
    let by_scale = ev.enumr().clusters(k, cluster_cap)?;
    if let Some(frags) = by_scale.get(&n) {
        for f in frags {
            let u = f.comp.index(d);
            for e in Comp::all(d) {
                let v = ev.fragment_value(f, e, x)?;
                let idx = (u, e.index(d));
                m[idx] = m[idx] + v;
            }
        }
    }
    Ok(m)
}

/// Cumulative matrix: sum of `M^(k)(x, p)` over `-1 <= p <= n`.
pub fn self_energy_cumulative(
    ev: &ClusterValues,
    k: usize,
    n: i64,
    x: Jet2,
    cluster_cap: usize,
) -> Result<JMat> {
    let d = ev.enumr().d;
    let mut m = JMat::zero(d + 1);
    let mut p = -1i64;
    while p <= n {
        m = m.add(&self_energy_matrix(ev, k, p, x, cluster_cap)?);
        p += 1;
    }
    Ok(m)
}

/// The full-scale-sum matrix together with the scale at which the sum
/// becomes exactly stationary (every deeper scale contributes the zero
/// matrix up to the enumeration cap), and the norm of the last increment.
pub fn self_energy_total(
    ev: &ClusterValues,
    k: usize,
    x: Jet2,
) -> Result<(JMat, i64, f64)> {
    let cap = ev.enumr().scales.n_max();
    let d = ev.enumr().d;
    let mut m = JMat::zero(d + 1);
    let mut last_nonzero = -1i64;
    let mut last_inc = 0.0f64;
    for p in -1..=(cap as i64) {
        let inc = self_energy_matrix(ev, k, p, x, cap)?;
        let norm = inc.norm_max();
        if norm != 0.0 {
            last_nonzero = p;
            last_inc = norm;
        }
        m = m.add(&inc);
    }
    Ok((m, last_nonzero, last_inc))
}

/// Pieces of the small-argument decomposition of the full-scale-sum matrix:
/// the value at zero, the slope at zero, and the quadratic remainder kernel
/// evaluated by quadrature of the second derivative along the segment.
pub struct Decomposition {
    pub at_zero: JMat,
    pub slope: JMat,
    pub quad: JMat,
}

/// Gauss-Legendre nodes on [0,1] applied to the integral remainder
/// `int_0^1 (1-t) f''(t x) dt`, per matrix entry, with `segments`
/// uniform subdivisions.
pub fn decompose_at(
    ev: &ClusterValues,
    k: usize,
    x: f64,
    segments: usize,
    points: usize,
) -> Result<Decomposition> {
    let (m0, _, _) = self_energy_total(ev, k, Jet2::variable(0.0))?;
    let d = ev.enumr().d;
    let mut at_zero = JMat::zero(d + 1);
    let mut slope = JMat::zero(d + 1);
    for i in 0..(d + 1) * (d + 1) {
        at_zero.a[i] = Jet2::constant(m0.a[i].v);
        slope.a[i] = Jet2::constant(m0.a[i].d1);
    }
    let (nodes, weights) = gauss_legendre(points);
    let mut quad = JMat::zero(d + 1);
    for s in 0..segments {
        let a = s as f64 / segments as f64;
        let b = (s + 1) as f64 / segments as f64;
        for (t_ref, w_ref) in nodes.iter().zip(&weights) {
            let t = a + (b - a) * t_ref;
            let w = w_ref * (b - a) * (1.0 - t);
            let (mt, _, _) = self_energy_total(ev, k, Jet2::variable(t * x))?;
            for i in 0..quad.a.len() {
                quad.a[i] = quad.a[i] + Jet2::constant(mt.a[i].d2 * w);
            }
        }
    }
    Ok(Decomposition {
        at_zero,
        slope,
        quad,
    })
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Nodes/weights on [0,1] by Newton iteration on Legendre polynomials.
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        xs.push(0.5 * (1.0 - x));
        ws.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (xs, ws)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Verifies that every enumerated tree reproduces the recursion: used as a
/// two-route oracle from the integration tests.
pub fn subtree_count(en: &Enumerator, k: usize) -> Result<usize> {
    Ok(en.level(k)?.classes.len())
}

/// Jet-valued helper mirroring [`flat::counting`] momenta for clusters.
pub fn fragment_flat(f: &Fragment) -> (flat::FlatGraph, usize) {
    flat::flatten_fragment(f)
}
