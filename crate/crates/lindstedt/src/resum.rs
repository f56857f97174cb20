//! Scale-recursive resummed propagators and the regularised variant.
//!
//! Every symbolic quantity here is a truncated power series in the coupling
//! strength with jet-valued coefficients, so re-expanding the resummed
//! objects order by order is exact bookkeeping. The regularised chain runs
//! at a concrete coupling value and feeds the smooth switch with the gap
//! between the slow-slow self-energy and its low-order part.

use crate::eps::{from_jmat, EpsMat, EpsPoly};
use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::jet::Jet2;
use crate::linalg::JMat;
use crate::trees::checks::CheckResult;
use crate::trees::{flat, subtree_max_scale, Comp, Enumerator, Fragment, Subtree};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug)]
pub struct ResumParams {
    /// Truncation order of the coupling-strength series.
    pub k_eps: usize,
    /// Deepest scale the recursion is built to.
    pub n_max: usize,
    /// First non-vanishing order of the bifurcation function; the switch
    /// subtracts the orders below it.
    pub k0: usize,
    /// Concrete coupling value for the regularised chain.
    pub eps: f64,
    /// Slow phase the state is anchored at.
    pub beta0: f64,
    /// Flip the sign of the fast-angle node factors (convex experiment).
    pub convex_sign_flip: bool,
}

type XKey = (u64, bool);

fn xkey(x: Jet2) -> XKey {
    (x.v.re.to_bits(), x.d1.norm() != 0.0)
}

/// Recorded determinant / inversion trouble instead of a crash.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyEvent {
    pub scale: i64,
    pub x: f64,
    pub detail: String,
}

pub struct ResumState<'a> {
    pub en: &'a Enumerator<'a>,
    pub f: &'a TrigPoly,
    pub params: ResumParams,
    sections: RefCell<HashMap<(Vec<i64>, usize), C64>>,
    clusters: RefCell<HashMap<usize, Rc<BTreeMap<i64, Vec<Rc<Fragment>>>>>>,
    sym_m: RefCell<HashMap<(i64, XKey), Rc<EpsMat>>>,
    sym_prop: RefCell<HashMap<(i64, XKey), Rc<EpsMat>>>,
    sym_tree: RefCell<HashMap<Vec<i64>, Rc<EpsPoly>>>,
    reg_m: RefCell<HashMap<(i64, XKey), Rc<JMat>>>,
    reg_prop: RefCell<HashMap<(i64, XKey), Rc<JMat>>>,
    deltas: RefCell<BTreeMap<i64, f64>>,
    pub property_log: RefCell<Vec<PropertyEvent>>,
}

impl<'a> ResumState<'a> {
    pub fn new(en: &'a Enumerator<'a>, f: &'a TrigPoly, params: ResumParams) -> ResumState<'a> {
        assert!(
            en.rules.pair_components && en.rules.forbid_nested_self_energy,
            "resummation requires the renormalised rule set"
        );
        ResumState {
            en,
            f,
            params,
            sections: RefCell::new(HashMap::new()),
            clusters: RefCell::new(HashMap::new()),
            sym_m: RefCell::new(HashMap::new()),
            sym_prop: RefCell::new(HashMap::new()),
            sym_tree: RefCell::new(HashMap::new()),
            reg_m: RefCell::new(HashMap::new()),
            reg_prop: RefCell::new(HashMap::new()),
            deltas: RefCell::new(BTreeMap::new()),
            property_log: RefCell::new(Vec::new()),
        }
    }

    fn dim(&self) -> usize {
        self.en.d + 1
    }

    fn alpha_sign(&self) -> f64 {
        if self.params.convex_sign_flip {
            1.0
        } else {
            -1.0
        }
    }

    fn section(&self, nu: &[i64], q: usize) -> C64 {
        let key = (nu.to_vec(), q);
        if let Some(v) = self.sections.borrow().get(&key) {
            return *v;
        }
        let v = self.f.project_mode(nu).deriv(q).eval(self.params.beta0);
        self.sections.borrow_mut().insert(key, v);
        v
    }

    fn clusters_of(&self, k: usize) -> Result<Rc<BTreeMap<i64, Vec<Rc<Fragment>>>>> {
        if let Some(c) = self.clusters.borrow().get(&k) {
            return Ok(c.clone());
        }
        let c = Rc::new(self.en.clusters(k, self.params.n_max)?);
        self.clusters.borrow_mut().insert(k, c.clone());
        Ok(c)
    }

    fn node_parts(
        &self,
        mode: &[i64],
        comp: Comp,
        child_es: impl Iterator<Item = Comp>,
        sym: f64,
    ) -> (C64, usize) {
        let mut scalar = C64::new(sym, 0.0);
        let mut q = 0usize;
        match comp {
            Comp::Alpha(i) => {
                scalar *= C64::new(self.alpha_sign(), 0.0) * I * mode[i] as f64;
            }
            Comp::Beta => q += 1,
        }
        for e in child_es {
            match e {
                Comp::Alpha(j) => scalar *= I * mode[j] as f64,
                Comp::Beta => q += 1,
            }
        }
        (scalar, q)
    }

    // ---------------- symbolic (series-tracked) side ----------------

    /// Self-energy matrix of one cluster scale as a series in the coupling.
    pub fn m_scale_sym(&self, q: i64, x: Jet2) -> Result<Rc<EpsMat>> {
        let key = (q, xkey(x));
        if let Some(m) = self.sym_m.borrow().get(&key) {
            return Ok(m.clone());
        }
        let km = self.params.k_eps;
        let d = self.en.d;
        let mut out = EpsMat::zero(self.dim(), km);
        if q == -1 {
            let v = self.section(&vec![0; d], 2);
            out[(d, d)].c[1] = Jet2::constant(v);
        } else {
            for k in 1..=km {
                let by_scale = self.clusters_of(k)?;
                if let Some(frags) = by_scale.get(&q) {
                    for f in frags {
                        let u = f.comp.index(d);
                        for e in Comp::all(d) {
                            let v = self.fragment_sym(f, e, x)?.shift(k);
                            let idx = (u, e.index(d));
                            out[idx] = out[idx].add(&v);
                        }
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.sym_m.borrow_mut().insert(key, rc.clone());
        Ok(rc)
    }

    /// Cutoff-weighted cumulative self-energy through scale `n`.
    pub fn mm_cum_sym(&self, n: i64, x: Jet2) -> Result<EpsMat> {
        let mut out = EpsMat::zero(self.dim(), self.params.k_eps);
        for q in -1..=n {
            let chi = self.en.scales.chi_n_derivs(q, x.v.re)?;
            if chi == (0.0, 0.0, 0.0) {
                continue;
            }
            let w = Jet2::compose_real(chi, x);
            let m = self.m_scale_sym(q, x)?;
            out = out.add(&m.scale_jet(w));
        }
        Ok(out)
    }

    /// The scale-n propagator as a series-valued matrix.
    pub fn propagator_sym(&self, n: i64, x: Jet2) -> Result<Rc<EpsMat>> {
        let key = (n, xkey(x));
        if let Some(p) = self.sym_prop.borrow().get(&key) {
            return Ok(p.clone());
        }
        let km = self.params.k_eps;
        let p = if n == -1 {
            EpsMat::identity(self.dim(), km)
        } else {
            let psi = self.en.scales.big_psi_n_derivs(n as usize, x.v.re)?;
            if psi == (0.0, 0.0, 0.0) {
                EpsMat::zero(self.dim(), km)
            } else {
                let w = Jet2::compose_real(psi, x);
                let mm = self.mm_cum_sym(n - 1, x)?;
                let x2 = x * x;
                let a = from_jmat(&JMat::identity(self.dim()), km)
                    .scale_jet(x2)
                    .sub(&mm);
                a.inverse()?.scale_jet(w)
            }
        };
        let rc = Rc::new(p);
        self.sym_prop.borrow_mut().insert(key, rc.clone());
        Ok(rc)
    }

    /// Series value of a renormalised subtree (no enclosing-line factor).
    fn subtree_sym(&self, s: &Rc<Subtree>) -> Result<Rc<EpsPoly>> {
        if let Some(v) = self.sym_tree.borrow().get(&s.key) {
            return Ok(v.clone());
        }
        let (scalar, q) = self.node_parts(&s.mode, s.comp, s.children.iter().map(|c| c.e), s.sym);
        let sec = self.section(&s.mode, q);
        let mut val = EpsPoly::constant(self.params.k_eps, Jet2::constant(scalar * sec));
        for c in &s.children {
            let xm = self.en.scales.freq().dot(&c.sub.momentum);
            let p = self.propagator_sym(c.scale as i64, Jet2::constant_re(xm))?;
            let entry = p[(c.e.index(self.en.d), c.sub.comp.index(self.en.d))].clone();
            let sub = self.subtree_sym(&c.sub)?;
            val = val.mul(&entry).mul(&sub);
        }
        let rc = Rc::new(val);
        self.sym_tree.borrow_mut().insert(s.key.clone(), rc.clone());
        Ok(rc)
    }

    /// Series value of a cluster fragment at external parameter `x`.
    fn fragment_sym(&self, f: &Fragment, e_enter: Comp, x: Jet2) -> Result<EpsPoly> {
        let d = self.en.d;
        let mut es: Vec<Comp> = f.plain_children.iter().map(|c| c.e).collect();
        if let Some(me) = &f.marked {
            es.push(me.e);
        }
        if f.entered_here {
            es.push(e_enter);
        }
        let (scalar, q) = self.node_parts(&f.mode, f.comp, es.into_iter(), f.sym);
        let sec = self.section(&f.mode, q);
        let mut val = EpsPoly::constant(self.params.k_eps, Jet2::constant(scalar * sec));
        for c in &f.plain_children {
            let xm = self.en.scales.freq().dot(&c.sub.momentum);
            let p = self.propagator_sym(c.scale as i64, Jet2::constant_re(xm))?;
            let entry = p[(c.e.index(d), c.sub.comp.index(d))].clone();
            let sub = self.subtree_sym(&c.sub)?;
            val = val.mul(&entry).mul(&sub);
        }
        if let Some(me) = &f.marked {
            let base = self.en.scales.freq().dot(&me.frag.mode_sum);
            let arg = x + Jet2::constant_re(base);
            let p = self.propagator_sym(me.scale as i64, arg)?;
            let entry = p[(me.e.index(d), me.frag.comp.index(d))].clone();
            let sub = self.fragment_sym(&me.frag, e_enter, x)?;
            val = val.mul(&entry).mul(&sub);
        }
        Ok(val)
    }

    /// Whether a tree survives the no-self-energy-cluster rule for a given
    /// root-line scale.
    fn renormalised_ok(&self, s: &Rc<Subtree>, root_scale: i64) -> bool {
        let g = flat::flatten_subtree(s, root_scale);
        flat::self_energy_clusters(&g, None, false, false).is_empty()
    }

    /// Order-k resummed range coefficient (series-valued because the
    /// propagators inside still carry all coupling orders).
    pub fn resummed_range(&self, k: usize, nu: &[i64], h: Comp) -> Result<EpsPoly> {
        let d = self.en.d;
        let x = self.en.scales.freq().dot(nu);
        let mut total = EpsPoly::zero(self.params.k_eps);
        for class in self.en.level(k)?.classes.iter() {
            if class.momentum != nu {
                continue;
            }
            for n in self.en.scales.admissible_scales(x)? {
                if !self.renormalised_ok(class, n as i64) {
                    continue;
                }
                let p = self.propagator_sym(n as i64, Jet2::constant_re(x))?;
                let entry = p[(h.index(d), class.comp.index(d))].clone();
                let v = self.subtree_sym(class)?;
                total = total.add(&entry.mul(&v));
            }
        }
        Ok(total)
    }

    /// Full resummed coefficient: explicit orders summed with their powers.
    pub fn resummed_range_total(&self, nu: &[i64], h: Comp) -> Result<EpsPoly> {
        let mut total = EpsPoly::zero(self.params.k_eps);
        for k in 1..=self.params.k_eps {
            total = total.add(&self.resummed_range(k, nu, h)?.shift(k));
        }
        Ok(total)
    }

    /// Zero-mode sums over renormalised trees: order-(k+1) trees carry the
    /// k-th coefficient; `scale_cap` restricts every line scale.
    pub fn zero_mode(&self, k: usize, h: Comp, scale_cap: Option<i64>) -> Result<EpsPoly> {
        let zero = vec![0i64; self.en.d];
        let mut total = EpsPoly::zero(self.params.k_eps);
        for class in self.en.level(k + 1)?.classes.iter() {
            if class.momentum != zero || class.comp != h {
                continue;
            }
            if let Some(cap) = scale_cap {
                if subtree_max_scale(class) > cap {
                    continue;
                }
            }
            if !self.renormalised_ok(class, -1) {
                continue;
            }
            let v = self.subtree_sym(class)?;
            total = total.add(&v);
        }
        Ok(total)
    }

    /// The resummed bifurcation series through the truncation order, with
    /// every line scale at most `n` (the full object when `n` is `None`).
    pub fn g_resummed(&self, n: Option<i64>) -> Result<EpsPoly> {
        let mut total = EpsPoly::zero(self.params.k_eps);
        for k in 0..self.params.k_eps {
            total = total.add(&self.zero_mode(k, Comp::Beta, n)?.shift(k));
        }
        Ok(total)
    }

    // ---------------- regularised (concrete-coupling) side ----------------

    /// Gap driving the smooth switch below scale `n+1`: the regularised
    /// slow-slow self-energy at zero minus its coupling orders below `k0`
    /// (which agree with the unregularised ones).
    pub fn delta(&self, n: i64) -> Result<f64> {
        if let Some(v) = self.deltas.borrow().get(&n) {
            return Ok(*v);
        }
        let d = self.en.d;
        let zero = Jet2::variable(0.0);
        let full = self.reg_mm_cum(n, zero)?[(d, d)].v.re;
        let mut low = 0.0f64;
        if self.params.k0 > 0 {
            let sym = self.mm_cum_sym(n, zero)?;
            let mut pw = 1.0f64;
            for k in 0..self.params.k0.min(self.params.k_eps + 1) {
                low += sym[(d, d)].c[k].v.re * pw;
                pw *= self.params.eps;
            }
        }
        let v = full - low;
        self.deltas.borrow_mut().insert(n, v);
        Ok(v)
    }

    /// The switch value fed by the gap at scale `n`.
    pub fn xi_at(&self, n: i64) -> Result<f64> {
        Ok(self.en.scales.xi_n(n, self.delta(n)?)?)
    }

    pub fn reg_m(&self, q: i64, x: Jet2) -> Result<Rc<JMat>> {
        let key = (q, xkey(x));
        if let Some(m) = self.reg_m.borrow().get(&key) {
            return Ok(m.clone());
        }
        let d = self.en.d;
        let mut out = JMat::zero(self.dim());
        if q == -1 {
            out[(d, d)] = Jet2::constant(self.section(&vec![0; d], 2) * self.params.eps);
        } else {
            for k in 1..=self.params.k_eps {
                let epk = self.params.eps.powi(k as i32);
                let by_scale = self.clusters_of(k)?;
                if let Some(frags) = by_scale.get(&q) {
                    for f in frags {
                        let u = f.comp.index(d);
                        for e in Comp::all(d) {
                            let v = self.fragment_reg(f, e, x)?.scale(C64::new(epk, 0.0));
                            let idx = (u, e.index(d));
                            out[idx] = out[idx] + v;
                        }
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.reg_m.borrow_mut().insert(key, rc.clone());
        Ok(rc)
    }

    pub fn reg_mm_cum(&self, n: i64, x: Jet2) -> Result<JMat> {
        let mut out = JMat::zero(self.dim());
        for q in -1..=n {
            let chi = self.en.scales.chi_n_derivs(q, x.v.re)?;
            if chi == (0.0, 0.0, 0.0) {
                continue;
            }
            let w = Jet2::compose_real(chi, x);
            let m = self.reg_m(q, x)?;
            out = out.add(&m.scale(w));
        }
        Ok(out)
    }

    /// Regularised propagator: the switch multiplies the cumulative
    /// self-energy before inversion. Inversion failure is recorded and
    /// surfaced as an error, never a panic.
    pub fn propagator_reg(&self, n: i64, x: Jet2) -> Result<Rc<JMat>> {
        let key = (n, xkey(x));
        if let Some(p) = self.reg_prop.borrow().get(&key) {
            return Ok(p.clone());
        }
        let p = if n == -1 {
            JMat::identity(self.dim())
        } else {
            let psi = self.en.scales.big_psi_n_derivs(n as usize, x.v.re)?;
            if psi == (0.0, 0.0, 0.0) {
                JMat::zero(self.dim())
            } else {
                let w = Jet2::compose_real(psi, x);
                let xi = self.xi_at(n - 1)?;
                let mm = self
                    .reg_mm_cum(n - 1, x)?
                    .scale(Jet2::constant_re(xi));
                let x2 = x * x;
                let a = JMat::identity(self.dim()).scale(x2).sub(&mm);
                match a.inverse() {
                    Ok(inv) => inv.scale(w),
                    Err(e) => {
                        self.property_log.borrow_mut().push(PropertyEvent {
                            scale: n,
                            x: x.v.re,
                            detail: format!("inversion failed: {e}"),
                        });
                        return Err(Error::SingularPropagator {
                            n,
                            x: x.v.re,
                            pivot: 0.0,
                        });
                    }
                }
            }
        };
        let rc = Rc::new(p);
        self.reg_prop.borrow_mut().insert(key, rc.clone());
        Ok(rc)
    }

    fn subtree_reg(&self, s: &Rc<Subtree>) -> Result<Jet2> {
        let d = self.en.d;
        let (scalar, q) = self.node_parts(&s.mode, s.comp, s.children.iter().map(|c| c.e), s.sym);
        let sec = self.section(&s.mode, q);
        let mut val = Jet2::constant(scalar * sec);
        for c in &s.children {
            let xm = self.en.scales.freq().dot(&c.sub.momentum);
            let p = self.propagator_reg(c.scale as i64, Jet2::constant_re(xm))?;
            let entry = p[(c.e.index(d), c.sub.comp.index(d))];
            let sub = self.subtree_reg(&c.sub)?;
            val = val * entry * sub;
        }
        Ok(val)
    }

    fn fragment_reg(&self, f: &Fragment, e_enter: Comp, x: Jet2) -> Result<Jet2> {
        let d = self.en.d;
        let mut es: Vec<Comp> = f.plain_children.iter().map(|c| c.e).collect();
        if let Some(me) = &f.marked {
            es.push(me.e);
        }
        if f.entered_here {
            es.push(e_enter);
        }
        let (scalar, q) = self.node_parts(&f.mode, f.comp, es.into_iter(), f.sym);
        let sec = self.section(&f.mode, q);
        let mut val = Jet2::constant(scalar * sec);
        for c in &f.plain_children {
            let xm = self.en.scales.freq().dot(&c.sub.momentum);
            let p = self.propagator_reg(c.scale as i64, Jet2::constant_re(xm))?;
            let entry = p[(c.e.index(d), c.sub.comp.index(d))];
            let sub = self.subtree_reg(&c.sub)?;
            val = val * entry * sub;
        }
        if let Some(me) = &f.marked {
            let base = self.en.scales.freq().dot(&me.frag.mode_sum);
            let arg = x + Jet2::constant_re(base);
            let p = self.propagator_reg(me.scale as i64, arg)?;
            let entry = p[(me.e.index(d), me.frag.comp.index(d))];
            let sub = self.fragment_reg(&me.frag, e_enter, x)?;
            val = val * entry * sub;
        }
        Ok(val)
    }

    /// Regularised zero-mode bifurcation value at the concrete coupling.
    pub fn g_regularised(&self) -> Result<C64> {
        let zero = vec![0i64; self.en.d];
        let mut total = C64::new(0.0, 0.0);
        let mut pw = 1.0f64;
        for k in 0..self.params.k_eps {
            let mut level_sum = C64::new(0.0, 0.0);
            for class in self.en.level(k + 1)?.classes.iter() {
                if class.momentum != zero || class.comp != Comp::Beta {
                    continue;
                }
                if !self.renormalised_ok(class, -1) {
                    continue;
                }
                level_sum += self.subtree_reg(class)?.v;
            }
            total += level_sum * pw;
            pw *= self.params.eps;
        }
        Ok(total)
    }
}

// ---------------- identity checks ----------------

/// Membership residual in the transpose/parity class, from samples at
/// opposite arguments.
pub fn class_defect(bp: &JMat, bm: &JMat) -> f64 {
    let n = bp.n;
    let d = n - 1;
    let mut dev = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            dev = dev.max((bm[(i, j)].v - bp[(j, i)].v).norm());
        }
    }
    dev = dev.max((bm[(d, d)].v - bp[(d, d)].v).norm());
    for i in 0..d {
        dev = dev.max((bm[(d, i)].v + bp[(i, d)].v).norm());
        dev = dev.max((bm[(i, d)].v + bp[(d, i)].v).norm());
    }
    dev
}

/// Closure of the class under inversion, checked on a sampled matrix
/// function; singular samples are skipped and counted.
pub fn class_closure_check<F>(b: F, xs: &[f64], tol: f64) -> (CheckResult, usize)
where
    F: Fn(f64) -> JMat,
{
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    for &x in xs {
        let bp = b(x);
        let bm = b(-x);
        debug_assert!(class_defect(&bp, &bm) <= 1e-9 * bp.norm_max().max(1.0));
        let ip = match bp.inverse() {
            Ok(m) => m,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let im = match bm.inverse() {
            Ok(m) => m,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let scale = ip.norm_max().max(im.norm_max()).max(1e-30);
        worst = worst.max(class_defect(&ip, &im) / scale);
    }
    (
        CheckResult::new(
            "inverse_stays_in_class",
            format!("{} samples, {skipped} skipped", xs.len()),
            worst,
            tol,
        ),
        skipped,
    )
}

/// Transpose/parity/conjugation relations of the cumulative resummed
/// self-energy, order by order in the coupling.
pub fn resummed_symmetry_suite(
    st: &ResumState,
    n: i64,
    xs: &[f64],
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let d = st.en.d;
    let mut dev_fast_t = 0.0f64;
    let mut dev_fast_c = 0.0f64;
    let mut dev_slow_p = 0.0f64;
    let mut dev_slow_c = 0.0f64;
    let mut dev_cross = 0.0f64;
    let mut dev_cross_c = 0.0f64;
    let mut scale = 1e-30f64;
    for &x in xs {
        let mp = st.mm_cum_sym(n, Jet2::variable(x))?;
        let mm = st.mm_cum_sym(n, Jet2::variable(-x))?;
        scale = scale.max(mp.norm_max());
        for k in 0..=st.params.k_eps {
            let p = mp.order(k);
            let m = mm.order(k);
            for i in 0..d {
                for j in 0..d {
                    dev_fast_t = dev_fast_t.max((m[(i, j)].v - p[(j, i)].v).norm());
                    dev_fast_c = dev_fast_c.max((p[(i, j)].v - p[(j, i)].v.conj()).norm());
                }
            }
            dev_slow_p = dev_slow_p.max((p[(d, d)].v - m[(d, d)].v).norm());
            dev_slow_c = dev_slow_c.max((p[(d, d)].v - p[(d, d)].v.conj()).norm());
            for i in 0..d {
                dev_cross = dev_cross.max((p[(i, d)].v + m[(d, i)].v).norm());
                dev_cross_c = dev_cross_c.max((p[(i, d)].v + p[(d, i)].v.conj()).norm());
            }
        }
    }
    let ctx = format!("resummed n={n}");
    Ok(vec![
        CheckResult::new("fast_block_transpose_parity", ctx.clone(), dev_fast_t / scale, tol),
        CheckResult::new("fast_block_conjugation", ctx.clone(), dev_fast_c / scale, tol),
        CheckResult::new("slow_entry_parity", ctx.clone(), dev_slow_p / scale, tol),
        CheckResult::new("slow_entry_real", ctx.clone(), dev_slow_c / scale, tol),
        CheckResult::new("cross_block_antisymmetry", ctx.clone(), dev_cross / scale, tol),
        CheckResult::new("cross_block_conjugation", ctx, dev_cross_c / scale, tol),
    ])
}

/// Small-argument structure of the cumulative resummed self-energy: the
/// fast block vanishes to second order at the origin, the cross blocks to
/// first order, and the slow entry has no slope there.
pub fn resummed_structure_suite(st: &ResumState, n: i64, tol: f64) -> Result<Vec<CheckResult>> {
    let d = st.en.d;
    let m0 = st.mm_cum_sym(n, Jet2::variable(0.0))?;
    let scale = m0.norm_max().max(1e-30);
    let mut dev_fast0 = 0.0f64;
    let mut dev_fast1 = 0.0f64;
    let mut dev_cross0 = 0.0f64;
    let mut dev_slow1 = 0.0f64;
    for k in 0..=st.params.k_eps {
        let m = m0.order(k);
        for i in 0..d {
            for j in 0..d {
                dev_fast0 = dev_fast0.max(m[(i, j)].v.norm());
                dev_fast1 = dev_fast1.max(m[(i, j)].d1.norm());
            }
            dev_cross0 = dev_cross0.max(m[(i, d)].v.norm()).max(m[(d, i)].v.norm());
        }
        dev_slow1 = dev_slow1.max(m[(d, d)].d1.norm());
    }
    let ctx = format!("resummed n={n}");
    Ok(vec![
        CheckResult::new("fast_block_vanishes_at_zero", ctx.clone(), dev_fast0 / scale, tol),
        CheckResult::new("fast_block_slope_vanishes", ctx.clone(), dev_fast1 / scale, tol),
        CheckResult::new("cross_block_vanishes_at_zero", ctx.clone(), dev_cross0 / scale, tol),
        CheckResult::new("slow_entry_slope_vanishes", ctx, dev_slow1 / scale, tol),
    ])
}

/// Least-squares slopes of log(norm) against log(x) for the fast and cross
/// blocks: the quadratic/linear gain exponents.
pub fn scaling_exponents(st: &ResumState, n: i64, xs: &[f64]) -> Result<(f64, f64)> {
    let d = st.en.d;
    let mut fast: Vec<(f64, f64)> = Vec::new();
    let mut cross: Vec<(f64, f64)> = Vec::new();
    for &x in xs {
        let m = st.mm_cum_sym(n, Jet2::variable(x))?;
        let mut nf = 0.0f64;
        let mut nc = 0.0f64;
        for k in 0..=st.params.k_eps {
            let mk = m.order(k);
            for i in 0..d {
                for j in 0..d {
                    nf = nf.max(mk[(i, j)].v.norm());
                }
                nc = nc.max(mk[(i, d)].v.norm()).max(mk[(d, i)].v.norm());
            }
        }
        if nf > 1e-300 {
            fast.push((x.ln(), nf.ln()));
        }
        if nc > 1e-300 {
            cross.push((x.ln(), nc.ln()));
        }
    }
    Ok((fit_slope(&fast), fit_slope(&cross)))
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Dual-route determinant for matrices in the transpose/parity class:
/// returns (direct elimination, split through the scaled cross blocks).
pub fn det_split(b: &JMat, x: f64) -> (C64, C64) {
    let n = b.n;
    let d = n - 1;
    let direct = b.det().v;
    let mut a = b.clone();
    let inv_x = Jet2::constant_re(1.0 / x);
    for i in 0..d {
        a[(i, d)] = a[(i, d)] * inv_x;
        a[(d, i)] = a[(d, i)] * inv_x;
    }
    let det_a = a.det().v;
    let mut fast = JMat::zero(d);
    for i in 0..d {
        for j in 0..d {
            fast[(i, j)] = b[(i, j)];
        }
    }
    let split = det_a * (x * x) + (1.0 - x * x) * b[(d, d)].v * fast.det().v;
    (direct, split)
}

/// Determinant-structure and norm monitor for the resummed propagators at a
/// concrete coupling; norm violations are events, not failures.
pub fn property_monitor(
    st: &ResumState,
    n: i64,
    xs: &[f64],
    eps: f64,
    c1: f64,
    tol_det: f64,
) -> Result<(CheckResult, Vec<PropertyEvent>)> {
    let d1 = st.dim();
    let mut worst = 0.0f64;
    let mut events = Vec::new();
    for &x in xs {
        let mm = st.mm_cum_sym(n - 1, Jet2::variable(x))?.eval(eps);
        let b = JMat::identity(d1)
            .scale(Jet2::constant_re(x * x))
            .sub(&mm);
        let (direct, split) = det_split(&b, x);
        let scale = direct.norm().max(1e-30);
        worst = worst.max((direct - split).norm() / scale);
        let p = st.propagator_sym(n, Jet2::variable(x))?.eval(eps);
        let norm = p.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let bound = c1 / x.abs().powi(2 * d1 as i32);
        if norm > bound {
            events.push(PropertyEvent {
                scale: n,
                x,
                detail: format!("norm {norm:.3e} exceeds {bound:.3e}"),
            });
        }
    }
    Ok((
        CheckResult::new(
            "determinant_class_split",
            format!("n={n}, {} samples", xs.len()),
            worst,
            tol_det,
        ),
        events,
    ))
}
