//! Labeled rooted trees, self-energy clusters, their values and the
//! verification suites built on them.
//!
//! Trees are enumerated as canonical classes: children of a node form a
//! multiset, generated in non-decreasing canonical order, and a run of m
//! identical child edges carries the exact weight 1/m!. Summed over all
//! classes this reproduces the recursion of [`crate::series`] coefficient by
//! coefficient, which is the central cross-check of the crate.

pub mod checks;
pub mod flat;
pub mod value;

use crate::error::{Error, Result};
use crate::smalldiv::ScaleSystem;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

/// Component label: one of the fast angles or the slow one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Comp {
    Alpha(usize),
    Beta,
}

impl Comp {
    pub fn all(d: usize) -> Vec<Comp> {
        let mut v: Vec<Comp> = (0..d).map(Comp::Alpha).collect();
        v.push(Comp::Beta);
        v
    }

    /// Row/column index in the (d+1)-dimensional component basis.
    pub fn index(self, d: usize) -> usize {
        match self {
            Comp::Alpha(j) => j,
            Comp::Beta => d,
        }
    }

    pub fn from_index(i: usize, d: usize) -> Comp {
        if i == d {
            Comp::Beta
        } else {
            Comp::Alpha(i)
        }
    }

    fn code(self) -> i64 {
        match self {
            Comp::Alpha(j) => j as i64,
            Comp::Beta => -1,
        }
    }
}

/// Enumeration rule set. The plain rules label each line with the component
/// of the node it exits and keep the path-momentum exclusion inside
/// self-energy structures; the renormalised rules give every line its own
/// entering-side component, drop that exclusion, and forbid nested
/// self-energy clusters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rules {
    pub pair_components: bool,
    pub allow_zero_path_momentum: bool,
    pub forbid_nested_self_energy: bool,
}

impl Rules {
    pub fn plain() -> Rules {
        Rules {
            pair_components: false,
            allow_zero_path_momentum: false,
            forbid_nested_self_energy: false,
        }
    }

    pub fn renormalised() -> Rules {
        Rules {
            pair_components: true,
            allow_zero_path_momentum: true,
            forbid_nested_self_energy: true,
        }
    }
}

/// A line from a child subtree into its parent node: the subtree, the scale
/// label and the component the parent sees.
#[derive(Clone, Debug)]
pub struct ChildEdge {
    pub sub: Rc<Subtree>,
    pub scale: usize,
    pub e: Comp,
}

impl ChildEdge {
    fn sort_key(&self) -> (&[i64], usize, i64) {
        (&self.sub.key, self.scale, self.e.code())
    }

    pub fn same_class(&self, other: &ChildEdge) -> bool {
        self.sub.key == other.sub.key && self.scale == other.scale && self.e == other.e
    }
}

/// A canonical labeled subtree class. `sym` is this node's own multiplicity
/// weight (1 over the product of factorials of identical-child run lengths);
/// the full class weight is the product of `sym` over all nodes.
#[derive(Clone, Debug)]
pub struct Subtree {
    pub mode: Vec<i64>,
    pub comp: Comp,
    pub children: Vec<ChildEdge>,
    pub order: usize,
    pub momentum: Vec<i64>,
    pub sym: f64,
    pub key: Vec<i64>,
}

impl Subtree {
    fn leaf(mode: Vec<i64>, comp: Comp) -> Subtree {
        let momentum = mode.clone();
        let mut key = mode.clone();
        key.push(comp.code());
        key.push(0);
        Subtree {
            mode,
            comp,
            children: Vec::new(),
            order: 1,
            momentum,
            sym: 1.0,
            key,
        }
    }

    fn assemble(mode: Vec<i64>, comp: Comp, children: Vec<ChildEdge>) -> Subtree {
        let mut momentum = mode.clone();
        let mut order = 1;
        for c in &children {
            for (m, x) in momentum.iter_mut().zip(&c.sub.momentum) {
                *m += x;
            }
            order += c.sub.order;
        }
        let mut sym = 1.0;
        let mut run = 1usize;
        for i in 1..children.len() {
            if children[i].same_class(&children[i - 1]) {
                run += 1;
                sym /= run as f64;
            } else {
                run = 1;
            }
        }
        let mut key = mode.clone();
        key.push(comp.code());
        key.push(children.len() as i64);
        for c in &children {
            key.push(c.scale as i64);
            key.push(c.e.code());
            key.extend_from_slice(&c.sub.key);
        }
        Subtree {
            mode,
            comp,
            children,
            order,
            momentum,
            sym,
            key,
        }
    }

    pub fn is_zero_momentum(&self) -> bool {
        self.momentum.iter().all(|x| *x == 0)
    }
}

/// One wholly-labeled tree of the expansion: a class plus the scale of its
/// root line (`-1` for the zero-momentum root of the zero-mode sums).
#[derive(Clone, Debug)]
pub struct Tree {
    pub root: Rc<Subtree>,
    pub root_scale: i64,
}

/// A self-energy cluster class: a rooted fragment whose node set sums to
/// zero momentum, with a marked path from the exit node down to the node the
/// external line enters. Lines on the path carry the entering momentum on
/// top of their internal part.
#[derive(Clone, Debug)]
pub struct Fragment {
    pub mode: Vec<i64>,
    pub comp: Comp,
    pub plain_children: Vec<ChildEdge>,
    pub marked: Option<Box<MarkedEdge>>,
    pub entered_here: bool,
    pub order: usize,
    pub mode_sum: Vec<i64>,
    pub sym: f64,
    pub max_scale: i64,
}

/// A line on the path inside a self-energy cluster.
#[derive(Clone, Debug)]
pub struct MarkedEdge {
    pub frag: Fragment,
    pub scale: usize,
    pub e: Comp,
}

impl Fragment {
    /// Scale of the cluster: the largest internal line scale, or -1 for the
    /// single-node cluster.
    pub fn scale(&self) -> i64 {
        self.max_scale
    }

    pub fn path_len(&self) -> usize {
        match &self.marked {
            None => 0,
            Some(me) => 1 + me.frag.path_len(),
        }
    }
}

/// Canonical enumerator with per-order memoization.
pub struct Enumerator<'a> {
    pub scales: &'a ScaleSystem,
    pub rules: Rules,
    pub f_modes: Vec<Vec<i64>>,
    pub d: usize,
    pub n_cap: usize,
    /// Largest external-parameter magnitude cluster values will be
    /// evaluated at; path-line scales whose cutoff support cannot be
    /// reached for any such argument are not materialized.
    pub path_x_max: f64,
    budget: u64,
    levels: RefCell<Vec<Option<Rc<OrderLevel>>>>,
    fragment_cache: RefCell<BTreeMap<(usize, usize), Rc<Vec<Fragment>>>>,
}

/// All subtree classes of one order, plus the admissible child edges they
/// induce.
pub struct OrderLevel {
    pub classes: Vec<Rc<Subtree>>,
    pub edges: Vec<ChildEdge>,
}

impl<'a> Enumerator<'a> {
    pub fn new(
        scales: &'a ScaleSystem,
        f_modes: Vec<Vec<i64>>,
        rules: Rules,
        budget: u64,
    ) -> Enumerator<'a> {
        let d = scales.freq().d();
        let path_x_max = scales.alpha_scale(0).map(|a| a / 2.0).unwrap_or(1.0);
        Enumerator {
            scales,
            rules,
            f_modes,
            d,
            n_cap: scales.n_max(),
            path_x_max,
            budget,
            levels: RefCell::new(Vec::new()),
            fragment_cache: RefCell::new(BTreeMap::new()),
        }
    }

    /// Path-line scales whose support can be reached by `base + x` for some
    /// `|x| <= path_x_max`.
    fn path_scales(&self, base: f64, path_cap: usize) -> Result<Vec<usize>> {
        let lo_arg = (base.abs() - self.path_x_max).max(0.0);
        let hi_arg = base.abs() + self.path_x_max;
        let mut out = Vec::new();
        for n in 0..=path_cap {
            let (lo, hi) = self.scales.psi_support(n)?;
            if lo_arg < hi && hi_arg > lo {
                out.push(n);
            }
        }
        Ok(out)
    }

    /// All subtree classes of the given order, canonical and deduplicated by
    /// construction.
    pub fn level(&self, order: usize) -> Result<Rc<OrderLevel>> {
        assert!(order >= 1);
        {
            let levels = self.levels.borrow();
            if let Some(Some(l)) = levels.get(order) {
                return Ok(l.clone());
            }
        }
        // Build lower levels first (recursion depth = order).
        if order > 1 {
            self.level(order - 1)?;
        }
        let comps = Comp::all(self.d);
        let mut classes: Vec<Rc<Subtree>> = Vec::new();
        if order == 1 {
            for mode in &self.f_modes {
                for comp in &comps {
                    classes.push(Rc::new(Subtree::leaf(mode.clone(), *comp)));
                }
            }
        } else {
            // Flattened candidate edges from all lower orders, canonical order.
            let mut pool: Vec<ChildEdge> = Vec::new();
            for k in 1..order {
                let lvl = self.levels.borrow()[k].clone().unwrap();
                pool.extend(lvl.edges.iter().cloned());
            }
            pool.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
            for mode in &self.f_modes {
                for comp in &comps {
                    let mut chosen: Vec<ChildEdge> = Vec::new();
                    self.pick(
                        &pool,
                        0,
                        order - 1,
                        mode,
                        *comp,
                        &mut chosen,
                        &mut classes,
                    )?;
                }
            }
        }
        let mut edges = Vec::new();
        for c in &classes {
            if c.is_zero_momentum() {
                continue;
            }
            let x = self.scales.freq().dot(&c.momentum);
            for n in self.scales.admissible_scales(x)? {
                if n > self.n_cap {
                    continue;
                }
                if self.rules.pair_components {
                    for e in &comps {
                        edges.push(ChildEdge {
                            sub: c.clone(),
                            scale: n,
                            e: *e,
                        });
                    }
                } else {
                    edges.push(ChildEdge {
                        sub: c.clone(),
                        scale: n,
                        e: c.comp,
                    });
                }
            }
        }
        let level = Rc::new(OrderLevel { classes, edges });
        let mut levels = self.levels.borrow_mut();
        if levels.len() <= order {
            levels.resize(order + 1, None);
        }
        levels[order] = Some(level.clone());
        Ok(level)
    }

    fn pick(
        &self,
        pool: &[ChildEdge],
        start: usize,
        rem: usize,
        mode: &[i64],
        comp: Comp,
        chosen: &mut Vec<ChildEdge>,
        out: &mut Vec<Rc<Subtree>>,
    ) -> Result<()> {
        if rem == 0 {
            if out.len() as u64 >= self.budget {
                return Err(Error::Budget {
                    what: "tree class enumeration".into(),
                    needed: out.len() as u64 + 1,
                    limit: self.budget,
                });
            }
            out.push(Rc::new(Subtree::assemble(
                mode.to_vec(),
                comp,
                chosen.clone(),
            )));
            return Ok(());
        }
        for i in start..pool.len() {
            if pool[i].sub.order > rem {
                continue;
            }
            chosen.push(pool[i].clone());
            self.pick(pool, i, rem - pool[i].sub.order, mode, comp, chosen, out)?;
            chosen.pop();
        }
        Ok(())
    }

    /// Classes of order `k` with the given total momentum and component.
    pub fn classes(&self, k: usize, nu: &[i64], h: Comp) -> Result<Vec<Rc<Subtree>>> {
        let lvl = self.level(k)?;
        Ok(lvl
            .classes
            .iter()
            .filter(|c| c.momentum == nu && c.comp == h)
            .cloned()
            .collect())
    }

    /// Fully labeled trees: classes times admissible root-line scales (the
    /// zero-momentum root line has scale -1).
    pub fn trees(&self, k: usize, nu: &[i64], h: Comp) -> Result<Vec<Tree>> {
        let classes = self.classes(k, nu, h)?;
        let mut out = Vec::new();
        if nu.iter().all(|x| *x == 0) {
            for c in classes {
                out.push(Tree {
                    root: c,
                    root_scale: -1,
                });
            }
        } else {
            let x = self.scales.freq().dot(nu);
            let roots = self.scales.admissible_scales(x)?;
            for c in classes {
                for n in &roots {
                    out.push(Tree {
                        root: c.clone(),
                        root_scale: *n as i64,
                    });
                }
            }
        }
        Ok(out)
    }

    /// All self-energy cluster classes of the given order, grouped by
    /// cluster scale. The map key is the scale; `-1` holds the single-node
    /// zero-mode cluster.
    pub fn clusters(&self, k: usize, n_cluster_cap: usize) -> Result<BTreeMap<i64, Vec<Rc<Fragment>>>> {
        let mut out: BTreeMap<i64, Vec<Rc<Fragment>>> = BTreeMap::new();
        let frags = self.fragments(k, n_cluster_cap)?;
        for f in frags.iter() {
            if !f.mode_sum.iter().all(|x| *x == 0) {
                continue;
            }
            if self.rules.forbid_nested_self_energy {
                let (flat, enter) = flat::flatten_fragment(f);
                if !flat::self_energy_clusters(
                    &flat,
                    Some(enter),
                    !self.rules.allow_zero_path_momentum,
                    true,
                )
                .is_empty()
                {
                    continue;
                }
            }
            out.entry(f.scale()).or_default().push(Rc::new(f.clone()));
        }
        Ok(out)
    }

    /// Marked fragments of order `k` with any total momentum; path-line
    /// scales range over `0..=path_cap`.
    fn fragments(&self, k: usize, path_cap: usize) -> Result<Rc<Vec<Fragment>>> {
        if let Some(cached) = self.fragment_cache.borrow().get(&(k, path_cap)) {
            return Ok(cached.clone());
        }
        let comps = Comp::all(self.d);
        let mut out = Vec::new();
        // Candidate plain edges from orders < k.
        let mut pool: Vec<ChildEdge> = Vec::new();
        for kp in 1..k {
            let lvl = self.level(kp)?;
            pool.extend(lvl.edges.iter().cloned());
        }
        pool.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

        // Sub-fragments of all orders < k for the marked edge.
        let mut sub_frags: Vec<Rc<Vec<Fragment>>> = vec![Rc::new(Vec::new()); k];
        for kp in 1..k {
            sub_frags[kp] = self.fragments(kp, path_cap)?;
        }

        for mode in &self.f_modes {
            for comp in &comps {
                // Entered at this node: all of k-1 goes to plain children.
                let mut plain_sets = Vec::new();
                self.pick_sets(&pool, 0, k - 1, &mut Vec::new(), &mut plain_sets)?;
                for set in &plain_sets {
                    out.push(self.make_fragment(mode, *comp, set.clone(), None, true));
                }
                // Entered strictly below: one marked edge of order kp >= 1.
                for kp in 1..k {
                    for mf in sub_frags[kp].iter() {
                        // Path line momentum is the sub-fragment mode sum.
                        let zero = mf.mode_sum.iter().all(|x| *x == 0);
                        if zero && !self.rules.allow_zero_path_momentum {
                            continue;
                        }
                        let e_opts: Vec<Comp> = if self.rules.pair_components {
                            comps.clone()
                        } else {
                            vec![mf.comp]
                        };
                        let mut sets = Vec::new();
                        self.pick_sets(&pool, 0, k - 1 - kp, &mut Vec::new(), &mut sets)?;
                        let base = self.scales.freq().dot(&mf.mode_sum);
                        for scale in self.path_scales(base, path_cap)? {
                            for e in &e_opts {
                                for set in &sets {
                                    let me = MarkedEdge {
                                        frag: mf.clone(),
                                        scale,
                                        e: *e,
                                    };
                                    out.push(self.make_fragment(
                                        mode,
                                        *comp,
                                        set.clone(),
                                        Some(Box::new(me)),
                                        false,
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        if out.len() as u64 > self.budget {
            return Err(Error::Budget {
                what: "self-energy fragment enumeration".into(),
                needed: out.len() as u64,
                limit: self.budget,
            });
        }
        let rc = Rc::new(out);
        self.fragment_cache
            .borrow_mut()
            .insert((k, path_cap), rc.clone());
        Ok(rc)
    }

    fn pick_sets(
        &self,
        pool: &[ChildEdge],
        start: usize,
        rem: usize,
        chosen: &mut Vec<ChildEdge>,
        out: &mut Vec<Vec<ChildEdge>>,
    ) -> Result<()> {
        if rem == 0 {
            out.push(chosen.clone());
            return Ok(());
        }
        for i in start..pool.len() {
            if pool[i].sub.order > rem {
                continue;
            }
            chosen.push(pool[i].clone());
            self.pick_sets(pool, i, rem - pool[i].sub.order, chosen, out)?;
            chosen.pop();
        }
        Ok(())
    }

    fn make_fragment(
        &self,
        mode: &[i64],
        comp: Comp,
        plain_children: Vec<ChildEdge>,
        marked: Option<Box<MarkedEdge>>,
        entered_here: bool,
    ) -> Fragment {
        let mut mode_sum = mode.to_vec();
        let mut order = 1;
        let mut max_scale = -1i64;
        for c in &plain_children {
            for (m, x) in mode_sum.iter_mut().zip(&c.sub.momentum) {
                *m += x;
            }
            order += c.sub.order;
            max_scale = max_scale.max(c.scale as i64).max(subtree_max_scale(&c.sub));
        }
        if let Some(me) = &marked {
            for (m, x) in mode_sum.iter_mut().zip(&me.frag.mode_sum) {
                *m += x;
            }
            order += me.frag.order;
            max_scale = max_scale.max(me.scale as i64).max(me.frag.max_scale);
        }
        let mut sym = 1.0;
        let mut run = 1usize;
        for i in 1..plain_children.len() {
            if plain_children[i].same_class(&plain_children[i - 1]) {
                run += 1;
                sym /= run as f64;
            } else {
                run = 1;
            }
        }
        Fragment {
            mode: mode.to_vec(),
            comp,
            plain_children,
            marked,
            entered_here,
            order,
            mode_sum,
            sym,
            max_scale,
        }
    }
}

/// Largest line scale inside a subtree (its own root line excluded).
pub fn subtree_max_scale(s: &Subtree) -> i64 {
    let mut m = -1i64;
    for c in &s.children {
        m = m.max(c.scale as i64).max(subtree_max_scale(&c.sub));
    }
    m
}
