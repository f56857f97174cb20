//! Flattened view of a labeled tree or cluster fragment, cluster detection
//! and the per-line counting statistics.

use super::{Comp, Fragment, Subtree};
use crate::smalldiv::ScaleSystem;
use std::collections::BTreeSet;

/// Scale given to external lines so they never join a component.
pub const EXTERNAL_SCALE: i64 = i64::MAX;

#[derive(Clone, Debug)]
pub struct FlatNode {
    pub mode: Vec<i64>,
    pub comp: Comp,
    pub parent: Option<usize>,
}

/// The line exiting node `v` (toward its parent, or out of the graph).
#[derive(Clone, Debug)]
pub struct FlatLine {
    pub scale: i64,
    pub momentum: Vec<i64>,
    pub carries_x: bool,
    pub e: Comp,
}

#[derive(Clone, Debug)]
pub struct FlatGraph {
    pub nodes: Vec<FlatNode>,
    pub lines: Vec<FlatLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterHit {
    /// Nodes of the cluster, sorted.
    pub nodes: Vec<usize>,
    /// Largest internal line scale; -1 for a single node.
    pub scale: i64,
    /// Node whose exiting line leaves the cluster.
    pub exit_node: usize,
}

impl FlatGraph {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Sum of the l1 norms of the node modes.
    pub fn k_norm(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.mode.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>())
            .sum()
    }
}

/// Flattens a subtree class together with its root-line scale.
pub fn flatten_subtree(s: &Subtree, root_scale: i64) -> FlatGraph {
    let mut g = FlatGraph {
        nodes: Vec::new(),
        lines: Vec::new(),
    };
    push_subtree(&mut g, s, None, root_scale, s.comp);
    g
}

fn push_subtree(
    g: &mut FlatGraph,
    s: &Subtree,
    parent: Option<usize>,
    line_scale: i64,
    line_e: Comp,
) -> usize {
    let idx = g.nodes.len();
    g.nodes.push(FlatNode {
        mode: s.mode.clone(),
        comp: s.comp,
        parent,
    });
    g.lines.push(FlatLine {
        scale: line_scale,
        momentum: s.momentum.clone(),
        carries_x: false,
        e: line_e,
    });
    for c in &s.children {
        push_subtree(g, &c.sub, Some(idx), c.scale as i64, c.e);
    }
    idx
}

/// Flattens a cluster fragment; returns the graph and the entered node.
/// Path lines carry the external momentum marker; the exit line is external.
pub fn flatten_fragment(f: &Fragment) -> (FlatGraph, usize) {
    let mut g = FlatGraph {
        nodes: Vec::new(),
        lines: Vec::new(),
    };
    let enter = push_fragment(&mut g, f, None, EXTERNAL_SCALE, f.comp);
    (g, enter)
}

fn push_fragment(
    g: &mut FlatGraph,
    f: &Fragment,
    parent: Option<usize>,
    line_scale: i64,
    line_e: Comp,
) -> usize {
    let idx = g.nodes.len();
    g.nodes.push(FlatNode {
        mode: f.mode.clone(),
        comp: f.comp,
        parent,
    });
    g.lines.push(FlatLine {
        scale: line_scale,
        momentum: f.mode_sum.clone(),
        carries_x: true,
        e: line_e,
    });
    for c in &f.plain_children {
        push_subtree(g, &c.sub, Some(idx), c.scale as i64, c.e);
    }
    match &f.marked {
        None => {
            debug_assert!(f.entered_here);
            idx
        }
        Some(me) => push_fragment(g, &me.frag, Some(idx), me.scale as i64, me.e),
    }
}

fn find(uf: &mut [usize], mut v: usize) -> usize {
    while uf[v] != v {
        uf[v] = uf[uf[v]];
        v = uf[v];
    }
    v
}

/// Finds every self-energy cluster: a maximal constant-scale-bounded
/// component with exactly one entering and one exiting line whose momenta
/// agree. With `path_momentum_exclusion` the plain-rule variant is used:
/// a component is rejected as self-energy if some line on the internal path
/// already carries the entering momentum. `proper_only` drops the hit that
/// covers the whole graph (the fragment itself).
pub fn self_energy_clusters(
    g: &FlatGraph,
    enter_node: Option<usize>,
    path_momentum_exclusion: bool,
    proper_only: bool,
) -> Vec<ClusterHit> {
    let n = g.nodes.len();
    let mut thresholds: BTreeSet<i64> = g
        .lines
        .iter()
        .map(|l| l.scale)
        .filter(|s| *s != EXTERNAL_SCALE)
        .collect();
    thresholds.insert(-1);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut hits = Vec::new();

    for s in thresholds {
        let mut uf: Vec<usize> = (0..n).collect();
        let mut root_included = vec![false; n];
        for v in 0..n {
            if g.lines[v].scale <= s {
                match g.nodes[v].parent {
                    Some(p) => {
                        let (a, b) = (find(&mut uf, v), find(&mut uf, p));
                        uf[a] = b;
                    }
                    None => root_included[v] = true,
                }
            }
        }
        let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..n {
            comps.entry(find(&mut uf, v)).or_default().push(v);
        }
        for (repr, members) in comps {
            let rin = members.iter().any(|v| root_included[*v]);
            if rin {
                continue;
            }
            let mut nodes = members.clone();
            nodes.sort_unstable();
            if proper_only && nodes.len() == n {
                continue;
            }
            if seen.contains(&nodes) {
                continue;
            }
            let inside = |v: usize, uf: &mut [usize]| find(uf, v) == repr;
            // Entering lines: child lines from outside plus the external one.
            let mut entering: Vec<(Vec<i64>, bool, usize)> = Vec::new();
            for v in 0..n {
                if !inside(v, &mut uf) {
                    if let Some(p) = g.nodes[v].parent {
                        if inside(p, &mut uf) {
                            entering.push((
                                g.lines[v].momentum.clone(),
                                g.lines[v].carries_x,
                                p,
                            ));
                        }
                    }
                }
            }
            if let Some(en) = enter_node {
                if inside(en, &mut uf) {
                    let d = g.nodes[0].mode.len();
                    entering.push((vec![0; d], true, en));
                }
            }
            if entering.len() != 1 {
                continue;
            }
            // Exiting line: the top node of the component.
            let top = *members
                .iter()
                .find(|v| match g.nodes[**v].parent {
                    None => true,
                    Some(p) => !inside_check(&mut uf, p, repr),
                })
                .expect("component must have a top node");
            let exit_mom = (&g.lines[top].momentum, g.lines[top].carries_x);
            let (enter_mom, enter_x, enter_head) = &entering[0];
            if exit_mom.0 != enter_mom || exit_mom.1 != *enter_x {
                continue;
            }
            // Internal max scale.
            let mut max_internal = -1i64;
            for v in &members {
                if let Some(p) = g.nodes[*v].parent {
                    if inside_check(&mut uf, p, repr) && inside_check(&mut uf, *v, repr) {
                        max_internal = max_internal.max(g.lines[*v].scale);
                    }
                }
            }
            if path_momentum_exclusion {
                // Walk from the entered head up to the top; every internal
                // line on the way must differ from the entering momentum.
                let mut v = *enter_head;
                let mut clash = false;
                while v != top {
                    if g.lines[v].momentum == *enter_mom && g.lines[v].carries_x == *enter_x {
                        clash = true;
                        break;
                    }
                    v = g.nodes[v].parent.expect("path must reach the top node");
                }
                if clash {
                    continue;
                }
            }
            seen.insert(nodes.clone());
            hits.push(ClusterHit {
                nodes,
                scale: max_internal,
                exit_node: top,
            });
        }
    }
    hits
}

fn inside_check(uf: &mut [usize], v: usize, repr: usize) -> bool {
    find(uf, v) == repr
}

/// Per-line counting data at a concrete value of the external parameter.
#[derive(Clone, Debug)]
pub struct LineStat {
    pub node: usize,
    pub scale: i64,
    pub x_value: f64,
    pub zeta: Option<usize>,
    pub resonant: bool,
    pub psi_nonzero: bool,
}

/// Counting diagnostics: `K` (sum of node-mode l1 norms) and one record per
/// internal line (external lines excluded). `x` is the value of the
/// external-momentum contribution for path lines; pass 0 for plain trees.
pub fn counting(
    g: &FlatGraph,
    scales: &ScaleSystem,
    enter_node: Option<usize>,
    path_momentum_exclusion: bool,
    x: f64,
) -> (usize, Vec<LineStat>) {
    let hits = self_energy_clusters(g, enter_node, path_momentum_exclusion, false);
    let resonant_exits: BTreeSet<usize> = hits.iter().map(|h| h.exit_node).collect();
    let mut out = Vec::new();
    for v in 0..g.nodes.len() {
        let line = &g.lines[v];
        if line.scale == EXTERNAL_SCALE {
            continue;
        }
        let xv = scales.freq().dot(&line.momentum) + if line.carries_x { x } else { 0.0 };
        let zeta = scales
            .admissible_scales(xv)
            .ok()
            .and_then(|v| v.first().copied());
        let psi_nonzero = if line.scale < 0 {
            true
        } else {
            scales
                .big_psi_n(line.scale as usize, xv)
                .map(|p| p != 0.0)
                .unwrap_or(false)
        };
        out.push(LineStat {
            node: v,
            scale: line.scale,
            x_value: xv,
            zeta,
            resonant: resonant_exits.contains(&v),
            psi_nonzero,
        });
    }
    (g.k_norm(), out)
}
