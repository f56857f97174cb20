//! Batch front end: configuration ingestion, command implementations and
//! machine-readable outputs. The binary in `main.rs` is a thin dispatcher
//! over these functions so everything here stays testable in-process.

use crate::error::{Error, Result};
use crate::fourier::{TrigCoeffRecord, TrigPoly};
use crate::jet::Jet2;
use crate::resum::{
    property_monitor, resummed_structure_suite, resummed_symmetry_suite, scaling_exponents,
    ResumParams, ResumState,
};
use crate::series::{compute_series, range_identity_defect, CoeffTable};
use crate::smalldiv::{alpha_m, bryuno_partial, Frequency, ScaleSystem};
use crate::torus::{
    assemble, branch_residual, classify_condition, solve_bifurcation, verify_ode, verify_residual,
    Regime,
};
use crate::trees::checks::{self, CheckResult};
use crate::trees::value::{self_energy_matrix, ClusterValues};
use crate::trees::{Comp, Enumerator, Rules};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Run configuration. Unknown keys are rejected so a stale config never
/// silently changes meaning.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    pub omega: OmegaSpec,
    pub f: Vec<TrigCoeffRecord>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_k_tree")]
    pub k_tree: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    /// Optional slow-phase overrides, one per coupling value; the branch
    /// value is used when absent.
    #[serde(default)]
    pub beta0: Option<Vec<f64>>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_ode_t")]
    pub ode_t: f64,
    #[serde(default = "default_ode_h")]
    pub ode_h: f64,
    #[serde(default)]
    pub regularised: bool,
    #[serde(default)]
    pub convex_sign_flip: bool,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum OmegaSpec {
    Preset(String),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "tol_symmetry")]
    pub symmetry: f64,
    #[serde(default = "tol_cancel")]
    pub cancellation: f64,
    #[serde(default = "tol_mean")]
    pub mean_zero: f64,
    #[serde(default = "tol_partition")]
    pub partition: f64,
    #[serde(default = "tol_oracle")]
    pub oracle: f64,
    #[serde(default = "tol_reexp")]
    pub reexpansion: f64,
    #[serde(default = "tol_resid")]
    pub residual: f64,
    #[serde(default = "tol_branch")]
    pub branch: f64,
    #[serde(default = "tol_decomp")]
    pub decomposition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

fn default_k() -> usize {
    3
}
fn default_k_tree() -> usize {
    3
}
fn default_n_max() -> usize {
    8
}
fn default_m_max() -> usize {
    20
}
fn default_grid() -> usize {
    64
}
fn default_ode_t() -> f64 {
    10.0
}
fn default_ode_h() -> f64 {
    1e-3
}
fn default_budget() -> u64 {
    50_000_000
}
fn tol_symmetry() -> f64 {
    1e-9
}
fn tol_cancel() -> f64 {
    1e-10
}
fn tol_mean() -> f64 {
    1e-12
}
fn tol_partition() -> f64 {
    1e-12
}
fn tol_oracle() -> f64 {
    1e-10
}
fn tol_reexp() -> f64 {
    1e-8
}
fn tol_resid() -> f64 {
    1e-6
}
fn tol_branch() -> f64 {
    1e-12
}
fn tol_decomp() -> f64 {
    1e-8
}

/// Everything a run needs, validated in one pass; construction reports all
/// problems together.
#[derive(Debug)]
pub struct Workspace {
    pub cfg: RunConfig,
    pub f: TrigPoly,
    pub scales: ScaleSystem,
}

impl Workspace {
    pub fn build(cfg: RunConfig) -> Result<Workspace> {
        let mut problems: Vec<String> = Vec::new();
        if cfg.d == 0 || cfg.d > 4 {
            problems.push(format!("d = {} out of the supported range 1..=4", cfg.d));
        }
        if cfg.k == 0 {
            problems.push("k must be at least 1".into());
        }
        if cfg.k_tree > 5 {
            problems.push(format!("k_tree = {} beyond the enumeration budget", cfg.k_tree));
        }
        let omega = match &cfg.omega {
            OmegaSpec::Preset(name) => match name.as_str() {
                "golden2" => vec![1.0, 0.5 * (5.0f64.sqrt() - 1.0)],
                other => {
                    problems.push(format!("unknown omega preset '{other}'"));
                    vec![1.0; cfg.d.max(1)]
                }
            },
            OmegaSpec::Values(v) => v.clone(),
        };
        if omega.len() != cfg.d {
            problems.push(format!(
                "omega has {} entries, d = {}",
                omega.len(),
                cfg.d
            ));
        }
        let f = match TrigPoly::from_records(cfg.d, &cfg.f) {
            Ok(f) => f,
            Err(e) => {
                problems.push(format!("coupling series rejected: {e}"));
                TrigPoly::new(cfg.d.max(1))
            }
        };
        if let Some(b) = &cfg.beta0 {
            if b.len() != cfg.epsilon.len() {
                problems.push(format!(
                    "beta0 overrides: {} entries for {} coupling values",
                    b.len(),
                    cfg.epsilon.len()
                ));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems.join("; ")));
        }
        let freq = Frequency::new(omega, cfg.m_max, cfg.budget)?;
        let scales = ScaleSystem::build(freq, cfg.n_max, cfg.m_max, cfg.budget)?;
        Ok(Workspace { cfg, f, scales })
    }

    fn write_json<T: Serialize>(&self, out: &Path, name: &str, value: &T) -> Result<()> {
        std::fs::create_dir_all(out)?;
        let file = std::fs::File::create(out.join(name))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)?;
        Ok(())
    }
}

/// One pass/fail line for the command summaries.
#[derive(Debug, Clone, Serialize)]
pub struct CommandOutcome {
    pub command: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl CommandOutcome {
    fn new(command: &str, checks: Vec<CheckResult>) -> CommandOutcome {
        let pass = checks.iter().all(|c| c.pass);
        CommandOutcome {
            command: command.into(),
            checks,
            pass,
        }
    }

    pub fn print(&self) {
        for c in &self.checks {
            println!(
                "{} {:<42} [{}] dev {:.3e} tol {:.3e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.context,
                c.max_dev,
                c.tol
            );
        }
    }
}

pub fn cmd_smalldiv(ws: &Workspace, out: &Path) -> Result<CommandOutcome> {
    let freq = ws.scales.freq();
    let m_top = ws.cfg.m_max.min(ws.scales.m_max());
    let mut rows = Vec::new();
    let mut bry = Vec::new();
    for m in 0..=m_top {
        let e = alpha_m(freq, m, ws.cfg.budget)?;
        bry.push(bryuno_partial(freq, m, ws.cfg.budget)?);
        rows.push(serde_json::json!({
            "m": m,
            "alpha": e.value,
            "minimizer": e.minimizer,
            "bryuno_partial": bry[m],
        }));
    }
    let doc = serde_json::json!({
        "omega": freq.omega(),
        "alpha": rows,
        "m_seq": ws.scales.m_seq(),
        "p_seq": ws.scales.p_seq(),
        "halving_failures": ws.scales.halving_failures(),
    });
    ws.write_json(out, "smalldiv.json", &doc)?;
    let mut csv = String::from("m,alpha,bryuno_partial\n");
    for m in 0..=m_top {
        csv.push_str(&format!(
            "{},{:.16e},{:.16e}\n",
            m,
            ws.scales.alpha_table()[m],
            bry[m]
        ));
    }
    std::fs::write(out.join("alpha.csv"), csv)?;

    // partition-of-unity spot check as the command's assertion
    let lo = ws.scales.alpha_scale(ws.scales.n_max() as i64)? / 8.0;
    let hi = ws.scales.alpha_scale(0)?;
    let mut worst = 0.0f64;
    let mut max_live = 0usize;
    for i in 0..2000 {
        let t = i as f64 / 1999.0;
        let x = lo * (hi / lo).powf(t) * if i % 2 == 0 { 1.0 } else { -1.0 };
        worst = worst.max((ws.scales.partition_sum(x)? - 1.0).abs());
        let live = (0..=ws.scales.n_max())
            .filter(|n| ws.scales.big_psi_n(*n, x).unwrap_or(0.0) != 0.0)
            .count();
        max_live = max_live.max(live);
    }
    let checks = vec![
        CheckResult::new(
            "cutoff_partition_of_unity",
            "2000 samples".into(),
            worst,
            ws.cfg.tolerances.partition,
        ),
        CheckResult::new(
            "at_most_two_live_scales",
            format!("max {max_live}"),
            (max_live.saturating_sub(2)) as f64,
            0.0,
        ),
    ];
    Ok(CommandOutcome::new("smalldiv", checks))
}

pub fn cmd_series(ws: &Workspace, out: &Path) -> Result<(CoeffTable, CommandOutcome)> {
    let table = compute_series(&ws.f, ws.scales.freq(), ws.cfg.k)?;
    ws.write_json(out, "coeff_table.json", &table.to_json())?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    std::fs::write(out.join("coeff_table.csv"), &buf)?;
    let zm: Vec<serde_json::Value> = (0..=ws.cfg.k)
        .map(|kk| {
            let g = table.zero_mode_beta(kk);
            let za = table.zero_mode_alpha(kk);
            serde_json::json!({
                "k": kk,
                "slow_norm": g.norm_inf(),
                "slow_mean": g.coeff(0).norm(),
                "fast_norms": za.iter().map(|p| p.norm_inf()).collect::<Vec<f64>>(),
                "order_scale": table.order_scale(kk),
            })
        })
        .collect();
    ws.write_json(out, "zero_modes.json", &zm)?;

    let mut checks = vec![CheckResult::new(
        "range_identity",
        format!("k <= {}", ws.cfg.k),
        range_identity_defect(&table, ws.scales.freq()),
        1e-12,
    )];
    for kk in 0..=ws.cfg.k {
        let za = table.zero_mode_alpha(kk);
        let dev = za.iter().map(|p| p.norm_inf()).fold(0.0, f64::max);
        checks.push(CheckResult::new(
            "fast_zero_mode_cancellation",
            format!("k={kk}"),
            dev / table.order_scale(kk),
            ws.cfg.tolerances.cancellation,
        ));
        checks.push(CheckResult::new(
            "bifurcation_mean_zero",
            format!("k={kk}"),
            table.zero_mode_beta(kk).coeff(0).norm() / table.order_scale(kk),
            ws.cfg.tolerances.mean_zero,
        ));
    }
    Ok((table, CommandOutcome::new("series", checks)))
}

/// The identity battery on trees and self-energies at the configured sizes.
pub fn cmd_verify_lemmas(ws: &Workspace, out: &Path) -> Result<CommandOutcome> {
    let table = compute_series(&ws.f, ws.scales.freq(), ws.cfg.k.max(ws.cfg.k_tree))?;
    let en = Enumerator::new(&ws.scales, ws.f.alpha_modes(), Rules::plain(), ws.cfg.budget);
    let tv = crate::trees::value::TreeValues::new(&en, &ws.f);
    let mut checks: Vec<CheckResult> = Vec::new();

    // tree sums against the recursion
    let mut worst_oracle = 0.0f64;
    let betas = [0.3, 1.0, 1.7, 2.4, 3.1, 3.8, 4.5, 5.2];
    for k in 1..=ws.cfg.k_tree.min(3) {
        for nu in table.modes_at_order(k) {
            let l1: i64 = nu.iter().map(|x| x.abs()).sum();
            if l1 > 3 {
                continue;
            }
            let b = table.b(k, &nu).unwrap();
            let sum = tv.sum_range(k, &nu, Comp::Beta)?;
            for b0 in betas {
                let dev = (sum.eval(b0) - b.eval(b0)).norm();
                worst_oracle = worst_oracle.max(dev / table.order_scale(k));
            }
        }
    }
    checks.push(CheckResult::new(
        "tree_sum_matches_recursion",
        format!("k <= {}", ws.cfg.k_tree.min(3)),
        worst_oracle,
        ws.cfg.tolerances.oracle,
    ));

    let ev = ClusterValues::new(&en, &ws.f, 0.8);
    let xs = checks::sample_points(&en, 20)?;
    for k in 1..=ws.cfg.k_tree.min(3) {
        for n in -1..=4i64 {
            checks.extend(checks::symmetry_suite(&ev, k, n, &xs, ws.cfg.tolerances.symmetry)?);
            checks.extend(checks::slope_suite(&ev, k, n, ws.cfg.tolerances.symmetry)?);
        }
        checks.extend(checks::zero_mode_derivative_suite(
            &ev,
            &table,
            k,
            ws.cfg.tolerances.symmetry,
        )?);
        checks.push(checks::decomposition_suite(
            &ev,
            k,
            &[xs[2], xs[5]],
            ws.cfg.tolerances.decomposition,
        )?);
    }
    let (tree_count, _) = checks::tree_counting_suite(&ev, ws.cfg.k_tree.min(3), 1e-14)?;
    checks.push(tree_count);
    let (cl_count, _) =
        checks::cluster_counting_suite(&ev, ws.cfg.k_tree.min(3), 4, &xs[..8], 1e-14)?;
    checks.push(cl_count);

    // optional slope identity: reported, never asserted
    let reports: Vec<_> = (1..=ws.cfg.k_tree.min(3))
        .map(|k| checks::slope_identity_report(&ev, &table, k))
        .collect::<Result<Vec<_>>>()?;
    ws.write_json(out, "slope_identity.json", &reports)?;

    let outcome = CommandOutcome::new("verify-lemmas", checks);
    ws.write_json(out, "lemma_report.json", &outcome)?;
    Ok(outcome)
}

pub fn cmd_self_energy(ws: &Workspace, out: &Path) -> Result<CommandOutcome> {
    let en = Enumerator::new(&ws.scales, ws.f.alpha_modes(), Rules::plain(), ws.cfg.budget);
    let ev = ClusterValues::new(&en, &ws.f, 0.8);
    let xs = checks::sample_points(&en, 12)?;
    let mut dump = Vec::new();
    for k in 1..=ws.cfg.k_tree.min(3) {
        for n in -1..=4i64 {
            for &x in &xs {
                let m = self_energy_matrix(&ev, k, n, Jet2::variable(x), ws.scales.n_max())?;
                let entries: Vec<serde_json::Value> = m
                    .a
                    .iter()
                    .map(|j| {
                        serde_json::json!({
                            "re": j.v.re, "im": j.v.im,
                            "d1_re": j.d1.re, "d1_im": j.d1.im,
                            "d2_re": j.d2.re, "d2_im": j.d2.im,
                        })
                    })
                    .collect();
                dump.push(serde_json::json!({
                    "k": k, "n": n, "x": x, "entries": entries,
                }));
            }
        }
    }
    ws.write_json(out, "self_energy.json", &dump)?;
    Ok(CommandOutcome::new(
        "self-energy",
        vec![CheckResult::new(
            "matrix_samples_written",
            format!("{} rows", dump.len()),
            0.0,
            1.0,
        )],
    ))
}

pub fn cmd_bifurcation(ws: &Workspace, out: &Path) -> Result<CommandOutcome> {
    let table = compute_series(&ws.f, ws.scales.freq(), ws.cfg.k)?;
    let regime = classify_condition(&table, &[], &[], 1e-10);
    let mut checks = Vec::new();
    let mut doc = serde_json::json!({ "regime": regime });
    if let Regime::Condition2 { k0 } = regime {
        let res = solve_bifurcation(&table, k0, 2048, &ws.cfg.epsilon)?;
        let mut worst = 0.0f64;
        for b in &res.branches {
            for (eps, beta) in &b.samples {
                worst = worst.max(branch_residual(&table, k0, *eps, *beta));
            }
        }
        checks.push(CheckResult::new(
            "branch_residual",
            format!("{} branches", res.branches.len()),
            worst,
            ws.cfg.tolerances.branch,
        ));
        let mut csv = String::from("root_index,sigma,eps,beta0\n");
        for b in &res.branches {
            for (eps, beta) in &b.samples {
                csv.push_str(&format!(
                    "{},{},{:.16e},{:.16e}\n",
                    b.root_index, b.sigma, eps, beta
                ));
            }
        }
        std::fs::write(out.join("branches.csv"), csv)?;
        doc = serde_json::json!({ "regime": regime, "result": res });
    }
    ws.write_json(out, "bifurcation.json", &doc)?;
    Ok(CommandOutcome::new("bifurcation", checks))
}

pub fn cmd_torus(ws: &Workspace, out: &Path) -> Result<CommandOutcome> {
    let table = compute_series(&ws.f, ws.scales.freq(), ws.cfg.k)?;
    let regime = classify_condition(&table, &[], &[], 1e-10);
    let mut checks = Vec::new();
    let mut entries = Vec::new();
    for (i, &eps) in ws.cfg.epsilon.iter().enumerate() {
        let beta0 = if let Some(overrides) = &ws.cfg.beta0 {
            overrides[i]
        } else if let Regime::Condition2 { k0 } = regime {
            let res = solve_bifurcation(&table, k0, 2048, &[eps])?;
            let sample = res
                .branches
                .iter()
                .flat_map(|b| b.samples.iter())
                .find(|(e, _)| *e == eps);
            match sample {
                Some((_, b)) => *b,
                None => {
                    return Err(Error::Config(format!(
                        "no branch reaches coupling {eps}; provide a beta0 override"
                    )))
                }
            }
        } else {
            0.0
        };
        let sol = assemble(&table, ws.scales.freq(), eps, beta0, ws.cfg.k);
        let res = verify_residual(&sol, &ws.f, ws.cfg.grid);
        let ode = verify_ode(&sol, &ws.f, ws.cfg.ode_t, ws.cfg.ode_h, &vec![0.0; ws.cfg.d]);
        checks.push(CheckResult::new(
            "range_residual",
            format!("eps={eps:.3e}"),
            res.r_range,
            ws.cfg.tolerances.residual,
        ));
        entries.push(serde_json::json!({
            "eps": eps,
            "beta0": beta0,
            "regime": regime,
            "residuals": res,
            "ode": ode,
        }));
    }
    ws.write_json(out, "torus.json", &entries)?;
    Ok(CommandOutcome::new("torus", checks))
}

/// The full assertion battery: every suite the other commands run, plus the
/// resummed symmetry/structure checks, the re-expansion oracle and the
/// switch chain.
pub fn cmd_verify(ws: &Workspace, out: &Path) -> Result<CommandOutcome> {
    let mut checks = Vec::new();
    checks.extend(cmd_smalldiv(ws, out)?.checks);
    let (table, series_out) = cmd_series(ws, out)?;
    checks.extend(series_out.checks);
    checks.extend(cmd_verify_lemmas(ws, out)?.checks);
    checks.extend(cmd_bifurcation(ws, out)?.checks);

    // resummed side
    let k_res = ws.cfg.k.min(3);
    let en = Enumerator::new(
        &ws.scales,
        ws.f.alpha_modes(),
        Rules::renormalised(),
        ws.cfg.budget,
    );
    let regime = classify_condition(&table, &[], &[], 1e-10);
    let k0 = match regime {
        Regime::Condition2 { k0 } => k0,
        _ => 0,
    };
    let eps_probe = ws.cfg.epsilon.first().copied().unwrap_or(1e-3);
    let beta_probe = match regime {
        Regime::Condition2 { k0 } => {
            let res = solve_bifurcation(&table, k0, 2048, &[eps_probe])?;
            res.branches
                .iter()
                .flat_map(|b| b.samples.iter())
                .find(|(e, _)| *e == eps_probe)
                .map(|(_, b)| *b)
                .unwrap_or(0.0)
        }
        _ => 0.0,
    };
    let st = ResumState::new(
        &en,
        &ws.f,
        ResumParams {
            k_eps: k_res,
            n_max: ws.cfg.n_max,
            k0,
            eps: eps_probe,
            beta0: beta_probe,
            convex_sign_flip: ws.cfg.convex_sign_flip,
        },
    );
    let xs = checks::sample_points(&en, 20)?;
    for n in -1..=4i64 {
        checks.extend(resummed_symmetry_suite(&st, n, &xs, ws.cfg.tolerances.symmetry)?);
        checks.extend(resummed_structure_suite(&st, n, ws.cfg.tolerances.symmetry)?);
    }
    let (det_check, events) = property_monitor(&st, 2, &xs, eps_probe, 4.0, 1e-9)?;
    checks.push(det_check);
    ws.write_json(out, "property_events.json", &events)?;
    let (fast_slope, cross_slope) = scaling_exponents(
        &st,
        4,
        &(0..12)
            .map(|i| 1e-3 * 10f64.powf(i as f64 / 11.0))
            .collect::<Vec<f64>>(),
    )?;
    checks.push(CheckResult::new(
        "fast_block_quadratic_gain",
        format!("slope {fast_slope:.2}"),
        if fast_slope.is_finite() { (1.9 - fast_slope).max(0.0) } else { 0.0 },
        0.0,
    ));
    checks.push(CheckResult::new(
        "cross_block_linear_gain",
        format!("slope {cross_slope:.2}"),
        if cross_slope.is_finite() { (0.9 - cross_slope).max(0.0) } else { 0.0 },
        0.0,
    ));

    // re-expansion oracle on a sample of modes
    let mut worst = 0.0f64;
    for nu in table.modes_at_order(1) {
        let total = st.resummed_range_total(&nu, Comp::Beta)?;
        for k in 1..=k_res {
            let plain = table
                .b(k, &nu)
                .map(|p| p.eval(beta_probe))
                .unwrap_or_default();
            worst = worst.max((total.c[k].v - plain).norm() / table.order_scale(k));
        }
    }
    checks.push(CheckResult::new(
        "reexpansion_matches_plain",
        format!("k <= {k_res}"),
        worst,
        ws.cfg.tolerances.reexpansion,
    ));

    // switch chain at the branch point
    if ws.cfg.regularised {
        let mut worst_xi = 0.0f64;
        for n in 0..=ws.cfg.n_max as i64 {
            worst_xi = worst_xi.max((st.xi_at(n - 1)? - 1.0).abs());
        }
        checks.push(CheckResult::new(
            "switch_chain_identity",
            format!("n <= {}", ws.cfg.n_max),
            worst_xi,
            0.0,
        ));
    }

    checks.extend(cmd_torus(ws, out)?.checks);
    let outcome = CommandOutcome::new("verify", checks);
    ws.write_json(out, "verify.json", &outcome)?;
    Ok(outcome)
}

/// Machine-readable failure report for nonzero exits.
pub fn write_error_report(out: &Path, err: &Error) {
    let doc = serde_json::json!({
        "error": format!("{err}"),
    });
    let _ = std::fs::create_dir_all(out);
    if let Ok(file) = std::fs::File::create(out.join("error.json")) {
        let _ = serde_json::to_writer_pretty(file, &doc);
    }
    let _ = writeln!(std::io::stderr(), "{}", serde_json::to_string(&doc).unwrap());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_config() -> RunConfig {
        serde_json::from_value(serde_json::json!({
            "d": 2,
            "omega": "golden2",
            "f": [
                {"nu": [1, 0], "m": 1, "re": 0.5, "im": 0.0},
                {"nu": [-1, 0], "m": -1, "re": 0.5, "im": 0.0},
                {"nu": [0, 1], "m": 0, "re": 0.5, "im": 0.0},
                {"nu": [0, -1], "m": 0, "re": 0.5, "im": 0.0},
                {"nu": [0, 0], "m": 1, "re": 0.5, "im": 0.0},
                {"nu": [0, 0], "m": -1, "re": 0.5, "im": 0.0}
            ],
            "k": 3,
            "m_max": 16,
            "epsilon": [1e-3]
        }))
        .unwrap()
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let r: std::result::Result<RunConfig, _> = serde_json::from_value(serde_json::json!({
            "d": 2, "omega": "golden2", "f": [], "bogus": 1
        }));
        assert!(r.is_err());
    }

    #[test]
    fn config_aggregates_problems() {
        let cfg: RunConfig = serde_json::from_value(serde_json::json!({
            "d": 9,
            "omega": [1.0],
            "f": [{"nu": [1], "m": 0, "re": 1.0, "im": 0.0}],
            "k": 0
        }))
        .unwrap();
        let err = match Workspace::build(cfg) {
            Err(e) => e,
            Ok(_) => panic!("expected aggregated config error"),
        };
        let msg = format!("{err}");
        assert!(msg.contains("d = 9"), "{msg}");
        assert!(msg.contains("k must be"), "{msg}");
        assert!(msg.contains("omega has"), "{msg}");
    }

    #[test]
    fn smalldiv_command_runs() {
        let ws = Workspace::build(standard_config()).unwrap();
        let dir = std::env::temp_dir().join("lindstedt_cli_test_smalldiv");
        let outcome = cmd_smalldiv(&ws, &dir).unwrap();
        assert!(outcome.pass);
        assert!(dir.join("smalldiv.json").exists());
        assert!(dir.join("alpha.csv").exists());
        // golden-pair values at the first two table rows
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("smalldiv.json")).unwrap())
                .unwrap();
        let a0 = doc["alpha"][0]["alpha"].as_f64().unwrap();
        let a1 = doc["alpha"][1]["alpha"].as_f64().unwrap();
        let g = 0.5 * (5.0f64.sqrt() - 1.0);
        assert!((a0 - g).abs() < 1e-12);
        assert!((a1 - (1.0 - g)).abs() < 1e-12);
    }

    #[test]
    fn series_roundtrip_is_exact() {
        let ws = Workspace::build(standard_config()).unwrap();
        let dir = std::env::temp_dir().join("lindstedt_cli_test_series");
        let (table, outcome) = cmd_series(&ws, &dir).unwrap();
        assert!(outcome.pass);
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("coeff_table.json")).unwrap())
                .unwrap();
        let rows = doc["entries"].as_array().unwrap();
        let reference = table.csv_rows();
        assert_eq!(rows.len(), reference.len());
        for (row, (k, nu, h, m, re, im)) in rows.iter().zip(&reference) {
            assert_eq!(row["k"].as_u64().unwrap() as usize, *k);
            let nu_json: Vec<i64> = row["nu"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_i64().unwrap())
                .collect();
            assert_eq!(&nu_json, nu);
            assert_eq!(row["h"].as_str().unwrap(), h);
            assert_eq!(row["m"].as_i64().unwrap(), *m);
            // bit-exact float round trip
            assert_eq!(row["re"].as_f64().unwrap().to_bits(), re.to_bits());
            assert_eq!(row["im"].as_f64().unwrap().to_bits(), im.to_bits());
        }
    }

    #[test]
    fn torus_command_meets_residual_tolerance() {
        let ws = Workspace::build(standard_config()).unwrap();
        let dir = std::env::temp_dir().join("lindstedt_cli_test_torus");
        let outcome = cmd_torus(&ws, &dir).unwrap();
        assert!(outcome.pass, "{:?}", outcome.checks);
    }
}
