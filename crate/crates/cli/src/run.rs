use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use entperc_core::analytic::{self, giant_s, giant_s_tilde, solve_u, solve_u_tilde};
use entperc_core::generators::save_edge_list;
use entperc_core::links::phi2_of_phi1;
use entperc_core::qswap::{apply_qswaps, eta_rand_for_model};
use entperc_core::rng::{purpose, replica_stream};
use entperc_core::sim::{fidelity_replica_scan, limited_replica_scan, threshold_scan};
use entperc_core::{DegreeModel, Error, GeneratorKind, SweepResult};
use serde_json::{json, Value};

use crate::config::{EtaSource, ExperimentConfig, ExperimentKind};
use crate::error::CliError;
use crate::output::{create_dir, write_file, Cell, Manifest, Table};

pub const SCAN_COLUMNS: &[&str] = &[
    "model",
    "N",
    "seed",
    "phi_or_F",
    "l",
    "S",
    "s_avg",
    "s_l_over_N",
    "stderr",
];
pub const ANALYTIC_COLUMNS: &[&str] = &["quantity", "phi1", "l", "value", "iterations", "residual"];
pub const COMPARE_COLUMNS: &[&str] = &["phi1", "S_analytic", "S_sim", "stderr", "abs_diff"];
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
    pub results: Value,
}

struct Outputs<'a> {
    dir: &'a Path,
    names: Vec<String>,
}

impl Outputs<'_> {
    fn table(&mut self, name: &str, t: &Table) -> Result<(), CliError> {
        t.write(&self.dir.join(name))?;
        self.names.push(name.to_string());
        Ok(())
    }
}

/// Runs `cfg`, writing its tables and a manifest into `out_dir`.
pub fn run(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    config_path: Option<&Path>,
) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    create_dir(out_dir)?;
    let mut out = Outputs {
        dir: out_dir,
        names: Vec::new(),
    };
    let results = match cfg.kind {
        ExperimentKind::Generate => generate(cfg, &mut out)?,
        ExperimentKind::Percolate | ExperimentKind::QswapScan => percolate(cfg, &mut out)?,
        ExperimentKind::LimitedScan | ExperimentKind::FidelityScan => limited(cfg, &mut out)?,
        ExperimentKind::AnalyticTable => analytic_table(cfg, &mut out)?,
        ExperimentKind::Compare => compare(cfg, &mut out)?,
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        kind: cfg.kind.name(),
        seed: cfg.seed,
        config_path: config_path.map(Path::to_path_buf),
        config: cfg.raw.clone(),
        outputs: out.names.clone(),
        threads: rayon::current_num_threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
        results: results.clone(),
    };
    write_file(
        &out_dir.join(MANIFEST),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        outputs: out.names,
        results,
    })
}

fn generate(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let mut g = cfg.generator.generate(0)?;
    let mut eta = BTreeMap::new();
    if !cfg.strategy.is_empty() {
        let mut rng = replica_stream(cfg.seed, purpose::SWAP, 0);
        let (swapped, report) = apply_qswaps(&g, &cfg.strategy, &mut rng)?;
        g = swapped;
        eta = report.etas();
    }
    let name = "graph.edges";
    save_edge_list(&g, &out.dir.join(name))?;
    out.names.push(name.into());
    Ok(json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "eta": eta,
    }))
}

fn scan_row(t: &mut Table, cfg: &ExperimentConfig, n: usize, cells: [Cell; 6]) {
    let mut row: Vec<Cell> = vec![cfg.generator.label().into(), n.into(), cfg.seed.into()];
    row.extend(cells);
    t.row(row);
}

fn eta_json(r: &SweepResult) -> Value {
    r.eta
        .iter()
        .map(|(q, e)| (q.to_string(), json!({"mean": e.mean, "stderr": e.stderr})))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

/// `stderr` is that of `S` here.
fn percolate(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let strategy = (cfg.kind == ExperimentKind::QswapScan).then_some(&cfg.strategy);
    let r = threshold_scan(&cfg.generator, strategy, &cfg.sweep)?;
    let mut t = Table::new(SCAN_COLUMNS);
    for p in &r.points {
        let giant = p.giant.expect("threshold scans measure S");
        let avg = p.avg_finite.expect("threshold scans measure <s>");
        scan_row(
            &mut t,
            cfg,
            r.n,
            [
                p.phi_or_f.into(),
                Cell::Empty,
                giant.mean.into(),
                avg.mean.into(),
                Cell::Empty,
                giant.stderr.into(),
            ],
        );
    }
    out.table("scan.csv", &t)?;
    Ok(json!({
        "susceptibility_peak": r.threshold.map(|t| t.susceptibility_peak),
        "s_onset": r.threshold.and_then(|t| t.s_onset),
        "eta": eta_json(&r),
    }))
}

/// `stderr` is that of `s_l / N`; an unlimited budget is written as `inf`.
fn limited(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let r = if cfg.kind == ExperimentKind::LimitedScan {
        limited_replica_scan(&cfg.generator, &cfg.sweep)?
    } else {
        fidelity_replica_scan(&cfg.generator, &cfg.sweep)?
    };
    let mut t = Table::new(SCAN_COLUMNS);
    for p in &r.points {
        let e = p.s_l_over_n.expect("limited scans measure s_l");
        let l: Cell = match p.l {
            Some(l) => l.into(),
            None => "inf".into(),
        };
        scan_row(
            &mut t,
            cfg,
            r.n,
            [
                p.phi_or_f.into(),
                l,
                Cell::Empty,
                Cell::Empty,
                e.mean.into(),
                e.stderr.into(),
            ],
        );
    }
    out.table("scan.csv", &t)?;
    let mut h = Table::new(&["l", "count"]);
    if let Some(hist) = &r.histogram {
        for (l, &c) in hist.counts.iter().enumerate().skip(1) {
            h.row(vec![l.into(), c.into()]);
        }
    }
    out.table("histogram.csv", &h)?;
    Ok(json!({
        "l_av": r.l_av,
        "sources": r.histogram.as_ref().map(|h| h.sources),
    }))
}

/// Degree distribution behind the analytic columns: the generator's own
/// model where it has one, otherwise the histogram of replica 0.
fn analytic_model(cfg: &ExperimentConfig) -> Result<DegreeModel, CliError> {
    Ok(match &cfg.generator.kind {
        GeneratorKind::Er { z } => DegreeModel::poisson(*z)?,
        GeneratorKind::RandomRegular { k } => DegreeModel::delta(*k)?,
        GeneratorKind::ConfigModel(m) => m.clone(),
        GeneratorKind::Honeycomb { .. } => DegreeModel::delta(3)?,
        _ => DegreeModel::from_graph(&cfg.generator.generate(0)?)?,
    })
}

fn eta_map(
    cfg: &ExperimentConfig,
    m: &DegreeModel,
    measured: Option<&SweepResult>,
) -> Result<BTreeMap<usize, f64>, CliError> {
    Ok(match (&cfg.eta, measured) {
        (EtaSource::Fixed(e), _) => e.clone(),
        (EtaSource::Default, Some(r)) => r.eta.iter().map(|(q, e)| (*q, e.mean)).collect(),
        _ => eta_rand_for_model(m, &cfg.strategy)?,
    })
}

fn analytic_table(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let m = analytic_model(cfg)?;
    let swapped = !cfg.strategy.is_empty();
    let eta = if swapped {
        eta_map(cfg, &m, None)?
    } else {
        BTreeMap::new()
    };
    let mut t = Table::new(ANALYTIC_COLUMNS);
    let mut row = |q: &str,
                   phi1: Option<f64>,
                   l: Option<usize>,
                   v: f64,
                   it: Option<usize>,
                   res: Option<f64>| {
        t.row(vec![
            q.into(),
            phi1.into(),
            l.into(),
            v.into(),
            it.into(),
            res.into(),
        ]);
    };
    let s_tilde_at_one = if swapped {
        Some(giant_s_tilde(1.0, &m, &cfg.strategy, &eta)?)
    } else {
        None
    };
    let s_at_one = giant_s(1.0, &m)?;
    for &phi1 in &cfg.sweep.grid {
        let phi2 = phi2_of_phi1(phi1)?;
        row("phi2", Some(phi1), None, phi2, None, None);
        let u = solve_u(phi2, &m)?;
        row(
            "S",
            Some(phi1),
            None,
            giant_s(phi2, &m)?,
            Some(u.iterations),
            Some(u.residual),
        );
        if let Some(st1) = s_tilde_at_one {
            let ut = solve_u_tilde(phi1, &m, &cfg.strategy)?;
            let st = giant_s_tilde(phi1, &m, &cfg.strategy, &eta)?;
            row(
                "S_tilde",
                Some(phi1),
                None,
                st,
                Some(ut.iterations),
                Some(ut.residual),
            );
            if st1 > 0.0 {
                row(
                    "S_hat",
                    Some(phi1),
                    None,
                    analytic::s_hat(st, s_at_one, st1)?,
                    None,
                    None,
                );
            }
        }
    }
    let mut results = serde_json::Map::new();
    let threshold = |s| match analytic::find_threshold(&m, s) {
        Ok(t) => Ok(Some(t.phi_star)),
        Err(Error::NoTransition) => Ok(None),
        Err(e) => Err(e),
    };
    let classical = threshold(None)?;
    if let Some(c) = classical {
        row("phi1_star", None, None, c, None, None);
    }
    results.insert("phi1_star".into(), json!(classical));
    if swapped {
        let sw = threshold(Some(&cfg.strategy))?;
        if let Some(s) = sw {
            row("phi1_star_swapped", None, None, s, None, None);
        }
        if let (Some(c), Some(s)) = (classical, sw) {
            let g = analytic::gain(c, s)?;
            row("gain_signed", None, None, g.signed, None, None);
            row("gain", None, None, g.magnitude, None, None);
        }
        results.insert("phi1_star_swapped".into(), json!(sw));
        results.insert("eta".into(), json!(eta));
    }
    if let Some(q_max) = cfg.q_max {
        match analytic::optimal_strategy(&m, q_max) {
            Ok(o) => {
                row(
                    "optimal_phi1_star",
                    None,
                    None,
                    o.swapped.phi_star,
                    None,
                    None,
                );
                row("optimal_gain", None, None, o.gain.magnitude, None, None);
                results.insert("optimal_degrees".into(), json!(o.strategy.degrees()));
            }
            Err(Error::NoTransition) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(&l_max) = cfg.sweep.l_values.last() {
        let ws = match cfg.generator.kind {
            GeneratorKind::WattsStrogatz { beta } => Some(analytic::ws_limited_avg(beta, l_max)?),
            _ => None,
        };
        for &l in &cfg.sweep.l_values {
            let v = ws
                .as_ref()
                .map_or_else(|| analytic::limited_avg_size(&m, l), |w| w[l]);
            row("s_l", None, Some(l), v, None, None);
        }
    }
    out.table("analytic.csv", &t)?;
    Ok(results.into())
}

fn compare(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let m = analytic_model(cfg)?;
    let swapped = !cfg.strategy.is_empty();
    let r = threshold_scan(&cfg.generator, swapped.then_some(&cfg.strategy), &cfg.sweep)?;
    let eta = if swapped {
        eta_map(cfg, &m, Some(&r))?
    } else {
        BTreeMap::new()
    };
    let mut t = Table::new(COMPARE_COLUMNS);
    let mut max_diff = 0.0f64;
    for p in &r.points {
        let phi1 = p.phi_or_f.expect("threshold scans carry phi1");
        let sim = p.giant.expect("threshold scans measure S");
        let an = if swapped {
            giant_s_tilde(phi1, &m, &cfg.strategy, &eta)?
        } else {
            giant_s(phi2_of_phi1(phi1)?, &m)?
        };
        let diff = (an - sim.mean).abs();
        max_diff = max_diff.max(diff);
        t.row(vec![
            phi1.into(),
            an.into(),
            sim.mean.into(),
            sim.stderr.into(),
            diff.into(),
        ]);
    }
    out.table("compare.csv", &t)?;
    Ok(json!({
        "max_abs_diff": max_diff,
        "eta": eta,
        "eta_measured": eta_json(&r),
        "susceptibility_peak": r.threshold.map(|t| t.susceptibility_peak),
    }))
}
