use std::path::Path;
use std::process::Command;

use entperc_cli::config::{self, parse, ExperimentKind};
use entperc_cli::run;
use entperc_core::generators::load_edge_list;
use entperc_core::{EdgeListOptions, GeneratorKind};

const COMPARE: &str = "\
[experiment]
kind = compare
seed = 21

[generator]
model = er
n = 20000
z = 2.5

[strategy]
q = 2, 3
pi = 1, 1

[sweep]
phi_range = 0.02, 1.0, 50
replicas = 2
";

fn keys(text: &str) -> Vec<String> {
    parse(text, Path::new("."), None)
        .err()
        .unwrap_or_default()
        .into_iter()
        .map(|v| v.key)
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn valid_config_has_no_violations() {
    assert!(keys(COMPARE).is_empty());
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "c.ini", COMPARE);
    assert!(config::validate(&path, None).is_empty());
}

#[test]
fn range_violations_name_their_key() {
    let ws =
        "[experiment]\nkind = generate\nseed = 1\n[generator]\nmodel = ws\nn = 100\nbeta = 1.5\n";
    assert_eq!(keys(ws), vec!["generator.beta"]);
    let q1 = COMPARE.replace("q = 2, 3\npi = 1, 1", "q = 1\npi = 0.5");
    assert_eq!(keys(&q1), vec!["strategy.q"]);
    let bad_f = "[experiment]\nkind = fidelity_scan\nseed = 1\n[generator]\nmodel = er\nn = 100\nz = 2\n[sweep]\nf = 0.4, 0.9\nf_min = 1.2\n";
    assert_eq!(keys(bad_f), vec!["sweep.f_min", "sweep.f"]);
    let no_grid = COMPARE.replace("phi_range = 0.02, 1.0, 50\n", "");
    assert_eq!(keys(&no_grid), vec!["sweep.phi"]);
}

#[test]
fn missing_seed_is_reported_and_overridable() {
    let text = COMPARE.replace("seed = 21\n", "");
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "c.ini", &text);
    let err = config::load(&path, None).unwrap_err();
    assert_eq!(err.keys(), vec!["experiment.seed"]);
    assert!(err.to_string().contains("seed"));
    let cfg = config::load(&path, Some(99)).unwrap();
    assert_eq!(cfg.seed, 99);
    assert_eq!(cfg.kind, ExperimentKind::Compare);
}

#[test]
fn compare_reports_both_columns_and_max_difference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse(COMPARE, dir.path(), None).unwrap();
    let summary = run(&cfg, dir.path(), None).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "phi1,S_analytic,S_sim,stderr,abs_diff"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    let max = rows.iter().map(|r| r[4]).fold(0.0, f64::max);
    assert_eq!(summary.results["max_abs_diff"].as_f64().unwrap(), max);
    for r in &rows {
        assert!((r[1] - r[2]).abs() - r[4] < 1e-15);
    }
    // far above threshold both sides saturate towards the same giant
    let last = rows.last().unwrap();
    assert!(last[4] < 0.02, "{last:?}");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 21);
    assert_eq!(manifest["config"].as_str().unwrap(), COMPARE);
}

#[test]
fn generated_edge_list_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        "[experiment]\nkind = generate\nseed = 5\n[generator]\nmodel = ws\nn = 10000\nbeta = 0.2\n";
    let cfg = parse(text, dir.path(), None).unwrap();
    run(&cfg, dir.path(), None).unwrap();
    let loaded = load_edge_list(&EdgeListOptions {
        path: dir.path().join("graph.edges"),
        bidirectional_only: false,
        degree_cutoff: None,
    })
    .unwrap();
    assert_eq!(loaded.graph, cfg.generator.generate(0).unwrap());

    let reread = "[experiment]\nkind = limited_scan\nseed = 5\n[generator]\nmodel = edgelist\npath = graph.edges\n[sweep]\nl = 0, 1\nsource_sample = 10\n";
    let cfg = parse(reread, dir.path(), None).unwrap();
    assert!(matches!(cfg.generator.kind, GeneratorKind::EdgeList(_)));
    let out = dir.path().join("scan");
    run(&cfg, &out, None).unwrap();
    let scan = std::fs::read_to_string(out.join("scan.csv")).unwrap();
    assert!(
        scan.lines().nth(1).unwrap().contains(",0,,,1e-4,0e0"),
        "{scan}"
    );
}

#[test]
fn analytic_table_lists_thresholds() {
    let text = "[experiment]\nkind = analytic_table\nseed = 0\n[generator]\nmodel = er\nn = 1000\nz = 2.5\n[strategy]\nq = 2\n[sweep]\nphi = 0.5\nl = 2\n";
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse(text, dir.path(), None).unwrap();
    let summary = run(&cfg, dir.path(), None).unwrap();
    let star = summary.results["phi1_star"].as_f64().unwrap();
    assert!((star - (2.0 - 3.2f64.sqrt())).abs() < 1e-8);
    let csv = std::fs::read_to_string(dir.path().join("analytic.csv")).unwrap();
    assert!(csv.contains("s_l,,2,9.75e0,,"), "{csv}");
    assert!(csv.lines().any(|l| l.starts_with("S_tilde,5e-1,")));
}

#[test]
fn reruns_are_byte_identical() {
    let text = "[experiment]\nkind = qswap_scan\nseed = 4\n[generator]\nmodel = regular\nn = 4000\nk = 3\n[strategy]\nq = 3\n[sweep]\nphi_range = 0.1, 0.5, 9\nreplicas = 3\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = parse(text, a.path(), None).unwrap();
    run(&cfg, a.path(), None).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(2)
        .build()
        .unwrap();
    pool.install(|| run(&cfg, b.path(), None)).unwrap();
    let read = |d: &Path| std::fs::read(d.join("scan.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn binary_validates_and_runs() {
    let exe = env!("CARGO_BIN_EXE_entperc");
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.ini",
        "[experiment]\nkind = percolate\n[generator]\nmodel = er\nn = 500\nz = 3\n[sweep]\nphi = 0.2, 0.8\n",
    );
    let bad = write(
        dir.path(),
        "bad.ini",
        "[experiment]\nkind = percolate\nseed = x\n",
    );

    let out = Command::new(exe)
        .args(["validate", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("experiment.seed"), "{report}");
    assert!(report.contains("generator.model"), "{report}");

    let out = Command::new(exe)
        .args(["validate", "--config"])
        .arg(&good)
        .output()
        .unwrap();
    assert!(!out.status.success(), "seed is mandatory");
    let out = Command::new(exe)
        .args(["validate", "--seed", "3", "--config"])
        .arg(&good)
        .output()
        .unwrap();
    assert!(out.status.success());

    let target = dir.path().join("run");
    let out = Command::new(exe)
        .args(["run", "--seed", "3", "--threads", "1", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(&target)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(target.join("scan.csv").exists());
    assert!(target.join("manifest.json").exists());
}
