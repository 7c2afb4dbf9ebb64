//! Experiment configuration: INI-style sections, arrays as comma lists.
//!
//! ```ini
//! [experiment]
//! kind = compare
//! seed = 7
//!
//! [generator]
//! model = er
//! n = 100000
//! z = 2.5
//!
//! [strategy]
//! q = 2, 3
//! pi = 1, 1
//!
//! [sweep]
//! phi_range = 0.1, 0.6, 50
//! replicas = 4
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use entperc_core::{
    DegreeModel, EdgeListOptions, GeneratorKind, GeneratorSpec, SwapStrategy, SweepConfig,
};
use ini::Ini;

use crate::error::CliError;

const KEYS: &[(&str, &[&str])] = &[
    ("experiment", &["kind", "seed", "output"]),
    (
        "generator",
        &[
            "model",
            "n",
            "z",
            "k",
            "beta",
            "rows",
            "cols",
            "degree",
            "tau",
            "kappa",
            "k_min",
            "k_max",
            "histogram",
            "histogram_file",
            "path",
            "bidirectional_only",
            "degree_cutoff",
        ],
    ),
    ("strategy", &["q", "pi", "eta"]),
    (
        "sweep",
        &[
            "phi",
            "phi_range",
            "f",
            "f_range",
            "replicas",
            "source_sample",
            "l",
            "l_range",
            "f_min",
        ],
    ),
    ("analytic", &["q_max"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Generate,
    Percolate,
    QswapScan,
    LimitedScan,
    FidelityScan,
    AnalyticTable,
    Compare,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Generate => "generate",
            ExperimentKind::Percolate => "percolate",
            ExperimentKind::QswapScan => "qswap_scan",
            ExperimentKind::LimitedScan => "limited_scan",
            ExperimentKind::FidelityScan => "fidelity_scan",
            ExperimentKind::AnalyticTable => "analytic_table",
            ExperimentKind::Compare => "compare",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "generate" => ExperimentKind::Generate,
            "percolate" => ExperimentKind::Percolate,
            "qswap_scan" => ExperimentKind::QswapScan,
            "limited_scan" => ExperimentKind::LimitedScan,
            "fidelity_scan" => ExperimentKind::FidelityScan,
            "analytic_table" => ExperimentKind::AnalyticTable,
            "compare" => ExperimentKind::Compare,
            _ => return Err(format!("unknown experiment kind `{s}`")),
        })
    }
}

/// Where swapped-giant calculations take their `eta_q` from.
#[derive(Debug, Clone, PartialEq)]
pub enum EtaSource {
    /// Measured by the simulation (compare) or `eta_rand` (analytic table).
    Default,
    /// Random-order cluster estimate.
    Rand,
    /// One value per swapped degree, in `q` order.
    Fixed(BTreeMap<usize, f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub generator: GeneratorSpec,
    pub strategy: SwapStrategy,
    pub eta: EtaSource,
    pub sweep: SweepConfig,
    pub q_max: Option<usize>,
    /// The config text as read, echoed into the manifest.
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// `section.key`, or a section name for whole-section problems.
    pub key: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

struct Reader<'a> {
    ini: &'a Ini,
    violations: Vec<Violation>,
}

impl<'a> Reader<'a> {
    fn raw(&self, section: &str, key: &str) -> Option<&'a str> {
        self.ini.get_from(Some(section), key).map(str::trim)
    }

    fn flag(&mut self, section: &str, key: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            key: format!("{section}.{key}"),
            message: message.into(),
        });
    }

    fn get<T: FromStr>(&mut self, section: &str, key: &str) -> Option<T> {
        let raw = self.raw(section, key)?;
        match raw.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.flag(section, key, format!("cannot parse `{raw}`"));
                None
            }
        }
    }

    fn require<T: FromStr>(&mut self, section: &str, key: &str) -> Option<T> {
        if self.raw(section, key).is_none() {
            self.flag(section, key, "missing");
            return None;
        }
        self.get(section, key)
    }

    fn list<T: FromStr>(&mut self, section: &str, key: &str) -> Option<Vec<T>> {
        let raw = self.raw(section, key)?;
        let parsed: Result<Vec<T>, _> = raw
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect();
        match parsed {
            Ok(v) => Some(v),
            Err(_) => {
                self.flag(section, key, format!("cannot parse list `{raw}`"));
                None
            }
        }
    }

    fn check(&mut self, ok: bool, section: &str, key: &str, message: &str) -> bool {
        if !ok {
            self.flag(section, key, message.to_string());
        }
        ok
    }

    fn unknown_keys(&mut self) {
        let known: BTreeMap<&str, BTreeSet<&str>> = KEYS
            .iter()
            .map(|(s, ks)| (*s, ks.iter().copied().collect()))
            .collect();
        for (section, props) in self.ini.iter() {
            let Some(section) = section else {
                for (k, _) in props.iter() {
                    self.flag("", k, "key outside any section");
                }
                continue;
            };
            match known.get(section) {
                None => self.violations.push(Violation {
                    key: section.to_string(),
                    message: "unknown section".into(),
                }),
                Some(keys) => {
                    for (k, _) in props.iter() {
                        if !keys.contains(k) {
                            self.flag(section, k, "unknown key");
                        }
                    }
                }
            }
        }
    }
}

/// Evenly spaced grid `a, ..., b` with `count` points.
fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

fn real_grid(r: &mut Reader, list_key: &str, range_key: &str) -> Option<Vec<f64>> {
    if r.raw("sweep", list_key).is_some() && r.raw("sweep", range_key).is_some() {
        r.flag(
            "sweep",
            range_key,
            format!("conflicts with sweep.{list_key}"),
        );
        return None;
    }
    if let Some(v) = r.list::<f64>("sweep", list_key) {
        return Some(v);
    }
    let spec = r.list::<f64>("sweep", range_key)?;
    match spec[..] {
        [a, b, count] if count >= 1.0 && count.fract() == 0.0 && a <= b => {
            Some(linspace(a, b, count as usize))
        }
        _ => {
            r.flag(
                "sweep",
                range_key,
                "expected `start, stop, count` with start <= stop",
            );
            None
        }
    }
}

fn l_values(r: &mut Reader) -> Option<Vec<usize>> {
    if r.raw("sweep", "l").is_some() && r.raw("sweep", "l_range").is_some() {
        r.flag("sweep", "l_range", "conflicts with sweep.l");
        return None;
    }
    if let Some(v) = r.list::<usize>("sweep", "l") {
        return Some(v);
    }
    let spec = r.list::<usize>("sweep", "l_range")?;
    match spec[..] {
        [a, b] if a <= b => Some((a..=b).collect()),
        _ => {
            r.flag(
                "sweep",
                "l_range",
                "expected `first, last` with first <= last",
            );
            None
        }
    }
}

fn degree_model(r: &mut Reader, base: &Path) -> Option<DegreeModel> {
    let kind: String = r.require("generator", "degree")?;
    let result = match kind.as_str() {
        "poisson" => {
            let z: f64 = r.require("generator", "z")?;
            DegreeModel::poisson(z)
        }
        "delta" => {
            let k: usize = r.require("generator", "k")?;
            DegreeModel::delta(k)
        }
        "powerlaw" => {
            let tau: f64 = r.require("generator", "tau")?;
            let kappa: f64 = r.get("generator", "kappa").unwrap_or(f64::INFINITY);
            let k_min: usize = r.get("generator", "k_min").unwrap_or(1);
            let k_max: Option<usize> = r.get("generator", "k_max");
            DegreeModel::power_law_cutoff(tau, kappa, k_min, k_max)
        }
        "histogram" => {
            if let Some(weights) = r.list::<f64>("generator", "histogram") {
                DegreeModel::empirical(&weights)
            } else if let Some(file) = r.raw("generator", "histogram_file") {
                match std::fs::read_to_string(base.join(file)) {
                    Ok(text) => DegreeModel::from_histogram_text(&text),
                    Err(e) => {
                        r.flag("generator", "histogram_file", e.to_string());
                        return None;
                    }
                }
            } else {
                r.flag("generator", "histogram", "missing (or give histogram_file)");
                return None;
            }
        }
        other => {
            r.flag(
                "generator",
                "degree",
                format!("unknown degree model `{other}`"),
            );
            return None;
        }
    };
    match result {
        Ok(m) => Some(m),
        Err(e) => {
            r.flag("generator", "degree", e.to_string());
            None
        }
    }
}

fn generator(r: &mut Reader, seed: u64, base: &Path) -> Option<GeneratorSpec> {
    let model: String = r.require("generator", "model")?;
    let n_required = !matches!(model.as_str(), "honeycomb" | "edgelist");
    let n: Option<usize> = if n_required {
        r.require("generator", "n")
    } else {
        r.get("generator", "n")
    };
    let kind = match model.as_str() {
        "er" => {
            let z: f64 = r.require("generator", "z")?;
            r.check(z >= 0.0, "generator", "z", "must be >= 0");
            GeneratorKind::Er { z }
        }
        "regular" => GeneratorKind::RandomRegular {
            k: r.require("generator", "k")?,
        },
        "ws" => {
            let beta: f64 = r.require("generator", "beta")?;
            if !r.check(
                (0.0..=1.0).contains(&beta),
                "generator",
                "beta",
                "must lie in [0, 1]",
            ) {
                return None;
            }
            GeneratorKind::WattsStrogatz { beta }
        }
        "config" => GeneratorKind::ConfigModel(degree_model(r, base)?),
        "honeycomb" => {
            let rows: usize = r.require("generator", "rows")?;
            let cols: usize = r.require("generator", "cols")?;
            GeneratorKind::Honeycomb { rows, cols }
        }
        "edgelist" => {
            let path: String = r.require("generator", "path")?;
            GeneratorKind::EdgeList(EdgeListOptions {
                path: base.join(path),
                bidirectional_only: r.get("generator", "bidirectional_only").unwrap_or(false),
                degree_cutoff: r.get("generator", "degree_cutoff"),
            })
        }
        other => {
            r.flag("generator", "model", format!("unknown model `{other}`"));
            return None;
        }
    };
    let n = match &kind {
        GeneratorKind::Honeycomb { rows, cols } => 2 * rows * cols,
        _ => n.unwrap_or(0),
    };
    let spec = GeneratorSpec { kind, n, seed };
    if let Err(e) = spec.validate() {
        r.violations.push(Violation {
            key: "generator".into(),
            message: e.to_string(),
        });
        return None;
    }
    Some(spec)
}

fn strategy(r: &mut Reader) -> (SwapStrategy, EtaSource) {
    let Some(q) = r.list::<usize>("strategy", "q") else {
        if r.raw("strategy", "pi").is_some() {
            r.flag("strategy", "q", "missing");
        }
        return (SwapStrategy::none(), EtaSource::Default);
    };
    let pi = r
        .list::<f64>("strategy", "pi")
        .unwrap_or_else(|| vec![1.0; q.len()]);
    let mut ok = r.check(
        pi.len() == q.len(),
        "strategy",
        "pi",
        "needs one value per q",
    );
    for &d in &q {
        ok &= r.check(
            d >= 2,
            "strategy",
            "q",
            &format!("q = {d}: swaps need q >= 2"),
        );
    }
    for &p in &pi {
        ok &= r.check(
            (0.0..=1.0).contains(&p),
            "strategy",
            "pi",
            "must lie in [0, 1]",
        );
    }
    let mut seen = BTreeSet::new();
    ok &= r.check(
        q.iter().all(|d| seen.insert(*d)),
        "strategy",
        "q",
        "repeated degree",
    );
    if !ok {
        return (SwapStrategy::none(), EtaSource::Default);
    }
    let strategy = match SwapStrategy::new(q.iter().copied().zip(pi.iter().copied())) {
        Ok(s) => s,
        Err(e) => {
            r.flag("strategy", "q", e.to_string());
            return (SwapStrategy::none(), EtaSource::Default);
        }
    };
    let eta = match r.raw("strategy", "eta") {
        None | Some("measured") => EtaSource::Default,
        Some("rand") => EtaSource::Rand,
        Some(_) => match r.list::<f64>("strategy", "eta") {
            Some(v) if v.len() == q.len() && v.iter().all(|e| (0.0..=1.0).contains(e)) => {
                EtaSource::Fixed(q.iter().copied().zip(v).collect())
            }
            Some(_) => {
                r.flag("strategy", "eta", "needs one value in [0, 1] per q");
                EtaSource::Default
            }
            None => EtaSource::Default,
        },
    };
    (strategy, eta)
}

fn sweep(r: &mut Reader, kind: ExperimentKind, seed: u64) -> SweepConfig {
    let phi = real_grid(r, "phi", "phi_range");
    let f = real_grid(r, "f", "f_range");
    let l = l_values(r);
    let replicas: u32 = r.get("sweep", "replicas").unwrap_or(1);
    let source_sample: usize = r.get("sweep", "source_sample").unwrap_or(1000);
    let f_min: f64 = r.get("sweep", "f_min").unwrap_or(2.0 / 3.0);
    r.check(replicas >= 1, "sweep", "replicas", "must be >= 1");
    r.check(source_sample >= 1, "sweep", "source_sample", "must be >= 1");
    r.check(
        f_min > 0.5 && f_min < 1.0,
        "sweep",
        "f_min",
        "must lie in (1/2, 1)",
    );
    if let Some(g) = &phi {
        r.check(
            g.iter().all(|x| (0.0..=1.0).contains(x)),
            "sweep",
            "phi",
            "values must lie in [0, 1]",
        );
        r.check(
            g.windows(2).all(|w| w[0] <= w[1]),
            "sweep",
            "phi",
            "must be ascending",
        );
    }
    if let Some(g) = &f {
        r.check(
            g.iter().all(|x| *x > 0.5 && *x <= 1.0),
            "sweep",
            "f",
            "values must lie in (1/2, 1]",
        );
        r.check(
            g.windows(2).all(|w| w[0] <= w[1]),
            "sweep",
            "f",
            "must be ascending",
        );
    }
    if let Some(ls) = &l {
        r.check(
            ls.windows(2).all(|w| w[0] <= w[1]),
            "sweep",
            "l",
            "must be ascending",
        );
    }
    use ExperimentKind::*;
    let needs_phi = matches!(kind, Percolate | QswapScan | Compare);
    if needs_phi && phi.is_none() {
        r.flag(
            "sweep",
            "phi",
            format!("required by {} (or give phi_range)", kind.name()),
        );
    }
    if kind == LimitedScan && l.is_none() {
        r.flag("sweep", "l", "required by limited_scan (or give l_range)");
    }
    if kind == FidelityScan && f.is_none() {
        r.flag("sweep", "f", "required by fidelity_scan (or give f_range)");
    }
    if kind == AnalyticTable && phi.is_none() && l.is_none() {
        r.flag(
            "sweep",
            "phi",
            "analytic_table needs a phi grid or l values",
        );
    }
    let grid = match kind {
        FidelityScan => f.unwrap_or_default(),
        _ => phi.unwrap_or_default(),
    };
    SweepConfig {
        grid,
        replicas,
        source_sample,
        l_values: l.unwrap_or_default(),
        seed,
        f_min,
    }
}

/// Parses and checks a config. Relative paths resolve against `base`;
/// `seed_override` replaces `experiment.seed`. Returns every violation found.
pub fn parse(
    text: &str,
    base: &Path,
    seed_override: Option<u64>,
) -> Result<ExperimentConfig, Vec<Violation>> {
    let ini = Ini::load_from_str_noescape(text).map_err(|e| {
        vec![Violation {
            key: "config".into(),
            message: e.to_string(),
        }]
    })?;
    let mut r = Reader {
        ini: &ini,
        violations: Vec::new(),
    };
    r.unknown_keys();
    let kind: Option<ExperimentKind> = r.require("experiment", "kind");
    let seed = match seed_override {
        Some(s) => Some(s),
        None => r.require("experiment", "seed"),
    };
    let output = r.raw("experiment", "output").map(|p| base.join(p));
    let generator = match kind {
        Some(ExperimentKind::AnalyticTable) if r.raw("generator", "model").is_none() => None,
        _ => generator(&mut r, seed.unwrap_or(0), base),
    };
    let (strategy, eta) = strategy(&mut r);
    let q_max: Option<usize> = r.get("analytic", "q_max");
    if let Some(q) = q_max {
        r.check(
            (2..=16).contains(&q),
            "analytic",
            "q_max",
            "must lie in 2..=16",
        );
    }
    if kind == Some(ExperimentKind::QswapScan) && strategy.is_empty() {
        r.flag("strategy", "q", "qswap_scan needs a non-empty strategy");
    }
    if kind == Some(ExperimentKind::AnalyticTable) && generator.is_none() {
        r.flag("generator", "model", "missing");
    }
    let sweep = kind.map(|k| sweep(&mut r, k, seed.unwrap_or(0)));
    if !r.violations.is_empty() {
        return Err(r.violations);
    }
    let (Some(kind), Some(seed), Some(generator), Some(sweep)) = (kind, seed, generator, sweep)
    else {
        unreachable!("missing fields are reported as violations")
    };
    Ok(ExperimentConfig {
        kind,
        seed,
        output,
        generator,
        strategy,
        eta,
        sweep,
        q_max,
        raw: text.to_string(),
    })
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
}

/// Schema and range checks without running anything.
pub fn validate(path: &Path, seed_override: Option<u64>) -> Vec<Violation> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse(&text, &base_dir(path), seed_override)
            .err()
            .unwrap_or_default(),
        Err(e) => vec![Violation {
            key: "config".into(),
            message: format!("{}: {e}", path.display()),
        }],
    }
}

pub fn load(path: &Path, seed_override: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse(&text, &base_dir(path), seed_override).map_err(CliError::Config)
}
