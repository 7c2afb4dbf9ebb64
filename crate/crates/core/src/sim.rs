//! Seeded Monte Carlo: bond percolation with per-class occupation,
//! threshold scans over replica graphs, and hop-limited reachability.
//!
//! Replica `i` draws its graph, swaps and occupations from streams derived
//! from the master seed and `i` only, and replicas are reduced in index
//! order, so results do not depend on the thread count.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_domain, Error, Result};
use crate::generators::GeneratorSpec;
use crate::graph::{Bfs, ComponentStats, EdgeClass, Graph, PathLengthHistogram};
use crate::links::{alpha_of_f, max_path_length, phi2_unchecked, PathBudget};
use crate::qswap::{apply_qswaps, SwapStrategy};
use crate::rng::{purpose, replica_stream, SimRng};
use crate::union_find::UnionFind;

/// A largest component above this fraction of N is treated as the giant and
/// left out of the finite-size average.
pub const GIANT_CUTOFF: f64 = 1e-2;
pub const BOOTSTRAP_RESAMPLES: usize = 1_000;
/// Giant fraction that marks the onset estimate of the threshold.
pub const ONSET_FRACTION: f64 = 2e-3;

/// Keeps each edge with the probability of its class and returns the
/// components of what is left. One uniform draw is made per edge.
pub fn bond_percolate<R: Rng + ?Sized>(
    g: &Graph,
    p_original: f64,
    p_newborn: f64,
    rng: &mut R,
) -> Result<ComponentStats> {
    check_domain(
        "p_original",
        p_original,
        (0.0..=1.0).contains(&p_original),
        "[0, 1]",
    )?;
    check_domain(
        "p_newborn",
        p_newborn,
        (0.0..=1.0).contains(&p_newborn),
        "[0, 1]",
    )?;
    let mut uf = UnionFind::new(g.vertex_count());
    for e in g.edges() {
        let p = match e.class {
            EdgeClass::Original => p_original,
            EdgeClass::Newborn => p_newborn,
        };
        if rng.gen::<f64>() < p {
            uf.union(e.u, e.v);
        }
    }
    Ok(ComponentStats::from_sizes(uf.set_sizes()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// `phi1` values for threshold scans, `F` values for fidelity scans.
    pub grid: Vec<f64>,
    pub replicas: u32,
    pub source_sample: usize,
    pub l_values: Vec<usize>,
    pub seed: u64,
    pub f_min: f64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidParameter("replicas must be >= 1".into()));
        }
        if self.grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "grid must be sorted ascending".into(),
            ));
        }
        if self.l_values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "l values must be sorted ascending".into(),
            ));
        }
        if self.source_sample == 0 {
            return Err(Error::InvalidParameter("source_sample must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Mean with the standard error of the mean.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Estimate {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Estimate { mean, stderr: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate {
            mean,
            stderr: (var / n).sqrt(),
        }
    }

    /// Mean with a bootstrap standard error over resampled replicas.
    pub fn bootstrap<R: Rng + ?Sized>(xs: &[f64], resamples: usize, rng: &mut R) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Estimate { mean, stderr: 0.0 };
        }
        let means: Vec<f64> = (0..resamples)
            .map(|_| (0..n).map(|_| xs[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
            .collect();
        let m = means.iter().sum::<f64>() / resamples as f64;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (resamples as f64 - 1.0);
        Estimate {
            mean,
            stderr: var.sqrt(),
        }
    }
}

/// One row of a sweep; fields not measured by a given scan are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub phi_or_f: Option<f64>,
    /// Hop limit; `None` with a limited estimate means unlimited.
    pub l: Option<usize>,
    pub giant: Option<Estimate>,
    pub avg_finite: Option<Estimate>,
    pub s_l_over_n: Option<Estimate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdEstimate {
    /// Grid point maximising the finite-component mean size.
    pub susceptibility_peak: f64,
    /// First grid point whose mean giant fraction exceeds [`ONSET_FRACTION`].
    pub s_onset: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub n: usize,
    pub points: Vec<ScanPoint>,
    pub histogram: Option<PathLengthHistogram>,
    pub l_av: Option<f64>,
    pub threshold: Option<ThresholdEstimate>,
    /// Measured swap success probability per degree, across replicas.
    pub eta: BTreeMap<usize, Estimate>,
}

struct ReplicaOutcome {
    giant: Vec<f64>,
    avg_finite: Vec<f64>,
    eta: BTreeMap<usize, f64>,
}

/// For each replica: generate a graph, optionally q-swap it, then occupy
/// original edges with `phi2(phi1)` and newborn edges with `phi1` at every
/// grid point. Each replica's graph is reused across the whole grid.
pub fn threshold_scan(
    gen: &GeneratorSpec,
    strategy: Option<&SwapStrategy>,
    cfg: &SweepConfig,
) -> Result<SweepResult> {
    gen.validate()?;
    cfg.validate()?;
    for &phi in &cfg.grid {
        check_domain("phi1", phi, (0.0..=1.0).contains(&phi), "[0, 1]")?;
    }
    let outcomes = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| -> Result<ReplicaOutcome> {
            let mut g = gen.generate(r)?;
            let mut eta = BTreeMap::new();
            if let Some(s) = strategy.filter(|s| !s.is_empty()) {
                let mut rng = replica_stream(cfg.seed, purpose::SWAP, r);
                let (swapped, report) = apply_qswaps(&g, s, &mut rng)?;
                g = swapped;
                eta = report.etas();
            }
            let mut rng = replica_stream(cfg.seed, purpose::OCCUPATION, r);
            let mut giant = Vec::with_capacity(cfg.grid.len());
            let mut avg_finite = Vec::with_capacity(cfg.grid.len());
            for &phi1 in &cfg.grid {
                let stats = bond_percolate(&g, phi2_unchecked(phi1), phi1, &mut rng)?;
                giant.push(stats.giant_fraction());
                avg_finite.push(stats.avg_finite_size_with_cutoff(GIANT_CUTOFF));
            }
            Ok(ReplicaOutcome {
                giant,
                avg_finite,
                eta,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut boot = replica_stream(cfg.seed, purpose::BOOTSTRAP, 0);
    let mut points = Vec::with_capacity(cfg.grid.len());
    for (i, &phi1) in cfg.grid.iter().enumerate() {
        let giant: Vec<f64> = outcomes.iter().map(|o| o.giant[i]).collect();
        let avg: Vec<f64> = outcomes.iter().map(|o| o.avg_finite[i]).collect();
        points.push(ScanPoint {
            phi_or_f: Some(phi1),
            l: None,
            giant: Some(Estimate::bootstrap(&giant, BOOTSTRAP_RESAMPLES, &mut boot)),
            avg_finite: Some(Estimate::bootstrap(&avg, BOOTSTRAP_RESAMPLES, &mut boot)),
            s_l_over_n: None,
        });
    }
    let mut eta = BTreeMap::new();
    if let Some(first) = outcomes.first() {
        for &q in first.eta.keys() {
            let xs: Vec<f64> = outcomes.iter().map(|o| o.eta[&q]).collect();
            eta.insert(q, Estimate::from_samples(&xs));
        }
    }
    let threshold = estimate_threshold(&points);
    Ok(SweepResult {
        n: gen.n,
        points,
        histogram: None,
        l_av: None,
        threshold,
        eta,
    })
}

fn estimate_threshold(points: &[ScanPoint]) -> Option<ThresholdEstimate> {
    let peak = points
        .iter()
        .filter_map(|p| Some((p.phi_or_f?, p.avg_finite?.mean)))
        .fold(None, |best: Option<(f64, f64)>, (x, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((x, v)),
        })?;
    let s_onset = points
        .iter()
        .find(|p| p.giant.is_some_and(|g| g.mean > ONSET_FRACTION))
        .and_then(|p| p.phi_or_f);
    Some(ThresholdEstimate {
        susceptibility_peak: peak.0,
        s_onset,
    })
}

/// Full BFS shell counts from each source.
fn source_shells(g: &Graph, sources: &[usize]) -> Vec<Vec<usize>> {
    sources
        .par_iter()
        .map_init(
            || Bfs::new(g.vertex_count()),
            |bfs, &s| bfs.shell_counts(g, s, None),
        )
        .collect()
}

fn ball(shells: &[usize], l: Option<usize>) -> usize {
    let upto = l.map_or(shells.len(), |l| (l + 1).min(shells.len()));
    shells[..upto].iter().sum()
}

fn histogram_of(shells: &[Vec<usize>]) -> PathLengthHistogram {
    let mut h = PathLengthHistogram::default();
    for s in shells {
        h.add_shells(s);
    }
    h
}

fn ball_estimate(shells: &[Vec<usize>], l: Option<usize>, n: usize) -> Estimate {
    let sizes: Vec<f64> = shells.iter().map(|s| ball(s, l) as f64).collect();
    let e = Estimate::from_samples(&sizes);
    Estimate {
        mean: e.mean / n as f64,
        stderr: e.stderr / n as f64,
    }
}

fn pick_sources<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<usize> {
    crate::graph::sample_sources(n, count, rng)
}

/// Mean number of vertices within `l` hops of a random source, over `N`,
/// with every edge present. Standard errors are over sources.
pub fn limited_component_scan<R: Rng + ?Sized>(
    g: &Graph,
    l_values: &[usize],
    source_sample: usize,
    rng: &mut R,
) -> Result<SweepResult> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let sources = pick_sources(n, source_sample.max(1), rng);
    let shells = source_shells(g, &sources);
    let points = l_values
        .iter()
        .map(|&l| ScanPoint {
            phi_or_f: None,
            l: Some(l),
            giant: None,
            avg_finite: None,
            s_l_over_n: Some(ball_estimate(&shells, Some(l), n)),
        })
        .collect();
    let histogram = histogram_of(&shells);
    Ok(SweepResult {
        n,
        points,
        l_av: Some(histogram.mean_length()),
        histogram: Some(histogram),
        threshold: None,
        eta: BTreeMap::new(),
    })
}

/// For each singlet fraction `F`, the hop budget that keeps the end-to-end
/// fidelity at or above `f_min`, and the mean reachable set under it.
pub fn fidelity_scan<R: Rng + ?Sized>(
    g: &Graph,
    f_grid: &[f64],
    f_min: f64,
    source_sample: usize,
    rng: &mut R,
) -> Result<SweepResult> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let budgets = f_grid
        .iter()
        .map(|&f| {
            check_domain("F", f, f > 0.5 && f <= 1.0, "(1/2, 1]")?;
            max_path_length(f_min, alpha_of_f(f)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let sources = pick_sources(n, source_sample.max(1), rng);
    let shells = source_shells(g, &sources);
    let points = f_grid
        .iter()
        .zip(&budgets)
        .map(|(&f, &b)| {
            let l = match b {
                PathBudget::Finite(l) => Some(l as usize),
                PathBudget::Infinite => None,
            };
            ScanPoint {
                phi_or_f: Some(f),
                l,
                giant: None,
                avg_finite: None,
                s_l_over_n: Some(ball_estimate(&shells, l, n)),
            }
        })
        .collect();
    let histogram = histogram_of(&shells);
    Ok(SweepResult {
        n,
        points,
        l_av: Some(histogram.mean_length()),
        histogram: Some(histogram),
        threshold: None,
        eta: BTreeMap::new(),
    })
}

/// Per-replica limited or fidelity scans on freshly generated graphs,
/// reduced in replica order. Points carry the mean over replicas with a
/// bootstrap standard error over replicas (the source-level error when
/// there is a single replica); histograms are merged.
fn replica_scans(
    gen: &GeneratorSpec,
    cfg: &SweepConfig,
    scan: impl Fn(&Graph, &mut SimRng) -> Result<SweepResult> + Sync,
) -> Result<SweepResult> {
    gen.validate()?;
    cfg.validate()?;
    let runs = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let g = gen.generate(r)?;
            scan(&g, &mut source_stream(cfg.seed, r))
        })
        .collect::<Result<Vec<_>>>()?;
    if runs.len() == 1 {
        return Ok(runs.into_iter().next().unwrap());
    }
    let mut boot = replica_stream(cfg.seed, purpose::BOOTSTRAP, 0);
    let first = &runs[0];
    let points = (0..first.points.len())
        .map(|i| {
            let xs: Vec<f64> = runs
                .iter()
                .map(|run| run.points[i].s_l_over_n.map_or(f64::NAN, |e| e.mean))
                .collect();
            ScanPoint {
                s_l_over_n: Some(Estimate::bootstrap(&xs, BOOTSTRAP_RESAMPLES, &mut boot)),
                ..first.points[i].clone()
            }
        })
        .collect();
    let histogram = runs
        .iter()
        .filter_map(|run| run.histogram.clone())
        .reduce(PathLengthHistogram::merge);
    let n = runs.iter().map(|run| run.n).sum::<usize>() / runs.len();
    Ok(SweepResult {
        n,
        points,
        l_av: histogram.as_ref().map(PathLengthHistogram::mean_length),
        histogram,
        threshold: None,
        eta: BTreeMap::new(),
    })
}

/// [`limited_component_scan`] over `cfg.replicas` generated graphs, with
/// `cfg.l_values` and `cfg.source_sample` sources per graph.
pub fn limited_replica_scan(gen: &GeneratorSpec, cfg: &SweepConfig) -> Result<SweepResult> {
    replica_scans(gen, cfg, |g, rng| {
        limited_component_scan(g, &cfg.l_values, cfg.source_sample, rng)
    })
}

/// [`fidelity_scan`] over `cfg.replicas` generated graphs on the `F` grid.
pub fn fidelity_replica_scan(gen: &GeneratorSpec, cfg: &SweepConfig) -> Result<SweepResult> {
    replica_scans(gen, cfg, |g, rng| {
        fidelity_scan(g, &cfg.grid, cfg.f_min, cfg.source_sample, rng)
    })
}

/// Stream used by callers that run a limited or fidelity scan on replica `r`.
pub fn source_stream(seed: u64, replica: u32) -> SimRng {
    replica_stream(seed, purpose::SOURCES, replica)
}
