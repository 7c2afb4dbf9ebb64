//! q-swap preprocessing: a node of degree q measures its q link halves so
//! that its neighbours end up joined in a q-cycle of newborn links while the
//! node itself drops out of the network.
//!
//! [`apply_qswaps`] performs the transformation on a concrete graph by
//! breadth-first traversal. The remaining functions give the probability
//! `eta_q` that a target vertex can actually be swapped, from closed forms
//! (2-swap), from the two-variable cluster generating function, and from a
//! truncated branching-process expansion.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::degree::DegreeModel;
use crate::error::{check_domain, Error, Result};
use crate::graph::{Edge, EdgeClass, Graph};
use crate::series::BiSeries;

/// Per-degree activation probabilities `Pi_q`, keys `q >= 2`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SwapStrategy {
    active: BTreeMap<usize, f64>,
}

impl SwapStrategy {
    pub fn new(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut active = BTreeMap::new();
        for (q, p) in pairs {
            if q < 2 {
                return Err(Error::InvalidParameter(format!(
                    "swap degree must be >= 2, got {q}"
                )));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "activation probability for q={q} must lie in [0, 1], got {p}"
                )));
            }
            if p > 0.0 {
                active.insert(q, p);
            }
        }
        Ok(SwapStrategy { active })
    }

    /// Every listed degree always swapped.
    pub fn all(degrees: &[usize]) -> Result<Self> {
        Self::new(degrees.iter().map(|&q| (q, 1.0)))
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn probability(&self, q: usize) -> f64 {
        self.active.get(&q).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.active.iter().map(|(&q, &p)| (q, p))
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.active.keys().copied().collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SwapReport {
    /// Vertices of each targeted degree met during the traversal.
    pub eligible: BTreeMap<usize, usize>,
    pub performed: BTreeMap<usize, usize>,
    /// Swaps abandoned because a cycle link would duplicate an existing edge.
    pub skipped_adjacent: BTreeMap<usize, usize>,
    pub centers: Vec<usize>,
}

impl SwapReport {
    /// Measured `eta_q = performed_q / eligible_q` (0 when none eligible).
    pub fn eta(&self, q: usize) -> f64 {
        let eligible = self.eligible.get(&q).copied().unwrap_or(0);
        if eligible == 0 {
            return 0.0;
        }
        self.performed.get(&q).copied().unwrap_or(0) as f64 / eligible as f64
    }

    pub fn etas(&self) -> BTreeMap<usize, f64> {
        self.eligible.keys().map(|&q| (q, self.eta(q))).collect()
    }
}

/// Applies q-swaps by breadth-first traversal from random roots, re-rooting
/// on a random unexplored vertex until every component is covered.
///
/// A vertex of targeted degree q is swapped (after a Bernoulli(`Pi_q`) draw
/// when `0 < Pi_q < 1`) unless one of its links was already consumed by an
/// earlier swap or is newborn, i.e. unless it is itself a neighbour of a
/// swapped vertex. Its neighbours are joined in their stored order; for q = 2
/// the cycle is the single link between the two neighbours.
pub fn apply_qswaps<R: Rng + ?Sized>(
    g: &Graph,
    strategy: &SwapStrategy,
    rng: &mut R,
) -> Result<(Graph, SwapReport)> {
    if g.edges().iter().any(|e| e.class != EdgeClass::Original) {
        return Err(Error::InvalidParameter(
            "q-swaps apply to graphs with only original edges".into(),
        ));
    }
    let n = g.vertex_count();
    let mut report = SwapReport::default();
    for q in strategy.degrees() {
        report.eligible.insert(q, 0);
        report.performed.insert(q, 0);
    }
    let mut roots: Vec<usize> = (0..n).collect();
    roots.shuffle(rng);

    let mut visited = vec![false; n];
    // centre or neighbour of a centre: some incident link is consumed or newborn
    let mut touched = vec![false; n];
    let mut is_center = vec![false; n];
    let mut newborn_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut newborn: Vec<Edge> = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    let mut cycle: Vec<(usize, usize)> = Vec::new();

    for &root in &roots {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
            let q = g.degree(v);
            let pi = strategy.probability(q);
            if pi == 0.0 {
                continue;
            }
            *report.eligible.get_mut(&q).unwrap() += 1;
            let chosen = pi >= 1.0 || rng.gen_bool(pi);
            if !chosen || touched[v] {
                continue;
            }
            let nb = g.neighbors(v);
            cycle.clear();
            if q == 2 {
                cycle.push((nb[0], nb[1]));
            } else {
                cycle.extend((0..q).map(|i| (nb[i], nb[(i + 1) % q])));
            }
            let clash = cycle
                .iter()
                .any(|&(a, b)| g.is_adjacent(a, b) || newborn_adj[a].contains(&b));
            if clash {
                *report.skipped_adjacent.entry(q).or_insert(0) += 1;
                continue;
            }
            for &(a, b) in &cycle {
                newborn_adj[a].push(b);
                newborn_adj[b].push(a);
                newborn.push(Edge {
                    u: a,
                    v: b,
                    class: EdgeClass::Newborn,
                });
                touched[a] = true;
                touched[b] = true;
            }
            touched[v] = true;
            is_center[v] = true;
            report.centers.push(v);
            *report.performed.get_mut(&q).unwrap() += 1;
        }
    }

    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| !is_center[e.u] && !is_center[e.v])
        .copied()
        .collect();
    edges.extend(newborn);
    Ok((Graph::from_edges_unchecked(n, edges), report))
}

fn check_r1(r1: f64) -> Result<()> {
    check_domain("r1", r1, (0.0..1.0).contains(&r1), "[0, 1)")
}

/// 2-swap success probability when every degree-2 chain is entered from an
/// end: `1 / (1 + r1)`.
pub fn eta2_max(r1: f64) -> Result<f64> {
    check_r1(r1)?;
    Ok(1.0 / (1.0 + r1))
}

/// 2-swap success probability when every chain loses its end vertices.
pub fn eta2_min(r1: f64) -> Result<f64> {
    check_r1(r1)?;
    Ok((1.0 - (1.0 - r1) * r1 * r1) / (1.0 + r1))
}

/// 2-swap success probability when each chain is started at a random vertex.
pub fn eta2_rand(r1: f64) -> Result<f64> {
    check_r1(r1)?;
    if r1 == 0.0 {
        return Ok(1.0);
    }
    let atanh_over_r = if r1 < 1e-4 {
        1.0 + r1 * r1 / 3.0 + r1.powi(4) / 5.0
    } else {
        r1.atanh() / r1
    };
    Ok(0.5 * (1.0 + (1.0 - r1).powi(2) * atanh_over_r))
}

/// Probability that a random degree-2 vertex sits in a chain with `s`
/// vertices at odd and `t` at even distance from it (itself included in `t`).
pub fn xi2(s: usize, t: usize, r1: f64) -> f64 {
    if t == 0 || s.abs_diff(t) > 1 {
        return 0.0;
    }
    let binom = match 1 + s - t {
        0 | 2 => 1.0,
        _ => 2.0,
    };
    binom * (1.0 - r1).powi(2) * r1.powi((s + t - 1) as i32) * t as f64
}

#[derive(Debug, Clone, PartialEq)]
struct ClusterTarget {
    q: usize,
    /// `Pi_q r_{q-1}`: probability an edge leads to a targeted degree-q vertex.
    reach: f64,
    /// Probability that the starting vertex has degree q.
    start: f64,
}

/// Clusters of mutually adjacent target-degree vertices, described by the
/// excess probabilities `r_{q-1}` of each target degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    targets: Vec<ClusterTarget>,
}

impl ClusterModel {
    /// `excess[q] = r_{q-1}`. Start degrees are weighted by `Pi_q`.
    pub fn from_excess(strategy: &SwapStrategy, excess: &BTreeMap<usize, f64>) -> Result<Self> {
        let total: f64 = strategy.iter().map(|(_, p)| p).sum();
        let targets = strategy
            .iter()
            .map(|(q, p)| {
                let r = excess.get(&q).copied().ok_or_else(|| {
                    Error::InvalidParameter(format!("missing excess probability for q={q}"))
                })?;
                Ok(ClusterTarget {
                    q,
                    reach: p * r,
                    start: p / total,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::checked(targets)
    }

    /// Targets drawn from a degree model; start degrees weighted by `Pi_q p_q`.
    pub fn from_degree_model(strategy: &SwapStrategy, m: &DegreeModel) -> Result<Self> {
        let total: f64 = strategy.iter().map(|(q, p)| p * m.pk(q)).sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter(
                "no targeted degree has positive probability".into(),
            ));
        }
        let targets = strategy
            .iter()
            .map(|(q, p)| ClusterTarget {
                q,
                reach: p * m.rk(q - 1),
                start: p * m.pk(q) / total,
            })
            .collect();
        Self::checked(targets)
    }

    fn checked(targets: Vec<ClusterTarget>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidParameter("empty swap strategy".into()));
        }
        let reach: f64 = targets.iter().map(|t| t.reach).sum();
        if reach >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "target excess probabilities sum to {reach} >= 1"
            )));
        }
        Ok(ClusterModel { targets })
    }

    fn base(&self) -> f64 {
        1.0 - self.targets.iter().map(|t| t.reach).sum::<f64>()
    }

    /// Evaluates the odd/even cluster generating function at `(x, y)`.
    /// The coupled odd/even equations are iterated from zero, which converges
    /// monotonically to their smallest (finite-cluster) solution.
    pub fn h_xi(&self, x: f64, y: f64) -> Result<f64> {
        check_domain("x", x, (0.0..=1.0).contains(&x), "[0, 1]")?;
        check_domain("y", y, (0.0..=1.0).contains(&y), "[0, 1]")?;
        const MAX_ITER: usize = 100_000;
        const TOL: f64 = 1e-12;
        let base = self.base();
        let (mut hs, mut ht) = (0.0f64, 0.0f64);
        for _ in 0..MAX_ITER {
            let ns = base
                + y * self
                    .targets
                    .iter()
                    .map(|t| t.reach * ht.powi(t.q as i32 - 1))
                    .sum::<f64>();
            let nt = base
                + x * self
                    .targets
                    .iter()
                    .map(|t| t.reach * hs.powi(t.q as i32 - 1))
                    .sum::<f64>();
            let done = (ns - hs).abs() < TOL && (nt - ht).abs() < TOL;
            hs = ns;
            ht = nt;
            if done {
                return Ok(x * self
                    .targets
                    .iter()
                    .map(|t| t.start * hs.powi(t.q as i32))
                    .sum::<f64>());
            }
        }
        Err(Error::NoConvergence {
            what: "cluster generating function",
            iterations: MAX_ITER,
        })
    }

    /// Coefficients `xi(s, t)` for `s + t <= order`, from the same equations
    /// solved in truncated two-variable series arithmetic.
    pub fn xi_series(&self, order: usize) -> BiSeries {
        let base = self.base();
        let mut hs = BiSeries::zero(order);
        let mut ht = BiSeries::zero(order);
        // each sweep fixes at least one more total degree
        for _ in 0..=order + 1 {
            let mut ns = BiSeries::constant(base, order);
            let mut nt = BiSeries::constant(base, order);
            for t in &self.targets {
                ns = &ns + &ht.powi(t.q - 1).scale(t.reach).shift(1, 0);
                nt = &nt + &hs.powi(t.q - 1).scale(t.reach).shift(0, 1);
            }
            hs = ns;
            ht = nt;
        }
        let mut out = BiSeries::zero(order);
        for t in &self.targets {
            out = &out + &hs.powi(t.q).scale(t.start);
        }
        out.shift(0, 1)
    }

    /// `sum_{s + t <= order} t / (s + t) xi(s, t)` together with the
    /// probability mass left out by the truncation.
    pub fn eta_rand_truncated(&self, order: usize) -> (f64, f64) {
        let xi = self.xi_series(order);
        let mut eta = 0.0;
        let mut mass = 0.0;
        for s in 0..=order {
            for t in 1..=order - s {
                let c = xi.coeff(s, t);
                eta += t as f64 / (s + t) as f64 * c;
                mass += c;
            }
        }
        (eta, 1.0 - mass)
    }
}

/// Free-function form of [`ClusterModel::h_xi`]; `excess[q] = r_{q-1}`.
pub fn h_xi_eval(
    x: f64,
    y: f64,
    strategy: &SwapStrategy,
    excess: &BTreeMap<usize, f64>,
) -> Result<f64> {
    ClusterModel::from_excess(strategy, excess)?.h_xi(x, y)
}

/// Cluster truncation order used by [`eta_rand_for_model`].
pub const ETA_CLUSTER_ORDER: usize = 48;

/// `eta` for every targeted degree when each cluster of target vertices is
/// entered at a random vertex, from the cluster series of a degree model.
/// The cluster expansion does not resolve degrees, so every `q` gets the
/// same value.
pub fn eta_rand_for_model(
    m: &DegreeModel,
    strategy: &SwapStrategy,
) -> Result<BTreeMap<usize, f64>> {
    let model = ClusterModel::from_degree_model(strategy, m)?;
    let (eta, tail) = model.eta_rand_truncated(ETA_CLUSTER_ORDER);
    let eta = (eta / (1.0 - tail)).clamp(0.0, 1.0);
    Ok(strategy.degrees().into_iter().map(|q| (q, eta)).collect())
}

/// Closed form of the 2-swap cluster generating function.
pub fn h_xi_two_swap_closed(x: f64, y: f64, r1: f64) -> f64 {
    x * (1.0 - r1).powi(2) * (1.0 + r1 * y).powi(2) / (1.0 - r1 * r1 * x * y).powi(2)
}

/// Default cap on enumerated branching histories.
pub const ETA_SERIES_BUDGET: usize = 50_000_000;

/// `eta_q` for a single target degree from the branching process truncated
/// after `n` generations: vertices at even generations are swapped, and
/// generation `i` holds `k_i` target vertices among the `(q-1) k_{i-1}`
/// children (`q` for the root).
pub fn eta_q_rand_series(q: usize, r: f64, n: usize) -> Result<f64> {
    eta_q_rand_series_with_budget(q, r, n, ETA_SERIES_BUDGET)
}

pub fn eta_q_rand_series_with_budget(q: usize, r: f64, n: usize, budget: usize) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("q must be >= 2, got {q}")));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("series order must be >= 1".into()));
    }
    check_domain("r", r, (0.0..1.0).contains(&r), "[0, 1)")?;
    if r == 0.0 {
        return Ok(1.0);
    }
    let mut state = SeriesWalk {
        q,
        r,
        n,
        budget,
        terms: 0,
        total: 0.0,
    };
    // the root's q neighbours form generation 1
    state.walk(1, q, 1, 1, 1.0)?;
    Ok(state.total)
}

struct SeriesWalk {
    q: usize,
    r: f64,
    n: usize,
    budget: usize,
    terms: usize,
    total: f64,
}

impl SeriesWalk {
    /// Chooses `k_gen` among `slots` children; `even` and `all` count the
    /// vertices so far, `weight` the probability of the history so far.
    fn walk(
        &mut self,
        gen: usize,
        slots: usize,
        even: usize,
        all: usize,
        weight: f64,
    ) -> Result<()> {
        let mut binom = 1.0;
        for k in 0..=slots {
            if k > 0 {
                binom *= (slots - k + 1) as f64 / k as f64;
            }
            let w =
                weight * binom * self.r.powi(k as i32) * (1.0 - self.r).powi((slots - k) as i32);
            let even_next = if gen.is_multiple_of(2) {
                even + k
            } else {
                even
            };
            if gen == self.n || k == 0 {
                // no target vertices left to branch from: the history is complete
                self.terms += 1;
                if self.terms > self.budget {
                    return Err(Error::BudgetExceeded(self.budget));
                }
                self.total += w * even_next as f64 / (all + k) as f64;
            } else {
                self.walk(gen + 1, (self.q - 1) * k, even_next, all + k, w)?;
            }
        }
        Ok(())
    }
}
