//! Undirected simple graphs and the component and distance primitives the
//! percolation code is built on.
//!
//! Vertices are dense indices `0..n`. Every edge carries an [`EdgeClass`]:
//! edges of a freshly built or generated graph are [`EdgeClass::Original`],
//! while q-swap preprocessing introduces [`EdgeClass::Newborn`] edges.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

/// Sampled graphs larger than this use a random subset of BFS sources by default.
pub const EXACT_HISTOGRAM_MAX_N: usize = 10_000;
/// Number of BFS sources sampled when the graph is too large for all-pairs BFS.
pub const DEFAULT_SOURCE_SAMPLE: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    Original,
    Newborn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub class: EdgeClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph whose edges are all `Original`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_classes(
            n,
            edges
                .iter()
                .map(|&(u, v)| Edge {
                    u,
                    v,
                    class: EdgeClass::Original,
                })
                .collect(),
        )
    }

    pub fn with_classes(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for e in &edges {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u));
            }
        }
        let g = Self::from_edges_unchecked(n, edges);
        for (u, adj) in g.adjacency.iter().enumerate() {
            let mut sorted = adj.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(g)
    }

    /// Builds without validation. Callers guarantee endpoints are in range,
    /// distinct, and that no pair repeats.
    pub(crate) fn from_edges_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut adjacency: Vec<Vec<usize>> =
            degree.iter().map(|&d| Vec::with_capacity(d)).collect();
        for e in &edges {
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        Graph { adjacency, edges }
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn count_class(&self, class: EdgeClass) -> usize {
        self.edges.iter().filter(|e| e.class == class).count()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].contains(&b)
    }

    /// Checks the simple-graph invariants: no self-loops, no repeated pairs,
    /// symmetric adjacency, and degree sum equal to twice the edge count.
    pub fn check_invariants(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.u == e.v || e.u >= n || e.v >= n || !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return false;
            }
        }
        let degree_sum: usize = self.adjacency.iter().map(Vec::len).sum();
        if degree_sum != 2 * self.edges.len() {
            return false;
        }
        self.adjacency.iter().enumerate().all(|(u, adj)| {
            adj.iter()
                .all(|&v| v != u && self.adjacency[v].contains(&u))
        })
    }

    pub fn components(&self) -> ComponentStats {
        let mut uf = UnionFind::new(self.vertex_count());
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        ComponentStats::from_sizes(uf.set_sizes())
    }

    /// Number of vertices within `l` hops of `source`, the source included.
    pub fn bfs_ball(&self, source: usize, l: usize) -> usize {
        let mut bfs = Bfs::new(self.vertex_count());
        bfs.shell_counts(self, source, Some(l)).iter().sum()
    }
}

/// Component sizes of a graph, stored largest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentStats {
    sizes: Vec<usize>,
    n: usize,
}

impl ComponentStats {
    pub fn from_sizes(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let n = sizes.iter().sum();
        ComponentStats { sizes, n }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn giant_size(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    pub fn giant_fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.giant_size() as f64 / self.n as f64
        }
    }

    /// Mean size of the component containing a uniformly random vertex.
    /// With `exclude_giant` the largest component is dropped from both the
    /// sum and the vertex pool.
    pub fn avg_finite_size(&self, exclude_giant: bool) -> Result<f64> {
        let skip = usize::from(exclude_giant);
        let pool: usize = self.sizes.iter().skip(skip).sum();
        if pool == 0 {
            return Err(Error::EmptyPool);
        }
        let second: f64 = self
            .sizes
            .iter()
            .skip(skip)
            .map(|&s| (s as f64) * (s as f64))
            .sum();
        Ok(second / pool as f64)
    }

    /// `avg_finite_size` with the largest component excluded only when it
    /// spans more than `cutoff` of all vertices. Returns 0 for an empty pool.
    pub fn avg_finite_size_with_cutoff(&self, cutoff: f64) -> f64 {
        let exclude = self.giant_fraction() > cutoff;
        self.avg_finite_size(exclude).unwrap_or(0.0)
    }

    /// Sum of s^2 / N^2 over components: the probability that two uniformly
    /// random vertices share a component.
    pub fn pair_connectivity(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let n = self.n as f64;
        self.sizes.iter().map(|&s| (s as f64 / n).powi(2)).sum()
    }
}

/// Reusable BFS scratch space (one per worker).
#[derive(Debug, Clone)]
pub struct Bfs {
    stamp: Vec<u32>,
    epoch: u32,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs {
            stamp: vec![0; n],
            epoch: 0,
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    /// Counts of vertices at each hop distance from `source`; entry 0 is the
    /// source itself. Stops after `max_depth` shells when given.
    pub fn shell_counts(
        &mut self,
        g: &Graph,
        source: usize,
        max_depth: Option<usize>,
    ) -> Vec<usize> {
        if self.stamp.len() != g.vertex_count() {
            self.stamp = vec![0; g.vertex_count()];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.frontier.clear();
        self.frontier.push(source);
        self.stamp[source] = epoch;
        let mut counts = vec![1];
        let limit = max_depth.unwrap_or(usize::MAX);
        while counts.len() <= limit && !self.frontier.is_empty() {
            self.next.clear();
            for &u in &self.frontier {
                for &v in g.neighbors(u) {
                    if self.stamp[v] != epoch {
                        self.stamp[v] = epoch;
                        self.next.push(v);
                    }
                }
            }
            if self.next.is_empty() {
                break;
            }
            counts.push(self.next.len());
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        counts
    }
}

/// Ordered-pair shortest-path counts: `counts[l]` is the number of
/// (source, target) pairs at distance `l >= 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathLengthHistogram {
    pub counts: Vec<u64>,
    pub sources: usize,
}

impl PathLengthHistogram {
    pub fn count(&self, l: usize) -> u64 {
        self.counts.get(l).copied().unwrap_or(0)
    }

    pub fn total_pairs(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Mean shortest-path length over connected pairs.
    pub fn mean_length(&self) -> f64 {
        let total = self.total_pairs();
        if total == 0 {
            return 0.0;
        }
        let weighted: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(l, &c)| l as f64 * c as f64)
            .sum();
        weighted / total as f64
    }

    pub(crate) fn add_shells(&mut self, shells: &[usize]) {
        if self.counts.len() < shells.len() {
            self.counts.resize(shells.len(), 0);
        }
        for (l, &c) in shells.iter().enumerate().skip(1) {
            self.counts[l] += c as u64;
        }
        self.sources += 1;
    }

    pub(crate) fn merge(mut self, other: PathLengthHistogram) -> Self {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (l, c) in other.counts.into_iter().enumerate() {
            self.counts[l] += c;
        }
        self.sources += other.sources;
        self
    }
}

/// Runs a BFS from every listed source and accumulates the distance histogram.
pub fn path_length_histogram(g: &Graph, sources: &[usize]) -> PathLengthHistogram {
    sources
        .par_iter()
        .fold(
            || (Bfs::new(g.vertex_count()), PathLengthHistogram::default()),
            |(mut bfs, mut hist), &s| {
                let shells = bfs.shell_counts(g, s, None);
                hist.add_shells(&shells);
                (bfs, hist)
            },
        )
        .map(|(_, h)| h)
        .reduce(PathLengthHistogram::default, PathLengthHistogram::merge)
}

/// Default source set: every vertex for small graphs, otherwise a uniform
/// sample without replacement of `DEFAULT_SOURCE_SAMPLE` vertices.
pub fn default_sources<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    if n <= EXACT_HISTOGRAM_MAX_N {
        (0..n).collect()
    } else {
        sample_sources(n, DEFAULT_SOURCE_SAMPLE, rng)
    }
}

/// Uniform sample of `count` distinct vertices (all of them if `count >= n`),
/// returned in ascending order.
pub fn sample_sources<R: rand::Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<usize> {
    if count >= n {
        return (0..n).collect();
    }
    let mut picked = rand::seq::index::sample(rng, n, count).into_vec();
    picked.sort_unstable();
    picked
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn ring(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn build_path_graph() {
        let g = path3();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert_eq!(g.count_class(EdgeClass::Original), 2);
        assert!(g.check_invariants());
    }

    #[test]
    fn build_rejects_bad_edges() {
        assert_eq!(Graph::new(2, &[(0, 0)]), Err(Error::SelfLoop(0)));
        assert_eq!(
            Graph::new(4, &[(0, 1), (0, 1)]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::new(4, &[(1, 0), (0, 1)]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::new(2, &[(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        );
    }

    #[test]
    fn component_sizes() {
        assert_eq!(path3().components().sizes(), &[3]);
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.components().sizes(), &[2, 2]);
        assert_eq!(Graph::empty(5).components().sizes(), &[1, 1, 1, 1, 1]);
        assert_eq!(path3().components().giant_size(), 3);
    }

    #[test]
    fn avg_finite_size_examples() {
        let two_pairs = ComponentStats::from_sizes(vec![2, 2]);
        assert_eq!(two_pairs.avg_finite_size(false).unwrap(), 2.0);
        let s = ComponentStats::from_sizes(vec![3, 1]);
        assert_eq!(s.avg_finite_size(true).unwrap(), 1.0);
        // vertex-weighted mean: (4*4 + 2*2 + 2*2) / 8
        let s = ComponentStats::from_sizes(vec![4, 2, 2]);
        assert_eq!(s.avg_finite_size(false).unwrap(), 3.0);
        let single = ComponentStats::from_sizes(vec![5]);
        assert_eq!(single.avg_finite_size(true), Err(Error::EmptyPool));
    }

    #[test]
    fn cutoff_controls_giant_exclusion() {
        let s = ComponentStats::from_sizes(vec![50, 1, 1]);
        assert_eq!(s.avg_finite_size_with_cutoff(0.01), 1.0);
        assert!((s.avg_finite_size_with_cutoff(0.99) - 2502.0 / 52.0).abs() < 1e-12);
    }

    #[test]
    fn bfs_ball_examples() {
        let g = path3();
        assert_eq!(g.bfs_ball(0, 0), 1);
        assert_eq!(g.bfs_ball(1, 1), 3);
        assert_eq!(g.bfs_ball(0, 1), 2);
        assert_eq!(g.bfs_ball(0, 10), 3);
        let r = ring(10);
        for v in 0..10 {
            assert_eq!(r.bfs_ball(v, 3), 7);
        }
    }

    #[test]
    fn histogram_examples() {
        let tri = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = path_length_histogram(&tri, &[0, 1, 2]);
        assert_eq!(h.count(1), 6);
        assert_eq!(h.total_pairs(), 6);
        let h = path_length_histogram(&path3(), &[0, 1, 2]);
        assert_eq!((h.count(1), h.count(2)), (4, 2));
        assert!((h.mean_length() - 8.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn pair_connectivity_sums_squares() {
        let s = ComponentStats::from_sizes(vec![3, 1]);
        assert!((s.pair_connectivity() - 10.0 / 16.0).abs() < 1e-15);
    }
}
