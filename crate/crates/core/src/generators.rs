//! Network ensembles: configuration model, Erdős–Rényi (Gilbert), random
//! regular, ring-plus-shortcuts small world, periodic honeycomb, plus
//! ingestion of user-supplied edge lists.

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::degree::DegreeModel;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeClass, Graph};
use crate::rng::{purpose, replica_stream};

/// Full restarts allowed before configuration-model generation gives up.
pub const MAX_RESTARTS: usize = 100;
/// Re-draws of a rejected stub pair before a full restart.
pub const MAX_PAIR_REDRAWS: usize = 1_000;
/// Degree-sequence re-draws allowed while looking for an even stub count.
pub const MAX_PARITY_REDRAWS: usize = 1_000;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    ConfigModel(DegreeModel),
    Er { z: f64 },
    RandomRegular { k: usize },
    WattsStrogatz { beta: f64 },
    Honeycomb { rows: usize, cols: usize },
    EdgeList(EdgeListOptions),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeListOptions {
    pub path: PathBuf,
    pub bidirectional_only: bool,
    pub degree_cutoff: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match &self.kind {
            GeneratorKind::EdgeList(_) | GeneratorKind::Honeycomb { .. } => {}
            _ if self.n < 1 => return bad("N must be at least 1".into()),
            _ => {}
        }
        match &self.kind {
            GeneratorKind::ConfigModel(_) if self.n < 2 => bad("config model needs N >= 2".into()),
            GeneratorKind::Er { z } if !(*z >= 0.0 && *z < self.n as f64) => {
                bad(format!("ER mean degree z={z} must lie in [0, N)"))
            }
            GeneratorKind::RandomRegular { k } if *k >= self.n || (self.n * k) % 2 == 1 => {
                bad(format!(
                    "random regular needs k < N and N*k even (N={}, k={k})",
                    self.n
                ))
            }
            GeneratorKind::WattsStrogatz { beta } if !(0.0..=1.0).contains(beta) => {
                bad(format!("beta={beta} outside [0, 1]"))
            }
            GeneratorKind::WattsStrogatz { .. } if self.n < 3 => bad("ring needs N >= 3".into()),
            GeneratorKind::Honeycomb { rows, cols } if *rows < 2 || *cols < 2 => {
                bad("honeycomb needs rows, cols >= 2".into())
            }
            _ => Ok(()),
        }
    }

    /// Builds replica `replica`, drawing from the stream derived from
    /// `(seed, replica)`.
    pub fn generate(&self, replica: u32) -> Result<Graph> {
        self.validate()?;
        let mut rng = replica_stream(self.seed, purpose::GRAPH, replica);
        match &self.kind {
            GeneratorKind::ConfigModel(m) => gen_config_model(m, self.n, &mut rng),
            GeneratorKind::Er { z } => Ok(gen_er(self.n, *z, &mut rng)),
            GeneratorKind::RandomRegular { k } => gen_random_regular(self.n, *k, &mut rng),
            GeneratorKind::WattsStrogatz { beta } => Ok(gen_ws(self.n, *beta, &mut rng)),
            GeneratorKind::Honeycomb { rows, cols } => Ok(gen_honeycomb(*rows, *cols)),
            GeneratorKind::EdgeList(opts) => Ok(load_edge_list(opts)?.graph),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            GeneratorKind::ConfigModel(_) => "config".into(),
            GeneratorKind::Er { z } => format!("er(z={z})"),
            GeneratorKind::RandomRegular { k } => format!("regular(k={k})"),
            GeneratorKind::WattsStrogatz { beta } => format!("ws(beta={beta})"),
            GeneratorKind::Honeycomb { rows, cols } => format!("honeycomb({rows}x{cols})"),
            GeneratorKind::EdgeList(o) => format!("edgelist({})", o.path.display()),
        }
    }
}

fn pair_key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

fn original(u: usize, v: usize) -> Edge {
    Edge {
        u,
        v,
        class: EdgeClass::Original,
    }
}

/// Uniform stub matching on a degree sequence drawn from `model`, without
/// self-loops or repeated pairs.
pub fn gen_config_model<R: Rng + ?Sized>(
    model: &DegreeModel,
    n: usize,
    rng: &mut R,
) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter("config model needs N >= 2".into()));
    }
    'restart: for _ in 0..=MAX_RESTARTS {
        let degrees = draw_even_sequence(model, n, rng)?;
        let total: usize = degrees.iter().sum();
        let mut stubs = Vec::with_capacity(total);
        for (v, &d) in degrees.iter().enumerate() {
            stubs.extend(std::iter::repeat_n(v, d));
        }
        let mut seen = HashSet::with_capacity(total / 2);
        let mut edges = Vec::with_capacity(total / 2);
        while stubs.len() >= 2 {
            let mut redraws = 0;
            loop {
                let len = stubs.len();
                let i = rng.gen_range(0..len);
                let mut j = rng.gen_range(0..len - 1);
                if j >= i {
                    j += 1;
                }
                let (a, b) = (stubs[i], stubs[j]);
                if a != b && seen.insert(pair_key(a, b)) {
                    edges.push(original(a, b));
                    let (hi, lo) = (i.max(j), i.min(j));
                    stubs.swap_remove(hi);
                    stubs.swap_remove(lo);
                    break;
                }
                redraws += 1;
                if redraws >= MAX_PAIR_REDRAWS {
                    continue 'restart;
                }
            }
        }
        return Ok(Graph::from_edges_unchecked(n, edges));
    }
    Err(Error::GenerationFailed {
        restarts: MAX_RESTARTS,
    })
}

fn draw_even_sequence<R: Rng + ?Sized>(
    model: &DegreeModel,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    for _ in 0..MAX_PARITY_REDRAWS {
        let degrees: Vec<usize> = (0..n).map(|_| model.sample(rng)).collect();
        if degrees.iter().sum::<usize>() % 2 == 0 {
            return Ok(degrees);
        }
    }
    Err(Error::GenerationFailed {
        restarts: MAX_PARITY_REDRAWS,
    })
}

/// Gilbert graph: each of the N(N-1)/2 pairs is joined with probability z/N.
/// Pairs are enumerated with geometric skips, so the cost is linear in the
/// number of edges.
pub fn gen_er<R: Rng + ?Sized>(n: usize, z: f64, rng: &mut R) -> Graph {
    let p = z / n as f64;
    if n < 2 || p <= 0.0 {
        return Graph::empty(n);
    }
    let mut edges = Vec::with_capacity((n as f64 * z * 0.55) as usize + 16);
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push(original(v, w));
            }
        }
        return Graph::from_edges_unchecked(n, edges);
    }
    let log_q = (1.0 - p).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w += 1 + skip.min(i64::MAX as f64 / 4.0) as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push(original(v, w as usize));
        }
    }
    Graph::from_edges_unchecked(n, edges)
}

pub fn gen_random_regular<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Graph> {
    if k >= n || (n * k) % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "random regular needs k < N and N*k even (N={n}, k={k})"
        )));
    }
    gen_config_model(&DegreeModel::delta(k)?, n, rng)
}

/// Ring `0-1-...-(N-1)-0` plus N candidate shortcuts, each present with
/// probability `beta`, endpoints uniform; self-loops and repeats are dropped.
pub fn gen_ws<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Graph {
    let mut edges: Vec<Edge> = (0..n).map(|i| original(i, (i + 1) % n)).collect();
    let mut seen: HashSet<(usize, usize)> = edges.iter().map(|e| pair_key(e.u, e.v)).collect();
    for _ in 0..n {
        if !rng.gen_bool(beta) {
            continue;
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert(pair_key(u, v)) {
            edges.push(original(u, v));
        }
    }
    Graph::from_edges_unchecked(n, edges)
}

/// Honeycomb lattice on a torus of `rows x cols` two-vertex cells. Vertex
/// `2(i*cols + j)` is the A site of cell (i, j) and the next index its B site;
/// every A site joins the B sites of its own cell, the cell to the left and
/// the cell above.
pub fn gen_honeycomb(rows: usize, cols: usize) -> Graph {
    let a = |i: usize, j: usize| 2 * (i * cols + j);
    let b = |i: usize, j: usize| 2 * (i * cols + j) + 1;
    let mut edges = Vec::with_capacity(3 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            edges.push(original(a(i, j), b(i, j)));
            edges.push(original(a(i, j), b(i, (j + cols - 1) % cols)));
            edges.push(original(a(i, j), b((i + rows - 1) % rows, j)));
        }
    }
    Graph::from_edges_unchecked(2 * rows * cols, edges)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original label of each dense vertex index.
    pub labels: Vec<String>,
}

pub fn load_edge_list(opts: &EdgeListOptions) -> Result<LoadedGraph> {
    let text = std::fs::read_to_string(&opts.path)?;
    parse_edge_list(&text, opts.bidirectional_only, opts.degree_cutoff)
}

/// Parses edge-list text. Each non-comment line holds two vertex labels and
/// optionally the token `directed` (or a numeric weight, ignored). When every
/// label is a non-negative integer the labels are used as indices directly;
/// otherwise labels are numbered in order of first appearance. A
/// `# vertices: N` comment fixes the vertex count for integer labels.
pub fn parse_edge_list(
    text: &str,
    bidirectional_only: bool,
    degree_cutoff: Option<usize>,
) -> Result<LoadedGraph> {
    let mut arcs: Vec<(&str, &str)> = Vec::new();
    let mut declared_n: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("vertices:") {
                declared_n = n.trim().parse().ok();
            }
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(u), Some(v)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected two vertex labels".into(),
            });
        };
        if let Some(extra) = tokens.next() {
            if extra != "directed" && extra.parse::<f64>().is_err() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("unexpected token '{extra}'"),
                });
            }
        }
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: "too many tokens".into(),
            });
        }
        arcs.push((u, v));
    }
    if arcs.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let numeric: Option<Vec<(usize, usize)>> = arcs
        .iter()
        .map(|(u, v)| Some((u.parse().ok()?, v.parse().ok()?)))
        .collect();
    let (indexed, labels) = match numeric {
        Some(pairs) => {
            let max = pairs.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0);
            let n = declared_n.unwrap_or(0).max(max + 1);
            (pairs, (0..n).map(|i| i.to_string()).collect::<Vec<_>>())
        }
        None => {
            let mut index: HashMap<&str, usize> = HashMap::new();
            let mut labels = Vec::new();
            let mut pairs = Vec::with_capacity(arcs.len());
            for &(u, v) in &arcs {
                let mut id = |s| {
                    *index.entry(s).or_insert_with(|| {
                        labels.push(s.to_string());
                        labels.len() - 1
                    })
                };
                let a = id(u);
                pairs.push((a, id(v)));
            }
            (pairs, labels)
        }
    };

    let arc_set: HashSet<(usize, usize)> = indexed.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for &(u, v) in &indexed {
        if u == v {
            continue;
        }
        if bidirectional_only && !arc_set.contains(&(v, u)) {
            continue;
        }
        if seen.insert(pair_key(u, v)) {
            pairs.push((u, v));
        }
    }
    let n = labels.len();
    let graph =
        Graph::from_edges_unchecked(n, pairs.iter().map(|&(u, v)| original(u, v)).collect());
    match degree_cutoff {
        None => Ok(LoadedGraph { graph, labels }),
        Some(cutoff) => Ok(apply_degree_cutoff(&graph, &labels, cutoff)),
    }
}

/// Removes vertices of degree `>= cutoff` and renumbers the survivors in
/// order. Removal only lowers degrees, so a single pass is already a fixed
/// point.
pub fn apply_degree_cutoff(g: &Graph, labels: &[String], cutoff: usize) -> LoadedGraph {
    let n = g.vertex_count();
    let removed: Vec<bool> = (0..n).map(|v| g.degree(v) >= cutoff).collect();
    let mut new_index = vec![usize::MAX; n];
    let mut new_labels = Vec::new();
    for v in 0..n {
        if !removed[v] {
            new_index[v] = new_labels.len();
            new_labels.push(labels[v].clone());
        }
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| !removed[e.u] && !removed[e.v])
        .map(|e| original(new_index[e.u], new_index[e.v]))
        .collect();
    LoadedGraph {
        graph: Graph::from_edges_unchecked(new_labels.len(), edges),
        labels: new_labels,
    }
}

/// Writes `g` in edge-list format with a `# vertices: N` header.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# vertices: {}", g.vertex_count())?;
    for e in g.edges() {
        writeln!(out, "{} {}", e.u, e.v)?;
    }
    Ok(())
}

pub fn save_edge_list(g: &Graph, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_edge_list(g, std::io::BufWriter::new(file))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn config_model_delta2_is_union_of_cycles() {
        let g = gen_config_model(&DegreeModel::delta(2).unwrap(), 10, &mut rng(1)).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 2));
        assert!(g.check_invariants());
        // every component of a 2-regular graph is a cycle: edges == vertices
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn config_model_small_regular_cases() {
        let d3 = DegreeModel::delta(3).unwrap();
        assert!(matches!(
            gen_config_model(&d3, 3, &mut rng(2)),
            Err(Error::GenerationFailed { .. })
        ));
        // K4 is the only simple 3-regular graph on 4 vertices.
        let g = gen_config_model(&d3, 4, &mut rng(3)).unwrap();
        assert_eq!(g.edge_count(), 6);
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(g.is_adjacent(u, v), u != v);
            }
        }
    }

    #[test]
    fn er_zero_mean_is_empty() {
        assert_eq!(gen_er(100, 0.0, &mut rng(1)).edge_count(), 0);
        assert_eq!(gen_er(100, 1e-12, &mut rng(1)).edge_count(), 0);
    }

    #[test]
    fn er_small_graph_is_simple() {
        let g = gen_er(500, 4.0, &mut rng(5));
        assert!(g.check_invariants());
        let expected = 500.0 * 499.0 / 2.0 * (4.0 / 500.0);
        let sd = (expected * (1.0f64 - 4.0 / 500.0)).sqrt();
        assert!((g.edge_count() as f64 - expected).abs() < 4.0 * sd);
    }

    #[test]
    fn ws_without_shortcuts_is_a_ring() {
        let g = gen_ws(50, 0.0, &mut rng(1));
        assert_eq!(g.edge_count(), 50);
        for v in [0, 17, 49] {
            for l in 0..25 {
                assert_eq!(g.bfs_ball(v, l), 1 + 2 * l);
            }
        }
    }

    #[test]
    fn honeycomb_small() {
        let g = gen_honeycomb(2, 2);
        assert_eq!(g.vertex_count(), 8);
        assert!(g.degrees().iter().all(|&d| d == 3));
        assert!(g.check_invariants());
        for (r, c) in [(2, 2), (3, 5), (13, 39)] {
            let g = gen_honeycomb(r, c);
            assert!(g.edges().iter().all(|e| e.u % 2 != e.v % 2), "bipartite");
            assert!(g.check_invariants());
        }
    }

    #[test]
    fn edge_list_parsing() {
        let g = parse_edge_list("0 1\n1 0\n1 2\n", true, None)
            .unwrap()
            .graph;
        assert_eq!(g.edge_count(), 1);
        assert!(g.is_adjacent(0, 1));
        let g = parse_edge_list("0 1\n1 2", false, None).unwrap().graph;
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        let loaded =
            parse_edge_list("# comment\nalice bob\nbob carol directed\n", false, None).unwrap();
        assert_eq!(loaded.labels, vec!["alice", "bob", "carol"]);
        assert_eq!(loaded.graph.degrees(), vec![1, 2, 1]);
        assert!(matches!(
            parse_edge_list("0 1\n2\n", false, None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 bogus\n", false, None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert_eq!(
            parse_edge_list("# only\n\n", false, None),
            Err(Error::EmptyGraph)
        );
    }

    #[test]
    fn degree_cutoff_removes_hub() {
        let text: String = (1..=20).map(|i| format!("0 {i}\n")).collect();
        let g = parse_edge_list(&text, false, Some(15)).unwrap().graph;
        assert_eq!(g.vertex_count(), 20);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn cutoff_uses_input_degrees() {
        // degrees 1,2,2,1: both middle vertices go, the ends stay isolated
        let g = parse_edge_list("a b\nb c\nc d\n", false, Some(2)).unwrap();
        assert_eq!(g.labels, vec!["a", "d"]);
        assert_eq!(g.graph.edge_count(), 0);
    }

    #[test]
    fn seeds_reproduce_graphs() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::ConfigModel(DegreeModel::poisson(3.0).unwrap()),
            n: 2000,
            seed: 11,
        };
        assert_eq!(spec.generate(0).unwrap(), spec.generate(0).unwrap());
        assert_ne!(spec.generate(0).unwrap(), spec.generate(1).unwrap());
    }

    #[test]
    fn spec_validation() {
        let ws = GeneratorSpec {
            kind: GeneratorKind::WattsStrogatz { beta: 1.5 },
            n: 10,
            seed: 1,
        };
        assert!(ws.validate().is_err());
        let rr = GeneratorSpec {
            kind: GeneratorKind::RandomRegular { k: 3 },
            n: 5,
            seed: 1,
        };
        assert!(rr.validate().is_err());
    }
}
