//! Grid graphs: node dynamic parameters, edge susceptances, case-file I/O,
//! and synthetic graph generators.
//!
//! Node ids are 1-based in files and 0-based everywhere in memory; the file
//! boundary converts. A "case" on disk is a directory holding exactly
//! `edges.csv` and `nodes.csv`.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One undirected transmission line; stored with `from < to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEdge {
    pub from: usize,
    pub to: usize,
    pub susceptance: f64,
}

/// Undirected weighted grid graph with per-node inertia and damping.
///
/// Invariants enforced at construction: positive susceptances, inertias and
/// dampings; no self-loops or duplicate edges; the graph is connected.
#[derive(Debug, Clone)]
pub struct GridGraph {
    node_count: usize,
    edges: Vec<GridEdge>,
    inertia: Vec<f64>,
    damping: Vec<f64>,
    /// Cached weighted degree B_j = sum of susceptances incident to j.
    weighted_degree: Vec<f64>,
    /// Cached adjacency: for each node, sorted (neighbor, susceptance).
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl GridGraph {
    /// Builds and validates a graph. Edges may arrive in either orientation;
    /// they are canonicalized to `from < to` and sorted.
    pub fn new(
        node_count: usize,
        edges: Vec<(usize, usize, f64)>,
        inertia: Vec<f64>,
        damping: Vec<f64>,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Validation(
                "graph must have at least one node".into(),
            ));
        }
        if inertia.len() != node_count || damping.len() != node_count {
            return Err(Error::Validation(format!(
                "expected {node_count} inertia/damping entries, got {}/{}",
                inertia.len(),
                damping.len()
            )));
        }
        for (j, &m) in inertia.iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::Validation(format!(
                    "inertia of node {} must be positive and finite, got {m}",
                    j + 1
                )));
            }
        }
        for (j, &d) in damping.iter().enumerate() {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Validation(format!(
                    "damping of node {} must be positive and finite, got {d}",
                    j + 1
                )));
            }
        }

        let mut canonical: Vec<GridEdge> = Vec::with_capacity(edges.len());
        for &(a, b, susceptance) in &edges {
            if a == b {
                return Err(Error::Validation(format!("self-loop on node {}", a + 1)));
            }
            if a >= node_count || b >= node_count {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) references a node outside 1..={node_count}",
                    a + 1,
                    b + 1
                )));
            }
            if !(susceptance.is_finite() && susceptance > 0.0) {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) must have positive finite susceptance, got {susceptance}",
                    a + 1,
                    b + 1
                )));
            }
            let (from, to) = if a < b { (a, b) } else { (b, a) };
            canonical.push(GridEdge {
                from,
                to,
                susceptance,
            });
        }
        canonical.sort_by_key(|e| (e.from, e.to));
        for w in canonical.windows(2) {
            if w[0].from == w[1].from && w[0].to == w[1].to {
                return Err(Error::Validation(format!(
                    "duplicate edge ({}, {})",
                    w[0].from + 1,
                    w[0].to + 1
                )));
            }
        }

        let mut weighted_degree = vec![0.0; node_count];
        let mut adjacency = vec![Vec::new(); node_count];
        for e in &canonical {
            weighted_degree[e.from] += e.susceptance;
            weighted_degree[e.to] += e.susceptance;
            adjacency[e.from].push((e.to, e.susceptance));
            adjacency[e.to].push((e.from, e.susceptance));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_by_key(|&(i, _)| i);
        }

        let graph = GridGraph {
            node_count,
            edges: canonical,
            inertia,
            damping,
            weighted_degree,
            adjacency,
        };
        if !graph.is_connected() {
            return Err(Error::Validation("graph is not connected".into()));
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[GridEdge] {
        &self.edges
    }

    pub fn inertia(&self, node: usize) -> f64 {
        self.inertia[node]
    }

    pub fn damping(&self, node: usize) -> f64 {
        self.damping[node]
    }

    /// B_j: total susceptance incident to `node`.
    pub fn weighted_degree(&self, node: usize) -> f64 {
        self.weighted_degree[node]
    }

    /// Sorted (neighbor, susceptance) list of `node`.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    /// Susceptance of the edge between `a` and `b`, if present.
    pub fn susceptance(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency[a]
            .binary_search_by_key(&b, |&(i, _)| i)
            .ok()
            .map(|idx| self.adjacency[a][idx].1)
    }

    /// The undirected edge set as canonical (from, to) pairs.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|e| (e.from, e.to)).collect()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.node_count
    }

    /// True if any three nodes are mutually adjacent.
    pub fn has_triangle(&self) -> bool {
        self.edges.iter().any(|e| {
            let (short, long) = if self.adjacency[e.from].len() <= self.adjacency[e.to].len() {
                (e.from, e.to)
            } else {
                (e.to, e.from)
            };
            self.adjacency[short]
                .iter()
                .any(|&(w, _)| w != long && self.susceptance(w, long).is_some())
        })
    }
}

/// One-hop and two-hop neighborhoods of every node.
///
/// `two_hop[j]` holds every node (other than `j`) sharing at least one common
/// neighbor with `j`, whether or not it is also adjacent; `strict_two_hop[j]`
/// removes the adjacent ones, leaving nodes at graph distance exactly two.
#[derive(Debug, Clone)]
pub struct NeighborSets {
    one_hop: Vec<BTreeSet<usize>>,
    two_hop: Vec<BTreeSet<usize>>,
    strict_two_hop: Vec<BTreeSet<usize>>,
}

impl NeighborSets {
    pub fn one_hop(&self, node: usize) -> &BTreeSet<usize> {
        &self.one_hop[node]
    }

    pub fn two_hop(&self, node: usize) -> &BTreeSet<usize> {
        &self.two_hop[node]
    }

    pub fn strict_two_hop(&self, node: usize) -> &BTreeSet<usize> {
        &self.strict_two_hop[node]
    }

    /// Nodes within two hops: the union N_j ∪ N_{j,2}.
    pub fn within_two_hops(&self, node: usize) -> BTreeSet<usize> {
        self.one_hop[node]
            .union(&self.two_hop[node])
            .copied()
            .collect()
    }
}

/// Computes one-hop, two-hop, and strict two-hop sets for every node.
pub fn neighbor_sets(g: &GridGraph) -> NeighborSets {
    let n = g.node_count();
    let one_hop: Vec<BTreeSet<usize>> = (0..n)
        .map(|j| g.neighbors(j).iter().map(|&(i, _)| i).collect())
        .collect();
    let mut two_hop = vec![BTreeSet::new(); n];
    for j in 0..n {
        for &k in &one_hop[j] {
            for &i in &one_hop[k] {
                if i != j {
                    two_hop[j].insert(i);
                }
            }
        }
    }
    let strict_two_hop = (0..n)
        .map(|j| two_hop[j].difference(&one_hop[j]).copied().collect())
        .collect();
    NeighborSets {
        one_hop,
        two_hop,
        strict_two_hop,
    }
}

/// Shape of a synthetically generated graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Path,
    Cycle,
    Star,
    /// Random spanning tree plus enough random chords to guarantee at least
    /// one cycle and an edge count of at least `n`.
    RandomLoopy,
}

impl std::str::FromStr for GraphKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "path" => Ok(GraphKind::Path),
            "cycle" => Ok(GraphKind::Cycle),
            "star" => Ok(GraphKind::Star),
            "random_loopy" | "random-loopy" => Ok(GraphKind::RandomLoopy),
            other => Err(format!(
                "unknown graph kind {other:?} (expected path, cycle, star, or random_loopy)"
            )),
        }
    }
}

fn check_range(name: &str, range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(Error::Validation(format!(
            "{name} range [{lo}, {hi}] must satisfy 0 < lo <= hi"
        )));
    }
    Ok(())
}

/// Generates a synthetic grid graph of the given shape with parameters drawn
/// uniformly from the given inclusive ranges. Deterministic for a fixed seed;
/// the path/cycle/star shapes are seed-independent.
pub fn generate_graph(
    kind: GraphKind,
    n: usize,
    seed: u64,
    b_range: (f64, f64),
    m_range: (f64, f64),
    d_range: (f64, f64),
) -> Result<GridGraph> {
    let min_n = if kind == GraphKind::RandomLoopy { 4 } else { 2 };
    if n < min_n {
        return Err(Error::Validation(format!(
            "{kind:?} graph needs at least {min_n} nodes, got {n}"
        )));
    }
    check_range("susceptance", b_range)?;
    check_range("inertia", m_range)?;
    check_range("damping", d_range)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(usize, usize)> = match kind {
        GraphKind::Path => (0..n - 1).map(|i| (i, i + 1)).collect(),
        GraphKind::Cycle => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        GraphKind::Star => (1..n).map(|i| (0, i)).collect(),
        GraphKind::RandomLoopy => {
            // Random recursive tree on shuffled labels, then random chords.
            let mut labels: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                labels.swap(i, j);
            }
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
            for i in 1..n {
                let parent = labels[rng.gen_range(0..i)];
                let child = labels[i];
                let key = (parent.min(child), parent.max(child));
                pairs.push(key);
                present.insert(key);
            }
            let chords = 1 + n / 4;
            let mut added = 0;
            while added < chords {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a == b {
                    continue;
                }
                let key = (a.min(b), a.max(b));
                if present.insert(key) {
                    pairs.push(key);
                    added += 1;
                }
            }
            pairs
        }
    };

    let sample = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| {
        if lo == hi {
            lo
        } else {
            rng.gen_range(lo..=hi)
        }
    };
    let edges: Vec<(usize, usize, f64)> = pairs
        .iter()
        .map(|&(a, b)| (a, b, sample(&mut rng, b_range)))
        .collect();
    let inertia: Vec<f64> = (0..n).map(|_| sample(&mut rng, m_range)).collect();
    let damping: Vec<f64> = (0..n).map(|_| sample(&mut rng, d_range)).collect();
    GridGraph::new(n, edges, inertia, damping)
}

/// Loads a graph from an edge CSV (`from,to,susceptance`) and a node CSV
/// (`node,inertia,damping`); node ids in the files are 1..N contiguous.
pub fn load_case(edge_file: &Path, node_file: &Path) -> Result<GridGraph> {
    let node_text = fs::read_to_string(node_file).map_err(|e| Error::io(node_file, e))?;
    let mut nodes: Vec<(usize, f64, f64)> = Vec::new();
    for (lineno, line) in node_text.lines().enumerate() {
        let line = line.trim();
        if lineno == 0 {
            if line != "node,inertia,damping" {
                return Err(Error::parse(
                    node_file,
                    1,
                    format!("expected header `node,inertia,damping`, got {line:?}"),
                ));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::parse(node_file, lineno + 1, "expected 3 fields"));
        }
        let id: usize = fields[0]
            .trim()
            .parse()
            .map_err(|e| Error::parse(node_file, lineno + 1, format!("bad node id: {e}")))?;
        let m: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|e| Error::parse(node_file, lineno + 1, format!("bad inertia: {e}")))?;
        let d: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|e| Error::parse(node_file, lineno + 1, format!("bad damping: {e}")))?;
        nodes.push((id, m, d));
    }
    let n = nodes.len();
    if n == 0 {
        return Err(Error::Validation(format!(
            "node file {} lists no nodes",
            node_file.display()
        )));
    }
    let mut inertia = vec![f64::NAN; n];
    let mut damping = vec![f64::NAN; n];
    for (id, m, d) in nodes {
        if id == 0 || id > n {
            return Err(Error::Validation(format!(
                "node ids must be 1..{n} contiguous; saw id {id}"
            )));
        }
        if !inertia[id - 1].is_nan() {
            return Err(Error::Validation(format!("node {id} listed twice")));
        }
        inertia[id - 1] = m;
        damping[id - 1] = d;
    }

    let edge_text = fs::read_to_string(edge_file).map_err(|e| Error::io(edge_file, e))?;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (lineno, line) in edge_text.lines().enumerate() {
        let line = line.trim();
        if lineno == 0 {
            if line != "from,to,susceptance" {
                return Err(Error::parse(
                    edge_file,
                    1,
                    format!("expected header `from,to,susceptance`, got {line:?}"),
                ));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::parse(edge_file, lineno + 1, "expected 3 fields"));
        }
        let from: usize = fields[0]
            .trim()
            .parse()
            .map_err(|e| Error::parse(edge_file, lineno + 1, format!("bad from id: {e}")))?;
        let to: usize = fields[1]
            .trim()
            .parse()
            .map_err(|e| Error::parse(edge_file, lineno + 1, format!("bad to id: {e}")))?;
        let b: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|e| Error::parse(edge_file, lineno + 1, format!("bad susceptance: {e}")))?;
        if from == 0 || to == 0 || from > n || to > n {
            return Err(Error::parse(
                edge_file,
                lineno + 1,
                format!("edge ({from}, {to}) outside node range 1..{n}"),
            ));
        }
        edges.push((from - 1, to - 1, b));
    }
    GridGraph::new(n, edges, inertia, damping)
}

/// Loads a case directory containing `edges.csv` and `nodes.csv`.
pub fn load_case_dir(dir: &Path) -> Result<GridGraph> {
    load_case(&dir.join("edges.csv"), &dir.join("nodes.csv"))
}

/// Writes `edges.csv` and `nodes.csv` into `dir` (created if absent), in the
/// schema `load_case` reads back; node ids are written 1-based.
pub fn save_case(g: &GridGraph, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let edge_path = dir.join("edges.csv");
    let mut out = String::from("from,to,susceptance\n");
    for e in g.edges() {
        out.push_str(&format!("{},{},{}\n", e.from + 1, e.to + 1, e.susceptance));
    }
    write_text(&edge_path, &out)?;

    let node_path = dir.join("nodes.csv");
    let mut out = String::from("node,inertia,damping\n");
    for j in 0..g.node_count() {
        out.push_str(&format!("{},{},{}\n", j + 1, g.inertia(j), g.damping(j)));
    }
    write_text(&node_path, &out)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
