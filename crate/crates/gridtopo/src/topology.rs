//! Edge recovery: threshold the filter-bank norms to get candidate edges,
//! prune the spurious two-hop candidates by their phase signature, and score
//! the result against ground truth.
//!
//! The phase signature: between nodes at graph distance exactly two, the
//! exact Wiener response is a negative real function of frequency, so its
//! phase sits on ±π at every point — while a true neighbor's phase moves.
//! A candidate is dropped only when both of its directions show the flat
//! ±π phase within tolerance τ at every frequency where the magnitude is
//! large enough for phase to mean anything.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimation::FirWienerBank;
use crate::graph::GridGraph;
use crate::spectral::{FrequencyResponseSet, PairResponse};

/// Candidate (unordered) edges whose filter energy clears the threshold, with
/// both directional norms recorded.
#[derive(Debug, Clone)]
pub struct WienerEdgeSet {
    n_nodes: usize,
    rho: f64,
    /// (from, to, ‖taps to→from… norm of filter from `from` into `to`‖, reverse), from < to.
    pairs: Vec<(usize, usize, f64, f64)>,
}

impl WienerEdgeSet {
    /// Wraps explicit candidate pairs (canonicalized to from < to).
    pub fn from_pairs(
        n_nodes: usize,
        rho: f64,
        pairs: Vec<(usize, usize, f64, f64)>,
    ) -> Result<Self> {
        let mut canonical = Vec::with_capacity(pairs.len());
        for (a, b, fwd, rev) in pairs {
            if a == b || a >= n_nodes || b >= n_nodes {
                return Err(Error::Validation(format!(
                    "candidate pair ({}, {}) invalid for {n_nodes} nodes",
                    a + 1,
                    b + 1
                )));
            }
            let (from, to, fwd, rev) = if a < b {
                (a, b, fwd, rev)
            } else {
                (b, a, rev, fwd)
            };
            canonical.push((from, to, fwd, rev));
        }
        canonical.sort_by_key(|&(f, t, _, _)| (f, t));
        canonical.dedup_by_key(|&mut (f, t, _, _)| (f, t));
        Ok(WienerEdgeSet {
            n_nodes,
            rho,
            pairs: canonical,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// (from, to, norm of the filter estimating `to` from `from`, reverse).
    pub fn pairs(&self) -> &[(usize, usize, f64, f64)] {
        &self.pairs
    }

    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.pairs.iter().map(|&(f, t, _, _)| (f, t)).collect()
    }
}

/// Thresholds the bank: the unordered pair (i, j) is a candidate edge iff
/// either directional tap norm exceeds `rho`.
pub fn detect_edges(bank: &FirWienerBank, rho: f64) -> WienerEdgeSet {
    let n = bank.n_nodes();
    let mut pairs = Vec::new();
    for from in 0..n {
        for to in from + 1..n {
            // "fwd": filter that predicts `to` using `from`.
            let fwd = bank.pair_norm(to, from);
            let rev = bank.pair_norm(from, to);
            if fwd > rho || rev > rho {
                pairs.push((from, to, fwd, rev));
            }
        }
    }
    WienerEdgeSet {
        n_nodes: n,
        rho,
        pairs,
    }
}

/// Phase verdict for one direction of a candidate edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionVerdict {
    /// Phase leaves the ±π line somewhere: consistent with a real neighbor.
    Genuine,
    /// Phase within τ of ±π at every usable frequency: the two-hop signature.
    Spurious,
    /// No grid point has enough magnitude to trust any phase.
    Indeterminate,
}

/// Classifies one direction: spurious iff the phase is within `tau` of ±π at
/// every point whose magnitude is large enough to carry phase information;
/// indeterminate iff no point qualifies.
pub fn classify_direction(response: &PairResponse, tau: f64) -> DirectionVerdict {
    let mut usable = 0usize;
    let mut all_on_pi = true;
    for k in 0..response.values().len() {
        if response.is_indeterminate(k) {
            continue;
        }
        usable += 1;
        let phase = response.phase(k);
        let dist = (phase - std::f64::consts::PI)
            .abs()
            .min((phase + std::f64::consts::PI).abs());
        if dist >= tau {
            all_on_pi = false;
        }
    }
    if usable == 0 {
        DirectionVerdict::Indeterminate
    } else if all_on_pi {
        DirectionVerdict::Spurious
    } else {
        DirectionVerdict::Genuine
    }
}

/// Per-candidate record kept for diagnostics and CSV export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDiagnostics {
    pub from: usize,
    pub to: usize,
    /// Norm of the filter estimating `to` from `from`.
    pub norm_fwd: f64,
    /// Norm of the filter estimating `from` from `to`.
    pub norm_rev: f64,
    /// Verdicts are absent when pruning was skipped.
    pub verdict_fwd: Option<DirectionVerdict>,
    pub verdict_rev: Option<DirectionVerdict>,
    pub pruned: bool,
}

/// Final topology estimate: candidate set, pruned subset, and survivors.
#[derive(Debug, Clone)]
pub struct TopologyEstimate {
    n_nodes: usize,
    wiener_edges: BTreeSet<(usize, usize)>,
    pruned_edges: BTreeSet<(usize, usize)>,
    final_edges: BTreeSet<(usize, usize)>,
    diagnostics: Vec<PairDiagnostics>,
    rho: f64,
    tau: Option<f64>,
    omega_points: usize,
}

impl TopologyEstimate {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn wiener_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.wiener_edges
    }

    pub fn pruned_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.pruned_edges
    }

    pub fn final_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.final_edges
    }

    pub fn diagnostics(&self) -> &[PairDiagnostics] {
        &self.diagnostics
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// τ used for pruning; `None` when pruning was skipped.
    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    /// Size of the frequency grid the verdicts were taken on (0 when pruning
    /// was skipped).
    pub fn omega_points(&self) -> usize {
        self.omega_points
    }

    /// Adopts the candidate set unchanged — the pipeline with pruning
    /// disabled.
    pub fn without_pruning(edges: &WienerEdgeSet) -> Self {
        let diagnostics = edges
            .pairs()
            .iter()
            .map(|&(from, to, norm_fwd, norm_rev)| PairDiagnostics {
                from,
                to,
                norm_fwd,
                norm_rev,
                verdict_fwd: None,
                verdict_rev: None,
                pruned: false,
            })
            .collect();
        let set = edges.edge_set();
        TopologyEstimate {
            n_nodes: edges.n_nodes(),
            wiener_edges: set.clone(),
            pruned_edges: BTreeSet::new(),
            final_edges: set,
            diagnostics,
            rho: edges.rho(),
            tau: None,
            omega_points: 0,
        }
    }

    /// Writes `from,to,norm_fwd,norm_rev,pruned` rows (1-based ids); the
    /// surviving edge set is exactly the rows with `pruned=0`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "from,to,norm_fwd,norm_rev,pruned").map_err(io)?;
        for d in &self.diagnostics {
            writeln!(
                w,
                "{},{},{},{},{}",
                d.from + 1,
                d.to + 1,
                d.norm_fwd,
                d.norm_rev,
                u8::from(d.pruned)
            )
            .map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Prunes candidates whose BOTH directions carry the two-hop phase signature.
/// Disagreement between directions keeps the edge, and an indeterminate
/// direction never prunes — absence of evidence keeps edges.
pub fn prune(
    edges: &WienerEdgeSet,
    responses: &FrequencyResponseSet,
    tau: f64,
) -> Result<TopologyEstimate> {
    if responses.n_nodes() != edges.n_nodes() {
        if let Some(&(from, to, _, _)) = edges.pairs().first() {
            return Err(Error::MissingResponse {
                from: from + 1,
                to: to + 1,
            });
        }
        return Err(Error::NodeSetMismatch {
            expected: edges.n_nodes(),
            actual: responses.n_nodes(),
        });
    }
    let mut diagnostics = Vec::with_capacity(edges.pairs().len());
    let mut pruned_edges = BTreeSet::new();
    let mut final_edges = BTreeSet::new();
    for &(from, to, norm_fwd, norm_rev) in edges.pairs() {
        let fwd = classify_direction(responses.response(to, from), tau);
        let rev = classify_direction(responses.response(from, to), tau);
        let pruned = fwd == DirectionVerdict::Spurious && rev == DirectionVerdict::Spurious;
        if pruned {
            pruned_edges.insert((from, to));
        } else {
            final_edges.insert((from, to));
        }
        diagnostics.push(PairDiagnostics {
            from,
            to,
            norm_fwd,
            norm_rev,
            verdict_fwd: Some(fwd),
            verdict_rev: Some(rev),
            pruned,
        });
    }
    Ok(TopologyEstimate {
        n_nodes: edges.n_nodes(),
        wiener_edges: edges.edge_set(),
        pruned_edges,
        final_edges,
        diagnostics,
        rho: edges.rho(),
        tau: Some(tau),
        omega_points: responses.grid().len(),
    })
}

/// False positives, false negatives, and their ratio to the true edge count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_edge_count: usize,
    pub relative_error: f64,
}

impl ErrorReport {
    /// The single-line text record: `fp=<int> fn=<int> true=<int> rel_err=<decimal>`.
    pub fn report_line(&self) -> String {
        format!(
            "fp={} fn={} true={} rel_err={}",
            self.false_positives, self.false_negatives, self.true_edge_count, self.relative_error
        )
    }
}

/// Scores a recovered edge set against the truth graph's edges.
pub fn score_edges(
    truth: &GridGraph,
    n_nodes: usize,
    recovered: &BTreeSet<(usize, usize)>,
) -> Result<ErrorReport> {
    if truth.node_count() != n_nodes {
        return Err(Error::NodeSetMismatch {
            expected: truth.node_count(),
            actual: n_nodes,
        });
    }
    let true_edges = truth.edge_set();
    let false_positives = recovered.difference(&true_edges).count();
    let false_negatives = true_edges.difference(recovered).count();
    let relative_error = if true_edges.is_empty() {
        if false_positives == 0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (false_positives + false_negatives) as f64 / true_edges.len() as f64
    };
    Ok(ErrorReport {
        false_positives,
        false_negatives,
        true_edge_count: true_edges.len(),
        relative_error,
    })
}

/// Scores a topology estimate's surviving edges against the truth graph.
pub fn score(truth: &GridGraph, estimate: &TopologyEstimate) -> Result<ErrorReport> {
    score_edges(truth, estimate.n_nodes(), estimate.final_edges())
}

/// Reads rows written by [`TopologyEstimate::write_csv`]; ids return 0-based.
pub fn read_edges_csv(path: &Path) -> Result<Vec<PairDiagnostics>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if lineno == 0 {
            if line != "from,to,norm_fwd,norm_rev,pruned" {
                return Err(Error::parse(
                    path,
                    1,
                    format!("expected header `from,to,norm_fwd,norm_rev,pruned`, got {line:?}"),
                ));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::parse(path, lineno + 1, "expected 5 fields"));
        }
        let id = |s: &str, what: &str| -> Result<usize> {
            let v: usize = s
                .trim()
                .parse()
                .map_err(|e| Error::parse(path, lineno + 1, format!("bad {what}: {e}")))?;
            if v == 0 {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("{what} must be >= 1"),
                ));
            }
            Ok(v - 1)
        };
        let num = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| Error::parse(path, lineno + 1, format!("bad {what}: {e}")))
        };
        let pruned = match fields[4].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("pruned flag must be 0 or 1, got {other:?}"),
                ))
            }
        };
        rows.push(PairDiagnostics {
            from: id(fields[0], "from id")?,
            to: id(fields[1], "to id")?,
            norm_fwd: num(fields[2], "norm_fwd")?,
            norm_rev: num(fields[3], "norm_rev")?,
            verdict_fwd: None,
            verdict_rev: None,
            pruned,
        });
    }
    Ok(rows)
}
