//! Ranking metrics (AUC, average precision) and classical similarity
//! heuristics for head-to-head comparison with the learned model.
//!
//! Heuristic indices follow the standard undirected definitions, applied to
//! the symmetrized observed graph. Division by zero yields score 0 by
//! convention; Adamic–Adar skips common neighbors of degree ≤ 1.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::Path;

use crate::graph::{DirectedGraph, NodeId};
use crate::split::LabeledPair;
use crate::{Error, Result};

/// A prediction attached to its ground-truth label.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub src: NodeId,
    pub dst: NodeId,
    pub score: f64,
    pub label: u8,
}

fn validate_scores(pairs: &[ScoredPair]) -> Result<()> {
    if let Some(bad) = pairs.iter().find(|p| !p.score.is_finite()) {
        return Err(Error::invalid(format!(
            "non-finite score {} for pair ({}, {})",
            bad.score, bad.src, bad.dst
        )));
    }
    if pairs.iter().any(|p| p.label > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    Ok(())
}

/// Area under the ROC curve: the probability that a random positive is
/// scored above a random negative, ties counting one half. Computed by
/// sorting and average-ranking in O(n log n).
pub fn auc(pairs: &[ScoredPair]) -> Result<f64> {
    validate_scores(pairs)?;
    let num_pos = pairs.iter().filter(|p| p.label == 1).count();
    let num_neg = pairs.len() - num_pos;
    if num_pos == 0 || num_neg == 0 {
        return Err(Error::invalid(
            "AUC needs at least one positive and one negative",
        ));
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| pairs[a].score.partial_cmp(&pairs[b].score).unwrap());

    // Average rank within each tie group (1-based ranks).
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && pairs[order[j]].score == pairs[order[i]].score {
            j += 1;
        }
        let avg_rank = ((i + 1 + j) as f64) / 2.0;
        for &idx in &order[i..j] {
            if pairs[idx].label == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (num_pos * (num_pos + 1)) as f64 / 2.0;
    Ok(u / (num_pos as f64 * num_neg as f64))
}

/// Mean of the precision values observed at each positive's rank, with the
/// list sorted by score descending and ties broken by stable input order.
pub fn average_precision(pairs: &[ScoredPair]) -> Result<f64> {
    validate_scores(pairs)?;
    if !pairs.iter().any(|p| p.label == 1) {
        return Err(Error::invalid("average precision needs at least one positive"));
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| pairs[b].score.partial_cmp(&pairs[a].score).unwrap());
    let mut hits = 0usize;
    let mut precision_sum = 0.0;
    for (rank0, &idx) in order.iter().enumerate() {
        if pairs[idx].label == 1 {
            hits += 1;
            precision_sum += hits as f64 / (rank0 + 1) as f64;
        }
    }
    Ok(precision_sum / hits as f64)
}

/// The classical similarity indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeuristicIndex {
    CommonNeighbors,
    Salton,
    Jaccard,
    Sorensen,
    HubPromoted,
    HubDepressed,
    LeichtHolmeNewman,
    PreferentialAttachment,
    AdamicAdar,
    ResourceAllocation,
    LocalPath,
    Katz,
}

impl HeuristicIndex {
    pub const ALL: [HeuristicIndex; 12] = [
        HeuristicIndex::CommonNeighbors,
        HeuristicIndex::Salton,
        HeuristicIndex::Jaccard,
        HeuristicIndex::Sorensen,
        HeuristicIndex::HubPromoted,
        HeuristicIndex::HubDepressed,
        HeuristicIndex::LeichtHolmeNewman,
        HeuristicIndex::PreferentialAttachment,
        HeuristicIndex::AdamicAdar,
        HeuristicIndex::ResourceAllocation,
        HeuristicIndex::LocalPath,
        HeuristicIndex::Katz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HeuristicIndex::CommonNeighbors => "cn",
            HeuristicIndex::Salton => "salton",
            HeuristicIndex::Jaccard => "jaccard",
            HeuristicIndex::Sorensen => "sorensen",
            HeuristicIndex::HubPromoted => "hpi",
            HeuristicIndex::HubDepressed => "hdi",
            HeuristicIndex::LeichtHolmeNewman => "lhn1",
            HeuristicIndex::PreferentialAttachment => "pa",
            HeuristicIndex::AdamicAdar => "aa",
            HeuristicIndex::ResourceAllocation => "ra",
            HeuristicIndex::LocalPath => "lp",
            HeuristicIndex::Katz => "katz",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|i| i.as_str() == name)
            .ok_or_else(|| Error::invalid(format!("unknown heuristic index '{name}'")))
    }
}

/// Damping parameters for the path-counting indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicParams {
    pub katz_beta: f64,
    pub lp_beta: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self {
            katz_beta: 0.05,
            lp_beta: 0.01,
        }
    }
}

const KATZ_MAX_LENGTH: usize = 5;

/// Precomputed symmetrized adjacency for scoring many pairs on one graph.
pub struct HeuristicScorer {
    neighbors: Vec<Vec<NodeId>>,
    params: HeuristicParams,
}

impl HeuristicScorer {
    pub fn new(g: &DirectedGraph, params: HeuristicParams) -> Self {
        let mut sets: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); g.num_nodes()];
        for &(u, v) in g.edges() {
            sets[u].insert(v);
            sets[v].insert(u);
        }
        let neighbors = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Self { neighbors, params }
    }

    fn degree(&self, v: NodeId) -> usize {
        self.neighbors[v].len()
    }

    fn common(&self, x: NodeId, y: NodeId) -> Vec<NodeId> {
        let (a, b) = (&self.neighbors[x], &self.neighbors[y]);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Number of walks of each length 1..=max from x to y, over the
    /// symmetrized adjacency.
    fn walk_counts(&self, x: NodeId, y: NodeId, max: usize) -> Vec<f64> {
        let mut reached = vec![0.0; self.neighbors.len()];
        reached[x] = 1.0;
        let mut counts = Vec::with_capacity(max);
        for _ in 0..max {
            let mut next = vec![0.0; self.neighbors.len()];
            for (v, &paths) in reached.iter().enumerate() {
                if paths > 0.0 {
                    for &w in &self.neighbors[v] {
                        next[w] += paths;
                    }
                }
            }
            counts.push(next[y]);
            reached = next;
        }
        counts
    }

    pub fn score(&self, index: HeuristicIndex, x: NodeId, y: NodeId) -> Result<f64> {
        let n = self.neighbors.len();
        if x >= n || y >= n {
            return Err(Error::invalid(format!(
                "pair ({x}, {y}) out of range for {n} nodes"
            )));
        }
        let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
        let kx = self.degree(x) as f64;
        let ky = self.degree(y) as f64;
        Ok(match index {
            HeuristicIndex::CommonNeighbors => self.common(x, y).len() as f64,
            HeuristicIndex::Salton => ratio(self.common(x, y).len() as f64, (kx * ky).sqrt()),
            HeuristicIndex::Jaccard => {
                let cn = self.common(x, y).len() as f64;
                ratio(cn, kx + ky - cn)
            }
            HeuristicIndex::Sorensen => ratio(2.0 * self.common(x, y).len() as f64, kx + ky),
            HeuristicIndex::HubPromoted => {
                ratio(self.common(x, y).len() as f64, kx.min(ky))
            }
            HeuristicIndex::HubDepressed => {
                ratio(self.common(x, y).len() as f64, kx.max(ky))
            }
            HeuristicIndex::LeichtHolmeNewman => {
                ratio(self.common(x, y).len() as f64, kx * ky)
            }
            HeuristicIndex::PreferentialAttachment => kx * ky,
            HeuristicIndex::AdamicAdar => self
                .common(x, y)
                .iter()
                .map(|&z| self.degree(z))
                .filter(|&kz| kz > 1)
                .map(|kz| 1.0 / (kz as f64).ln())
                .sum(),
            HeuristicIndex::ResourceAllocation => self
                .common(x, y)
                .iter()
                .map(|&z| ratio(1.0, self.degree(z) as f64))
                .sum(),
            HeuristicIndex::LocalPath => {
                let walks = self.walk_counts(x, y, 3);
                walks[1] + self.params.lp_beta * walks[2]
            }
            HeuristicIndex::Katz => {
                let walks = self.walk_counts(x, y, KATZ_MAX_LENGTH);
                walks
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| self.params.katz_beta.powi(i as i32 + 1) * w)
                    .sum()
            }
        })
    }
}

/// One-shot convenience wrapper around [`HeuristicScorer`].
pub fn heuristic_score(
    g: &DirectedGraph,
    index: HeuristicIndex,
    x: NodeId,
    y: NodeId,
    params: HeuristicParams,
) -> Result<f64> {
    HeuristicScorer::new(g, params).score(index, x, y)
}

/// AUC and AP of one scorer on one labeled test set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub auc: f64,
    pub ap: f64,
}

/// Scores every test pair and computes both ranking metrics.
pub fn evaluate_model<F>(mut scorer: F, test: &[LabeledPair]) -> Result<Metrics>
where
    F: FnMut(NodeId, NodeId) -> Result<f64>,
{
    if test.is_empty() {
        return Err(Error::invalid("test set is empty"));
    }
    let mut scored = Vec::with_capacity(test.len());
    for pair in test {
        scored.push(ScoredPair {
            src: pair.src,
            dst: pair.dst,
            score: scorer(pair.src, pair.dst)?,
            label: pair.label,
        });
    }
    Ok(Metrics {
        auc: auc(&scored)?,
        ap: average_precision(&scored)?,
    })
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub dataset: String,
    pub split: String,
    pub auc: f64,
    pub ap: f64,
}

/// Writes the results table as CSV `method,dataset,split,auc,ap`.
pub fn save_results_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut emit = |line: String| w.write_all(line.as_bytes()).map_err(|e| Error::io(path, e));
    emit("method,dataset,split,auc,ap\n".to_string())?;
    for r in rows {
        emit(format!(
            "{},{},{},{},{}\n",
            r.method, r.dataset, r.split, r.auc, r.ap
        ))?;
    }
    Ok(())
}
