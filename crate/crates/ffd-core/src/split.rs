//! Train/test edge splitting and negative sampling.
//!
//! A split partitions the true edges into train and test positives, removes
//! the test positives from the message-passing ("observed") graph, and pairs
//! each positive set with uniformly sampled non-edges. All randomness comes
//! from named substreams of the split seed, so a `(graph, spec)` pair always
//! produces the same split.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, NodeId};
use crate::{rng, Error, Result};

/// Parameters of a train/test split.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Fraction of edges kept as training positives, in (0, 1).
    pub train_fraction: f64,
    pub seed: u64,
    /// Negatives sampled per positive (1.0 = balanced).
    pub negative_ratio: f64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Self {
        Self {
            train_fraction,
            seed,
            negative_ratio: 1.0,
        }
    }
}

/// A candidate edge with its ground-truth label (1 = real edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledPair {
    pub src: NodeId,
    pub dst: NodeId,
    pub label: u8,
}

impl LabeledPair {
    pub fn positive(src: NodeId, dst: NodeId) -> Self {
        Self { src, dst, label: 1 }
    }

    pub fn negative(src: NodeId, dst: NodeId) -> Self {
        Self { src, dst, label: 0 }
    }
}

/// A realized split: labeled train/test pairs plus the observed graph that
/// feature computation is allowed to see.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Vec<LabeledPair>,
    pub test: Vec<LabeledPair>,
    /// The input graph minus test-positive edges.
    pub observed: DirectedGraph,
    pub seed: u64,
}

/// Splits `g` into train/test positives and samples matching negatives.
///
/// Test positives are withheld from the returned observed graph so that no
/// downstream feature ever sees an edge it is asked to predict. Negatives are
/// uniform over ordered non-adjacent pairs `(u, v)`, `u != v`, of the *full*
/// graph, and the train and test negative sets are disjoint. The reverse
/// `(v, u)` of a true edge `u -> v` is a legitimate negative candidate: it is
/// a genuine non-edge in a directed graph.
pub fn split(g: &DirectedGraph, spec: &SplitSpec) -> Result<Split> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train_fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    if spec.negative_ratio < 0.0 {
        return Err(Error::invalid("negative_ratio must be non-negative"));
    }
    let m = g.num_edges();
    if m < 10 {
        return Err(Error::invalid(format!(
            "graph has {m} edges; at least 10 are required to split"
        )));
    }

    let mut order: Vec<(NodeId, NodeId)> = g.edges().to_vec();
    order.shuffle(&mut rng::stream(spec.seed, "split"));
    let n_train = ((spec.train_fraction * m as f64).round() as usize).clamp(1, m - 1);
    let (train_pos, test_pos) = order.split_at(n_train);

    let n_train_neg = (spec.negative_ratio * train_pos.len() as f64).round() as usize;
    let n_test_neg = (spec.negative_ratio * test_pos.len() as f64).round() as usize;
    let negatives = sample_negatives(g, n_train_neg + n_test_neg, spec.seed)?;
    let (train_neg, test_neg) = negatives.split_at(n_train_neg);

    let train_set: HashSet<(NodeId, NodeId)> = train_pos.iter().copied().collect();
    let observed_edges = g
        .edges()
        .iter()
        .copied()
        .filter(|e| train_set.contains(e));
    let observed = DirectedGraph::from_edges(g.num_nodes(), observed_edges)?;

    let labeled = |pairs: &[(NodeId, NodeId)], label: u8| {
        pairs
            .iter()
            .map(|&(u, v)| LabeledPair { src: u, dst: v, label })
            .collect::<Vec<_>>()
    };
    let mut train = labeled(train_pos, 1);
    train.extend(labeled(train_neg, 0));
    let mut test = labeled(test_pos, 1);
    test.extend(labeled(test_neg, 0));

    Ok(Split {
        train,
        test,
        observed,
        seed: spec.seed,
    })
}

/// Uniformly samples `count` distinct ordered non-edges by rejection.
fn sample_negatives(
    g: &DirectedGraph,
    count: usize,
    seed: u64,
) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.num_nodes();
    let candidate_pool = n * n.saturating_sub(1) - g.num_edges();
    if candidate_pool < count {
        return Err(Error::invalid(format!(
            "cannot sample {count} negatives: only {candidate_pool} non-edges exist"
        )));
    }
    let mut rng = rng::stream(seed, "negatives");
    let mut chosen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    let max_attempts = 1000 * count.max(16);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::invalid(
                "negative sampling exceeded its attempt budget; graph is too dense",
            ));
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || g.has_edge(u, v) || !chosen.insert((u, v)) {
            continue;
        }
        out.push((u, v));
    }
    Ok(out)
}

/// JSON representation of a split, with positives and negatives as `[u, v]`
/// pairs. Field order matches the on-disk layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitFile {
    pub train_pos: Vec<[usize; 2]>,
    pub train_neg: Vec<[usize; 2]>,
    pub test_pos: Vec<[usize; 2]>,
    pub test_neg: Vec<[usize; 2]>,
    pub seed: u64,
}

impl SplitFile {
    pub fn from_split(split: &Split) -> Self {
        let select = |pairs: &[LabeledPair], label: u8| {
            pairs
                .iter()
                .filter(|p| p.label == label)
                .map(|p| [p.src, p.dst])
                .collect::<Vec<_>>()
        };
        Self {
            train_pos: select(&split.train, 1),
            train_neg: select(&split.train, 0),
            test_pos: select(&split.test, 1),
            test_neg: select(&split.test, 0),
            seed: split.seed,
        }
    }

    /// Rebuilds labeled train/test lists (positives first, then negatives).
    pub fn labeled_pairs(&self) -> (Vec<LabeledPair>, Vec<LabeledPair>) {
        let pairs = |src: &[[usize; 2]], label: u8| {
            src.iter()
                .map(|&[u, v]| LabeledPair { src: u, dst: v, label })
                .collect::<Vec<_>>()
        };
        let mut train = pairs(&self.train_pos, 1);
        train.extend(pairs(&self.train_neg, 0));
        let mut test = pairs(&self.test_pos, 1);
        test.extend(pairs(&self.test_neg, 0));
        (train, test)
    }
}

/// Writes a split as single-line JSON.
pub fn save_split(file: &SplitFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string(file).map_err(|e| Error::json(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a split written by [`save_split`].
pub fn load_split(path: impl AsRef<Path>) -> Result<SplitFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}
