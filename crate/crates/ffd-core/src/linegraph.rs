//! Enclosing subgraph extraction and the directed line-graph transform.
//!
//! For a candidate pair `(x, y)` the pipeline works on the subgraph within
//! `h` symmetrized hops of the pair, capped at `max_nodes` nodes. The
//! subgraph is then transformed into its directed line graph: every directed
//! edge becomes a node, and `(i, j) → (j, k)` becomes a line edge whenever
//! the second edge continues from the first's head (including back-tracking
//! `k = i`, which 2-cycles produce). The candidate edge itself is inserted
//! when absent — both labels need a line node to classify — and its index is
//! carried alongside the structure.

use std::collections::HashSet;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use rand::seq::index::sample;

use crate::features::FeatureMatrix;
use crate::graph::{DirectedGraph, NodeId};
use crate::{rng, Error, Result};

/// The receptive field of one candidate pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnclosingSubgraph {
    /// Original node ids; `nodes[0]` and `nodes[1]` are the targets x and y.
    pub nodes: Vec<NodeId>,
    /// Directed edges in local indices, sorted lexicographically; contains
    /// the target edge (0, 1) exactly once.
    pub edges: Vec<(usize, usize)>,
    /// Local indices of the target pair — always (0, 1).
    pub target: (usize, usize),
    /// Hop budget the subgraph was built with.
    pub hops: usize,
    /// Whether the target edge had to be inserted (it was not observed).
    pub target_inserted: bool,
}

impl EnclosingSubgraph {
    /// Validates and wraps explicitly constructed parts.
    pub fn new(
        nodes: Vec<NodeId>,
        mut edges: Vec<(usize, usize)>,
        target: (usize, usize),
        hops: usize,
        target_inserted: bool,
    ) -> Result<Self> {
        let n = nodes.len();
        let mut seen = HashSet::new();
        if nodes.iter().any(|&v| !seen.insert(v)) {
            return Err(Error::invalid("subgraph nodes must be distinct"));
        }
        if target.0 >= n || target.1 >= n || target.0 == target.1 {
            return Err(Error::invalid("target indices must be distinct and in range"));
        }
        edges.sort_unstable();
        let mut unique = HashSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at local node {u}")));
            }
            if !unique.insert((u, v)) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        if !unique.contains(&target) {
            return Err(Error::invalid("target edge missing from subgraph"));
        }
        Ok(Self {
            nodes,
            edges,
            target,
            hops,
            target_inserted,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// The subgraph as a standalone graph over local indices.
    pub fn to_graph(&self) -> DirectedGraph {
        DirectedGraph::from_edges(self.node_count(), self.edges.iter().copied())
            .expect("validated local edges")
    }
}

/// Extracts the enclosing subgraph of `(x, y)`: BFS over symmetrized
/// adjacency from both targets to depth `h`, keeping at most `max_nodes`
/// nodes (a too-large frontier is subsampled uniformly, deterministically in
/// `seed` and the pair). The target edge is inserted when unobserved.
pub fn extract_subgraph(
    observed: &DirectedGraph,
    x: NodeId,
    y: NodeId,
    h: usize,
    max_nodes: usize,
    seed: u64,
) -> Result<EnclosingSubgraph> {
    let n = observed.num_nodes();
    if x >= n || y >= n {
        return Err(Error::invalid(format!(
            "target pair ({x}, {y}) out of range for {n} nodes"
        )));
    }
    if x == y {
        return Err(Error::invalid("target nodes must be distinct"));
    }
    if h < 1 {
        return Err(Error::invalid("hop count must be ≥ 1"));
    }
    if max_nodes < 2 {
        return Err(Error::invalid("max_nodes must admit at least the target pair"));
    }

    let mut selected: Vec<NodeId> = vec![x, y];
    let mut member: HashSet<NodeId> = selected.iter().copied().collect();
    let mut frontier = selected.clone();
    let pair_salt = ((x as u64) << 32) ^ y as u64;
    let mut sampler = rng::stream_salted(seed, "subgraph-frontier", pair_salt);

    for _ in 0..h {
        let mut next: Vec<NodeId> = Vec::new();
        for &u in &frontier {
            for &v in observed.out_neighbors(u).iter().chain(observed.in_neighbors(u)) {
                if member.insert(v) {
                    next.push(v);
                }
            }
        }
        let budget = max_nodes - selected.len();
        if next.len() > budget {
            let mut keep = sample(&mut sampler, next.len(), budget).into_vec();
            keep.sort_unstable();
            let kept: Vec<NodeId> = keep.into_iter().map(|i| next[i]).collect();
            // Re-sync membership with the subsampled frontier.
            for v in &next {
                member.remove(v);
            }
            member.extend(kept.iter().copied());
            selected.extend(kept.iter().copied());
            break;
        }
        selected.extend(next.iter().copied());
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    let local_of: std::collections::HashMap<NodeId, usize> = selected
        .iter()
        .enumerate()
        .map(|(local, &orig)| (orig, local))
        .collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (local_u, &orig_u) in selected.iter().enumerate() {
        for &orig_v in observed.out_neighbors(orig_u) {
            if let Some(&local_v) = local_of.get(&orig_v) {
                edges.push((local_u, local_v));
            }
        }
    }
    edges.sort_unstable();
    let target_inserted = !observed.has_edge(x, y);
    if target_inserted {
        let pos = edges.binary_search(&(0, 1)).unwrap_err();
        edges.insert(pos, (0, 1));
    }

    EnclosingSubgraph::new(selected, edges, (0, 1), h, target_inserted)
}

/// The directed line graph of an enclosing subgraph, with features.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGraph {
    /// One entry per subgraph edge, as original node-id pairs.
    pub line_nodes: Vec<(NodeId, NodeId)>,
    /// Adjacency between line nodes, by index into `line_nodes`.
    pub line_edges: Vec<(usize, usize)>,
    /// Row per line node: `[features(i) | features(j)]` for edge `(i, j)`.
    pub features: Array2<f64>,
    /// Index of the line node that is the candidate edge.
    pub target_index: usize,
}

/// Index-level line-graph topology shared by the transform and the model.
pub(crate) fn line_topology(
    edges: &[(usize, usize)],
    num_nodes: usize,
) -> (Vec<(usize, usize)>, Vec<Vec<usize>>) {
    let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
    for (idx, &(u, _)) in edges.iter().enumerate() {
        by_source[u].push(idx);
    }
    let mut line_edges = Vec::new();
    for (a, &(_, j)) in edges.iter().enumerate() {
        for &b in &by_source[j] {
            line_edges.push((a, b));
        }
    }
    (line_edges, by_source)
}

/// Transforms a subgraph into its directed line graph.
///
/// `o_h` must either be row-aligned with `sub.nodes` (one row per subgraph
/// node, in order) or be a full-graph matrix indexed by original node id (in
/// which case it must have more rows than the subgraph has nodes; the
/// relevant rows are gathered). Anything else is a missing-feature error.
pub fn to_line_graph(sub: &EnclosingSubgraph, o_h: &FeatureMatrix) -> Result<LineGraph> {
    let n = sub.node_count();
    let local_rows: Vec<usize> = if o_h.rows() == n {
        (0..n).collect()
    } else if o_h.rows() > n && sub.nodes.iter().all(|&v| v < o_h.rows()) {
        sub.nodes.clone()
    } else {
        return Err(Error::invalid(format!(
            "feature matrix with {} rows cannot cover a {n}-node subgraph",
            o_h.rows()
        )));
    };

    let width = o_h.cols();
    let (line_edges, _) = line_topology(&sub.edges, n);
    let mut features = Array2::zeros((sub.edges.len(), 2 * width));
    for (row, &(u, v)) in sub.edges.iter().enumerate() {
        features
            .row_mut(row)
            .slice_mut(ndarray::s![0..width])
            .assign(&o_h.data.row(local_rows[u]));
        features
            .row_mut(row)
            .slice_mut(ndarray::s![width..2 * width])
            .assign(&o_h.data.row(local_rows[v]));
    }
    let target_index = sub
        .edges
        .binary_search(&sub.target)
        .map_err(|_| Error::invalid("target edge missing from subgraph"))?;
    let line_nodes = sub
        .edges
        .iter()
        .map(|&(u, v)| (sub.nodes[u], sub.nodes[v]))
        .collect();
    Ok(LineGraph {
        line_nodes,
        line_edges,
        features,
        target_index,
    })
}

/// Writes a line graph as debug JSON; the feature block embeds the
/// FeatureMatrix text format.
pub fn save_line_graph_debug(lg: &LineGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut feature_text = format!("{} {} hybrid\n", lg.features.nrows(), lg.features.ncols());
    for row in lg.features.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        feature_text.push_str(&fields.join(" "));
        feature_text.push('\n');
    }
    let value = serde_json::json!({
        "line_nodes": lg.line_nodes.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "line_edges": lg.line_edges.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "target_index": lg.target_index,
        "features": feature_text,
    });
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    let text = serde_json::to_string(&value).map_err(|e| Error::json(path, e))?;
    writer
        .write_all(text.as_bytes())
        .and_then(|_| writer.write_all(b"\n"))
        .map_err(|e| Error::io(path, e))
}
