//! Greedy agglomerative modularity maximization (fast-greedy / CNM style).
//!
//! The detector works on the symmetrized, weight-1 view of the directed
//! graph: an undirected edge {u, v} exists when either direction is present.
//! Starting from singletons it repeatedly merges the community pair with the
//! largest modularity gain while any gain is positive, which makes the
//! modularity trajectory monotone and ends at the greedy peak. Ties pick the
//! lexicographically lowest community pair, so results are deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, NodeId};
use crate::{Error, Result};

/// A partition of the nodes into communities with its modularity score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    /// Community id per node; ids are dense in `[0, num_communities)`.
    pub node_to_community: Vec<usize>,
    pub modularity: f64,
}

impl CommunityAssignment {
    pub fn num_communities(&self) -> usize {
        self.node_to_community.iter().max().map_or(0, |&c| c + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.num_communities();
        let mut seen = vec![false; c];
        for &id in &self.node_to_community {
            seen[id] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::invalid("community ids must be dense"));
        }
        if !(-0.5..=1.0).contains(&self.modularity) {
            return Err(Error::invalid(format!(
                "modularity {} outside [-0.5, 1]",
                self.modularity
            )));
        }
        Ok(())
    }
}

/// Undirected simple-graph view used by modularity: edge set and degrees.
fn symmetrized_edges(g: &DirectedGraph) -> (Vec<(NodeId, NodeId)>, Vec<usize>) {
    let mut edges = BTreeSet::new();
    for &(u, v) in g.edges() {
        edges.insert((u.min(v), u.max(v)));
    }
    let mut degrees = vec![0usize; g.num_nodes()];
    for &(u, v) in &edges {
        degrees[u] += 1;
        degrees[v] += 1;
    }
    (edges.into_iter().collect(), degrees)
}

/// Newman modularity of an arbitrary partition on the symmetrized view.
///
/// `Q = Σ_c [ ℓ_c/m − (d_c/2m)² ]` with ℓ_c intra-community edges, d_c total
/// degree of community c, and m undirected edges. Zero-edge graphs score 0.
pub fn modularity(g: &DirectedGraph, node_to_community: &[usize]) -> f64 {
    let (edges, degrees) = symmetrized_edges(g);
    let m = edges.len() as f64;
    if edges.is_empty() {
        return 0.0;
    }
    let num_comms = node_to_community.iter().max().map_or(0, |&c| c + 1);
    let mut intra = vec![0.0f64; num_comms];
    let mut degree_sum = vec![0.0f64; num_comms];
    for &(u, v) in &edges {
        if node_to_community[u] == node_to_community[v] {
            intra[node_to_community[u]] += 1.0;
        }
    }
    for (node, &c) in node_to_community.iter().enumerate() {
        degree_sum[c] += degrees[node] as f64;
    }
    (0..num_comms)
        .map(|c| intra[c] / m - (degree_sum[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Runs the greedy merge and returns the assignment plus the modularity after
/// every merge step (starting value included), for monotonicity checks.
pub fn detect_communities_trace(g: &DirectedGraph) -> (CommunityAssignment, Vec<f64>) {
    let n = g.num_nodes();
    let (edges, degrees) = symmetrized_edges(g);
    let m = edges.len() as f64;

    // Every node its own community; isolated nodes stay singletons forever.
    let mut members: Vec<Option<Vec<NodeId>>> = (0..n).map(|v| Some(vec![v])).collect();
    if edges.is_empty() {
        let assignment = CommunityAssignment {
            node_to_community: (0..n).collect(),
            modularity: 0.0,
        };
        return (assignment, vec![0.0]);
    }

    // between[(i, j)] = undirected edges between communities i < j, as a
    // fraction of m; strength[i] = community degree fraction d_i / 2m.
    let mut between: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(u, v) in &edges {
        *between.entry((u.min(v), u.max(v))).or_insert(0.0) += 1.0 / m;
    }
    let mut strength: Vec<f64> = degrees.iter().map(|&d| d as f64 / (2.0 * m)).collect();

    let mut q = -strength.iter().map(|a| a * a).sum::<f64>();
    let mut trace = vec![q];

    loop {
        let mut best: Option<((usize, usize), f64)> = None;
        for (&pair, &e) in &between {
            let (i, j) = pair;
            let gain = e - 2.0 * strength[i] * strength[j];
            // Strict improvement keeps the first (lowest) pair on exact ties.
            if best.map_or(true, |(_, g)| gain > g) {
                best = Some((pair, gain));
            }
        }
        let Some(((i, j), gain)) = best else { break };
        if gain <= 0.0 {
            break;
        }

        // Merge j into i.
        let absorbed = members[j].take().expect("community j active");
        members[i].as_mut().expect("community i active").extend(absorbed);
        strength[i] += strength[j];
        let mut moved: Vec<(usize, f64)> = Vec::new();
        let keys: Vec<(usize, usize)> = between
            .range((j, 0)..(j + 1, 0))
            .map(|(&k, _)| k)
            .collect();
        for key in keys {
            let e = between.remove(&key).expect("listed key");
            moved.push((key.1, e));
        }
        let keys: Vec<(usize, usize)> = between
            .iter()
            .filter(|(&(_, b), _)| b == j)
            .map(|(&k, _)| k)
            .collect();
        for key in keys {
            let e = between.remove(&key).expect("listed key");
            moved.push((key.0, e));
        }
        for (k, e) in moved {
            if k == i {
                continue; // intra-community now
            }
            *between.entry((i.min(k), i.max(k))).or_insert(0.0) += e;
        }

        q += gain;
        trace.push(q);
    }

    // Dense ids ordered by smallest member node.
    let mut node_to_community = vec![usize::MAX; n];
    let mut next_id = 0;
    for slot in members.iter().flatten() {
        for &node in slot {
            node_to_community[node] = next_id;
        }
        next_id += 1;
    }
    let assignment = CommunityAssignment {
        node_to_community,
        modularity: q,
    };
    (assignment, trace)
}

/// Detects communities by greedy modularity maximization.
///
/// The empty-edge graph yields singleton communities with modularity 0.
pub fn detect_communities(g: &DirectedGraph) -> CommunityAssignment {
    detect_communities_trace(g).0
}

/// Writes an assignment as single-line JSON `{"node_to_community":[...],"modularity":x}`.
pub fn save_communities(assign: &CommunityAssignment, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string(assign).map_err(|e| Error::json(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads an assignment written by [`save_communities`].
pub fn load_communities(path: impl AsRef<Path>) -> Result<CommunityAssignment> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let assign: CommunityAssignment =
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    assign.validate()?;
    Ok(assign)
}
