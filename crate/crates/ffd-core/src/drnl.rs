//! Double-radius node labeling for enclosing subgraphs.
//!
//! Each node of a candidate pair's enclosing subgraph is labeled by its
//! breadth-first distances to the two target nodes, hashed into a single
//! integer that preserves the (min distance, total distance) structural role.
//! Distances run over the symmetrized subgraph with the candidate edge
//! masked, so the label never encodes the answer being predicted.

use std::collections::VecDeque;

use crate::graph::{DirectedGraph, NodeId};
use crate::{Error, Result};

const UNREACHED: u32 = u32::MAX;

/// BFS distances from `start` over the symmetrized edge view, skipping the
/// masked undirected pair {x, y}.
fn bfs_masked(g: &DirectedGraph, start: NodeId, x: NodeId, y: NodeId) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.num_nodes()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        let neighbors = g.out_neighbors(u).iter().chain(g.in_neighbors(u));
        for &v in neighbors {
            let masked = (u == x && v == y) || (u == y && v == x);
            if masked || dist[v] != UNREACHED {
                continue;
            }
            dist[v] = next;
            queue.push_back(v);
        }
    }
    dist
}

/// Labels every subgraph node by its double-radius role relative to the
/// target pair `(x, y)`.
///
/// The targets get label 1. A node at distances `(d_x, d_y)` (shortest paths
/// on the symmetrized subgraph, the undirected pair {x, y} masked) gets
///
/// ```text
/// 1 + min(d_x, d_y) + (d/2)·(d/2 + d mod 2 − 1),  d = d_x + d_y
/// ```
///
/// and nodes unreachable from either target get label 0.
pub fn drnl_label(subgraph: &DirectedGraph, x: NodeId, y: NodeId) -> Result<Vec<u32>> {
    let n = subgraph.num_nodes();
    if x >= n || y >= n {
        return Err(Error::invalid(format!(
            "target pair ({x}, {y}) out of range for {n} nodes"
        )));
    }
    if x == y {
        return Err(Error::invalid("target nodes must be distinct"));
    }
    let dist_x = bfs_masked(subgraph, x, x, y);
    let dist_y = bfs_masked(subgraph, y, x, y);
    let labels = (0..n)
        .map(|u| {
            if u == x || u == y {
                1
            } else {
                hash_distances(dist_x[u], dist_y[u])
            }
        })
        .collect();
    Ok(labels)
}

/// The double-radius hash; 0 encodes "unreachable from either target".
fn hash_distances(d_x: u32, d_y: u32) -> u32 {
    if d_x == UNREACHED || d_y == UNREACHED {
        return 0;
    }
    let d = d_x + d_y;
    let half = d / 2;
    1 + d_x.min(d_y) + half * (half + d % 2 - 1)
}
