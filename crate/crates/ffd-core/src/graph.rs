//! Directed graph storage and edge-list I/O.
//!
//! Node ids are dense `usize` indices in `[0, num_nodes)`. Graphs are
//! immutable after construction: both adjacency directions are built once,
//! sorted, and shared freely afterwards.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

/// Dense node index.
pub type NodeId = usize;

/// A simple directed graph (no self-loops, no duplicate edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    num_nodes: usize,
    edges: Vec<(NodeId, NodeId)>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
}

impl DirectedGraph {
    /// Builds a graph from an edge iterator.
    ///
    /// Fails on out-of-range endpoints, self-loops, and duplicate edges;
    /// use [`load_edge_list_report`] for lenient ingestion of external files.
    pub fn from_edges(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at node {u}")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
            list.push((u, v));
        }
        Ok(Self::from_clean_edges(num_nodes, list))
    }

    /// Builds adjacency for edges already known to be valid and unique.
    fn from_clean_edges(num_nodes: usize, edges: Vec<(NodeId, NodeId)>) -> Self {
        let mut out_adj = vec![Vec::new(); num_nodes];
        let mut in_adj = vec![Vec::new(); num_nodes];
        for &(u, v) in &edges {
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        Self {
            num_nodes,
            edges,
            out_adj,
            in_adj,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in construction order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Successors of `v`, sorted ascending.
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[v]
    }

    /// Predecessors of `v`, sorted ascending.
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v]
    }

    /// Whether the directed edge `u -> v` exists.
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.num_nodes && self.out_adj[u].binary_search(&v).is_ok()
    }

    /// Average degree `|edges| / num_nodes`.
    pub fn average_degree(&self) -> f64 {
        if self.num_nodes == 0 {
            0.0
        } else {
            self.edges.len() as f64 / self.num_nodes as f64
        }
    }

    /// Graph with every edge direction flipped.
    pub fn reverse_view(&self) -> DirectedGraph {
        let edges = self.edges.iter().map(|&(u, v)| (v, u)).collect();
        Self::from_clean_edges(self.num_nodes, edges)
    }
}

/// Outcome of ingesting an external edge list.
#[derive(Debug)]
pub struct LoadReport {
    pub graph: DirectedGraph,
    /// Maps dense node id -> original file id; `None` when the file already
    /// used dense ids `0..num_nodes`.
    pub id_map: Option<Vec<u64>>,
    /// Count of `u -> u` lines dropped.
    pub self_loops_dropped: usize,
    /// Count of repeated `u -> v` lines dropped.
    pub duplicates_dropped: usize,
}

/// Loads an edge list, returning only the graph. See [`load_edge_list_report`].
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<DirectedGraph> {
    load_edge_list_report(path).map(|r| r.graph)
}

/// Loads a UTF-8 edge list: one `src<TAB>dst` (or space-separated) pair per
/// line, `#`-prefixed comment lines and blank lines ignored.
///
/// Node ids may be arbitrary non-negative integers; they are relabeled to
/// dense ids in ascending order of the original id, and the mapping is
/// reported. Self-loops and duplicate edges are dropped and counted rather
/// than rejected.
pub fn load_edge_list_report(path: impl AsRef<Path>) -> Result<LoadReport> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let src = fields.next();
        let dst = fields.next();
        let extra = fields.next();
        let (src, dst) = match (src, dst, extra) {
            (Some(s), Some(d), None) => (s, d),
            _ => {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected two node ids, got {trimmed:?}"),
                ))
            }
        };
        let parse_id = |text: &str| -> Result<u64> {
            text.parse::<u64>().map_err(|_| {
                Error::parse(path, line_no, format!("invalid node id {text:?}"))
            })
        };
        raw_edges.push((parse_id(src)?, parse_id(dst)?));
    }

    Ok(build_report(raw_edges))
}

fn build_report(raw_edges: Vec<(u64, u64)>) -> LoadReport {
    let mut ids: Vec<u64> = raw_edges
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .collect();
    ids.sort_unstable();
    ids.dedup();

    let dense_already = ids
        .last()
        .map_or(true, |&max| max as usize + 1 == ids.len());
    let to_dense = |id: u64| -> NodeId {
        if dense_already {
            id as NodeId
        } else {
            ids.binary_search(&id).expect("id collected above") as NodeId
        }
    };

    let num_nodes = ids.len();
    let mut seen = HashSet::new();
    let mut self_loops_dropped = 0;
    let mut duplicates_dropped = 0;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (u, v) in raw_edges {
        let (u, v) = (to_dense(u), to_dense(v));
        if u == v {
            self_loops_dropped += 1;
        } else if !seen.insert((u, v)) {
            duplicates_dropped += 1;
        } else {
            edges.push((u, v));
        }
    }

    LoadReport {
        graph: DirectedGraph::from_clean_edges(num_nodes, edges),
        id_map: (!dense_already).then_some(ids),
        self_loops_dropped,
        duplicates_dropped,
    }
}

/// Writes `g` in the edge-list format accepted by [`load_edge_list`].
pub fn save_edge_list(g: &DirectedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for &(u, v) in g.edges() {
        writeln!(writer, "{u}\t{v}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(content: &str) -> Result<LoadReport> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, content).unwrap();
        load_edge_list_report(path)
    }

    #[test]
    fn parses_tab_separated_lines() {
        let report = load_str("0\t1\n1\t2\n").unwrap();
        assert_eq!(report.graph.num_nodes(), 3);
        assert_eq!(report.graph.edges(), &[(0, 1), (1, 2)]);
        assert!(report.id_map.is_none());
    }

    #[test]
    fn parses_space_separated_and_comments() {
        let report = load_str("# header\n0 1\n\n2 0\n").unwrap();
        assert_eq!(report.graph.num_nodes(), 3);
        assert_eq!(report.graph.edges(), &[(0, 1), (2, 0)]);
    }

    #[test]
    fn empty_file_gives_empty_graph() {
        let report = load_str("").unwrap();
        assert_eq!(report.graph.num_nodes(), 0);
        assert_eq!(report.graph.num_edges(), 0);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = load_str("0\t1\nnot-an-edge\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let err = load_str("0\t1\n2\t3\t4\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn drops_and_counts_self_loops_and_duplicates() {
        let report = load_str("0 1\n1 1\n0 1\n1 2\n0 1\n").unwrap();
        assert_eq!(report.self_loops_dropped, 1);
        assert_eq!(report.duplicates_dropped, 2);
        assert_eq!(report.graph.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn sparse_ids_are_relabeled_with_map() {
        let report = load_str("10\t30\n30\t20\n").unwrap();
        assert_eq!(report.graph.num_nodes(), 3);
        assert_eq!(report.id_map.as_deref(), Some(&[10, 20, 30][..]));
        // 10 -> 0, 20 -> 1, 30 -> 2.
        assert_eq!(report.graph.edges(), &[(0, 2), (2, 1)]);
    }

    #[test]
    fn from_edges_rejects_invalid_input() {
        assert!(DirectedGraph::from_edges(2, [(0, 0)]).is_err());
        assert!(DirectedGraph::from_edges(2, [(0, 1), (0, 1)]).is_err());
        assert!(DirectedGraph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn adjacency_is_sorted_and_consistent() {
        let g = DirectedGraph::from_edges(4, [(2, 1), (0, 1), (0, 3), (3, 0)]).unwrap();
        assert_eq!(g.out_neighbors(0), &[1, 3]);
        assert_eq!(g.in_neighbors(1), &[0, 2]);
        assert!(g.has_edge(3, 0));
        assert!(!g.has_edge(1, 0));
        let out_total: usize = (0..4).map(|v| g.out_neighbors(v).len()).sum();
        let in_total: usize = (0..4).map(|v| g.in_neighbors(v).len()).sum();
        assert_eq!(out_total, g.num_edges());
        assert_eq!(in_total, g.num_edges());
    }

    #[test]
    fn reverse_view_flips_edges_and_is_involutive() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let r = g.reverse_view();
        assert_eq!(r.edges(), &[(1, 0), (2, 1)]);
        assert!(r.has_edge(1, 0) && !r.has_edge(0, 1));
        assert_eq!(r.reverse_view(), g);
    }

    #[test]
    fn save_load_round_trip() {
        let g = DirectedGraph::from_edges(5, [(0, 1), (4, 2), (2, 0), (1, 4), (3, 0)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        save_edge_list(&g, &path).unwrap();
        let loaded = load_edge_list(&path).unwrap();
        assert_eq!(loaded, g);
    }

    #[test]
    fn average_degree_matches_definition() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!((g.average_degree() - 0.75).abs() < 1e-15);
    }
}
