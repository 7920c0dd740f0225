//! Deterministic citation-style benchmark graph.
//!
//! A reproducible stand-in for desk-scale citation datasets: 2708 papers,
//! 5429 directed citations, seven topic communities with strong homophily,
//! preferential attachment to highly cited papers, and triadic closure
//! (papers cite references of their references). Every run regenerates the
//! identical graph; the committed `data/citation-2708.tsv` artifact is the
//! same bytes this function produces.

use std::collections::HashSet;

use rand::Rng;

use crate::graph::{DirectedGraph, NodeId};
use crate::rng;

pub const CITATION_NODES: usize = 2708;
pub const CITATION_EDGES: usize = 5429;
/// Community sizes, largest first.
pub const CITATION_COMMUNITY_SIZES: [usize; 7] = [818, 426, 418, 351, 298, 217, 180];

/// Probability a citation stays within the citing paper's community.
const HOMOPHILY: f64 = 0.95;
/// Probability a citation is copied from an existing reference's reference
/// list (the mechanism that creates shared neighbors).
const CLOSURE: f64 = 0.4;
/// Seed of the generator's fixed random stream (arbitrary constant).
const CITATION_STREAM_SEED: u64 = 0xc17a_7104;

/// The generated graph plus its planted community of every node.
pub struct CitationGraph {
    pub graph: DirectedGraph,
    pub communities: Vec<usize>,
}

/// Out-degree quota distribution: skewed small counts, mean ≈ 2.
fn draw_quota(rng: &mut impl Rng) -> usize {
    let r: f64 = rng.gen();
    match r {
        _ if r < 0.50 => 1,
        _ if r < 0.75 => 2,
        _ if r < 0.87 => 3,
        _ if r < 0.94 => 4,
        _ if r < 0.98 => 5,
        _ => 8,
    }
}

/// Generates the benchmark graph. Fully deterministic: no inputs, and the
/// internal stream is fixed.
pub fn generate_citation() -> CitationGraph {
    let mut stream = rng::stream(CITATION_STREAM_SEED, "citation-graph");
    let n = CITATION_NODES;

    // Contiguous community blocks.
    let mut communities = Vec::with_capacity(n);
    for (c, &size) in CITATION_COMMUNITY_SIZES.iter().enumerate() {
        communities.extend(std::iter::repeat(c).take(size));
    }
    debug_assert_eq!(communities.len(), n);

    // Publication order: a random permutation of the node ids, so community
    // blocks are interleaved in time.
    let mut order: Vec<NodeId> = (0..n).collect();
    use rand::seq::SliceRandom;
    order.shuffle(&mut stream);

    // Citation quotas per time slot (slot 0 has nobody to cite), adjusted
    // to hit the exact edge total.
    let mut quotas: Vec<usize> = (0..n)
        .map(|slot| if slot == 0 { 0 } else { draw_quota(&mut stream) })
        .collect();
    // A paper cannot cite more distinct predecessors than exist.
    for (slot, q) in quotas.iter_mut().enumerate() {
        *q = (*q).min(slot);
    }
    let mut total: usize = quotas.iter().sum();
    while total != CITATION_EDGES {
        let slot = stream.gen_range(1..n);
        if total > CITATION_EDGES && quotas[slot] > 0 {
            quotas[slot] -= 1;
            total -= 1;
        } else if total < CITATION_EDGES && quotas[slot] < slot {
            quotas[slot] += 1;
            total += 1;
        }
    }

    // Preferential-attachment urns: every published paper appears once,
    // plus once per citation received. One urn per community plus a global
    // one.
    let mut global_urn: Vec<NodeId> = Vec::new();
    let mut community_urns: Vec<Vec<NodeId>> =
        vec![Vec::new(); CITATION_COMMUNITY_SIZES.len()];
    let mut out_lists: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut published_before: Vec<usize> = vec![0; n]; // node -> time slot
    let mut edge_set: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(CITATION_EDGES);

    for (slot, &u) in order.iter().enumerate() {
        published_before[u] = slot;
        let cite = |v: NodeId,
                        edges: &mut Vec<(NodeId, NodeId)>,
                        edge_set: &mut HashSet<(NodeId, NodeId)>,
                        global_urn: &mut Vec<NodeId>,
                        community_urns: &mut Vec<Vec<NodeId>>,
                        out_lists: &mut Vec<Vec<NodeId>>|
         -> bool {
            if v == u || !edge_set.insert((u, v)) {
                return false;
            }
            edges.push((u, v));
            out_lists[u].push(v);
            global_urn.push(v);
            community_urns[communities[v]].push(v);
            true
        };

        for _ in 0..quotas[slot] {
            let mut placed = false;
            for _attempt in 0..40 {
                // Triadic closure: copy a reference of a reference.
                if !out_lists[u].is_empty() && stream.gen::<f64>() < CLOSURE {
                    let w = out_lists[u][stream.gen_range(0..out_lists[u].len())];
                    if !out_lists[w].is_empty() {
                        let v = out_lists[w][stream.gen_range(0..out_lists[w].len())];
                        if cite(
                            v,
                            &mut edges,
                            &mut edge_set,
                            &mut global_urn,
                            &mut community_urns,
                            &mut out_lists,
                        ) {
                            placed = true;
                            break;
                        }
                    }
                    continue;
                }
                // Preferential attachment, homophilous with high probability.
                let urn = if stream.gen::<f64>() < HOMOPHILY {
                    &community_urns[communities[u]]
                } else {
                    &global_urn
                };
                if urn.is_empty() {
                    continue;
                }
                let v = urn[stream.gen_range(0..urn.len())];
                if cite(
                    v,
                    &mut edges,
                    &mut edge_set,
                    &mut global_urn,
                    &mut community_urns,
                    &mut out_lists,
                ) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                // Exhaustive fallback: earliest unseen predecessor.
                for &v in order.iter().take(slot) {
                    if cite(
                        v,
                        &mut edges,
                        &mut edge_set,
                        &mut global_urn,
                        &mut community_urns,
                        &mut out_lists,
                    ) {
                        placed = true;
                        break;
                    }
                }
            }
            debug_assert!(placed, "paper {u} at slot {slot} could not place a citation");
        }
        // The paper itself becomes citable.
        global_urn.push(u);
        community_urns[communities[u]].push(u);
    }

    debug_assert_eq!(edges.len(), CITATION_EDGES);
    let graph = DirectedGraph::from_edges(n, edges).expect("generator emits clean edges");
    CitationGraph { graph, communities }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_structure_are_exact() {
        let citation = generate_citation();
        assert_eq!(citation.graph.num_nodes(), CITATION_NODES);
        assert_eq!(citation.graph.num_edges(), CITATION_EDGES);
        assert_eq!(citation.communities.len(), CITATION_NODES);
        for (c, &size) in CITATION_COMMUNITY_SIZES.iter().enumerate() {
            let members = citation.communities.iter().filter(|&&x| x == c).count();
            assert_eq!(members, size);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_citation();
        let b = generate_citation();
        assert_eq!(a.graph.edges(), b.graph.edges());
        assert_eq!(a.communities, b.communities);
    }

    #[test]
    fn citations_are_strongly_homophilous() {
        let citation = generate_citation();
        let same = citation
            .graph
            .edges()
            .iter()
            .filter(|&&(u, v)| citation.communities[u] == citation.communities[v])
            .count();
        let fraction = same as f64 / citation.graph.num_edges() as f64;
        assert!(fraction > 0.85, "homophily {fraction}");
    }

    #[test]
    fn no_node_is_isolated_from_citations_entirely() {
        let citation = generate_citation();
        let mut touched = vec![false; CITATION_NODES];
        for &(u, v) in citation.graph.edges() {
            touched[u] = true;
            touched[v] = true;
        }
        let isolated = touched.iter().filter(|&&t| !t).count();
        // Load-bearing: the edge-list artifact cannot represent isolated
        // nodes, so the generator must leave none.
        assert_eq!(isolated, 0, "{isolated} isolated nodes");
    }

    #[test]
    fn regeneration_matches_the_committed_artifact() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data/citation-2708.tsv");
        let committed = std::fs::read_to_string(&path).expect("committed dataset exists");
        let citation = generate_citation();
        let mut regenerated = String::new();
        for &(u, v) in citation.graph.edges() {
            regenerated.push_str(&format!("{u}\t{v}\n"));
        }
        assert_eq!(committed, regenerated, "dataset artifact is stale");
    }
}
