//! Consensus clustering over the bipartite object-by-cluster graph.
//!
//! Every object and every (clustering, cluster) pair becomes a vertex; an
//! object is linked to each cluster that contains it. Partitioning that graph
//! by modularity groups objects that keep landing in the same clusters.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::compare::{cross_level, LabeledClustering, Membership};
use crate::error::{invalid, Result};
use crate::graph::{Clustering, Edge, ViewGraph};
use crate::modularity::{maximize, ViewParams};

#[derive(Debug, Clone)]
pub struct ObjectClusterGraph<K> {
    pub graph: ViewGraph,
    /// Vertex `i < objects.len()` is `objects[i]`.
    pub objects: Vec<K>,
    /// Vertex `objects.len() + j` is `(clustering index, label)` `cluster_vertices[j]`.
    pub cluster_vertices: Vec<(usize, usize)>,
}

/// Builds the bipartite membership graph over `universe`.
///
/// Absent objects get no edge for that clustering, and objects outside
/// `universe` are ignored.
pub fn build_object_cluster_graph<K: Ord + Clone>(
    clusterings: &[LabeledClustering<K>],
    universe: &[K],
) -> ObjectClusterGraph<K> {
    let position: BTreeMap<&K, usize> = universe.iter().enumerate().map(|(i, k)| (k, i)).collect();
    // Cluster vertices in (clustering, label) order.
    let cluster_vertices: Vec<(usize, usize)> = clusterings
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| c.present().map(move |(_, label)| (ci, label)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let vertex_of: BTreeMap<(usize, usize), usize> = cluster_vertices
        .iter()
        .enumerate()
        .map(|(j, &key)| (key, universe.len() + j))
        .collect();
    let mut edges = Vec::new();
    for (ci, c) in clusterings.iter().enumerate() {
        for (k, label) in c.present() {
            if let Some(&obj) = position.get(k) {
                edges.push(Edge {
                    source: obj,
                    target: vertex_of[&(ci, label)],
                    weight: 1.0,
                });
            }
        }
    }
    edges.sort_unstable_by_key(|e| (e.source, e.target));
    let graph = ViewGraph::from_canonical(universe.len() + cluster_vertices.len(), edges);
    ObjectClusterGraph {
        graph,
        objects: universe.to_vec(),
        cluster_vertices,
    }
}

/// Consensus of several clusterings of (overlapping) object sets.
///
/// The universe is the union of all objects. Labels of the result are dense
/// in the universe's sorted order.
pub fn ensemble_cluster<K: Ord + Clone>(
    clusterings: &[LabeledClustering<K>],
    seed: u64,
    tag: &str,
) -> Result<LabeledClustering<K>> {
    if clusterings.is_empty() {
        return Err(invalid("ensembling needs at least one clustering"));
    }
    let levelled = cross_level(clusterings);
    let universe: Vec<K> = levelled[0].assignments.keys().cloned().collect();
    let bipartite = build_object_cluster_graph(&levelled, &universe);
    let partition = maximize(
        core::slice::from_ref(&bipartite.graph),
        &ViewParams::uniform(1),
        seed,
    )?;
    let objects = Clustering::from_labels(&partition.labels()[..universe.len()]);
    let mut out = LabeledClustering::new(tag);
    out.assignments = universe
        .into_iter()
        .zip(objects.labels())
        .map(|(k, &l)| (k, Membership::Cluster(l)))
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::labeled_ari;
    use alloc::string::ToString;
    use alloc::vec;

    fn lc(tag: &str, items: &[(u32, usize)]) -> LabeledClustering<u32> {
        LabeledClustering {
            tag: tag.to_string(),
            assignments: items
                .iter()
                .map(|&(k, c)| (k, Membership::Cluster(c)))
                .collect(),
        }
    }

    #[test]
    fn one_clustering_graph_shape() {
        let c = lc("d", &[(0, 0), (1, 0), (2, 1), (3, 1)]);
        let g = build_object_cluster_graph(&[c], &[0, 1, 2, 3]);
        assert_eq!(g.graph.node_count(), 6);
        assert_eq!(g.graph.edge_count(), 4);
        // No object-object edges.
        assert!(g
            .graph
            .edges()
            .iter()
            .all(|e| e.source < 4 && e.target >= 4));
    }

    #[test]
    fn identical_clusterings_double_degree() {
        let c = lc("d", &[(0, 0), (1, 0), (2, 1), (3, 1)]);
        let g = build_object_cluster_graph(&[c.clone(), c], &[0, 1, 2, 3]);
        for i in 0..4 {
            assert_eq!(g.graph.degree(i).unwrap(), 2.0);
        }
    }

    #[test]
    fn absent_objects_have_no_edges() {
        let days = cross_level(&[lc("1", &[(0, 0), (1, 0)]), lc("2", &[(1, 0), (2, 0)])]);
        let g = build_object_cluster_graph(&days, &[0, 1, 2]);
        assert_eq!(g.graph.degree(0).unwrap(), 1.0);
        assert_eq!(g.graph.degree(1).unwrap(), 2.0);
        assert_eq!(g.graph.degree(2).unwrap(), 1.0);
        assert_eq!(g.cluster_vertices, vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn consensus_of_relabelled_copies() {
        let base: Vec<(u32, usize)> = (0..12).map(|i| (i, (i / 4) as usize)).collect();
        let relabelled: Vec<(u32, usize)> = base.iter().map(|&(k, c)| (k, 2 - c)).collect();
        let inputs = [lc("a", &base), lc("b", &relabelled), lc("c", &base)];
        let consensus = ensemble_cluster(&inputs, 5, "consensus").unwrap();
        assert_eq!(consensus.len(), 12);
        assert_eq!(labeled_ari(&consensus, &inputs[0]).unwrap(), 1.0);
    }
}
