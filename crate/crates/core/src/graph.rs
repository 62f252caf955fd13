//! Undirected weighted graphs over a dense node set, and partitions of them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// An undirected edge stored in canonical orientation (`source < target`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Weighted undirected graph with no self-loops and no parallel edges.
///
/// Nodes are the dense integers `0..node_count`. Every view of a multi-view
/// problem shares the same node set; nodes without edges are isolates.
/// The graph is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewGraph {
    node_count: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, f64)>,
    degrees: Vec<f64>,
    total_weight: f64,
}

impl ViewGraph {
    /// Weights below this are dropped at construction.
    pub const MIN_WEIGHT: f64 = 1e-12;

    /// A graph on `node_count` isolated nodes.
    pub fn empty(node_count: usize) -> Self {
        Self {
            node_count,
            edges: Vec::new(),
            offsets: vec![0; node_count + 1],
            adjacency: Vec::new(),
            degrees: vec![0.0; node_count],
            total_weight: 0.0,
        }
    }

    /// Builds a graph from `(i, j, weight)` triples in any order and orientation.
    ///
    /// Weights must be finite and non-negative; weights below
    /// [`MIN_WEIGHT`](Self::MIN_WEIGHT) are silently dropped. Self-loops and
    /// an edge listed twice (in either orientation) are rejected.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut canonical = Vec::new();
        for (i, j, weight) in edges {
            for node in [i, j] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidWeight {
                    row: i,
                    col: j,
                    weight,
                });
            }
            if weight < Self::MIN_WEIGHT {
                continue;
            }
            let (source, target) = if i < j { (i, j) } else { (j, i) };
            canonical.push(Edge {
                source,
                target,
                weight,
            });
        }
        canonical.sort_unstable_by_key(|e| (e.source, e.target));
        if let Some(w) = canonical
            .windows(2)
            .find(|w| (w[0].source, w[0].target) == (w[1].source, w[1].target))
        {
            return Err(Error::DuplicateEdge(w[0].source, w[0].target));
        }
        Ok(Self::from_canonical(node_count, canonical))
    }

    /// `edges` must already be sorted, deduplicated and canonically oriented.
    pub(crate) fn from_canonical(node_count: usize, edges: Vec<Edge>) -> Self {
        let mut counts = vec![0usize; node_count + 1];
        for e in &edges {
            counts[e.source + 1] += 1;
            counts[e.target + 1] += 1;
        }
        for i in 0..node_count {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut cursor = offsets.clone();
        let mut adjacency = vec![(0usize, 0.0f64); 2 * edges.len()];
        let mut degrees = vec![0.0; node_count];
        let mut total_weight = 0.0;
        for e in &edges {
            adjacency[cursor[e.source]] = (e.target, e.weight);
            cursor[e.source] += 1;
            adjacency[cursor[e.target]] = (e.source, e.weight);
            cursor[e.target] += 1;
            total_weight += e.weight;
        }
        for (i, degree) in degrees.iter_mut().enumerate() {
            let row = &mut adjacency[offsets[i]..offsets[i + 1]];
            row.sort_unstable_by_key(|&(t, _)| t);
            *degree = row.iter().map(|&(_, w)| w).sum();
        }
        Self {
            node_count,
            edges,
            offsets,
            adjacency,
            degrees,
            total_weight,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order, sorted by `(source, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `node` with edge weights, sorted by neighbour id.
    ///
    /// Panics if `node` is out of range.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Weighted degree of `node`; zero for isolates.
    pub fn degree(&self, node: usize) -> Result<f64> {
        self.degrees
            .get(node)
            .copied()
            .ok_or(Error::NodeOutOfRange {
                node,
                node_count: self.node_count,
            })
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Sum of edge weights, each undirected edge counted once.
    pub fn total_edge_weight(&self) -> f64 {
        self.total_weight
    }

    /// Maximal connected node sets, each sorted, ordered by smallest member.
    /// Isolates come out as singletons.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count];
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut component = Vec::new();
            while let Some(u) = stack.pop() {
                component.push(u);
                for &(v, _) in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }
}

/// Hard assignment of every node to one cluster; labels are dense `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
    cluster_count: usize,
}

impl Clustering {
    /// Relabels arbitrary ids densely in order of first appearance.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map = alloc::collections::BTreeMap::new();
        let labels = raw
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self {
            labels,
            cluster_count: map.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            cluster_count: n,
        }
    }

    pub fn single_cluster(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            cluster_count: usize::from(n > 0),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cluster_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Members of each cluster, indexed by label.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.cluster_count];
        for (node, &l) in self.labels.iter().enumerate() {
            members[l].push(node);
        }
        members
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.labels.len() == expected {
            Ok(())
        } else {
            Err(Error::LabelCountMismatch {
                expected,
                found: self.labels.len(),
            })
        }
    }
}

/// Checks that all views share one node count and returns it.
pub(crate) fn shared_node_count(graphs: &[ViewGraph]) -> Result<usize> {
    let first = graphs
        .first()
        .ok_or_else(|| crate::error::invalid("at least one view graph is required"))?;
    let n = first.node_count();
    for g in &graphs[1..] {
        if g.node_count() != n {
            return Err(Error::NodeCountMismatch {
                expected: n,
                found: g.node_count(),
            });
        }
    }
    Ok(n)
}
