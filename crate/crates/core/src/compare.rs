//! Comparing clusterings: adjusted Rand index, cross-levelling clusterings
//! over different object sets, and pairwise similarity matrices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Clustering;

/// Cluster membership of one object in one clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Membership {
    Cluster(usize),
    /// The object does not occur in this clustering. All absent objects of
    /// one clustering share this single placeholder label.
    Absent,
}

/// A clustering keyed by object identifier, tagged (typically with a date).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledClustering<K: Ord> {
    pub tag: String,
    pub assignments: BTreeMap<K, Membership>,
}

impl<K: Ord + Clone> LabeledClustering<K> {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            assignments: BTreeMap::new(),
        }
    }

    /// Pairs objects with the labels of a dense [`Clustering`].
    pub fn from_clustering(tag: impl Into<String>, objects: &[K], clustering: &Clustering) -> Self {
        Self {
            tag: tag.into(),
            assignments: objects
                .iter()
                .cloned()
                .zip(clustering.labels().iter().map(|&l| Membership::Cluster(l)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Objects with a real (non-placeholder) cluster.
    pub fn present(&self) -> impl Iterator<Item = (&K, usize)> {
        self.assignments.iter().filter_map(|(k, m)| match m {
            Membership::Cluster(c) => Some((k, *c)),
            Membership::Absent => None,
        })
    }

    /// Members of each real cluster label.
    pub fn clusters(&self) -> BTreeMap<usize, Vec<K>> {
        let mut out: BTreeMap<usize, Vec<K>> = BTreeMap::new();
        for (k, c) in self.present() {
            out.entry(c).or_default().push(k.clone());
        }
        out
    }

    /// Drops objects belonging to clusters with fewer than `min_size`
    /// members. Surviving labels are kept as they are.
    pub fn without_small_clusters(&self, min_size: usize) -> Self {
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for (_, c) in self.present() {
            *sizes.entry(c).or_default() += 1;
        }
        Self {
            tag: self.tag.clone(),
            assignments: self
                .present()
                .filter(|(_, c)| sizes[c] >= min_size)
                .map(|(k, c)| (k.clone(), Membership::Cluster(c)))
                .collect(),
        }
    }
}

fn pairs(n: u64) -> i128 {
    let n = i128::from(n);
    n * (n - 1) / 2
}

/// Hubert–Arabie adjusted Rand index of two label vectors over the same
/// objects.
///
/// Pair counts are exact integers. When the index is undefined (both
/// partitions single-cluster, both all-singletons, or fewer than two
/// objects) the partitions are identical up to labels and 1 is returned.
pub fn adjusted_rand_index<A: Ord + Copy, B: Ord + Copy>(a: &[A], b: &[B]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ObjectSetMismatch);
    }
    let mut table: BTreeMap<(A, B), u64> = BTreeMap::new();
    let mut rows: BTreeMap<A, u64> = BTreeMap::new();
    let mut cols: BTreeMap<B, u64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: i128 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: i128 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: i128 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(a.len() as u64);
    // Both sides scaled by 2 * total to stay in integers.
    let numerator = 2 * (index * total - sum_a * sum_b);
    let denominator = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
    if denominator == 0 {
        return Ok(1.0);
    }
    Ok(numerator as f64 / denominator as f64)
}

/// ARI between two labelled clusterings over the same object set; absent
/// objects count as one extra cluster of their clustering.
pub fn labeled_ari<K: Ord>(a: &LabeledClustering<K>, b: &LabeledClustering<K>) -> Result<f64> {
    if a.assignments.len() != b.assignments.len()
        || a.assignments
            .keys()
            .zip(b.assignments.keys())
            .any(|(x, y)| x != y)
    {
        return Err(Error::ObjectSetMismatch);
    }
    let la: Vec<Membership> = a.assignments.values().copied().collect();
    let lb: Vec<Membership> = b.assignments.values().copied().collect();
    adjusted_rand_index(&la, &lb)
}

/// Extends every clustering to the union of all objects; objects missing
/// from a clustering are marked [`Membership::Absent`] in it.
pub fn cross_level<K: Ord + Clone>(
    clusterings: &[LabeledClustering<K>],
) -> Vec<LabeledClustering<K>> {
    let universe: BTreeSet<&K> = clusterings
        .iter()
        .flat_map(|c| c.assignments.keys())
        .collect();
    clusterings
        .iter()
        .map(|c| LabeledClustering {
            tag: c.tag.clone(),
            assignments: universe
                .iter()
                .map(|&k| {
                    (
                        k.clone(),
                        c.assignments.get(k).copied().unwrap_or(Membership::Absent),
                    )
                })
                .collect(),
        })
        .collect()
}

/// Symmetric matrix of pairwise ARIs with unit diagonal. Inputs must be
/// cross-levelled.
pub fn pairwise_ari_matrix<K: Ord>(clusterings: &[LabeledClustering<K>]) -> Result<Vec<Vec<f64>>> {
    let n = clusterings.len();
    let mut m = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = labeled_ari(&clusterings[i], &clusterings[j])?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// Mean off-diagonal entry of a pairwise similarity matrix; `None` for
/// fewer than two clusterings.
pub fn average_internal_ari(matrix: &[Vec<f64>]) -> Option<f64> {
    let n = matrix.len();
    if n < 2 {
        return None;
    }
    let sum: f64 = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| matrix[i][j])
        .sum();
    Some(sum / (n * (n - 1)) as f64)
}
