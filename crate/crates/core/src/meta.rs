//! Average-linkage agglomerative clustering of clusterings.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// One merge step. Leaves are `0..n`; the cluster created by step `s` gets
/// id `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

fn check_square(m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(invalid("matrix must be square"));
        }
        for j in 0..i {
            if row[j] != m[j][i] {
                return Err(invalid("matrix must be symmetric"));
            }
        }
    }
    Ok(())
}

/// UPGMA on a symmetric distance matrix.
///
/// The closest pair of active clusters merges first; ties go to the pair
/// with the smallest `(i, j)` slot indices, where a merged cluster takes the
/// lower slot of its two parts.
pub fn average_linkage(distances: &[Vec<f64>]) -> Result<Dendrogram> {
    check_square(distances)?;
    let n = distances.len();
    let mut d: Vec<Vec<f64>> = distances.to_vec();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut id: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if active[j] && best.is_none_or(|(_, _, h)| d[i][j] < h) {
                    best = Some((i, j, d[i][j]));
                }
            }
        }
        let (i, j, height) = best.expect("two active clusters");
        let merged = size[i] + size[j];
        for k in 0..n {
            if active[k] && k != i && k != j {
                let v = (size[i] as f64 * d[i][k] + size[j] as f64 * d[j][k]) / merged as f64;
                d[i][k] = v;
                d[k][i] = v;
            }
        }
        active[j] = false;
        merges.push(Merge {
            left: id[i],
            right: id[j],
            height,
            size: merged,
        });
        size[i] = merged;
        id[i] = n + step;
    }
    Ok(Dendrogram { leaves: n, merges })
}

impl Dendrogram {
    /// Flat labels after applying the first `n - k` merges; labels are dense
    /// in order of each cluster's first leaf.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.leaves;
        if k == 0 || k > n {
            return Err(invalid(alloc::format!(
                "cannot cut {n} leaves into {k} clusters"
            )));
        }
        // Union-find over leaves and internal nodes.
        let mut parent: Vec<usize> = (0..n + self.merges.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (step, m) in self.merges.iter().take(n - k).enumerate() {
            let node = n + step;
            let l = find(&mut parent, m.left);
            let r = find(&mut parent, m.right);
            parent[l] = node;
            parent[r] = node;
        }
        let mut label_of = vec![usize::MAX; parent.len()];
        let mut next = 0;
        Ok((0..n)
            .map(|leaf| {
                let root = find(&mut parent, leaf);
                if label_of[root] == usize::MAX {
                    label_of[root] = next;
                    next += 1;
                }
                label_of[root]
            })
            .collect())
    }
}

/// Meta-clusters a set of clusterings from their pairwise similarity (ARI)
/// matrix, using distance `1 - similarity`.
pub fn agglomerative_meta_cluster(
    similarity: &[Vec<f64>],
    k: usize,
) -> Result<(Vec<usize>, Dendrogram)> {
    check_square(similarity)?;
    if k == 0 || k > similarity.len() {
        return Err(invalid(alloc::format!(
            "meta-cluster count {k} must lie in [1, {}]",
            similarity.len()
        )));
    }
    let distances: Vec<Vec<f64>> = similarity
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &s)| if i == j { 0.0 } else { 1.0 - s })
                .collect()
        })
        .collect();
    let dendrogram = average_linkage(&distances)?;
    Ok((dendrogram.cut(k)?, dendrogram))
}
