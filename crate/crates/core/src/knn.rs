//! Symmetric k-nearest-neighbour similarity graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::graph::{Edge, ViewGraph};
use crate::matrix::SparseMatrix;

/// How many neighbours each object links to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborCount {
    /// `floor(sqrt(n))`, clamped to `[1, n - 1]`.
    #[default]
    Auto,
    Fixed(usize),
}

impl NeighborCount {
    /// Resolves the neighbour count for `n` objects.
    pub fn resolve(self, n: usize) -> Result<usize> {
        if n < 2 {
            return Err(invalid("k-NN graphs need at least two objects"));
        }
        match self {
            NeighborCount::Auto => Ok(isqrt(n).clamp(1, n - 1)),
            NeighborCount::Fixed(k) if k == 0 || k >= n => Err(invalid(alloc::format!(
                "k = {k} must lie in [1, {}] for {n} objects",
                n - 1
            ))),
            NeighborCount::Fixed(k) => Ok(k),
        }
    }
}

fn isqrt(n: usize) -> usize {
    let mut r = libm::sqrt(n as f64) as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// The `k` most cosine-similar other rows of `row`, best first.
///
/// Only rows sharing at least one column are candidates, so zero-similarity
/// rows are never returned. Ties go to the lower row index.
pub(crate) fn nearest_neighbors(
    m: &SparseMatrix,
    index: &[Vec<usize>],
    norms: &[f64],
    row: usize,
    k: usize,
    seen: &mut [bool],
) -> Vec<(usize, f64)> {
    let mut candidates = Vec::new();
    for &c in m.row(row).0 {
        for &other in &index[c] {
            if other != row && !seen[other] {
                seen[other] = true;
                candidates.push(other);
            }
        }
    }
    let mut scored: Vec<(usize, f64)> = candidates
        .iter()
        .map(|&j| {
            seen[j] = false;
            (j, m.cosine_with_norms(row, j, norms[row], norms[j]))
        })
        .filter(|&(_, s)| s > 0.0)
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}

/// Directed k-NN by cosine similarity, symmetrised as `(A + A^T) / 2`.
///
/// Mutual neighbours keep their similarity as edge weight; one-sided
/// neighbours get half of it. Rows with no non-zero entries become isolates.
pub fn knn_graph(m: &SparseMatrix, k: NeighborCount) -> Result<ViewGraph> {
    let n = m.rows();
    let k = k.resolve(n)?;
    let index = m.column_rows();
    let norms: Vec<f64> = (0..n).map(|i| m.row_norm(i)).collect();
    let mut seen = vec![false; n];
    // directed[i] holds i's chosen neighbours sorted by id.
    let directed: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            let mut nn = nearest_neighbors(m, &index, &norms, i, k, &mut seen);
            nn.sort_unstable_by_key(|&(j, _)| j);
            nn
        })
        .collect();
    let lookup = |i: usize, j: usize| {
        directed[i]
            .binary_search_by_key(&j, |&(t, _)| t)
            .ok()
            .map(|p| directed[i][p].1)
    };
    let mut edges = Vec::new();
    for (i, row) in directed.iter().enumerate() {
        for &(j, s) in row {
            match lookup(j, i) {
                // Mutual pair: emit once, from the lower endpoint.
                Some(back) if i < j => edges.push(Edge {
                    source: i,
                    target: j,
                    weight: (s + back) / 2.0,
                }),
                Some(_) => {}
                None => {
                    let (source, target) = if i < j { (i, j) } else { (j, i) };
                    edges.push(Edge {
                        source,
                        target,
                        weight: s / 2.0,
                    });
                }
            }
        }
    }
    edges.retain(|e| e.weight >= ViewGraph::MIN_WEIGHT);
    edges.sort_unstable_by_key(|e| (e.source, e.target));
    Ok(ViewGraph::from_canonical(n, edges))
}
