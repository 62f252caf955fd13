//! Sparse non-negative object-by-feature matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Inverse-document-frequency factor used by [`SparseMatrix::tfidf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfMode {
    /// `n / df`, with no logarithm.
    #[default]
    Ratio,
    /// `1 + ln(n / df)`; the leading one keeps every stored entry non-zero.
    Log,
}

/// Compressed sparse row matrix with strictly positive stored entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Repeated coordinates are summed and zero entries are not stored.
    /// Negative or non-finite values are rejected.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows {
                return Err(Error::NodeOutOfRange {
                    node: r,
                    node_count: rows,
                });
            }
            if c >= cols {
                return Err(invalid(alloc::format!(
                    "column {c} out of range for {cols} columns"
                )));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidWeight {
                    row: r,
                    col: c,
                    weight: v,
                });
            }
            if v > 0.0 {
                entries.push((r, c, v));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Dense row-major input; convenient for small fixtures.
    pub fn from_dense(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("ragged dense matrix"));
        }
        Self::from_triplets(
            rows.len(),
            cols,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v))),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices (ascending) and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// `(row, col, value)` for every stored entry in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Number of rows with a non-zero in each column.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.cols];
        for &c in &self.col_idx {
            df[c] += 1;
        }
        df
    }

    /// Term-frequency / inverse-document-frequency weighting.
    ///
    /// Entry `(i, j)` becomes `tf_ij * idf_j`, with `idf_j = n / df_j` for
    /// [`IdfMode::Ratio`]. The sparsity pattern is unchanged.
    pub fn tfidf(&self, mode: IdfMode) -> Self {
        let n = self.rows as f64;
        let idf: Vec<f64> = self
            .document_frequencies()
            .into_iter()
            .map(|df| {
                if df == 0 {
                    0.0
                } else {
                    let ratio = n / df as f64;
                    match mode {
                        IdfMode::Ratio => ratio,
                        IdfMode::Log => 1.0 + libm::log(ratio),
                    }
                }
            })
            .collect();
        let values = self
            .col_idx
            .iter()
            .zip(&self.values)
            .map(|(&c, &v)| v * idf[c])
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        libm::sqrt(self.row(i).1.iter().map(|v| v * v).sum())
    }

    pub fn dot(&self, i: usize, j: usize) -> f64 {
        let (ca, va) = self.row(i);
        let (cb, vb) = self.row(j);
        let (mut a, mut b) = (0, 0);
        let mut acc = 0.0;
        while a < ca.len() && b < cb.len() {
            match ca[a].cmp(&cb[b]) {
                core::cmp::Ordering::Less => a += 1,
                core::cmp::Ordering::Greater => b += 1,
                core::cmp::Ordering::Equal => {
                    acc += va[a] * vb[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Cosine similarity of rows `i` and `j`; zero if either row is empty.
    pub fn cosine_similarity(&self, i: usize, j: usize) -> f64 {
        self.cosine_with_norms(i, j, self.row_norm(i), self.row_norm(j))
    }

    pub(crate) fn cosine_with_norms(&self, i: usize, j: usize, ni: f64, nj: f64) -> f64 {
        if ni == 0.0 || nj == 0.0 {
            return 0.0;
        }
        (self.dot(i, j) / (ni * nj)).clamp(0.0, 1.0)
    }

    /// Rows containing each column, ascending: an inverted index.
    pub(crate) fn column_rows(&self) -> Vec<Vec<usize>> {
        let mut index = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for &c in self.row(i).0 {
                index[c].push(i);
            }
        }
        index
    }
}
