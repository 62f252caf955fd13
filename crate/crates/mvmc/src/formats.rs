//! Plain-text file formats. Everything is tab-separated; floats are written
//! in Rust's shortest round-trip form so files are byte-stable.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mvmc_core::meta::Dendrogram;
use mvmc_core::{LabeledClustering, Membership, MvmcTrace, SparseMatrix, ViewGraph};

use crate::error::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let write_err = |source| Error::Write {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(write_err)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(write_err)?;
    fs::rename(&tmp, path).map_err(write_err)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

/// Bidirectional name <-> dense index map, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I: IntoIterator<Item = String>>(names: I) -> Self {
        let mut r = Self::new();
        for n in names {
            r.intern(&n);
        }
        r
    }

    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        Ok(Self::from_names(
            data_lines(&text).map(|(_, l)| l.trim_end().to_string()),
        ))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for n in &self.names {
            out.push_str(n);
            out.push('\n');
        }
        write_atomic(path, &out)
    }
}

/// One view: a sparse object-by-feature count matrix with name registries.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewMatrix {
    pub matrix: SparseMatrix,
    pub rows: Registry,
    pub cols: Registry,
}

impl ViewMatrix {
    /// Parses `row<TAB>col<TAB>count` triplets.
    ///
    /// With `rows` given, rows are indexed by that registry (and unknown row
    /// names are an error); otherwise both registries are built in order of
    /// first appearance.
    pub fn parse(path: &Path, text: &str, rows: Option<&Registry>) -> Result<Self> {
        let mut row_reg = rows.cloned().unwrap_or_default();
        let mut col_reg = Registry::new();
        let mut triplets = Vec::new();
        for (line, l) in data_lines(text) {
            let mut fields = l.split('\t');
            let (Some(r), Some(c), Some(v), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::parse(path, line, "expected row<TAB>col<TAB>count"));
            };
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad count {v:?}")))?;
            let ri = match rows {
                Some(reg) => reg
                    .get(r)
                    .ok_or_else(|| Error::parse(path, line, format!("unknown row {r:?}")))?,
                None => row_reg.intern(r),
            };
            triplets.push((ri, col_reg.intern(c), v));
        }
        let matrix = SparseMatrix::from_triplets(row_reg.len(), col_reg.len(), triplets)
            .map_err(|e| Error::parse(path, 0, e.to_string()))?;
        Ok(Self {
            matrix,
            rows: row_reg,
            cols: col_reg,
        })
    }

    pub fn read(path: &Path, rows: Option<&Registry>) -> Result<Self> {
        Self::parse(path, &read_text(path)?, rows)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, j, v) in self.matrix.triplets() {
            let _ = writeln!(out, "{}\t{}\t{}", self.rows.name(i), self.cols.name(j), v);
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_tsv())
    }
}

pub fn edge_list_to_string(g: &ViewGraph) -> String {
    let mut out = format!("#nodes={}\n", g.node_count());
    for e in g.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", e.source, e.target, e.weight);
    }
    out
}

pub fn parse_edge_list(path: &Path, text: &str) -> Result<ViewGraph> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let n: usize = header
        .strip_prefix("#nodes=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::parse(path, 1, "expected header #nodes=<n>"))?;
    let mut edges = Vec::new();
    for (line, l) in data_lines(text).filter(|&(line, _)| line > 1) {
        let f: Vec<&str> = l.split('\t').collect();
        let parsed = match f.as_slice() {
            [i, j, w] => i
                .trim()
                .parse::<usize>()
                .ok()
                .zip(j.trim().parse::<usize>().ok())
                .zip(w.trim().parse::<f64>().ok()),
            _ => None,
        };
        let ((i, j), w) =
            parsed.ok_or_else(|| Error::parse(path, line, "expected i<TAB>j<TAB>weight"))?;
        edges.push((i, j, w));
    }
    ViewGraph::from_edges(n, edges).map_err(|e| Error::parse(path, 0, e.to_string()))
}

pub fn read_edge_list(path: &Path) -> Result<ViewGraph> {
    parse_edge_list(path, &read_text(path)?)
}

pub const CLUSTERING_HEADER: &str = "object\tlabel";

/// `object<TAB>label` with a header line. Absent objects are not written.
pub fn clustering_to_string(c: &LabeledClustering<String>) -> String {
    let mut out = String::from(CLUSTERING_HEADER);
    out.push('\n');
    for (k, label) in c.present() {
        let _ = writeln!(out, "{k}\t{label}");
    }
    out
}

pub fn parse_clustering(path: &Path, text: &str, tag: &str) -> Result<LabeledClustering<String>> {
    let mut c = LabeledClustering::new(tag);
    for (line, l) in data_lines(text) {
        if l == CLUSTERING_HEADER {
            continue;
        }
        let (k, v) = l
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, line, "expected object<TAB>label"))?;
        let label: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad label {v:?}")))?;
        if c.assignments
            .insert(k.to_string(), Membership::Cluster(label))
            .is_some()
        {
            return Err(Error::parse(
                path,
                line,
                format!("object {k:?} listed twice"),
            ));
        }
    }
    Ok(c)
}

/// Reads a clustering; its tag is the file stem, or the parent directory's
/// name for files called `clustering.tsv`.
pub fn read_clustering(path: &Path) -> Result<LabeledClustering<String>> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tag = if stem == "clustering" {
        path.parent()
            .and_then(|p| p.file_name())
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or(stem)
    } else {
        stem
    };
    parse_clustering(path, &read_text(path)?, &tag)
}

/// One line per iteration: iteration, per-view resolutions, per-view
/// weights, modularity, cluster count.
pub fn trace_to_string(trace: &MvmcTrace) -> String {
    let views = trace.records.first().map_or(0, |r| r.weights.len());
    let mut out = format!(
        "# converged={} chosen_iteration={}\niter",
        trace.converged,
        trace.chosen_iteration + 1
    );
    for v in 0..views {
        let _ = write!(out, "\tgamma_{v}");
    }
    for v in 0..views {
        let _ = write!(out, "\tw_{v}");
    }
    out.push_str("\tmodularity\tclusters\n");
    for (i, r) in trace.records.iter().enumerate() {
        let _ = write!(out, "{}", i + 1);
        for g in &r.resolutions {
            let _ = write!(out, "\t{g}");
        }
        for w in &r.weights {
            let _ = write!(out, "\t{w}");
        }
        let _ = writeln!(out, "\t{}\t{}", r.modularity, r.cluster_count);
    }
    out
}

pub fn matrix_to_string(tags: &[String], m: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for t in tags {
        out.push('\t');
        out.push_str(t);
    }
    out.push('\n');
    for (t, row) in tags.iter().zip(m) {
        out.push_str(t);
        for v in row {
            let _ = write!(out, "\t{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(path: &Path, text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty matrix file"))?;
    let tags: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, l) in lines.enumerate() {
        let values: std::result::Result<Vec<f64>, _> =
            l.split('\t').skip(1).map(str::parse::<f64>).collect();
        let values = values.map_err(|_| Error::parse(path, i + 2, "bad matrix entry"))?;
        if values.len() != tags.len() {
            return Err(Error::parse(path, i + 2, "row length differs from header"));
        }
        rows.push(values);
    }
    if rows.len() != tags.len() {
        return Err(Error::parse(path, 0, "matrix is not square"));
    }
    Ok((tags, rows))
}

pub fn dendrogram_to_string(d: &Dendrogram) -> String {
    let mut out = String::from("step\tleft\tright\theight\n");
    for (step, m) in d.merges.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", step + 1, m.left, m.right, m.height);
    }
    out
}

/// `key<TAB>value` pairs, header first.
pub fn pairs_to_string<K: std::fmt::Display, V: std::fmt::Display>(
    header: &str,
    pairs: impl IntoIterator<Item = (K, V)>,
) -> String {
    let mut out = format!("{header}\n");
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}\t{v}");
    }
    out
}

/// Parses rows of a headered TSV into maps keyed by column name.
pub fn parse_table(path: &Path, text: &str) -> Result<Vec<BTreeMap<String, String>>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let Some(header) = lines.next() else {
        return Ok(Vec::new());
    };
    let cols: Vec<&str> = header.split('\t').collect();
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split('\t').collect();
            if fields.len() != cols.len() {
                return Err(Error::parse(
                    path,
                    i + 2,
                    "column count differs from header",
                ));
            }
            Ok(cols
                .iter()
                .zip(fields)
                .map(|(c, f)| (c.to_string(), f.to_string()))
                .collect())
        })
        .collect()
}
