//! Degree-corrected edge propensities and the resolution/weight updates
//! derived from them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{shared_node_count, Clustering, ViewGraph};

/// Fitted propensities for edges inside (`theta_in`) and between
/// (`theta_out`) clusters, one pair per view.
#[derive(Debug, Clone, PartialEq)]
pub struct Propensities {
    pub theta_in: Vec<f64>,
    pub theta_out: Vec<f64>,
}

impl Propensities {
    pub fn len(&self) -> usize {
        self.theta_in.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_in.is_empty()
    }

    /// `ln theta_in - ln theta_out` per view.
    pub fn log_ratios(&self) -> Vec<f64> {
        self.theta_in
            .iter()
            .zip(&self.theta_out)
            .map(|(&i, &o)| libm::log(i) - libm::log(o))
            .collect()
    }
}

/// Observed edge statistics of one view under a partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSplit {
    /// Weight of intra-cluster edges.
    pub internal: f64,
    /// Weight of inter-cluster edges.
    pub external: f64,
    /// `sum_c kappa_c^2 / (4 m)`: expected internal weight per unit propensity.
    pub null_internal: f64,
    pub total: f64,
    pub edge_count: usize,
}

pub fn edge_split(g: &ViewGraph, c: &Clustering) -> EdgeSplit {
    let mut internal = 0.0;
    let mut external = 0.0;
    for e in g.edges() {
        if c.label(e.source) == c.label(e.target) {
            internal += e.weight;
        } else {
            external += e.weight;
        }
    }
    let mut kappa = vec![0.0; c.cluster_count()];
    for (node, &d) in g.degrees().iter().enumerate() {
        kappa[c.label(node)] += d;
    }
    let total = g.total_edge_weight();
    let null_internal = if total > 0.0 {
        kappa.iter().map(|k| k * k).sum::<f64>() / (4.0 * total)
    } else {
        0.0
    };
    EdgeSplit {
        internal,
        external,
        null_internal,
        total,
        edge_count: g.edge_count(),
    }
}

/// `(theta_in, theta_out)` for one view.
///
/// When no edge is internal, `theta_in` is replaced by `1 / |E|`; when no
/// edge is external, `theta_out` is. A view without edges is neutral
/// (`1, 1`).
pub fn view_propensities(g: &ViewGraph, c: &Clustering) -> (f64, f64) {
    let s = edge_split(g, c);
    if s.edge_count == 0 {
        return (1.0, 1.0);
    }
    let substitute = 1.0 / s.edge_count as f64;
    let theta_in = if s.internal == 0.0 {
        substitute
    } else {
        s.internal / s.null_internal
    };
    let theta_out = if s.external == 0.0 {
        substitute
    } else {
        s.external / (s.total - s.null_internal)
    };
    (theta_in, theta_out)
}

pub fn edge_propensities(graphs: &[ViewGraph], c: &Clustering) -> Result<Propensities> {
    let n = shared_node_count(graphs)?;
    c.check_len(n)?;
    let (theta_in, theta_out) = graphs.iter().map(|g| view_propensities(g, c)).unzip();
    Ok(Propensities {
        theta_in,
        theta_out,
    })
}

/// Logarithmic mean `(a - b) / (ln a - ln b)`, with its limit `a` when the
/// two are (numerically) equal.
pub fn resolution_from(theta_in: f64, theta_out: f64) -> Result<f64> {
    if !(theta_in > 0.0 && theta_out > 0.0) || !theta_in.is_finite() || !theta_out.is_finite() {
        return Err(Error::Invariant(format!(
            "propensities must be positive and finite, got ({theta_in}, {theta_out})"
        )));
    }
    if (theta_in - theta_out).abs() < 1e-12 {
        return Ok(theta_in);
    }
    Ok((theta_in - theta_out) / (libm::log(theta_in) - libm::log(theta_out)))
}

pub fn update_resolution(p: &Propensities) -> Result<Vec<f64>> {
    p.theta_in
        .iter()
        .zip(&p.theta_out)
        .map(|(&i, &o)| resolution_from(i, o))
        .collect()
}

/// Result of the view-weight update.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightUpdate {
    pub weights: Vec<f64>,
    /// Views whose raw weight was negative and has been clamped to zero.
    pub clamped: Vec<usize>,
    /// The mean log-ratio was not positive, so all weights were reset to one.
    pub fallback: bool,
}

/// Each view's log-ratio divided by the mean log-ratio over views.
///
/// A mean within `1e-12` of zero, or below it, resets every weight to one.
/// Negative weights (views that are denser between clusters than inside)
/// are clamped to zero.
pub fn update_weights(p: &Propensities) -> WeightUpdate {
    let ratios = p.log_ratios();
    if ratios.is_empty() {
        return WeightUpdate {
            weights: Vec::new(),
            clamped: Vec::new(),
            fallback: false,
        };
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if mean < 1e-12 {
        return WeightUpdate {
            weights: vec![1.0; ratios.len()],
            clamped: Vec::new(),
            fallback: true,
        };
    }
    let mut clamped = Vec::new();
    let weights = ratios
        .iter()
        .enumerate()
        .map(|(v, &r)| {
            let w = r / mean;
            if w < 0.0 {
                clamped.push(v);
                0.0
            } else {
                w
            }
        })
        .collect();
    WeightUpdate {
        weights,
        clamped,
        fallback: false,
    }
}
