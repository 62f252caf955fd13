//! The iterative multi-view modularity clustering driver.
//!
//! Each iteration clusters all views jointly under the current per-view
//! weights and resolutions, measures the weighted modularity of the result,
//! fits edge propensities to the clustering and derives the next weights and
//! resolutions from them. The loop stops once neither weights nor
//! resolutions move by more than their tolerances; if that never happens the
//! iteration with the highest modularity wins.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::graph::{shared_node_count, Clustering, ViewGraph};
use crate::modularity::{rb_modularity, Louvain, ViewParams};
use crate::propensity::{edge_propensities, update_resolution, update_weights, Propensities};

#[derive(Debug, Clone, PartialEq)]
pub struct MvmcConfig {
    pub max_iter: usize,
    /// Largest per-view resolution change still counted as converged.
    pub resolution_tol: f64,
    /// Largest per-view weight change still counted as converged.
    pub weight_tol: f64,
    /// Starting resolutions; `None` means one per view.
    pub init_resolutions: Option<Vec<f64>>,
    /// Starting weights; `None` means one per view.
    pub init_weights: Option<Vec<f64>>,
    pub seed: u64,
    pub optimizer: Louvain,
}

impl Default for MvmcConfig {
    fn default() -> Self {
        Self {
            max_iter: 20,
            resolution_tol: 0.3,
            weight_tol: 0.1,
            init_resolutions: None,
            init_weights: None,
            seed: 0,
            optimizer: Louvain::default(),
        }
    }
}

impl MvmcConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if !(self.resolution_tol > 0.0 && self.weight_tol > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        Ok(())
    }

    fn initial_params(&self, views: usize) -> Result<ViewParams> {
        ViewParams::new(
            self.init_weights
                .clone()
                .unwrap_or_else(|| vec![1.0; views]),
            self.init_resolutions
                .clone()
                .unwrap_or_else(|| vec![1.0; views]),
        )
    }
}

/// One iteration: the parameters the clustering was produced with, and what
/// came out.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub weights: Vec<f64>,
    pub resolutions: Vec<f64>,
    pub modularity: f64,
    pub cluster_count: usize,
    pub propensities: Propensities,
    /// Views whose updated weight came out negative and was clamped to zero.
    pub clamped_views: Vec<usize>,
    /// The weight update fell back to all-ones.
    pub weight_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MvmcTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    /// Index into `records` of the returned clustering.
    pub chosen_iteration: usize,
}

impl MvmcTrace {
    pub fn chosen(&self) -> &IterationRecord {
        &self.records[self.chosen_iteration]
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Runs multi-view modularity clustering on views sharing one node set.
pub fn run_mvmc(graphs: &[ViewGraph], cfg: &MvmcConfig) -> Result<(Clustering, MvmcTrace)> {
    cfg.validate()?;
    shared_node_count(graphs)?;
    let mut params = cfg.initial_params(graphs.len())?;
    if params.len() != graphs.len() {
        return Err(crate::Error::ViewCountMismatch {
            expected: graphs.len(),
            found: params.len(),
        });
    }
    let mut records = Vec::new();
    let mut clusterings = Vec::new();
    for _ in 0..cfg.max_iter {
        let clustering = cfg.optimizer.run(graphs, &params, cfg.seed)?;
        let modularity = rb_modularity(graphs, &clustering, &params)?;
        let propensities = edge_propensities(graphs, &clustering)?;
        let next_resolutions = update_resolution(&propensities)?;
        let update = update_weights(&propensities);

        let converged = max_abs_diff(&next_resolutions, params.resolutions()) < cfg.resolution_tol
            && max_abs_diff(&update.weights, params.weights()) < cfg.weight_tol;
        records.push(IterationRecord {
            weights: params.weights().to_vec(),
            resolutions: params.resolutions().to_vec(),
            modularity,
            cluster_count: clustering.cluster_count(),
            propensities,
            clamped_views: update.clamped,
            weight_fallback: update.fallback,
        });
        clusterings.push(clustering);
        if converged {
            let chosen_iteration = records.len() - 1;
            let clustering = clusterings.pop().expect("current clustering");
            return Ok((
                clustering,
                MvmcTrace {
                    records,
                    converged: true,
                    chosen_iteration,
                },
            ));
        }
        params = ViewParams::new(update.weights, next_resolutions)?;
    }
    // First maximum wins on ties.
    let chosen_iteration = records.iter().enumerate().fold(0, |best, (i, r)| {
        if r.modularity > records[best].modularity {
            i
        } else {
            best
        }
    });
    let clustering = clusterings.swap_remove(chosen_iteration);
    Ok((
        clustering,
        MvmcTrace {
            records,
            converged: false,
            chosen_iteration,
        },
    ))
}
