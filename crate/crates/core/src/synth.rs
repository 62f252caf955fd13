//! Planted-partition generators for validating the clustering pipeline.

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::graph::{Edge, ViewGraph};

/// Balanced block labels: node `i` of `n` is in block `i * blocks / n`.
pub fn block_labels(n: usize, blocks: usize) -> Vec<usize> {
    (0..n).map(|i| i * blocks / n).collect()
}

/// Unit-weight graph with edge probability `p_in` inside blocks of `truth`
/// and `p_out` between them.
pub fn planted_partition_graph<R: Rng>(
    truth: &[usize],
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> ViewGraph {
    let n = truth.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if truth[i] == truth[j] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push(Edge {
                    source: i,
                    target: j,
                    weight: 1.0,
                });
            }
        }
    }
    ViewGraph::from_canonical(n, edges)
}

/// Multi-view planted-partition problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub nodes: usize,
    pub blocks: usize,
    pub informative_views: usize,
    pub noise_views: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Edge probability of noise views; `None` matches the expected density
    /// of the informative views.
    pub noise_p: Option<f64>,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            nodes: 60,
            blocks: 3,
            informative_views: 2,
            noise_views: 0,
            p_in: 0.5,
            p_out: 0.02,
            noise_p: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthProblem {
    /// Informative views first, then noise views.
    pub graphs: Vec<ViewGraph>,
    pub truth: Vec<usize>,
}

impl SynthSpec {
    /// Expected edge density of an informative view.
    pub fn informative_density(&self) -> f64 {
        let truth = block_labels(self.nodes, self.blocks);
        let mut same = 0usize;
        let mut total = 0usize;
        for i in 0..self.nodes {
            for j in i + 1..self.nodes {
                total += 1;
                same += usize::from(truth[i] == truth[j]);
            }
        }
        if total == 0 {
            return 0.0;
        }
        let frac = same as f64 / total as f64;
        frac * self.p_in + (1.0 - frac) * self.p_out
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !(prob(self.p_in) && prob(self.p_out)) || self.p_in <= self.p_out {
            return Err(invalid("need 0 <= p_out < p_in <= 1"));
        }
        if let Some(p) = self.noise_p {
            if !prob(p) {
                return Err(invalid("noise probability must lie in [0, 1]"));
            }
        }
        if self.nodes == 0 || self.blocks == 0 || self.blocks > self.nodes {
            return Err(invalid("need 1 <= blocks <= nodes"));
        }
        if self.informative_views + self.noise_views == 0 {
            return Err(invalid("need at least one view"));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<SynthProblem> {
        self.validate()?;
        let truth = block_labels(self.nodes, self.blocks);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let noise_p = self.noise_p.unwrap_or_else(|| self.informative_density());
        let mut graphs = Vec::with_capacity(self.informative_views + self.noise_views);
        for _ in 0..self.informative_views {
            graphs.push(planted_partition_graph(
                &truth, self.p_in, self.p_out, &mut rng,
            ));
        }
        for _ in 0..self.noise_views {
            graphs.push(planted_partition_graph(&truth, noise_p, noise_p, &mut rng));
        }
        Ok(SynthProblem { graphs, truth })
    }
}

/// Copies `labels`, reassigning `round(fraction * n)` distinct randomly chosen
/// entries to a different label drawn uniformly from `0..label_count`.
pub fn flip_labels<R: Rng>(
    labels: &[usize],
    label_count: usize,
    fraction: f64,
    rng: &mut R,
) -> Vec<usize> {
    let mut out = labels.to_vec();
    if label_count < 2 {
        return out;
    }
    let n = labels.len();
    let flips = libm::round(fraction * n as f64) as usize;
    let mut idx: Vec<usize> = (0..n).collect();
    // Partial Fisher-Yates: the first `flips` slots are a uniform sample.
    for i in 0..flips.min(n) {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
        let node = idx[i];
        let shift = rng.gen_range(1..label_count);
        out[node] = (labels[node] + shift) % label_count;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_balanced() {
        assert_eq!(block_labels(6, 3), [0, 0, 1, 1, 2, 2]);
        assert_eq!(block_labels(5, 1), [0; 5]);
    }

    #[test]
    fn no_cross_edges_when_p_out_zero() {
        let spec = SynthSpec {
            nodes: 30,
            blocks: 3,
            p_in: 0.8,
            p_out: 0.0,
            ..SynthSpec::default()
        };
        let problem = spec.generate().unwrap();
        for g in &problem.graphs {
            assert!(g
                .edges()
                .iter()
                .all(|e| problem.truth[e.source] == problem.truth[e.target]));
            assert!(g.edge_count() > 0);
        }
    }

    #[test]
    fn deterministic() {
        let spec = SynthSpec::default();
        assert_eq!(
            spec.generate().unwrap().graphs,
            spec.generate().unwrap().graphs
        );
    }

    #[test]
    fn validation() {
        let bad = SynthSpec {
            p_in: 0.1,
            p_out: 0.1,
            ..SynthSpec::default()
        };
        assert!(bad.generate().is_err());
        let bad = SynthSpec {
            p_in: 1.5,
            ..SynthSpec::default()
        };
        assert!(bad.generate().is_err());
        let bad = SynthSpec {
            blocks: 0,
            ..SynthSpec::default()
        };
        assert!(bad.generate().is_err());
    }

    #[test]
    fn flips_exact_count() {
        let labels = block_labels(90, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noisy = flip_labels(&labels, 3, 0.1, &mut rng);
        let changed = labels.iter().zip(&noisy).filter(|(a, b)| a != b).count();
        assert_eq!(changed, 9);
    }
}
