//! Weighted, resolution-parameterised multi-view modularity and a
//! Louvain-style maximiser for one partition shared by all views.
//!
//! Each view contributes the normalised Reichardt–Bornholdt modularity
//!
//! ```text
//! Q_v = 1/(2m) * sum_ij [A_ij - gamma * k_i k_j / (2m)] delta(c_i, c_j)
//!     = sum_c [ 2 in_c / (2m) - gamma * (tot_c / 2m)^2 ]
//! ```
//!
//! and the objective is `Q = sum_v w_v Q_v`. Views without edges contribute 0.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::{shared_node_count, Clustering, ViewGraph};

/// Per-view weights `w_v` and resolutions `gamma_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewParams {
    weights: Vec<f64>,
    resolutions: Vec<f64>,
}

impl ViewParams {
    pub fn new(weights: Vec<f64>, resolutions: Vec<f64>) -> Result<Self> {
        if weights.len() != resolutions.len() {
            return Err(Error::ViewCountMismatch {
                expected: weights.len(),
                found: resolutions.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(invalid("view weights must be finite"));
        }
        if resolutions.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(invalid("resolutions must be positive and finite"));
        }
        Ok(Self {
            weights,
            resolutions,
        })
    }

    /// Unit weight and unit resolution for every view.
    pub fn uniform(views: usize) -> Self {
        Self {
            weights: vec![1.0; views],
            resolutions: vec![1.0; views],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn resolutions(&self) -> &[f64] {
        &self.resolutions
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn check(&self, views: usize) -> Result<()> {
        if self.len() != views {
            return Err(Error::ViewCountMismatch {
                expected: views,
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// Normalised RB modularity of one view.
pub fn view_modularity(g: &ViewGraph, c: &Clustering, resolution: f64) -> f64 {
    let m = g.total_edge_weight();
    if m <= 0.0 {
        return 0.0;
    }
    let k = c.cluster_count();
    let mut inside = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for e in g.edges() {
        let l = c.label(e.source);
        if l == c.label(e.target) {
            inside[l] += e.weight;
        }
    }
    for (node, &d) in g.degrees().iter().enumerate() {
        tot[c.label(node)] += d;
    }
    let two_m = 2.0 * m;
    inside
        .iter()
        .zip(&tot)
        .map(|(&i, &t)| 2.0 * i / two_m - resolution * (t / two_m) * (t / two_m))
        .sum()
}

/// View-weighted multi-view RB modularity of a shared partition.
pub fn rb_modularity(graphs: &[ViewGraph], c: &Clustering, params: &ViewParams) -> Result<f64> {
    let n = shared_node_count(graphs)?;
    params.check(graphs.len())?;
    c.check_len(n)?;
    Ok(graphs
        .iter()
        .zip(params.weights.iter().zip(&params.resolutions))
        .map(|(g, (&w, &gamma))| w * view_modularity(g, c, gamma))
        .sum())
}

/// Maximises [`rb_modularity`] with default [`Louvain`] settings.
pub fn maximize(graphs: &[ViewGraph], params: &ViewParams, seed: u64) -> Result<Clustering> {
    Louvain::default().run(graphs, params, seed)
}

/// Multi-level local-moving optimiser.
///
/// Each level moves single nodes to the neighbouring community with the best
/// gain summed over views, until a full pass finds no gain above
/// `gain_epsilon`; communities are then collapsed into nodes of the next
/// level in every view. When the levels stop improving, the projected
/// partition is polished again from the original graphs, so the result is
/// also a local optimum with respect to single-node moves.
///
/// The whole descent is repeated `trials` times with fresh random node
/// orders drawn from one seeded stream; the partition with the highest
/// objective is kept, earliest trial first on ties.
#[derive(Debug, Clone, PartialEq)]
pub struct Louvain {
    pub gain_epsilon: f64,
    pub max_levels: usize,
    pub max_rounds: usize,
    pub trials: usize,
}

impl Default for Louvain {
    fn default() -> Self {
        Self {
            gain_epsilon: 1e-9,
            max_levels: 100,
            max_rounds: 32,
            trials: 8,
        }
    }
}

impl Louvain {
    pub fn run(&self, graphs: &[ViewGraph], params: &ViewParams, seed: u64) -> Result<Clustering> {
        let n = shared_node_count(graphs)?;
        params.check(graphs.len())?;
        let base: Vec<LevelGraph> = graphs.iter().map(LevelGraph::from_view).collect();
        let views: Vec<ViewTerm> = base
            .iter()
            .zip(params.weights.iter().zip(&params.resolutions))
            .map(|(g, (&w, &gamma))| ViewTerm::new(g.total_weight, w, gamma))
            .collect();
        if self.trials == 0 {
            return Err(invalid("Louvain needs at least one trial"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<(f64, Clustering)> = None;
        for _ in 0..self.trials {
            let mut labels: Vec<usize> = (0..n).collect();
            for _ in 0..self.max_rounds {
                if !self.multilevel(&base, &views, &mut labels, &mut rng) {
                    break;
                }
            }
            let c = Clustering::from_labels(&labels);
            let q = rb_modularity(graphs, &c, params)?;
            if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
                best = Some((q, c));
            }
        }
        Ok(best.expect("at least one trial").1)
    }

    /// One descent through the levels starting from `labels` on the base
    /// graphs. Returns whether any node moved.
    fn multilevel(
        &self,
        base: &[LevelGraph],
        views: &[ViewTerm],
        labels: &mut Vec<usize>,
        rng: &mut ChaCha8Rng,
    ) -> bool {
        let mut any = false;
        let mut level: Vec<LevelGraph> = base.to_vec();
        // Base node -> node of the current level.
        let mut member: Vec<usize> = (0..labels.len()).collect();
        let mut community = core::mem::take(labels);
        for depth in 0..self.max_levels {
            let moved = self.local_moves(&level, views, &mut community, rng);
            any |= moved;
            if !moved && depth > 0 {
                break;
            }
            let (dense, count) = densify(&community);
            for node in member.iter_mut() {
                *node = dense[*node];
            }
            if count == dense.len() {
                break;
            }
            level = level.iter().map(|g| g.aggregate(&dense, count)).collect();
            community = (0..count).collect();
        }
        let (dense, _) = densify(&community);
        *labels = member.iter().map(|&m| dense[m]).collect();
        any
    }

    /// Local moving phase; `community` is updated in place. Returns whether
    /// any node changed community.
    fn local_moves(
        &self,
        graphs: &[LevelGraph],
        views: &[ViewTerm],
        community: &mut [usize],
        rng: &mut ChaCha8Rng,
    ) -> bool {
        let n = community.len();
        let nv = graphs.len();
        let mut tot = vec![0.0; nv * n];
        let mut size = vec![0usize; n];
        for (u, &c) in community.iter().enumerate() {
            size[c] += 1;
            for (v, g) in graphs.iter().enumerate() {
                tot[v * n + c] += g.degree[u];
            }
        }
        let mut free: Vec<usize> = (0..n).rev().filter(|&c| size[c] == 0).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut links = vec![0.0; nv * n];
        let mut touched: Vec<usize> = Vec::new();
        let mut is_touched = vec![false; n];
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &u in &order {
                let from = community[u];
                size[from] -= 1;
                for (v, g) in graphs.iter().enumerate() {
                    tot[v * n + from] -= g.degree[u];
                }
                for (v, g) in graphs.iter().enumerate() {
                    if !views[v].active() {
                        continue;
                    }
                    for &(t, w) in &g.adjacency[u] {
                        let c = community[t];
                        if !is_touched[c] {
                            is_touched[c] = true;
                            touched.push(c);
                        }
                        links[v * n + c] += w;
                    }
                }
                let gain = |c: usize, links: &[f64], tot: &[f64]| -> f64 {
                    views
                        .iter()
                        .enumerate()
                        .filter(|(_, t)| t.active())
                        .map(|(v, t)| {
                            t.scale
                                * (links[v * n + c]
                                    - t.resolution * graphs[v].degree[u] * tot[v * n + c] / t.two_m)
                        })
                        .sum()
                };
                let mut best = from;
                let mut best_gain = gain(from, &links, &tot);
                if size[from] > 0 && !free.is_empty() && 0.0 > best_gain + self.gain_epsilon {
                    best = *free.last().expect("free community");
                    best_gain = 0.0;
                }
                touched.sort_unstable();
                for &c in &touched {
                    if c == from {
                        continue;
                    }
                    let g = gain(c, &links, &tot);
                    if g > best_gain + self.gain_epsilon {
                        best = c;
                        best_gain = g;
                    }
                }
                for &c in &touched {
                    is_touched[c] = false;
                    for v in 0..nv {
                        links[v * n + c] = 0.0;
                    }
                }
                touched.clear();

                if best != from {
                    moved = true;
                    if free.last() == Some(&best) && size[best] == 0 {
                        free.pop();
                    }
                    if size[from] == 0 {
                        free.push(from);
                    }
                }
                community[u] = best;
                size[best] += 1;
                for (v, g) in graphs.iter().enumerate() {
                    tot[v * n + best] += g.degree[u];
                }
            }
            if !moved {
                break;
            }
            moved_any = true;
        }
        moved_any
    }
}

fn densify(community: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; community.len()];
    let mut next = 0;
    let dense = community
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (dense, next)
}

#[derive(Debug, Clone, Copy)]
struct ViewTerm {
    /// `w / m`: the factor turning a link/null-model difference into a
    /// change of the normalised objective. Zero disables the view.
    scale: f64,
    resolution: f64,
    two_m: f64,
}

impl ViewTerm {
    fn new(total_weight: f64, weight: f64, resolution: f64) -> Self {
        let scale = if total_weight > 0.0 {
            weight / total_weight
        } else {
            0.0
        };
        Self {
            scale,
            resolution,
            two_m: 2.0 * total_weight,
        }
    }

    fn active(&self) -> bool {
        self.scale != 0.0
    }
}

/// Graph of one aggregation level: communities of the level below become
/// nodes, internal weight becomes a self-loop.
#[derive(Debug, Clone)]
struct LevelGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degree: Vec<f64>,
    total_weight: f64,
}

impl LevelGraph {
    fn from_view(g: &ViewGraph) -> Self {
        let n = g.node_count();
        Self {
            adjacency: (0..n).map(|u| g.neighbors(u).to_vec()).collect(),
            self_loops: vec![0.0; n],
            degree: g.degrees().to_vec(),
            total_weight: g.total_edge_weight(),
        }
    }

    fn aggregate(&self, community: &[usize], count: usize) -> Self {
        let mut self_loops = vec![0.0; count];
        let mut degree = vec![0.0; count];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); count];
        for (u, &cu) in community.iter().enumerate() {
            self_loops[cu] += self.self_loops[u];
            degree[cu] += self.degree[u];
            for &(t, w) in &self.adjacency[u] {
                let ct = community[t];
                if ct == cu {
                    if u < t {
                        self_loops[cu] += w;
                    }
                } else {
                    rows[cu].push((ct, w));
                }
            }
        }
        let adjacency = rows
            .into_iter()
            .map(|mut row| {
                row.sort_unstable_by_key(|&(t, _)| t);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
                for (t, w) in row {
                    match merged.last_mut() {
                        Some(last) if last.0 == t => last.1 += w,
                        _ => merged.push((t, w)),
                    }
                }
                merged
            })
            .collect();
        Self {
            adjacency,
            self_loops,
            degree,
            total_weight: self.total_weight,
        }
    }

    #[cfg(test)]
    fn modularity(&self, community: &[usize], resolution: f64) -> f64 {
        let m = self.total_weight;
        if m <= 0.0 {
            return 0.0;
        }
        let k = community.iter().max().map_or(0, |&c| c + 1);
        let mut inside = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for (u, &cu) in community.iter().enumerate() {
            inside[cu] += self.self_loops[u];
            tot[cu] += self.degree[u];
            for &(t, w) in &self.adjacency[u] {
                if u < t && community[t] == cu {
                    inside[cu] += w;
                }
            }
        }
        let two_m = 2.0 * m;
        inside
            .iter()
            .zip(&tot)
            .map(|(&i, &t)| 2.0 * i / two_m - resolution * (t / two_m) * (t / two_m))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> ViewGraph {
        ViewGraph::from_edges(
            6,
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
            ],
        )
        .unwrap()
    }

    fn ring(n: usize) -> ViewGraph {
        ViewGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn trivial_partition_is_zero() {
        let g = two_triangles();
        let q = rb_modularity(
            &[g],
            &Clustering::single_cluster(6),
            &ViewParams::uniform(1),
        )
        .unwrap();
        assert!(q.abs() < 1e-12);
    }

    #[test]
    fn two_triangles_value() {
        let c = Clustering::from_labels(&[0, 0, 0, 1, 1, 1]);
        let q = rb_modularity(&[two_triangles()], &c, &ViewParams::uniform(1)).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
        let q2 = rb_modularity(
            &[two_triangles(), two_triangles()],
            &c,
            &ViewParams::uniform(2),
        )
        .unwrap();
        assert_eq!(q2, 2.0 * q);
    }

    #[test]
    fn empty_view_contributes_nothing() {
        let c = Clustering::from_labels(&[0, 0, 0, 1, 1, 1]);
        let params = ViewParams::uniform(2);
        let q = rb_modularity(&[two_triangles(), ViewGraph::empty(6)], &c, &params).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mismatched_inputs() {
        let c = Clustering::singletons(6);
        assert!(matches!(
            rb_modularity(
                &[two_triangles(), ViewGraph::empty(5)],
                &c,
                &ViewParams::uniform(2)
            ),
            Err(Error::NodeCountMismatch { .. })
        ));
        assert!(matches!(
            rb_modularity(&[two_triangles()], &c, &ViewParams::uniform(2)),
            Err(Error::ViewCountMismatch { .. })
        ));
        assert!(ViewParams::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn finds_two_triangles() {
        let c = maximize(&[two_triangles()], &ViewParams::uniform(1), 7).unwrap();
        assert_eq!(c.cluster_count(), 2);
        assert_eq!(c.label(0), c.label(1));
        assert_eq!(c.label(1), c.label(2));
        assert_eq!(c.label(3), c.label(5));
        assert_ne!(c.label(0), c.label(3));
    }

    #[test]
    fn zero_weight_view_is_ignored() {
        let noise = ViewGraph::from_edges(6, [(0, 3, 1.0), (1, 4, 1.0), (2, 5, 1.0)]).unwrap();
        let params = ViewParams::new(vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
        let both = maximize(&[two_triangles(), noise], &params, 3).unwrap();
        let alone = maximize(&[two_triangles()], &ViewParams::uniform(1), 3).unwrap();
        assert_eq!(both, alone);
    }

    #[test]
    fn huge_resolution_gives_singletons() {
        let params = ViewParams::new(vec![1.0], vec![100.0]).unwrap();
        let c = maximize(&[ring(10)], &params, 1).unwrap();
        assert_eq!(c.cluster_count(), 10);
    }

    #[test]
    fn isolates_stay_alone() {
        let g = ViewGraph::from_edges(5, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let c = maximize(&[g], &ViewParams::uniform(1), 0).unwrap();
        assert_ne!(c.label(3), c.label(4));
        assert_eq!(c.sizes().iter().filter(|&&s| s == 1).count(), 2);
    }

    #[test]
    fn aggregation_preserves_modularity() {
        let g = ring(12);
        let base = LevelGraph::from_view(&g);
        let community: Vec<usize> = (0..12).map(|i| i / 3).collect();
        let coarse = base.aggregate(&community, 4);
        for gamma in [0.5, 1.0, 2.0] {
            let before = base.modularity(&community, gamma);
            let after = coarse.modularity(&[0, 1, 2, 3], gamma);
            assert!((before - after).abs() < 1e-12);
            let merged = [0, 0, 1, 1];
            let up: Vec<usize> = community.iter().map(|&c| merged[c]).collect();
            assert!(
                (base.modularity(&up, gamma) - coarse.modularity(&merged, gamma)).abs() < 1e-12
            );
        }
    }
}
