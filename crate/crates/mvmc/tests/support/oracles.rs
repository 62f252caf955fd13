//! Slow, direct reimplementations used to check the library.
//!
//! Everything here works on dense matrices and plain loops and shares no
//! code with the crates under test.

#![allow(dead_code)]

pub type Dense = Vec<Vec<f64>>;

pub fn tfidf(counts: &Dense, log: bool) -> Dense {
    let rows = counts.len();
    let cols = counts.first().map_or(0, Vec::len);
    let df: Vec<usize> = (0..cols)
        .map(|c| (0..rows).filter(|&r| counts[r][c] > 0.0).count())
        .collect();
    counts
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, &tf)| {
                    if tf == 0.0 {
                        return 0.0;
                    }
                    let ratio = rows as f64 / df[c] as f64;
                    if log {
                        tf * (1.0 + ratio.ln())
                    } else {
                        tf * ratio
                    }
                })
                .collect()
        })
        .collect()
}

/// Cosine via the angle-free identity `<a,b> / sqrt(<a,a><b,b>)`, summed
/// from the last column backwards.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for c in (0..a.len()).rev() {
        dot += a[c] * b[c];
        aa += a[c] * a[c];
        bb += b[c] * b[c];
    }
    if aa == 0.0 || bb == 0.0 {
        0.0
    } else {
        dot / (aa * bb).sqrt()
    }
}

/// ARI from explicit pair enumeration.
pub fn ari(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut total) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        for j in i + 1..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            total += 1.0;
            if sa && sb {
                both += 1.0;
            }
            if sa {
                only_a += 1.0;
            }
            if sb {
                only_b += 1.0;
            }
        }
    }
    let expected = only_a * only_b / total.max(1.0);
    let max = (only_a + only_b) / 2.0;
    if max == expected {
        1.0
    } else {
        (both - expected) / (max - expected)
    }
}

fn degrees(adj: &Dense) -> Vec<f64> {
    adj.iter().map(|r| r.iter().sum()).collect()
}

/// Edge weight, degree-model expectation and edge count split by whether
/// both endpoints share a label.
fn split(adj: &Dense, labels: &[usize]) -> (f64, f64, f64, f64, usize) {
    let n = adj.len();
    let k = degrees(adj);
    let (mut inside, mut outside, mut m, mut edges) = (0.0, 0.0, 0.0, 0);
    for i in 0..n {
        for j in i + 1..n {
            if adj[i][j] > 0.0 {
                edges += 1;
                m += adj[i][j];
                if labels[i] == labels[j] {
                    inside += adj[i][j];
                } else {
                    outside += adj[i][j];
                }
            }
        }
    }
    let groups = labels.iter().copied().max().map_or(0, |x| x + 1);
    let mut kappa = vec![0.0; groups];
    for i in 0..n {
        kappa[labels[i]] += k[i];
    }
    let null: f64 = kappa.iter().map(|x| x * x).sum::<f64>() / (4.0 * m.max(f64::MIN_POSITIVE));
    (inside, outside, m, null, edges)
}

/// In- and out-of-cluster propensities with the `1/|E|` stand-in for an
/// empty side, and (1, 1) for a view without edges.
pub fn propensities(adj: &Dense, labels: &[usize]) -> (f64, f64) {
    let (inside, outside, m, null, edges) = split(adj, labels);
    if edges == 0 {
        return (1.0, 1.0);
    }
    let small = 1.0 / edges as f64;
    let tin = if inside == 0.0 { small } else { inside / null };
    let tout = if outside == 0.0 {
        small
    } else {
        outside / (m - null)
    };
    (tin, tout)
}

/// `∫₀¹ a^(1-t) b^t dt` by composite Simpson's rule.
pub fn resolution_by_quadrature(a: f64, b: f64) -> f64 {
    let steps = 4000;
    let h = 1.0 / steps as f64;
    let f = |t: f64| a.powf(1.0 - t) * b.powf(t);
    let mut s = f(0.0) + f(1.0);
    for i in 1..steps {
        let t = i as f64 * h;
        s += if i % 2 == 1 { 4.0 * f(t) } else { 2.0 * f(t) };
    }
    s * h / 3.0
}

/// Per-view weight: log odds of a view over the mean log odds; negatives
/// become zero and a non-positive mean gives all ones.
pub fn weights(props: &[(f64, f64)]) -> Vec<f64> {
    let logs: Vec<f64> = props.iter().map(|&(i, o)| (i / o).ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    if mean < 1e-12 {
        return vec![1.0; logs.len()];
    }
    logs.iter().map(|l| (l / mean).max(0.0)).collect()
}

/// Normalised multi-view modularity by the double sum over node pairs.
pub fn modularity(views: &[Dense], labels: &[usize], weights: &[f64], resolutions: &[f64]) -> f64 {
    let mut q = 0.0;
    for (v, adj) in views.iter().enumerate() {
        let k = degrees(adj);
        let two_m: f64 = k.iter().sum();
        if two_m == 0.0 {
            continue;
        }
        let mut s = 0.0;
        for i in 0..adj.len() {
            for j in 0..adj.len() {
                if labels[i] == labels[j] {
                    s += adj[i][j] - resolutions[v] * k[i] * k[j] / two_m;
                }
            }
        }
        q += weights[v] * s / two_m;
    }
    q
}

/// Top `ceil(fraction * U)` users by count, ties by id, from a full sort.
pub fn top_users(usage: &[(u32, u64)], fraction: f64) -> Vec<u32> {
    let mut sorted: Vec<(u32, u64)> = usage.to_vec();
    sorted.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut keep = 0;
    while (keep as f64) < fraction * usage.len() as f64 - 1e-9 {
        keep += 1;
    }
    sorted.into_iter().take(keep).map(|(u, _)| u).collect()
}

pub fn top_user_score(sets: &[Vec<u32>]) -> f64 {
    let mut all: Vec<u32> = sets.iter().flatten().copied().collect();
    let total = all.len();
    all.sort_unstable();
    all.dedup();
    all.len() as f64 / total as f64
}

/// Every set partition of `0..n` as restricted growth strings, with the
/// modularity of each computed from running per-community sums.
pub struct Exhaustive<'a> {
    views: &'a [Dense],
    weights: &'a [f64],
    resolutions: &'a [f64],
    degrees: Vec<Vec<f64>>,
    two_m: Vec<f64>,
}

impl<'a> Exhaustive<'a> {
    pub fn new(views: &'a [Dense], weights: &'a [f64], resolutions: &'a [f64]) -> Self {
        let degrees: Vec<Vec<f64>> = views.iter().map(|a| self::degrees(a)).collect();
        let two_m = degrees.iter().map(|k| k.iter().sum()).collect();
        Self {
            views,
            weights,
            resolutions,
            degrees,
            two_m,
        }
    }

    /// Highest modularity over all partitions.
    pub fn best(&self) -> f64 {
        let n = self.views[0].len();
        let v = self.views.len();
        let mut labels = vec![0usize; n];
        // inside[c][v]: twice the internal weight; total[c][v]: degree sum.
        let mut inside = vec![vec![0.0; v]; n];
        let mut total = vec![vec![0.0; v]; n];
        let mut best = f64::NEG_INFINITY;
        self.descend(0, 0, &mut labels, &mut inside, &mut total, &mut best);
        best
    }

    fn descend(
        &self,
        node: usize,
        used: usize,
        labels: &mut [usize],
        inside: &mut [Vec<f64>],
        total: &mut [Vec<f64>],
        best: &mut f64,
    ) {
        let n = labels.len();
        if node == n {
            let mut q = 0.0;
            for c in 0..used {
                for v in 0..self.views.len() {
                    let tm = self.two_m[v];
                    if tm > 0.0 {
                        q += self.weights[v]
                            * (inside[c][v] / tm
                                - self.resolutions[v] * (total[c][v] / tm).powi(2));
                    }
                }
            }
            if q > *best {
                *best = q;
            }
            return;
        }
        for c in 0..=used.min(n - 1) {
            labels[node] = c;
            let mut added = vec![0.0; self.views.len()];
            for (v, adj) in self.views.iter().enumerate() {
                let mut s = 0.0;
                for prev in 0..node {
                    if labels[prev] == c {
                        s += adj[node][prev];
                    }
                }
                added[v] = 2.0 * s;
                inside[c][v] += added[v];
                total[c][v] += self.degrees[v][node];
            }
            let next_used = if c == used { used + 1 } else { used };
            self.descend(node + 1, next_used, labels, inside, total, best);
            for v in 0..self.views.len() {
                inside[c][v] -= added[v];
                total[c][v] -= self.degrees[v][node];
            }
        }
    }
}

/// Whether moving any single node to another label (existing or new)
/// raises modularity by more than `eps`.
pub fn improvable(
    views: &[Dense],
    labels: &[usize],
    weights: &[f64],
    resolutions: &[f64],
    eps: f64,
) -> bool {
    let base = modularity(views, labels, weights, resolutions);
    let fresh = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut trial = labels.to_vec();
    for u in 0..labels.len() {
        for c in 0..=fresh {
            if c == labels[u] {
                continue;
            }
            trial[u] = c;
            if modularity(views, &trial, weights, resolutions) > base + eps {
                return true;
            }
        }
        trial[u] = labels[u];
    }
    false
}
