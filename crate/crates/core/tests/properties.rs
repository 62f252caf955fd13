use std::collections::{BTreeMap, BTreeSet};

use mvmc_core::compare::average_internal_ari;
use mvmc_core::meta::average_linkage;
use mvmc_core::modularity::view_modularity;
use mvmc_core::propensity::{resolution_from, view_propensities};
use mvmc_core::users::{top_user_score, top_users, unique_user_ratio};
use mvmc_core::*;
use proptest::collection::vec;
use proptest::prelude::*;

fn edges(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (1..=max_n).prop_flat_map(|n| {
        vec((0..n, 0..n, 0.05f64..4.0), 0..=3 * n).prop_map(move |raw| {
            let mut seen = BTreeSet::new();
            let list = raw
                .into_iter()
                .filter(|&(i, j, _)| i != j && seen.insert((i.min(j), i.max(j))))
                .collect();
            (n, list)
        })
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = ViewGraph> {
    edges(max_n).prop_map(|(n, e)| ViewGraph::from_edges(n, e).unwrap())
}

fn graph_and_labels(max_n: usize) -> impl Strategy<Value = (ViewGraph, Vec<usize>)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), vec(0..4usize, n))
    })
}

fn sparse(max_rows: usize, max_cols: usize) -> impl Strategy<Value = SparseMatrix> {
    (2..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        vec(prop_oneof![3 => Just(0.0), 2 => 1.0f64..6.0], r * c).prop_map(move |cells| {
            let t = cells
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(i, &v)| (i / c, i % c, v.floor()));
            SparseMatrix::from_triplets(r, c, t).unwrap()
        })
    })
}

/// Same arithmetic as the library, summing over every column in order.
fn dense_cosine(m: &SparseMatrix, i: usize, j: usize) -> f64 {
    let (mut dot, mut ni, mut nj) = (0.0, 0.0, 0.0);
    for c in 0..m.cols() {
        let (a, b) = (m.get(i, c), m.get(j, c));
        dot += a * b;
        ni += a * a;
        nj += b * b;
    }
    if ni == 0.0 || nj == 0.0 {
        0.0
    } else {
        (dot / (ni.sqrt() * nj.sqrt())).clamp(0.0, 1.0)
    }
}

proptest! {
    #[test]
    fn degrees_sum_to_twice_the_weight(g in graph(30)) {
        let total: f64 = g.degrees().iter().sum();
        prop_assert!((total - 2.0 * g.total_edge_weight()).abs() <= 1e-9 * total.max(1.0));
    }

    #[test]
    fn components_partition_the_nodes(g in graph(30)) {
        let comps = g.connected_components();
        let mut all: Vec<usize> = comps.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..g.node_count()).collect::<Vec<_>>());
        let mut owner = vec![usize::MAX; g.node_count()];
        for (c, members) in comps.iter().enumerate() {
            for &v in members {
                owner[v] = c;
            }
        }
        for e in g.edges() {
            prop_assert_eq!(owner[e.source], owner[e.target]);
        }
    }

    #[test]
    fn edge_order_and_orientation_do_not_matter((n, list) in edges(20), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let a = ViewGraph::from_edges(n, list.clone()).unwrap();
        let mut shuffled: Vec<_> = list.iter().map(|&(i, j, w)| if seed % 2 == 0 { (j, i, w) } else { (i, j, w) }).collect();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let b = ViewGraph::from_edges(n, shuffled).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cosine_is_symmetric_and_bounded(m in sparse(8, 6)) {
        for i in 0..m.rows() {
            for j in 0..m.rows() {
                let s = m.cosine_similarity(i, j);
                prop_assert_eq!(s, m.cosine_similarity(j, i));
                prop_assert!((0.0..=1.0).contains(&s));
            }
        }
    }

    #[test]
    fn knn_matches_brute_force(m in sparse(30, 8), fixed in prop::option::of(1usize..5)) {
        let n = m.rows();
        let policy = match fixed {
            Some(k) if k < n => NeighborCount::Fixed(k),
            _ => NeighborCount::Auto,
        };
        let k = policy.resolve(n).unwrap();
        let g = knn_graph(&m, policy).unwrap();
        let mut directed = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut ranked: Vec<(usize, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, dense_cosine(&m, i, j)))
                .filter(|&(_, s)| s > 0.0)
                .collect();
            ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            for &(j, s) in ranked.iter().take(k) {
                directed[i][j] = s;
            }
        }
        let mut from_graph = vec![vec![0.0; n]; n];
        for e in g.edges() {
            from_graph[e.source][e.target] = e.weight;
            from_graph[e.target][e.source] = e.weight;
        }
        for i in 0..n {
            for j in 0..n {
                let want = (directed[i][j] + directed[j][i]) / 2.0;
                prop_assert!((from_graph[i][j] - want).abs() <= 1e-12,
                    "pair ({}, {}): graph {} vs brute force {}", i, j, from_graph[i][j], want);
            }
        }
    }

    #[test]
    fn modularity_ignores_label_names((g, labels) in graph_and_labels(25), perm in Just([3usize, 0, 2, 1]), gamma in 0.2f64..3.0) {
        let a = Clustering::from_labels(&labels);
        let renamed: Vec<usize> = labels.iter().map(|&l| perm[l] + 10).collect();
        let b = Clustering::from_labels(&renamed);
        let qa = view_modularity(&g, &a, gamma);
        let qb = view_modularity(&g, &b, gamma);
        prop_assert!((qa - qb).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_view_changes_nothing(g in graph(20), noise in graph(20), seed in any::<u64>()) {
        let n = g.node_count();
        let noise = ViewGraph::from_edges(n, noise.edges().iter().filter(|e| e.target < n).map(|e| (e.source, e.target, e.weight))).unwrap();
        let alone = maximize(std::slice::from_ref(&g), &ViewParams::uniform(1), seed).unwrap();
        let params = ViewParams::new(vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
        let with = maximize(&[g.clone(), noise.clone()], &params, seed).unwrap();
        prop_assert_eq!(alone.labels(), with.labels());
        let q1 = rb_modularity(std::slice::from_ref(&g), &alone, &ViewParams::uniform(1)).unwrap();
        let q2 = rb_modularity(&[g, noise], &alone, &params).unwrap();
        prop_assert!((q1 - q2).abs() < 1e-12);
    }

    #[test]
    fn propensities_are_positive_and_resolution_lies_between((g, labels) in graph_and_labels(25)) {
        let c = Clustering::from_labels(&labels);
        let (tin, tout) = view_propensities(&g, &c);
        prop_assert!(tin > 0.0 && tin.is_finite());
        prop_assert!(tout > 0.0 && tout.is_finite());
        let gamma = resolution_from(tin, tout).unwrap();
        let (lo, hi) = if tin < tout { (tin, tout) } else { (tout, tin) };
        prop_assert!(gamma >= lo * (1.0 - 1e-12) && gamma <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn updated_weights_average_to_one(gl in vec(graph_and_labels(15), 1..4)) {
        let n = gl[0].0.node_count();
        let graphs: Vec<ViewGraph> = gl.iter().map(|(g, _)| ViewGraph::from_edges(n, g.edges().iter().filter(|e| e.target < n).map(|e| (e.source, e.target, e.weight))).unwrap()).collect();
        let c = Clustering::from_labels(&gl[0].1[..n]);
        let p = edge_propensities(&graphs, &c).unwrap();
        let u = update_weights(&p);
        prop_assert!(u.weights.iter().all(|&w| w >= 0.0 && w.is_finite()));
        if u.clamped.is_empty() {
            let mean = u.weights.iter().sum::<f64>() / u.weights.len() as f64;
            prop_assert!((mean - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ari_matches_pair_counting(pairs in vec((0..5usize, 0..4usize), 2..200)) {
        let a: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let n = a.len();
        // Rand index from explicit pairs, then chance-corrected with the
        // permutation-model expectation.
        let (mut both, mut in_a, mut in_b) = (0f64, 0f64, 0f64);
        for i in 0..n {
            for j in i + 1..n {
                let sa = a[i] == a[j];
                let sb = b[i] == b[j];
                both += f64::from(u8::from(sa && sb));
                in_a += f64::from(u8::from(sa));
                in_b += f64::from(u8::from(sb));
            }
        }
        let total = (n * (n - 1) / 2) as f64;
        let expected = in_a * in_b / total;
        let max = (in_a + in_b) / 2.0;
        let got = adjusted_rand_index(&a, &b).unwrap();
        if max == expected {
            prop_assert_eq!(got, 1.0);
        } else {
            let want = (both - expected) / (max - expected);
            prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
        prop_assert_eq!(adjusted_rand_index(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn dendrogram_heights_never_decrease(points in vec(0.0f64..10.0, 2..15)) {
        let d: Vec<Vec<f64>> = points.iter().map(|x| points.iter().map(|y| (x - y).abs()).collect()).collect();
        let tree = average_linkage(&d).unwrap();
        prop_assert_eq!(tree.merges.len(), points.len() - 1);
        for w in tree.merges.windows(2) {
            prop_assert!(w[1].height >= w[0].height - 1e-12);
        }
        prop_assert_eq!(tree.merges.last().unwrap().size, points.len());
        for k in 1..=points.len() {
            let labels = tree.cut(k).unwrap();
            prop_assert_eq!(labels.iter().collect::<BTreeSet<_>>().len(), k);
        }
    }

    #[test]
    fn top_user_score_is_a_fraction(usage in vec(vec((0..12u32, 1..9u64), 1..10), 1..6), fraction in 0.05f64..=1.0) {
        let sets: Vec<BTreeSet<u32>> = usage
            .iter()
            .map(|u| top_users(&u.iter().copied().collect::<BTreeMap<_, _>>(), fraction).unwrap())
            .collect();
        let score = top_user_score(&sets).unwrap();
        prop_assert!(score > 0.0 && score <= 1.0);
        let disjoint = sets.iter().map(BTreeSet::len).sum::<usize>() == sets.iter().flatten().collect::<BTreeSet<_>>().len();
        prop_assert_eq!(score == 1.0, disjoint);
        for u in &usage {
            let map: BTreeMap<u32, u64> = u.iter().copied().collect();
            let doubled: BTreeMap<u32, u64> = map.iter().map(|(&k, &c)| (k, 2 * c)).collect();
            let uses: u64 = doubled.values().sum();
            prop_assert_eq!(unique_user_ratio(&doubled).unwrap(), map.len() as f64 / uses as f64);
        }
    }

    #[test]
    fn average_internal_ari_is_the_off_diagonal_mean(vals in vec(-0.5f64..1.0, 6)) {
        let m = vec![
            vec![1.0, vals[0], vals[1]],
            vec![vals[0], 1.0, vals[2]],
            vec![vals[1], vals[2], 1.0],
        ];
        let want = (vals[0] + vals[1] + vals[2]) / 3.0;
        prop_assert!((average_internal_ari(&m).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn redundant_top_users_lower_the_score() {
    let a: BTreeSet<u32> = [1, 2, 3].into();
    let b: BTreeSet<u32> = [4, 5].into();
    let before = top_user_score(&[a.clone(), b.clone()]).unwrap();
    let after = top_user_score(&[a, b, [1, 4].into()]).unwrap();
    assert!(after < before);
}

#[test]
fn returned_clustering_matches_the_trace() {
    for seed in 0..5 {
        let problem = synth::SynthSpec {
            seed,
            noise_views: 1,
            ..synth::SynthSpec::default()
        }
        .generate()
        .unwrap();
        let cfg = MvmcConfig {
            seed,
            ..MvmcConfig::default()
        };
        let (c, trace) = run_mvmc(&problem.graphs, &cfg).unwrap();
        let chosen = trace.chosen();
        let params = ViewParams::new(chosen.weights.clone(), chosen.resolutions.clone()).unwrap();
        let q = rb_modularity(&problem.graphs, &c, &params).unwrap();
        assert!((q - chosen.modularity).abs() < 1e-12);
        assert_eq!(c.cluster_count(), chosen.cluster_count);
        assert!(trace.records.len() <= cfg.max_iter);
    }
}
