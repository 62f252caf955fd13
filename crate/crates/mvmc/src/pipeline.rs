//! End-to-end orchestration over one artifact directory.
//!
//! ```text
//! <out>/days/<date>/{rows,text,users,urls,cooccur}.tsv   ingest
//! <out>/days/<date>/{clustering,trace}.tsv               cluster
//! <out>/compare/{ari_matrix,dendrogram,meta_clusters}.tsv compare
//! <out>/periods.tsv, <out>/periods/<p>/consensus.tsv     ensemble
//! <out>/periods/<p>/{clusters,hashtags,tokens}.tsv       analyze
//! ```
//!
//! Every stage reads only what earlier stages wrote, so any stage can be
//! re-run on its own.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::{info, warn};
use mvmc_core::compare::{average_internal_ari, cross_level, pairwise_ari_matrix};
use mvmc_core::ensemble::ensemble_cluster;
use mvmc_core::meta::agglomerative_meta_cluster;
use mvmc_core::users::{top_user_score, top_users, unique_user_ratio};
use mvmc_core::{
    knn_graph, run_mvmc, Clustering, IdfMode, LabeledClustering, Membership, MvmcConfig, MvmcTrace,
    NeighborCount, ViewGraph,
};
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::formats::{
    clustering_to_string, dendrogram_to_string, matrix_to_string, pairs_to_string, parse_matrix,
    parse_table, read_clustering, read_text, trace_to_string, write_atomic, Registry, ViewMatrix,
};
use crate::ingest::{build_daily_views, group_by_day, read_posts, DailyViews};

/// Paths inside an artifact directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn days_dir(&self) -> PathBuf {
        self.root.join("days")
    }

    pub fn day(&self, date: &str) -> PathBuf {
        self.days_dir().join(date)
    }

    pub fn compare(&self, file: &str) -> PathBuf {
        self.root.join("compare").join(file)
    }

    pub fn periods_file(&self) -> PathBuf {
        self.root.join("periods.tsv")
    }

    pub fn periods_dir(&self) -> PathBuf {
        self.root.join("periods")
    }

    pub fn period(&self, name: &str) -> PathBuf {
        self.periods_dir().join(name)
    }

    /// Dates with a `rows.tsv`, sorted.
    pub fn ingested_days(&self) -> Result<Vec<String>> {
        let dir = self.days_dir();
        let entries = std::fs::read_dir(&dir).map_err(|source| Error::Read {
            path: dir.clone(),
            source,
        })?;
        let mut days: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter(|e| e.path().join("rows.tsv").is_file())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        days.sort();
        if days.is_empty() {
            return Err(Error::Input(format!(
                "no ingested days under {}",
                dir.display()
            )));
        }
        Ok(days)
    }
}

/// A contiguous group of days sharing one meta-cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Period {
    pub name: String,
    pub days: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub days: Vec<String>,
    pub periods: Vec<Period>,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))
}

fn remove_dir(path: &Path) -> Result<()> {
    match std::fs::remove_dir_all(path) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(source) => Err(Error::Write {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Reads the posts and writes the four views of every day in range that
/// keeps at least two hashtags.
pub fn ingest(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let posts = read_posts(&cfg.input)?;
    let by_day = group_by_day(
        posts
            .into_iter()
            .filter(|p| cfg.in_range(p.date()))
            .collect(),
    );
    if by_day.is_empty() {
        return Err(Error::Input(format!(
            "{}: no posts in the selected date range",
            cfg.input.display()
        )));
    }
    let opts = cfg.ingest_options();
    let built: Vec<Result<DailyViews>> = pool(cfg.jobs)?.install(|| {
        by_day
            .par_iter()
            .map(|(date, posts)| build_daily_views(posts, &date.to_string(), &opts))
            .collect()
    });
    let mut kept = Vec::new();
    for views in built {
        let views = views?;
        if views.rows.len() < 2 {
            warn!(
                "{}: {} hashtag(s) reach {} posts, skipping the day",
                views.date,
                views.rows.len(),
                opts.min_posts
            );
            continue;
        }
        kept.push(views);
    }
    if kept.is_empty() {
        return Err(Error::Input(format!(
            "{}: no day has two hashtags used in at least {} posts",
            cfg.input.display(),
            opts.min_posts
        )));
    }
    let layout = Layout::new(&cfg.output);
    for v in &kept {
        v.write(&layout.day(&v.date))?;
        info!("{}: {} hashtags", v.date, v.rows.len());
    }
    Ok(kept.into_iter().map(|v| v.date).collect())
}

/// One k-NN graph per view of a day.
pub fn view_graphs(views: &DailyViews, k: NeighborCount, idf: IdfMode) -> Result<Vec<ViewGraph>> {
    let n = views.rows.len();
    let k = match k {
        NeighborCount::Fixed(k) if n >= 2 && k >= n => NeighborCount::Fixed(n - 1),
        k => k,
    };
    views
        .views()
        .iter()
        .map(|v| Ok(knn_graph(&v.matrix.tfidf(idf), k)?))
        .collect()
}

pub fn cluster_views(
    views: &DailyViews,
    k: NeighborCount,
    idf: IdfMode,
    mvmc: &MvmcConfig,
) -> Result<(LabeledClustering<String>, MvmcTrace)> {
    let graphs = view_graphs(views, k, idf)?;
    let (clustering, trace) = run_mvmc(&graphs, mvmc)?;
    let labeled = LabeledClustering::from_clustering(&views.date, views.rows.names(), &clustering);
    Ok((labeled, trace))
}

/// Writes `clustering.tsv` and `trace.tsv` into every ingested day.
pub fn cluster(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let layout = Layout::new(&cfg.output);
    let days = layout.ingested_days()?;
    let mvmc = cfg.mvmc_config();
    let results: Vec<Result<()>> = pool(cfg.jobs)?.install(|| {
        days.par_iter()
            .map(|date| {
                let dir = layout.day(date);
                let views = DailyViews::read(&dir)?;
                let (labeled, trace) = cluster_views(&views, cfg.k.0, cfg.idf.into(), &mvmc)?;
                write_atomic(&dir.join("clustering.tsv"), &clustering_to_string(&labeled))?;
                write_atomic(&dir.join("trace.tsv"), &trace_to_string(&trace))?;
                info!(
                    "{date}: {} clusters after {} iteration(s)",
                    trace.chosen().cluster_count,
                    trace.records.len()
                );
                Ok(())
            })
            .collect()
    });
    results.into_iter().collect::<Result<Vec<()>>>()?;
    Ok(days)
}

fn filtered_clusterings(
    layout: &Layout,
    days: &[String],
    min: usize,
) -> Result<Vec<LabeledClustering<String>>> {
    days.iter()
        .map(|d| {
            Ok(read_clustering(&layout.day(d).join("clustering.tsv"))?.without_small_clusters(min))
        })
        .collect()
}

/// Pairwise ARI of the daily clusterings and their meta-clustering.
pub fn compare(cfg: &PipelineConfig) -> Result<Vec<Period>> {
    let layout = Layout::new(&cfg.output);
    let days = layout.ingested_days()?;
    let daily = filtered_clusterings(&layout, &days, cfg.min_cluster_size)?;
    let matrix = pairwise_ari_matrix(&cross_level(&daily))?;
    let k = cfg.meta_k.min(days.len());
    let (labels, dendrogram) = agglomerative_meta_cluster(&matrix, k)?;
    write_atomic(
        &layout.compare("ari_matrix.tsv"),
        &matrix_to_string(&days, &matrix),
    )?;
    write_atomic(
        &layout.compare("dendrogram.tsv"),
        &dendrogram_to_string(&dendrogram),
    )?;
    write_atomic(
        &layout.compare("meta_clusters.tsv"),
        &pairs_to_string("day\tmeta_cluster", days.iter().zip(&labels)),
    )?;
    Ok(periods_from(&days, &labels))
}

/// Groups days by meta-cluster, periods ordered by their first day.
pub fn periods_from(days: &[String], labels: &[usize]) -> Vec<Period> {
    let mut groups: Vec<(usize, Vec<String>)> = Vec::new();
    for (d, &l) in days.iter().zip(labels) {
        match groups.iter_mut().find(|(g, _)| *g == l) {
            Some((_, members)) => members.push(d.clone()),
            None => groups.push((l, vec![d.clone()])),
        }
    }
    groups
        .into_iter()
        .enumerate()
        .map(|(i, (_, days))| Period {
            name: format!("p{}", i + 1),
            days,
        })
        .collect()
}

fn read_periods(layout: &Layout) -> Result<Vec<Period>> {
    let path = layout.compare("meta_clusters.tsv");
    let rows = parse_table(&path, &read_text(&path)?)?;
    let mut days = Vec::new();
    let mut labels = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        days.push(r["day"].clone());
        labels.push(
            r["meta_cluster"]
                .parse()
                .map_err(|_| Error::parse(&path, i + 2, "meta_cluster is not an integer"))?,
        );
    }
    if days.is_empty() {
        return Err(Error::Input(format!("{}: no days", path.display())));
    }
    Ok(periods_from(&days, &labels))
}

fn dense(mut c: LabeledClustering<String>) -> LabeledClustering<String> {
    let mut next = BTreeMap::new();
    for m in c.assignments.values_mut() {
        if let Membership::Cluster(l) = m {
            let n = next.len();
            *l = *next.entry(*l).or_insert(n);
        }
    }
    c
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[usize]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<usize>() as f64 / n;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    (mean, var.sqrt())
}

/// Consensus clustering per period plus the period summary table.
pub fn ensemble(cfg: &PipelineConfig) -> Result<Vec<Period>> {
    let layout = Layout::new(&cfg.output);
    let periods = read_periods(&layout)?;
    let matrix_path = layout.compare("ari_matrix.tsv");
    let (matrix_days, matrix) = parse_matrix(&matrix_path, &read_text(&matrix_path)?)?;
    let consensus: Vec<Result<LabeledClustering<String>>> = pool(cfg.jobs)?.install(|| {
        periods
            .par_iter()
            .map(|p| {
                let daily = filtered_clusterings(&layout, &p.days, cfg.min_cluster_size)?;
                let c = if daily.len() == 1 {
                    let mut only = dense(daily.into_iter().next().expect("one day"));
                    only.tag = p.name.clone();
                    only
                } else {
                    ensemble_cluster(&daily, cfg.seed, &p.name)?
                };
                write_atomic(
                    &layout.period(&p.name).join("consensus.tsv"),
                    &clustering_to_string(&c),
                )?;
                Ok(c)
            })
            .collect()
    });
    let mut table = String::from(
        "period\tfirst_day\tlast_day\tdays\tclusters\tavg_size\tstd_size\tavg_internal_ari\n",
    );
    for (p, c) in periods.iter().zip(consensus) {
        let c = c?;
        let sizes: Vec<usize> = c.clusters().values().map(Vec::len).collect();
        let (mean, std) = mean_std(&sizes);
        let idx: Vec<usize> = p
            .days
            .iter()
            .map(|d| {
                matrix_days.iter().position(|m| m == d).ok_or_else(|| {
                    Error::Input(format!("{d} missing from {}", matrix_path.display()))
                })
            })
            .collect::<Result<_>>()?;
        let sub: Vec<Vec<f64>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| matrix[i][j]).collect())
            .collect();
        let ari =
            average_internal_ari(&sub).map_or_else(|| "NA".to_string(), |a| format!("{a:.6}"));
        let _ = writeln!(
            table,
            "{}\t{}\t{}\t{}\t{}\t{mean:.6}\t{std:.6}\t{ari}",
            p.name,
            p.days[0],
            p.days[p.days.len() - 1],
            p.days.join(","),
            sizes.len()
        );
    }
    write_atomic(&layout.periods_file(), &table)?;
    Ok(periods)
}

/// Per-row feature counts summed over several days of one view.
fn summed_view(
    layout: &Layout,
    days: &[String],
    view: &str,
) -> Result<BTreeMap<String, BTreeMap<String, u64>>> {
    let mut out: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for d in days {
        let dir = layout.day(d);
        let rows = Registry::read(&dir.join("rows.tsv"))?;
        let v = ViewMatrix::read(&dir.join(format!("{view}.tsv")), Some(&rows))?;
        for (r, c, x) in v.matrix.triplets() {
            *out.entry(v.rows.name(r).to_string())
                .or_default()
                .entry(v.cols.name(c).to_string())
                .or_default() += x.round() as u64;
        }
    }
    Ok(out)
}

/// User-base and token tables for every period's consensus clusters.
pub fn analyze(cfg: &PipelineConfig) -> Result<Vec<Period>> {
    let layout = Layout::new(&cfg.output);
    let periods = read_periods(&layout)?;
    let results: Vec<Result<()>> = pool(cfg.jobs)?.install(|| {
        periods
            .par_iter()
            .map(|p| analyze_period(&layout, p, cfg))
            .collect()
    });
    results.into_iter().collect::<Result<Vec<()>>>()?;
    Ok(periods)
}

fn analyze_period(layout: &Layout, p: &Period, cfg: &PipelineConfig) -> Result<()> {
    let dir = layout.period(&p.name);
    let consensus = read_clustering(&dir.join("consensus.tsv"))?;
    let usage = summed_view(layout, &p.days, "users")?;
    let tokens = summed_view(layout, &p.days, "text")?;
    let empty = BTreeMap::new();
    let mut clusters = String::from("cluster\tsize\ttop_users\ttop_user_score\thashtags\n");
    let mut hashtags = String::from("cluster\thashtag\tuses\tunique_users\tunique_user_ratio\n");
    let mut token_table = String::from("cluster\trank\ttoken\tcount\n");
    for (label, members) in consensus.clusters() {
        let mut tops = Vec::with_capacity(members.len());
        let mut cluster_tokens: BTreeMap<&str, u64> = BTreeMap::new();
        for h in &members {
            let u = usage.get(h).unwrap_or(&empty);
            let uses: u64 = u.values().sum();
            if uses > 0 {
                let ratio = unique_user_ratio(u)?;
                let _ = writeln!(hashtags, "{label}\t{h}\t{uses}\t{}\t{ratio:.6}", u.len());
            }
            tops.push(top_users(u, cfg.top_user_fraction)?);
            for (t, &c) in tokens.get(h).unwrap_or(&empty) {
                *cluster_tokens.entry(t).or_default() += c;
            }
        }
        let union: BTreeSet<&String> = tops.iter().flatten().collect();
        let score = top_user_score(&tops)?;
        let _ = writeln!(
            clusters,
            "{label}\t{}\t{}\t{score:.6}\t{}",
            members.len(),
            union.len(),
            members.join(",")
        );
        let mut ranked: Vec<(&str, u64)> = cluster_tokens.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        for (rank, (t, c)) in ranked.into_iter().take(cfg.top_tokens).enumerate() {
            let _ = writeln!(token_table, "{label}\t{}\t{t}\t{c}", rank + 1);
        }
    }
    write_atomic(&dir.join("clusters.tsv"), &clusters)?;
    write_atomic(&dir.join("hashtags.tsv"), &hashtags)?;
    write_atomic(&dir.join("tokens.tsv"), &token_table)?;
    Ok(())
}

/// Runs every stage. Stale day and period artifacts from earlier runs in
/// the same directory are removed first.
pub fn run(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.output);
    // Fail on bad input before touching the output directory.
    let posts = read_posts(&cfg.input)?;
    if posts.is_empty() {
        return Err(Error::Input(format!(
            "{}: no valid post records",
            cfg.input.display()
        )));
    }
    drop(posts);
    remove_dir(&layout.days_dir())?;
    remove_dir(&layout.periods_dir())?;
    let days = ingest(cfg)?;
    cluster(cfg)?;
    compare(cfg)?;
    ensemble(cfg)?;
    let periods = analyze(cfg)?;
    Ok(PipelineSummary { days, periods })
}

/// Clusters standalone graphs whose nodes are named by their index.
pub fn cluster_graphs(
    graphs: &[ViewGraph],
    mvmc: &MvmcConfig,
    tag: &str,
) -> Result<(LabeledClustering<String>, MvmcTrace)> {
    let (clustering, trace): (Clustering, MvmcTrace) = run_mvmc(graphs, mvmc)?;
    let names: Vec<String> = (0..clustering.len()).map(|i| i.to_string()).collect();
    Ok((
        LabeledClustering::from_clustering(tag, &names, &clustering),
        trace,
    ))
}
