//! Plain-text summary of a finished artifact directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::formats::{parse_table, read_clustering, read_text};
use crate::pipeline::{mean_std, Layout};

/// How many hashtags each ranking lists per cluster.
const TOP_HASHTAGS: usize = 5;

fn table(path: &Path) -> Result<Vec<BTreeMap<String, String>>> {
    parse_table(path, &read_text(path)?)
}

fn field<'a>(row: &'a BTreeMap<String, String>, key: &str, path: &Path) -> Result<&'a str> {
    row.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Input(format!("{}: missing column {key}", path.display())))
}

pub fn render(dir: &Path) -> Result<String> {
    let layout = Layout::new(dir);
    let days = layout.ingested_days()?;
    let mut out = String::new();

    let _ = writeln!(out, "Days ({})", days.len());
    let _ = writeln!(
        out,
        "  {:<12} {:>8} {:>8} {:>9} {:>9}  sizes",
        "date", "hashtags", "clusters", "avg_size", "std_size"
    );
    for d in &days {
        let c = read_clustering(&layout.day(d).join("clustering.tsv"))?;
        let mut sizes: Vec<usize> = c.clusters().values().map(Vec::len).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let (mean, std) = mean_std(&sizes);
        let listed: Vec<String> = sizes.iter().map(usize::to_string).collect();
        let _ = writeln!(
            out,
            "  {d:<12} {:>8} {:>8} {mean:>9.2} {std:>9.2}  {}",
            c.len(),
            sizes.len(),
            listed.join(" ")
        );
    }

    let periods_path = layout.periods_file();
    let periods = table(&periods_path)?;
    let _ = writeln!(out, "\nPeriods ({})", periods.len());
    let _ = writeln!(
        out,
        "  {:<6} {:<25} {:>8} {:>9} {:>9} {:>17}",
        "period", "days", "clusters", "avg_size", "std_size", "avg_internal_ari"
    );
    for p in &periods {
        let f = |k| field(p, k, &periods_path);
        let span = format!("{}..{}", f("first_day")?, f("last_day")?);
        let _ = writeln!(
            out,
            "  {:<6} {span:<25} {:>8} {:>9} {:>9} {:>17}",
            f("period")?,
            f("clusters")?,
            f("avg_size")?,
            f("std_size")?,
            f("avg_internal_ari")?
        );
    }

    for p in &periods {
        let name = field(p, "period", &periods_path)?;
        let pdir = layout.period(name);
        let clusters_path = pdir.join("clusters.tsv");
        let hashtags_path = pdir.join("hashtags.tsv");
        let clusters = table(&clusters_path)?;
        let mut by_cluster: BTreeMap<String, Vec<(String, u64, f64)>> = BTreeMap::new();
        for h in table(&hashtags_path)? {
            let f = |k| field(&h, k, &hashtags_path);
            let uses = f("uses")?
                .parse()
                .map_err(|_| Error::Input(format!("{}: bad uses", hashtags_path.display())))?;
            let ratio = f("unique_user_ratio")?
                .parse()
                .map_err(|_| Error::Input(format!("{}: bad ratio", hashtags_path.display())))?;
            by_cluster
                .entry(f("cluster")?.to_string())
                .or_default()
                .push((f("hashtag")?.to_string(), uses, ratio));
        }
        let _ = writeln!(out, "\nPeriod {name}");
        for c in &clusters {
            let f = |k| field(c, k, &clusters_path);
            let label = f("cluster")?;
            let _ = writeln!(
                out,
                "  cluster {label}: {} hashtags, top user score {}",
                f("size")?,
                f("top_user_score")?
            );
            let mut tags = by_cluster.remove(label).unwrap_or_default();
            tags.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let usage: Vec<String> = tags
                .iter()
                .take(TOP_HASHTAGS)
                .map(|(h, u, _)| format!("{h} ({u})"))
                .collect();
            tags.sort_by(|a, b| a.2.total_cmp(&b.2).then_with(|| a.0.cmp(&b.0)));
            let ratio: Vec<String> = tags
                .iter()
                .take(TOP_HASHTAGS)
                .map(|(h, _, r)| format!("{h} ({r:.3})"))
                .collect();
            let _ = writeln!(out, "    by usage:      {}", usage.join(", "));
            let _ = writeln!(out, "    by user ratio: {}", ratio.join(", "));
        }
    }
    Ok(out)
}
