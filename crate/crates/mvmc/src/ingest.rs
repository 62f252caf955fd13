//! Post records to per-day hashtag views.
//!
//! Each surviving hashtag of a day becomes one row shared by four views:
//! the tokens of the posts that use it, the users posting it, the URLs
//! posted with it and the other hashtags it co-occurs with.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use mvmc_core::SparseMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formats::{read_text, Registry, ViewMatrix};

/// One social-media post.
///
/// JSON lines use exactly these field names; `text`, `hashtags` and `urls`
/// may be omitted. Hashtags may carry a leading `#` and are otherwise
/// case-sensitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostRecord {
    pub post_id: String,
    pub timestamp: DateTime<Utc>,
    pub user_id: String,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub urls: Vec<String>,
}

impl PostRecord {
    pub fn date(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }

    /// Distinct hashtags of the post without `#`, in order of appearance.
    pub fn hashtag_set(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.hashtags
            .iter()
            .map(|h| h.trim().trim_start_matches('#'))
            .filter(|h| !h.is_empty() && seen.insert(*h))
            .collect()
    }

    /// Parses the TSV fallback: `post_id, timestamp, user_id, text,
    /// hashtags, urls`, with hashtags and URLs space-separated.
    pub fn from_tsv(line: &str) -> std::result::Result<Self, String> {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(format!(
                "expected 6 tab-separated fields, found {}",
                f.len()
            ));
        }
        let timestamp = DateTime::parse_from_rfc3339(f[1])
            .map_err(|e| format!("bad timestamp {:?}: {e}", f[1]))?
            .with_timezone(&Utc);
        let words = |s: &str| s.split_whitespace().map(str::to_string).collect();
        Ok(Self {
            post_id: f[0].to_string(),
            timestamp,
            user_id: f[2].to_string(),
            text: f[3].to_string(),
            hashtags: words(f[4]),
            urls: words(f[5]),
        })
    }
}

/// Reads posts from JSON lines, or from TSV when the file ends in `.tsv`.
/// Malformed lines are logged and skipped.
pub fn read_posts(path: &Path) -> Result<Vec<PostRecord>> {
    let text = read_text(path)?;
    let tsv = path.extension().is_some_and(|e| e == "tsv");
    Ok(parse_posts(path, &text, tsv))
}

pub fn parse_posts(path: &Path, text: &str, tsv: bool) -> Vec<PostRecord> {
    let mut posts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (tsv && line.starts_with('#')) {
            continue;
        }
        let parsed = if tsv {
            PostRecord::from_tsv(line)
        } else {
            serde_json::from_str(line).map_err(|e| e.to_string())
        };
        match parsed {
            Ok(p) => posts.push(p),
            Err(e) => log::warn!(
                "{}:{}: skipping malformed record: {e}",
                path.display(),
                i + 1
            ),
        }
    }
    posts
}

/// Groups posts by UTC calendar day, preserving input order within a day.
pub fn group_by_day(posts: Vec<PostRecord>) -> BTreeMap<NaiveDate, Vec<PostRecord>> {
    let mut days: BTreeMap<NaiveDate, Vec<PostRecord>> = BTreeMap::new();
    for p in posts {
        days.entry(p.date()).or_default().push(p);
    }
    days
}

fn is_url(word: &str) -> bool {
    let lower = word.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Lowercased word tokens with hashtags, mentions, URLs, retweet/quote
/// markers, punctuation and emoji removed.
pub fn preprocess_text(raw: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in raw.split_whitespace() {
        let word = word.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '#' && c != '@');
        if word.starts_with('#') || word.starts_with('@') || is_url(word) {
            continue;
        }
        if matches!(word.trim_end_matches(':'), "RT" | "QT") {
            continue;
        }
        let cleaned: String = word
            .chars()
            .map(|c| if c.is_alphanumeric() { c } else { ' ' })
            .collect();
        tokens.extend(cleaned.split_whitespace().map(str::to_lowercase));
    }
    tokens
}

/// How URLs become features of the URL view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum UrlMode {
    /// The URL string as posted.
    #[default]
    Exact,
    /// Only the host name, lowercased.
    Domain,
}

impl UrlMode {
    pub fn feature(self, raw: &str) -> String {
        match self {
            UrlMode::Exact => raw.to_string(),
            UrlMode::Domain => url::Url::parse(raw)
                .ok()
                .and_then(|u| u.host_str().map(str::to_ascii_lowercase))
                .unwrap_or_else(|| raw.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    /// Hashtags used in fewer distinct posts are dropped.
    pub min_posts: usize,
    pub url_mode: UrlMode,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            min_posts: 3,
            url_mode: UrlMode::Exact,
        }
    }
}

pub const VIEW_NAMES: [&str; 4] = ["text", "users", "urls", "cooccur"];

/// The four views of one day over one shared, sorted hashtag registry.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyViews {
    pub date: String,
    pub rows: Registry,
    pub text: ViewMatrix,
    pub users: ViewMatrix,
    pub urls: ViewMatrix,
    pub cooccur: ViewMatrix,
}

impl DailyViews {
    pub fn views(&self) -> [&ViewMatrix; 4] {
        [&self.text, &self.users, &self.urls, &self.cooccur]
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        self.rows.write(&dir.join("rows.tsv"))?;
        for (name, view) in VIEW_NAMES.iter().zip(self.views()) {
            view.write(&dir.join(format!("{name}.tsv")))?;
        }
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let rows = Registry::read(&dir.join("rows.tsv"))?;
        let load = |name: &str| ViewMatrix::read(&dir.join(format!("{name}.tsv")), Some(&rows));
        Ok(Self {
            date: dir
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            text: load("text")?,
            users: load("users")?,
            urls: load("urls")?,
            cooccur: load("cooccur")?,
            rows,
        })
    }
}

/// Accumulates `(row, feature) -> count` with a sorted feature registry.
#[derive(Default)]
struct Counts(BTreeMap<(usize, String), f64>);

impl Counts {
    fn add(&mut self, row: usize, feature: String, by: f64) {
        *self.0.entry((row, feature)).or_default() += by;
    }

    fn into_view(self, rows: &Registry) -> Result<ViewMatrix> {
        let features: BTreeSet<&String> = self.0.keys().map(|(_, f)| f).collect();
        let cols = Registry::from_names(features.into_iter().cloned());
        let triplets: Vec<(usize, usize, f64)> = self
            .0
            .iter()
            .map(|((r, f), &v)| (*r, cols.get(f).expect("registered feature"), v))
            .collect();
        let matrix = SparseMatrix::from_triplets(rows.len(), cols.len(), triplets)?;
        Ok(ViewMatrix {
            matrix,
            rows: rows.clone(),
            cols,
        })
    }
}

/// Builds the four views for the posts of one day.
pub fn build_daily_views(
    posts: &[PostRecord],
    date: &str,
    opts: &IngestOptions,
) -> Result<DailyViews> {
    let mut post_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in posts {
        for h in p.hashtag_set() {
            *post_counts.entry(h).or_default() += 1;
        }
    }
    let rows = Registry::from_names(
        post_counts
            .iter()
            .filter(|(_, &c)| c >= opts.min_posts)
            .map(|(h, _)| h.to_string()),
    );
    let (mut text, mut users, mut urls, mut cooccur) = (
        Counts::default(),
        Counts::default(),
        Counts::default(),
        Counts::default(),
    );
    for p in posts {
        let tags: Vec<(usize, &str)> = p
            .hashtag_set()
            .into_iter()
            .filter_map(|h| rows.get(h).map(|r| (r, h)))
            .collect();
        if tags.is_empty() {
            continue;
        }
        let mut tokens: BTreeMap<String, f64> = BTreeMap::new();
        for t in preprocess_text(&p.text) {
            *tokens.entry(t).or_default() += 1.0;
        }
        for &(row, tag) in &tags {
            for (t, &c) in &tokens {
                text.add(row, t.clone(), c);
            }
            users.add(row, p.user_id.clone(), 1.0);
            for u in &p.urls {
                urls.add(row, opts.url_mode.feature(u), 1.0);
            }
            for &(_, other) in &tags {
                if other != tag {
                    cooccur.add(row, other.to_string(), 1.0);
                }
            }
        }
    }
    Ok(DailyViews {
        date: date.to_string(),
        text: text.into_view(&rows)?,
        users: users.into_view(&rows)?,
        urls: urls.into_view(&rows)?,
        cooccur: cooccur.into_view(&rows)?,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(id: &str, user: &str, text: &str, tags: &[&str], urls: &[&str]) -> PostRecord {
        PostRecord {
            post_id: id.to_string(),
            timestamp: "2020-03-01T10:00:00Z".parse().unwrap(),
            user_id: user.to_string(),
            text: text.to_string(),
            hashtags: tags.iter().map(|s| s.to_string()).collect(),
            urls: urls.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn text_stripping() {
        assert_eq!(
            preprocess_text("Check #covid19 https://x.co NOW!"),
            ["check", "now"]
        );
        assert!(preprocess_text("#tag1 #tag2").is_empty());
        assert_eq!(preprocess_text("RT @user: stay safe"), ["stay", "safe"]);
        assert_eq!(
            preprocess_text("Wash hands 🧼🙏 (#health), ok?"),
            ["wash", "hands", "ok"]
        );
        assert_eq!(
            preprocess_text("Ärzte sagen: bleibt zuhause"),
            ["ärzte", "sagen", "bleibt", "zuhause"]
        );
    }

    #[test]
    fn threshold_drops_rare_hashtags() {
        let posts = vec![
            post("1", "u", "a", &["rare", "common"], &[]),
            post("2", "u", "b", &["rare", "common"], &[]),
            post("3", "v", "c", &["common"], &[]),
        ];
        let d = build_daily_views(&posts, "2020-03-01", &IngestOptions::default()).unwrap();
        assert_eq!(d.rows.names(), ["common"]);
        assert_eq!(d.cooccur.matrix.nnz(), 0);
    }

    #[test]
    fn cooccurrence_counts_shared_posts() {
        let posts: Vec<_> = (0..4)
            .map(|i| post(&i.to_string(), "u", "x", &["h1", "#h2"], &[]))
            .collect();
        let d = build_daily_views(&posts, "d", &IngestOptions::default()).unwrap();
        let (h1, h2) = (d.rows.get("h1").unwrap(), d.rows.get("h2").unwrap());
        let c1 = d.cooccur.cols.get("h1").unwrap();
        let c2 = d.cooccur.cols.get("h2").unwrap();
        assert_eq!(d.cooccur.matrix.get(h1, c2), 4.0);
        assert_eq!(d.cooccur.matrix.get(h2, c1), 4.0);
        assert_eq!(d.cooccur.matrix.get(h1, c1), 0.0);
    }

    #[test]
    fn single_user_counts() {
        let posts: Vec<_> = (0..5)
            .map(|i| {
                post(
                    &i.to_string(),
                    "solo",
                    "hello world",
                    &["tag", "tag"],
                    &["https://a.b/x"],
                )
            })
            .collect();
        let d = build_daily_views(&posts, "d", &IngestOptions::default()).unwrap();
        let (cols, vals) = d.users.matrix.row(0);
        assert_eq!(cols.len(), 1);
        assert_eq!(vals, [5.0]);
        assert_eq!(d.text.matrix.get(0, d.text.cols.get("hello").unwrap()), 5.0);
        assert_eq!(d.urls.matrix.get(0, 0), 5.0);
    }

    #[test]
    fn case_sensitive_hashtags() {
        let posts: Vec<_> = (0..3)
            .map(|i| post(&i.to_string(), "u", "", &["COVID19", "covid19"], &[]))
            .collect();
        let d = build_daily_views(&posts, "d", &IngestOptions::default()).unwrap();
        assert_eq!(d.rows.len(), 2);
    }

    #[test]
    fn domain_mode() {
        assert_eq!(
            UrlMode::Domain.feature("https://WWW.Example.com/a?b=1"),
            "www.example.com"
        );
        assert_eq!(UrlMode::Exact.feature("https://x.co/a"), "https://x.co/a");
        assert_eq!(UrlMode::Domain.feature("not a url"), "not a url");
    }

    #[test]
    fn malformed_lines_are_skipped() {
        let good = serde_json::to_string(&post("1", "u", "t", &["a"], &[])).unwrap();
        let text = format!("{good}\n{{not json\n\n{good}\n");
        assert_eq!(parse_posts(Path::new("x"), &text, false).len(), 2);
        let tsv = "1\t2020-03-01T00:00:00Z\tu\thello\ta b\t\nbroken\n";
        let posts = parse_posts(Path::new("x"), tsv, true);
        assert_eq!(posts.len(), 1);
        assert_eq!(posts[0].hashtags, ["a", "b"]);
    }
}
