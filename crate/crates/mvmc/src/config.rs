//! Pipeline configuration: a TOML file whose keys all have flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use mvmc_core::{IdfMode, MvmcConfig, NeighborCount};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::formats::read_text;
use crate::ingest::{IngestOptions, UrlMode};

/// Neighbour count policy: `"auto"` (⌊√n⌋) or a fixed integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KSetting(pub NeighborCount);

impl FromStr for KSetting {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self(NeighborCount::Auto));
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(Self(NeighborCount::Fixed(k))),
            _ => Err(format!(
                "k must be \"auto\" or a positive integer, got {s:?}"
            )),
        }
    }
}

impl fmt::Display for KSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            NeighborCount::Auto => f.write_str("auto"),
            NeighborCount::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for KSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            NeighborCount::Auto => s.serialize_str("auto"),
            NeighborCount::Fixed(k) => s.serialize_u64(k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for KSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Self::from_str(&k.to_string()),
            Raw::Str(s) => Self::from_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum IdfSetting {
    /// `tf · n/df`
    #[default]
    Ratio,
    /// `tf · (1 + ln(n/df))`
    Log,
}

impl From<IdfSetting> for IdfMode {
    fn from(s: IdfSetting) -> Self {
        match s {
            IdfSetting::Ratio => IdfMode::Ratio,
            IdfSetting::Log => IdfMode::Log,
        }
    }
}

pub fn default_jobs() -> usize {
    std::env::var("MVMC_JOBS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&j| j > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Every parameter of a pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Post records, JSON lines (or TSV when the extension is `.tsv`).
    pub input: PathBuf,
    /// Artifact directory.
    pub output: PathBuf,
    pub start_date: Option<NaiveDate>,
    pub end_date: Option<NaiveDate>,
    pub k: KSetting,
    pub idf: IdfSetting,
    pub url_mode: UrlMode,
    pub min_posts: usize,
    pub max_iter: usize,
    pub resolution_tol: f64,
    pub weight_tol: f64,
    pub seed: u64,
    /// Number of meta-clusters (periods); clamped to the number of days.
    pub meta_k: usize,
    /// Daily clusters smaller than this are left out of comparison and
    /// ensembling.
    pub min_cluster_size: usize,
    pub top_user_fraction: f64,
    /// Tokens listed per consensus cluster.
    pub top_tokens: usize,
    /// Worker threads for per-day and per-period work.
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let mvmc = MvmcConfig::default();
        Self {
            input: PathBuf::new(),
            output: PathBuf::from("mvmc-out"),
            start_date: None,
            end_date: None,
            k: KSetting::default(),
            idf: IdfSetting::default(),
            url_mode: UrlMode::default(),
            min_posts: IngestOptions::default().min_posts,
            max_iter: mvmc.max_iter,
            resolution_tol: mvmc.resolution_tol,
            weight_tol: mvmc.weight_tol,
            seed: mvmc.seed,
            meta_k: 5,
            min_cluster_size: 5,
            top_user_fraction: 1.0 / 3.0,
            top_tokens: 20,
            jobs: default_jobs(),
        }
    }
}

impl PipelineConfig {
    /// Reads a config file. Relative `input` and `output` paths are taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut cfg: Self =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        if cfg.input.is_relative() && !cfg.input.as_os_str().is_empty() {
            cfg.input = base.join(&cfg.input);
        }
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if let (Some(s), Some(e)) = (self.start_date, self.end_date) {
            if s > e {
                return bad(format!("start_date {s} is after end_date {e}"));
            }
        }
        if self.min_posts == 0 {
            return bad("min_posts must be at least 1".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.resolution_tol >= 0.0 && self.weight_tol >= 0.0) {
            return bad("tolerances must be non-negative".into());
        }
        if self.meta_k == 0 {
            return bad("meta_k must be at least 1".into());
        }
        if !(self.top_user_fraction > 0.0 && self.top_user_fraction <= 1.0) {
            return bad(format!(
                "top_user_fraction {} is outside (0, 1]",
                self.top_user_fraction
            ));
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }

    pub fn ingest_options(&self) -> IngestOptions {
        IngestOptions {
            min_posts: self.min_posts,
            url_mode: self.url_mode,
        }
    }

    pub fn mvmc_config(&self) -> MvmcConfig {
        MvmcConfig {
            max_iter: self.max_iter,
            resolution_tol: self.resolution_tol,
            weight_tol: self.weight_tol,
            seed: self.seed,
            ..MvmcConfig::default()
        }
    }

    pub fn in_range(&self, date: NaiveDate) -> bool {
        self.start_date.is_none_or(|s| date >= s) && self.end_date.is_none_or(|e| date <= e)
    }
}
