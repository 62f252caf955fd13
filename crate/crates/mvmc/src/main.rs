use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use mvmc_core::synth::SynthSpec;

use mvmc::config::{IdfSetting, KSetting, PipelineConfig};
use mvmc::corpus::{self, CorpusSpec};
use mvmc::formats::{
    clustering_to_string, edge_list_to_string, read_edge_list, trace_to_string, write_atomic,
};
use mvmc::ingest::UrlMode;
use mvmc::{pipeline, report, Error, Result};

/// Multi-view modularity clustering of hashtags over time.
#[derive(Parser)]
#[command(name = "mvmc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the per-day views from post records.
    Ingest(StageArgs),
    /// Cluster every ingested day, or standalone edge-list graphs.
    Cluster(ClusterArgs),
    /// Pairwise ARI of the daily clusterings and their meta-clustering.
    Compare(StageArgs),
    /// Consensus clustering for each period.
    Ensemble(StageArgs),
    /// User-base and token tables for each period.
    Analyze(StageArgs),
    /// Generate synthetic inputs.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Summarise a finished artifact directory.
    Report { dir: PathBuf },
    /// Run every stage.
    Pipeline(StageArgs),
}

/// A config file plus a flag for each of its keys. Flags win over the file.
#[derive(Args)]
struct StageArgs {
    /// TOML config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    start_date: Option<NaiveDate>,
    #[arg(long)]
    end_date: Option<NaiveDate>,
    /// Neighbours per hashtag: "auto" or an integer.
    #[arg(long)]
    k: Option<KSetting>,
    #[arg(long, value_enum)]
    idf: Option<IdfSetting>,
    #[arg(long, value_enum)]
    url_mode: Option<UrlMode>,
    #[arg(long)]
    min_posts: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    resolution_tol: Option<f64>,
    #[arg(long)]
    weight_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    meta_k: Option<usize>,
    #[arg(long)]
    min_cluster_size: Option<usize>,
    #[arg(long)]
    top_user_fraction: Option<f64>,
    #[arg(long)]
    top_tokens: Option<usize>,
    /// Worker threads [default: $MVMC_JOBS or the number of CPUs]
    #[arg(short, long)]
    jobs: Option<usize>,
}

macro_rules! apply {
    ($cfg:ident, $args:ident, $($field:ident),*) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = v; })*
    };
}

impl StageArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        let args = self;
        apply!(
            cfg,
            args,
            input,
            output,
            k,
            idf,
            url_mode,
            min_posts,
            max_iter,
            resolution_tol,
            weight_tol,
            seed,
            meta_k,
            min_cluster_size,
            top_user_fraction,
            top_tokens,
            jobs
        );
        if self.start_date.is_some() {
            cfg.start_date = self.start_date;
        }
        if self.end_date.is_some() {
            cfg.end_date = self.end_date;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    stage: StageArgs,
    /// Edge-list files, one per view, over the same nodes.
    #[arg(long, num_args = 1..)]
    graphs: Vec<PathBuf>,
    /// Output directory for `--graphs` mode.
    #[arg(long, requires = "graphs")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Planted-partition multi-view graphs with ground truth.
    Graphs {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 60)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        blocks: usize,
        #[arg(long, default_value_t = 2)]
        informative_views: usize,
        #[arg(long, default_value_t = 0)]
        noise_views: usize,
        #[arg(long, default_value_t = 0.5)]
        p_in: f64,
        #[arg(long, default_value_t = 0.02)]
        p_out: f64,
        /// Edge probability of the noise views [default: the informative views' density]
        #[arg(long)]
        noise_p: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A post corpus with topical hashtag groups that reshuffle on one day.
    Corpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        days: usize,
        #[arg(long, default_value_t = 67)]
        posts_per_day: usize,
        /// 0-based day from which the groups are reshuffled.
        #[arg(long, default_value_t = 2)]
        shift_day: usize,
        #[arg(long, default_value_t = 2020)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => {
            let days = pipeline::ingest(&a.resolve()?)?;
            println!("ingested {} day(s)", days.len());
        }
        Command::Cluster(a) if !a.graphs.is_empty() => {
            let cfg = a.stage.resolve()?;
            let graphs = a
                .graphs
                .iter()
                .map(|p| read_edge_list(p))
                .collect::<Result<Vec<_>>>()?;
            let out = a.out.unwrap_or_else(|| cfg.output.clone());
            let (labeled, trace) = pipeline::cluster_graphs(&graphs, &cfg.mvmc_config(), "graphs")?;
            write_atomic(&out.join("clustering.tsv"), &clustering_to_string(&labeled))?;
            write_atomic(&out.join("trace.tsv"), &trace_to_string(&trace))?;
            println!(
                "{} clusters (converged: {})",
                trace.chosen().cluster_count,
                trace.converged
            );
        }
        Command::Cluster(a) => {
            let days = pipeline::cluster(&a.stage.resolve()?)?;
            println!("clustered {} day(s)", days.len());
        }
        Command::Compare(a) => {
            let periods = pipeline::compare(&a.resolve()?)?;
            println!("{} meta-cluster(s)", periods.len());
        }
        Command::Ensemble(a) => {
            let periods = pipeline::ensemble(&a.resolve()?)?;
            println!("{} consensus clustering(s)", periods.len());
        }
        Command::Analyze(a) => {
            let periods = pipeline::analyze(&a.resolve()?)?;
            println!("analysed {} period(s)", periods.len());
        }
        Command::Synth(SynthCommand::Graphs {
            out,
            nodes,
            blocks,
            informative_views,
            noise_views,
            p_in,
            p_out,
            noise_p,
            seed,
        }) => {
            let spec = SynthSpec {
                nodes,
                blocks,
                informative_views,
                noise_views,
                p_in,
                p_out,
                noise_p,
                seed,
            };
            let problem = spec.generate()?;
            for (i, g) in problem.graphs.iter().enumerate() {
                write_atomic(&out.join(format!("view{i}.edges")), &edge_list_to_string(g))?;
            }
            let truth =
                mvmc::formats::pairs_to_string("node\tlabel", problem.truth.iter().enumerate());
            write_atomic(&out.join("truth.tsv"), &truth)?;
            println!("wrote {} view(s) over {nodes} nodes", problem.graphs.len());
        }
        Command::Synth(SynthCommand::Corpus {
            out,
            days,
            posts_per_day,
            shift_day,
            seed,
        }) => {
            let spec = CorpusSpec {
                days,
                posts_per_day,
                shift_day,
                seed,
                ..CorpusSpec::default()
            };
            let posts = corpus::generate(&spec);
            write_atomic(&out, &corpus::to_jsonl(&posts))?;
            println!("wrote {} posts", posts.len());
        }
        Command::Report { dir } => print!("{}", report::render(&dir)?),
        Command::Pipeline(a) => {
            let summary = pipeline::run(&a.resolve()?)?;
            println!(
                "{} day(s), {} period(s)",
                summary.days.len(),
                summary.periods.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(Error::exit_code(&e)).unwrap_or(2))
        }
    }
}
