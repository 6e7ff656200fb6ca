use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod manifest;

use config::PipelineConfig;

/// Accessibility opinion mining over point-of-interest reviews.
#[derive(Debug, Parser)]
#[command(name = "access-sentiment", version)]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "ACCESS_SENTIMENT_OUT")]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Minimum reviews: per POI for `poi-report`, per region elsewhere.
    #[arg(long, global = true)]
    threshold: Option<usize>,

    /// Saved model file, or the base URL of a classification service.
    #[arg(long, global = true)]
    classifier: Option<String>,

    #[command(flatten)]
    inputs: Inputs,

    #[command(subcommand)]
    command: Command,
}

/// Overrides for `[paths]` entries.
#[derive(Debug, clap::Args)]
struct Inputs {
    #[arg(long, global = true)]
    reviews: Option<PathBuf>,
    #[arg(long, global = true)]
    pois: Option<PathBuf>,
    #[arg(long, global = true)]
    regions: Option<PathBuf>,
    #[arg(long, global = true)]
    covariates: Option<PathBuf>,
    #[arg(long, global = true)]
    annotations: Option<PathBuf>,
    #[arg(long, global = true)]
    gold: Option<PathBuf>,
    #[arg(long, global = true)]
    snippets: Option<PathBuf>,
    #[arg(long, global = true)]
    labeled: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Keep reviews that mention accessibility, with their targeted text.
    Filter,
    /// Inter-annotator agreement on doubly labeled examples.
    Agree,
    /// Grid-search and fit a TF-IDF linear classifier on gold labels.
    Train,
    /// Score a classifier against gold labels.
    Eval,
    /// Label every snippet with the configured classifier.
    Label,
    /// Word salience and valence.
    Lsva,
    /// Sentiment per POI and its distribution per POI type.
    PoiReport,
    /// Aggregate labeled snippets into regions with covariates.
    GeoBuild,
    /// Collinearity pruning, additive model fit and influence pruning.
    Regress,
    /// Refit across minimum-review thresholds.
    Sensitivity,
    /// Region sentiment for mapping.
    Export,
    /// Every stage in order, into one output directory.
    RunAll,
}

fn resolve(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let i = &cli.inputs;
    let overrides = [
        (&i.reviews, &mut cfg.paths.reviews),
        (&i.pois, &mut cfg.paths.pois),
        (&i.regions, &mut cfg.paths.regions),
        (&i.covariates, &mut cfg.paths.covariates),
        (&i.annotations, &mut cfg.paths.annotations),
        (&i.gold, &mut cfg.paths.gold),
        (&i.snippets, &mut cfg.paths.snippets),
        (&i.labeled, &mut cfg.paths.labeled),
    ];
    for (flag, slot) in overrides {
        if flag.is_some() {
            *slot = flag.clone();
        }
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(t) = cli.threshold {
        match cli.command {
            Command::PoiReport => cfg.thresholds.poi_min_reviews = t,
            _ => cfg.thresholds.region_min_reviews = t,
        }
    }
    if let Some(c) = &cli.classifier {
        if c.starts_with("http://") || c.starts_with("https://") {
            cfg.classifier.endpoint = Some(c.clone());
            cfg.classifier.model = None;
        } else {
            cfg.classifier.model = Some(PathBuf::from(c));
            cfg.classifier.endpoint = None;
        }
    }
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating output directory {}", cfg.output_dir.display()))?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve(cli)?;
    match cli.command {
        Command::Filter => commands::filter(&cfg),
        Command::Agree => commands::agree(&cfg),
        Command::Train => commands::train(&cfg),
        Command::Eval => commands::eval(&cfg),
        Command::Label => commands::label(&cfg),
        Command::Lsva => commands::lsva(&cfg),
        Command::PoiReport => commands::poi_report(&cfg),
        Command::GeoBuild => commands::geo_build(&cfg),
        Command::Regress => commands::regress_cmd(&cfg),
        Command::Sensitivity => commands::sensitivity(&cfg),
        Command::Export => commands::export(&cfg),
        Command::RunAll => commands::run_all(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
