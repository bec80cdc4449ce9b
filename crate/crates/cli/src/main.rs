use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use novascape_cli::{parse_spans, OutputFormat, Pipeline, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(name = "novascape", version, about = "Innovation metrics over timestamped feature-vector corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pipeline config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Window spans in years, comma separated.
    #[arg(long, global = true)]
    spans: Option<String>,
    /// Seed for the landscape layout and the synthetic generator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Corpus CSV, overriding the config.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Feature registry, overriding the config.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Validate and filter the corpus.
    Ingest,
    /// Compute distinctiveness, novelty and resonance.
    Score,
    /// Build, lay out and export the type landscape.
    Landscape,
    /// Descriptives, group tests and regression tables.
    Stats,
    /// Generate a synthetic corpus.
    Synth,
    /// Run ingest, score, landscape and stats.
    Report,
}

fn configure(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = &cli.spans {
        cfg.spans = parse_spans(s)?;
    }
    if let Some(seed) = cli.seed {
        cfg.landscape.seed = seed;
        cfg.synth.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(c) = &cli.corpus {
        cfg.corpus_path = Some(c.clone());
    }
    if let Some(r) = &cli.registry {
        cfg.registry_path = Some(r.clone());
    }
    Ok(cfg)
}

fn init_threads() -> Result<(), PipelineError> {
    if let Ok(v) = std::env::var("NOVASCAPE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| PipelineError::Input(format!("NOVASCAPE_THREADS={v:?} is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| PipelineError::Input(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    init_threads()?;
    let mut pipeline = Pipeline::new(configure(&cli)?);
    match cli.command {
        Command::Ingest => {
            let r = pipeline.ingest()?;
            eprintln!("ingested {} records, kept {}", r.input_count, r.output_count);
        }
        Command::Score => {
            let t = pipeline.score(cli.format)?;
            eprintln!("scored {} (record, span) pairs", t.rows().len());
        }
        Command::Landscape => {
            let years = pipeline.landscape(cli.format)?;
            eprintln!("wrote {} landscape snapshot(s)", years.len());
        }
        Command::Stats => {
            let s = pipeline.stats()?;
            eprintln!("fitted {} model(s)", s.fitted);
        }
        Command::Synth => {
            let (corpus, _) = pipeline.synth()?;
            eprintln!("wrote {}", corpus.display());
        }
        Command::Report => pipeline.report(cli.format)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("novascape: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
