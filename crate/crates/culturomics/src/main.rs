use std::collections::BTreeSet;
use std::io::{IsTerminal, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use culturomics::api::{self, CurationSession};
use culturomics::config::PipelineConfig;
use culturomics::core::relevance::{lda_fit, prepare_corpus, LdaConfig};
use culturomics::core::taxonomy::EditLog;
use culturomics::core::text::Stopwords;
use culturomics::extraction::FullTextCache;
use culturomics::pipeline::{ExportFormat, Pipeline, RunReport, ScrapedRecord, Stage};
use culturomics::store::{read_edit_log, read_jsonl};
use culturomics::{Error, Result};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(
    name = "culturomics",
    version,
    about = "News culturomics over folk taxa"
)]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, default_value = "culturomics.toml")]
    config: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "info")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or curate the name graph.
    Taxonomy {
        #[command(subcommand)]
        action: TaxonomyAction,
    },
    /// Query the news provider for every taxon.
    Retrieve,
    /// Score titles and decide relevance.
    Classify,
    /// Fetch and extract full text for relevant articles.
    Scrape,
    /// Flag syndicated copies and collect mention snippets.
    Dedup,
    /// Sentiment, series, breakpoints and tables.
    Analyze,
    /// Write the export tables.
    Export {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run every stage in order; work already recorded is not redone.
    RunAll {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Fit a topic model over scraped article bodies to inform the label schema.
    Topics {
        #[arg(long, default_value_t = 40)]
        k: usize,
        #[arg(long, default_value_t = 150)]
        iterations: usize,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

#[derive(Subcommand)]
enum TaxonomyAction {
    /// Build the graph, replay edits and derive taxa.
    Build,
    /// Serve the curation API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ExportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ExportFormat::Csv,
            Format::Json => ExportFormat::Json,
        }
    }
}

fn print_report(report: &RunReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))?;
    write_stdout(&format!("{text}\n"))
}

/// A closed pipe (e.g. `| head`) is not a failure of the run.
fn write_stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = PipelineConfig::load(&cli.config).map_err(|e| match e {
        Error::Io { path, source } => Error::Config(format!("{}: {source}", path.display())),
        other => other,
    })?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let stage = |s: Stage, format: Format| -> Result<()> {
        let p = Pipeline::new(config.clone())?.with_export_format(format.into());
        print_report(&p.run(&[s])?)
    };
    match cli.command {
        Command::Taxonomy {
            action: TaxonomyAction::Build,
        } => stage(Stage::Taxonomy, Format::Csv),
        Command::Taxonomy {
            action: TaxonomyAction::Serve { addr },
        } => serve(config, addr),
        Command::Retrieve => stage(Stage::Retrieve, Format::Csv),
        Command::Classify => stage(Stage::Classify, Format::Csv),
        Command::Scrape => stage(Stage::Scrape, Format::Csv),
        Command::Dedup => stage(Stage::Dedup, Format::Csv),
        Command::Analyze => stage(Stage::Analyze, Format::Csv),
        Command::Export { format } => stage(Stage::Export, format),
        Command::RunAll { format } => {
            let p = Pipeline::new(config)?.with_export_format(format.into());
            print_report(&p.run_all()?)
        }
        Command::Topics { k, iterations, top } => topics(config, k, iterations, top),
    }
}

fn serve(config: PipelineConfig, addr: SocketAddr) -> Result<()> {
    let constraints = config.retrieval.constraints()?;
    let p = Pipeline::new(config)?;
    let (base, _) = p.build_graphs()?;
    let edits = p.config().taxonomy.edits.clone();
    let log = match &edits {
        Some(path) => read_edit_log(path)?,
        None => EditLog::new(),
    };
    let session = CurationSession::new(base, log, edits, constraints)?;
    let rt =
        tokio::runtime::Runtime::new().map_err(|e| Error::Config(format!("tokio runtime: {e}")))?;
    rt.block_on(api::serve(session, addr))
        .map_err(|e| Error::Config(format!("serve {addr}: {e}")))
}

fn topics(config: PipelineConfig, k: usize, iterations: usize, top: usize) -> Result<()> {
    let p = Pipeline::new(config)?;
    let cache = FullTextCache::open(&p.layout().fulltext())?;
    let mut seen = BTreeSet::new();
    let mut texts = Vec::new();
    for r in read_jsonl::<ScrapedRecord>(&p.layout().scraped())? {
        if r.status != "ok" || !seen.insert(r.url.clone()) {
            continue;
        }
        if let Some(entry) = cache.get(&r.url) {
            texts.push(cache.read_text(&entry)?);
        }
    }
    if texts.is_empty() {
        return Err(Error::Dependency {
            stage: "topics".into(),
            missing: Stage::Scrape.name().into(),
        });
    }
    let corpus = prepare_corpus(&texts, &Stopwords::default(), 2)?;
    let lda = LdaConfig {
        topics: k,
        iterations,
        seed: p.config().seed,
        ..Default::default()
    };
    let model = lda_fit(&corpus, &lda)?;
    let mut text = String::new();
    for (i, words) in model.top_words(top).topics.iter().enumerate() {
        text.push_str(&format!("topic {i:>2}: {}\n", words.join(" ")));
    }
    write_stdout(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let filter = EnvFilter::try_new(&cli.log_level).unwrap_or_else(|_| EnvFilter::new("info"));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .log_internal_errors(false)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
