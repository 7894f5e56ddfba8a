//! Thin command-line wrapper over `subjex::pipeline`.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 stage failure,
//! 3 external-service failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use subjex::authority::Scheme;
use subjex::pipeline::{
    cmd_build_index, cmd_evaluate, cmd_record_fixtures, cmd_run, cmd_search, format_fields,
    read_concepts, PipelineConfig, PipelineError,
};

#[derive(Parser)]
#[command(name = "subjex", version, about = "Deterministic LCSH/LCGFT subject-indexing pipeline")]
struct Cli {
    /// Flat JSON config file; every key can be overridden by the flag of
    /// the same name.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: ConfigOverrides,

    #[command(subcommand)]
    command: Command,
}

/// One optional flag per config key.
#[derive(Args)]
struct ConfigOverrides {
    #[arg(long, global = true)]
    lcsh_path: Option<PathBuf>,
    #[arg(long, global = true)]
    lcgft_path: Option<PathBuf>,
    #[arg(long, global = true)]
    lcsh_cache: Option<PathBuf>,
    #[arg(long, global = true)]
    lcgft_cache: Option<PathBuf>,
    #[arg(long, global = true)]
    names_mode: Option<String>,
    #[arg(long, global = true)]
    names_endpoint: Option<String>,
    #[arg(long, global = true)]
    names_fixture_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    names_timeout_ms: Option<u64>,
    #[arg(long, global = true)]
    names_max_retries: Option<u32>,
    #[arg(long, global = true)]
    names_min_interval_ms: Option<u64>,
    #[arg(long, global = true)]
    twenty_percent_threshold: Option<f64>,
    #[arg(long, global = true)]
    fuzzy_threshold: Option<f64>,
    #[arg(long, global = true)]
    fuzzy_k: Option<usize>,
    #[arg(long, global = true)]
    dedup_depth: Option<usize>,
    #[arg(long, global = true)]
    related_radius: Option<usize>,
    #[arg(long, global = true)]
    ordering_mode: Option<String>,
    #[arg(long, global = true)]
    provider_hook: Option<String>,
    #[arg(long, global = true)]
    output_format: Option<String>,
    #[arg(long, global = true)]
    geo_policy_path: Option<PathBuf>,
}

impl ConfigOverrides {
    fn apply(self, config: &mut PipelineConfig) {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { config.$field = Some(v); })*
            };
        }
        macro_rules! set {
            ($($field:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { config.$field = v; })*
            };
        }
        take!(lcsh_path, lcgft_path, lcsh_cache, lcgft_cache, names_fixture_dir, provider_hook, geo_policy_path);
        set!(
            names_mode,
            names_endpoint,
            names_timeout_ms,
            names_max_retries,
            names_min_interval_ms,
            twenty_percent_threshold,
            fuzzy_threshold,
            fuzzy_k,
            dedup_depth,
            related_radius,
            ordering_mode,
            output_format,
        );
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load an authority NDJSON file, build its index, write the cache.
    BuildIndex {
        /// lcsh, lcgft, or all
        #[arg(long, default_value = "all")]
        scheme: String,
    },
    /// Diagnostic lookup against one vocabulary.
    Search {
        #[arg(long)]
        scheme: String,
        query: String,
    },
    /// Run the filter, validation, and synthesis stages over a concept
    /// document, writing every intermediate.
    Run {
        /// Concept-list document (JSON).
        #[arg(long, conflicts_with = "work")]
        concepts: Option<PathBuf>,
        /// Work description to feed through the configured provider hook.
        #[arg(long)]
        work: Option<PathBuf>,
        /// Output directory for intermediates and final fields.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Score an agent corpus against a baseline corpus.
    Evaluate {
        #[arg(long)]
        agent: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long, default_value = "eval-out")]
        out: PathBuf,
    },
    /// Record live name-service responses as replayable fixtures.
    RecordFixtures {
        #[arg(required = true)]
        queries: Vec<String>,
    },
}

fn parse_scheme(s: &str) -> Result<Scheme, PipelineError> {
    match s {
        "lcsh" => Ok(Scheme::Lcsh),
        "lcgft" => Ok(Scheme::Lcgft),
        other => Err(PipelineError::Config(format!("unknown scheme {other:?} (use lcsh or lcgft)"))),
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::from_path(path)?,
        None => PipelineConfig::default(),
    };
    cli.overrides.apply(&mut config);

    match cli.command {
        Command::BuildIndex { scheme } => {
            let schemes: Vec<Scheme> = match scheme.as_str() {
                "all" => {
                    let mut v = Vec::new();
                    if config.lcsh_path.is_some() {
                        v.push(Scheme::Lcsh);
                    }
                    if config.lcgft_path.is_some() {
                        v.push(Scheme::Lcgft);
                    }
                    if v.is_empty() {
                        return Err(PipelineError::Config(
                            "no lcsh_path or lcgft_path configured".into(),
                        ));
                    }
                    v
                }
                other => vec![parse_scheme(other)?],
            };
            for scheme in schemes {
                let stats = cmd_build_index(&config, scheme)?;
                println!(
                    "{}: {} records, {} documents ({} lines skipped, {} dangling links) -> {} [{}]",
                    stats.scheme,
                    stats.records,
                    stats.documents,
                    stats.skipped_lines,
                    stats.dangling_links,
                    stats.cache_path.display(),
                    &stats.source_hash_hex[..12],
                );
            }
        }
        Command::Search { scheme, query } => {
            let scheme = parse_scheme(&scheme)?;
            let output = cmd_search(&config, scheme, &query)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&output)
                    .map_err(|e| PipelineError::Stage { stage: "search", detail: e.to_string() })?
            );
        }
        Command::Run { concepts, work, out } => {
            let document = read_concepts(&config, concepts.as_deref(), work.as_deref())?;
            let artifacts = cmd_run(&config, &document, &out)?;
            print!("{}", format_fields(&config, &artifacts.fields));
            eprintln!(
                "wrote {} stage documents under {}",
                artifacts.written.len(),
                out.display()
            );
        }
        Command::Evaluate { agent, baseline, out } => {
            let artifacts = cmd_evaluate(&config, &agent, &baseline, &out)?;
            print!("{}", artifacts.table);
            println!(
                "{}",
                serde_json::to_string_pretty(&artifacts.summary)
                    .map_err(|e| PipelineError::Stage { stage: "evaluate", detail: e.to_string() })?
            );
        }
        Command::RecordFixtures { queries } => {
            let paths = cmd_record_fixtures(&config, &queries)?;
            for p in paths {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("subjex: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
