//! Pipeline configuration and the command-level operations behind the
//! `subjex` binary: index building, diagnostic search, the full
//! filter/validate/synthesize run, corpus evaluation, and fixture
//! recording.
//!
//! Configuration is a flat JSON file; every key can be overridden by a
//! command-line flag of the same name. Each pipeline stage writes its
//! intermediate document before the next stage begins, so a run can be
//! audited file by file.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::authority::{load_authorities, AuthorityStore, LoadReport, Scheme};
use crate::eval::{aggregate, compare_title, side_by_side, ComparisonReport, CorpusSummary, EvalContext};
use crate::filter::{run_filter, ConceptDocument, FilterOptions, FilterOutcome, WorkDescription};
use crate::index::{build_index, classify, hash_file, read_cache, write_cache, IndexError, MatchClass, SearchHit, SearchOptions, TermIndex};
use crate::marc_io::{parse_field_line, read_corpus, emit, CorpusWork, EmitFormat};
use crate::names::{ClientMode, NameClient, NameClientConfig, NameError};
use crate::synth::{render, synthesize, OrderMode, SubjectField};
use crate::validate::{validate_all, GeoPolicy, ValidateError, ValidationContext};

/// Flat pipeline configuration. Unknown keys are rejected so typos
/// surface instead of silently using defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub lcsh_path: Option<PathBuf>,
    pub lcgft_path: Option<PathBuf>,
    pub lcsh_cache: Option<PathBuf>,
    pub lcgft_cache: Option<PathBuf>,
    /// `fixture` or `live`.
    pub names_mode: String,
    pub names_endpoint: String,
    pub names_fixture_dir: Option<PathBuf>,
    pub names_timeout_ms: u64,
    pub names_max_retries: u32,
    pub names_min_interval_ms: u64,
    pub twenty_percent_threshold: f64,
    pub fuzzy_threshold: f64,
    pub fuzzy_k: usize,
    pub dedup_depth: usize,
    pub related_radius: usize,
    /// `canonical` or `preserve-given`.
    pub ordering_mode: String,
    pub provider_hook: Option<String>,
    /// `text` or `json`.
    pub output_format: String,
    pub geo_policy_path: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            lcsh_path: None,
            lcgft_path: None,
            lcsh_cache: None,
            lcgft_cache: None,
            names_mode: "fixture".into(),
            names_endpoint: crate::names::DEFAULT_ENDPOINT.into(),
            names_fixture_dir: None,
            names_timeout_ms: 10_000,
            names_max_retries: 3,
            names_min_interval_ms: 500,
            twenty_percent_threshold: 0.20,
            fuzzy_threshold: 0.60,
            fuzzy_k: 5,
            dedup_depth: 3,
            related_radius: 2,
            ordering_mode: "canonical".into(),
            provider_hook: None,
            output_format: "text".into(),
            geo_policy_path: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Usage or configuration problems; exit code 1.
    #[error("config error: {0}")]
    Config(String),
    /// A pipeline stage rejected its input; exit code 2.
    #[error("stage {stage} failed: {detail}")]
    Stage { stage: &'static str, detail: String },
    /// An external service (name lookup, provider hook) failed; exit 3.
    #[error("external service failure: {0}")]
    External(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Stage { .. } => 2,
            PipelineError::External(_) => 3,
        }
    }
}

fn config_err(detail: impl std::fmt::Display) -> PipelineError {
    PipelineError::Config(detail.to_string())
}

fn stage_err(stage: &'static str, detail: impl std::fmt::Display) -> PipelineError {
    PipelineError::Stage { stage, detail: detail.to_string() }
}

/// Classifies a validation error into the stage/external split: name
/// service trouble is an external failure, everything else is a stage
/// rejection.
fn validate_err(err: ValidateError) -> PipelineError {
    match err {
        ValidateError::Name(e) => match e {
            NameError::Transport { .. }
            | NameError::Status { .. }
            | NameError::Protocol(_)
            | NameError::FixtureNotFound { .. } => PipelineError::External(e.to_string()),
            other => config_err(other),
        },
        other => stage_err("validate", other),
    }
}

impl PipelineConfig {
    pub fn from_path(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| config_err(format!("invalid config {}: {e}", path.display())))
    }

    /// Checks thresholds and that every configured path exists.
    pub fn validate(&self) -> Result<(), PipelineError> {
        for (name, value) in [
            ("twenty_percent_threshold", self.twenty_percent_threshold),
            ("fuzzy_threshold", self.fuzzy_threshold),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(config_err(format!("{name} must be in (0, 1], got {value}")));
            }
        }
        if self.fuzzy_k == 0 {
            return Err(config_err("fuzzy_k must be positive"));
        }
        match self.names_mode.as_str() {
            "fixture" | "live" => {}
            other => return Err(config_err(format!("names_mode must be fixture or live, got {other:?}"))),
        }
        match self.ordering_mode.as_str() {
            "canonical" | "preserve-given" => {}
            other => {
                return Err(config_err(format!(
                    "ordering_mode must be canonical or preserve-given, got {other:?}"
                )))
            }
        }
        match self.output_format.as_str() {
            "text" | "json" => {}
            other => return Err(config_err(format!("output_format must be text or json, got {other:?}"))),
        }
        for (name, path) in [
            ("lcsh_path", &self.lcsh_path),
            ("lcgft_path", &self.lcgft_path),
            ("names_fixture_dir", &self.names_fixture_dir),
            ("geo_policy_path", &self.geo_policy_path),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(config_err(format!("{name} {} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }

    pub fn order_mode(&self) -> OrderMode {
        if self.ordering_mode == "preserve-given" {
            OrderMode::PreserveGiven
        } else {
            OrderMode::Canonical
        }
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions { fuzzy_threshold: self.fuzzy_threshold, k: self.fuzzy_k }
    }

    pub fn name_client(&self) -> Result<NameClient, PipelineError> {
        let mode = if self.names_mode == "live" { ClientMode::Live } else { ClientMode::Fixture };
        NameClient::new(NameClientConfig {
            mode,
            endpoint: self.names_endpoint.clone(),
            fixture_dir: self.names_fixture_dir.clone(),
            timeout: Duration::from_millis(self.names_timeout_ms),
            max_retries: self.names_max_retries,
            min_request_interval: Duration::from_millis(self.names_min_interval_ms),
            backoff_base: Duration::from_millis(250),
        })
        .map_err(config_err)
    }

    pub fn geo_policy(&self) -> Result<GeoPolicy, PipelineError> {
        match &self.geo_policy_path {
            Some(path) => GeoPolicy::from_path(path).map_err(config_err),
            None => Ok(GeoPolicy::packaged()),
        }
    }

    fn scheme_paths(&self, scheme: Scheme) -> (Option<&PathBuf>, Option<&PathBuf>) {
        match scheme {
            Scheme::Lcsh => (self.lcsh_path.as_ref(), self.lcsh_cache.as_ref()),
            Scheme::Lcgft => (self.lcgft_path.as_ref(), self.lcgft_cache.as_ref()),
        }
    }
}

/// A loaded vocabulary: store plus index, and where they came from.
pub struct LoadedScheme {
    pub store: AuthorityStore,
    pub index: TermIndex,
    pub load_report: Option<LoadReport>,
    pub from_cache: bool,
}

/// Loads one scheme, preferring a fresh cache snapshot; a stale or absent
/// cache triggers a rebuild from the NDJSON (and a rewrite of the cache
/// when a cache path is configured).
pub fn load_scheme(config: &PipelineConfig, scheme: Scheme) -> Result<LoadedScheme, PipelineError> {
    let (ndjson, cache) = config.scheme_paths(scheme);
    let ndjson = ndjson
        .ok_or_else(|| config_err(format!("{scheme}_path is not configured")))?
        .clone();
    let source_hash = hash_file(&ndjson).map_err(config_err)?;
    if let Some(cache_path) = cache {
        match read_cache(cache_path, source_hash) {
            Ok((store, index)) => {
                return Ok(LoadedScheme { store, index, load_report: None, from_cache: true })
            }
            Err(IndexError::CacheIo { .. })
            | Err(IndexError::CacheStale { .. })
            | Err(IndexError::CacheMagic { .. })
            | Err(IndexError::CacheVersion { .. })
            | Err(IndexError::CacheCorrupt { .. }) => {} // rebuild below
            Err(other) => return Err(config_err(other)),
        }
    }
    let (store, report) = load_authorities(&ndjson, scheme).map_err(config_err)?;
    let index = build_index(&store);
    if let Some(cache_path) = cache {
        write_cache(cache_path, source_hash, &store, &index).map_err(config_err)?;
    }
    Ok(LoadedScheme { store, index, load_report: Some(report), from_cache: false })
}

#[derive(Debug, Serialize)]
pub struct BuildStats {
    pub scheme: Scheme,
    pub records: usize,
    pub documents: usize,
    pub skipped_lines: usize,
    pub dangling_links: usize,
    pub cache_path: PathBuf,
    pub source_hash_hex: String,
}

/// Loads a vocabulary, builds its index, and writes the cache snapshot.
pub fn cmd_build_index(config: &PipelineConfig, scheme: Scheme) -> Result<BuildStats, PipelineError> {
    config.validate()?;
    let (ndjson, cache) = config.scheme_paths(scheme);
    let ndjson = ndjson
        .ok_or_else(|| config_err(format!("{scheme}_path is not configured")))?
        .clone();
    let cache = cache
        .ok_or_else(|| config_err(format!("{scheme}_cache is not configured")))?
        .clone();
    let source_hash = hash_file(&ndjson).map_err(config_err)?;
    let (store, report) = load_authorities(&ndjson, scheme).map_err(config_err)?;
    let index = build_index(&store);
    write_cache(&cache, source_hash, &store, &index).map_err(config_err)?;
    Ok(BuildStats {
        scheme,
        records: store.len(),
        documents: index.doc_count(),
        skipped_lines: report.skipped.len() + report.duplicates.len(),
        dangling_links: report.dangling.len(),
        cache_path: cache,
        source_hash_hex: source_hash.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct SearchOutput {
    pub query: String,
    pub classification: MatchClass,
    pub hits: Vec<SearchHit>,
}

/// Diagnostic lookup: classification plus the ranked hit list.
pub fn cmd_search(
    config: &PipelineConfig,
    scheme: Scheme,
    query: &str,
) -> Result<SearchOutput, PipelineError> {
    config.validate()?;
    let loaded = load_scheme(config, scheme)?;
    let classification = classify(&loaded.store, &loaded.index, query, &config.search_options())
        .map_err(|e| stage_err("search", e))?;
    let hits = loaded.index.search(query, config.fuzzy_k);
    Ok(SearchOutput { query: query.to_owned(), classification, hits })
}

/// Everything a pipeline run produced, with the paths of the intermediate
/// documents in the order they were written.
#[derive(Debug)]
pub struct RunArtifacts {
    pub fields: Vec<SubjectField>,
    pub rendered: String,
    pub written: Vec<PathBuf>,
    pub filter: FilterOutcome,
}

fn write_stage(
    dir: &Path,
    name: &str,
    value: &impl Serialize,
    written: &mut Vec<PathBuf>,
) -> Result<(), PipelineError> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| stage_err("report", e))?;
    fs::write(&path, text).map_err(|e| stage_err("report", e))?;
    written.push(path);
    Ok(())
}

/// Runs filter, validation, and synthesis over one concept document,
/// writing each intermediate before the next stage begins. Any stage
/// failure aborts with the stage name and the offending item; the reports
/// written so far stay on disk for inspection.
pub fn cmd_run(
    config: &PipelineConfig,
    document: &ConceptDocument,
    out_dir: &Path,
) -> Result<RunArtifacts, PipelineError> {
    config.validate()?;
    fs::create_dir_all(out_dir)
        .map_err(|e| config_err(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();

    let lcsh = load_scheme(config, Scheme::Lcsh)?;
    let lcgft = load_scheme(config, Scheme::Lcgft)?;
    let names = config.name_client()?;
    let geo = config.geo_policy()?;

    // stage 1: filter
    let filter_options = FilterOptions {
        coverage_threshold: config.twenty_percent_threshold,
        dedup_depth: config.dedup_depth,
    };
    let outcome = run_filter(document, &lcsh.store, &filter_options)
        .map_err(|e| stage_err("filter", e))?;
    write_stage(out_dir, "01_filter_report.json", &outcome, &mut written)?;
    write_stage(out_dir, "02_candidates.json", &outcome.candidates, &mut written)?;

    // stage 2: validate
    let ctx = ValidationContext {
        store_lcsh: &lcsh.store,
        store_lcgft: &lcgft.store,
        index_lcsh: &lcsh.index,
        index_lcgft: &lcgft.index,
        names: &names,
        geo: &geo,
        search: config.search_options(),
        default_order: config.order_mode(),
    };
    let (validated, entries, first_error) = validate_all(&ctx, &outcome.candidates);
    write_stage(out_dir, "03_validation_report.json", &entries, &mut written)?;
    if let Some(err) = first_error {
        return Err(validate_err(err));
    }
    write_stage(out_dir, "04_validated.json", &validated, &mut written)?;

    // stage 3: synthesize
    let mut fields = Vec::with_capacity(validated.len());
    for heading in &validated {
        let field = synthesize(heading).map_err(|e| stage_err("synthesize", e))?;
        fields.push(field);
    }
    let rendered = emit(&fields, EmitFormat::Text);
    let text_path = out_dir.join("05_fields.txt");
    fs::write(&text_path, &rendered).map_err(|e| stage_err("synthesize", e))?;
    written.push(text_path);
    write_stage(out_dir, "05_fields.json", &fields, &mut written)?;

    Ok(RunArtifacts { fields, rendered, written, filter: outcome })
}

/// Reads a concept document, either directly or through the configured
/// provider hook applied to a work description.
pub fn read_concepts(
    config: &PipelineConfig,
    concepts_path: Option<&Path>,
    work_path: Option<&Path>,
) -> Result<ConceptDocument, PipelineError> {
    match (concepts_path, work_path) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| config_err(format!("invalid concept document {}: {e}", path.display())))
        }
        (None, Some(work)) => {
            let hook = config
                .provider_hook
                .as_ref()
                .ok_or_else(|| config_err("--work requires provider_hook to be configured"))?;
            // sanity-check the work description before handing it off
            let text = fs::read_to_string(work)
                .map_err(|e| config_err(format!("cannot read {}: {e}", work.display())))?;
            let _: WorkDescription = serde_json::from_str(&text)
                .map_err(|e| config_err(format!("invalid work description {}: {e}", work.display())))?;
            run_provider_hook(hook, work)
        }
        _ => Err(config_err("exactly one of --concepts or --work is required")),
    }
}

/// Invokes the provider hook as `<argv...> <work-path>` (whitespace-split,
/// no shell quoting) and parses its stdout as a concept document.
fn run_provider_hook(hook: &str, work_path: &Path) -> Result<ConceptDocument, PipelineError> {
    let mut parts = hook.split_whitespace();
    let program = parts
        .next()
        .ok_or_else(|| config_err("provider_hook is empty"))?;
    let output = std::process::Command::new(program)
        .args(parts)
        .arg(work_path)
        .output()
        .map_err(|e| PipelineError::External(format!("provider hook {program:?}: {e}")))?;
    if !output.status.success() {
        return Err(PipelineError::External(format!(
            "provider hook exited with {}: {}",
            output.status,
            String::from_utf8_lossy(&output.stderr)
        )));
    }
    serde_json::from_slice(&output.stdout)
        .map_err(|e| PipelineError::External(format!("provider hook produced invalid concept document: {e}")))
}

pub struct EvaluateArtifacts {
    pub reports: Vec<ComparisonReport>,
    pub summary: CorpusSummary,
    pub table: String,
    pub written: Vec<PathBuf>,
}

/// Scores an agent corpus against a baseline corpus, writing the full
/// reports, the summary, and the side-by-side table.
pub fn cmd_evaluate(
    config: &PipelineConfig,
    agent_path: &Path,
    baseline_path: &Path,
    out_dir: &Path,
) -> Result<EvaluateArtifacts, PipelineError> {
    config.validate()?;
    fs::create_dir_all(out_dir)
        .map_err(|e| config_err(format!("cannot create {}: {e}", out_dir.display())))?;
    let agent_corpus = read_corpus(agent_path).map_err(config_err)?;
    let baseline_corpus = read_corpus(baseline_path).map_err(config_err)?;

    // stores are optional for evaluation; load whichever is configured
    let lcsh = match config.lcsh_path {
        Some(_) => Some(load_scheme(config, Scheme::Lcsh)?),
        None => None,
    };
    let lcgft = match config.lcgft_path {
        Some(_) => Some(load_scheme(config, Scheme::Lcgft)?),
        None => None,
    };
    let geo = config.geo_policy()?;
    let mut ctx = EvalContext::new(
        lcsh.as_ref().map(|l| &l.store),
        lcgft.as_ref().map(|l| &l.store),
        &geo,
    );
    ctx.related_radius = config.related_radius;

    let baseline_by_id: std::collections::BTreeMap<&str, &CorpusWork> =
        baseline_corpus.iter().map(|w| (w.work_id.as_str(), w)).collect();

    let mut reports = Vec::new();
    for agent_work in &agent_corpus {
        let Some(baseline_work) = baseline_by_id.get(agent_work.work_id.as_str()) else {
            return Err(config_err(format!(
                "agent work {:?} has no baseline counterpart",
                agent_work.work_id
            )));
        };
        let mut fields = Vec::new();
        for line in &agent_work.headings {
            let field = parse_field_line(line).map_err(|e| {
                stage_err("evaluate", format!("work {}: {e} in {line:?}", agent_work.work_id))
            })?;
            fields.push(field);
        }
        reports.push(compare_title(&ctx, &agent_work.work_id, &fields, &baseline_work.headings));
    }
    if reports.is_empty() {
        return Err(config_err("agent corpus is empty"));
    }
    let summary = aggregate(&reports).map_err(|e| stage_err("evaluate", e))?;
    let table = side_by_side(&reports);

    let mut written = Vec::new();
    write_stage(out_dir, "reports.json", &reports, &mut written)?;
    write_stage(out_dir, "summary.json", &summary, &mut written)?;
    let table_path = out_dir.join("side_by_side.txt");
    fs::write(&table_path, &table).map_err(|e| stage_err("evaluate", e))?;
    written.push(table_path);

    Ok(EvaluateArtifacts { reports, summary, table, written })
}

/// Records live name-service fixtures for a list of queries.
pub fn cmd_record_fixtures(
    config: &PipelineConfig,
    queries: &[String],
) -> Result<Vec<PathBuf>, PipelineError> {
    config.validate()?;
    if config.names_mode != "live" {
        return Err(config_err("record-fixtures requires names_mode = live"));
    }
    if config.names_fixture_dir.is_none() {
        return Err(config_err("record-fixtures requires names_fixture_dir"));
    }
    let client = config.name_client()?;
    let mut paths = Vec::new();
    for query in queries {
        let path = client
            .record_fixture(query)
            .map_err(|e| PipelineError::External(e.to_string()))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Renders final fields per the configured output format.
pub fn format_fields(config: &PipelineConfig, fields: &[SubjectField]) -> String {
    match config.output_format.as_str() {
        "json" => emit(fields, EmitFormat::Json),
        _ => fields.iter().map(|f| render(f) + "\n").collect(),
    }
}
