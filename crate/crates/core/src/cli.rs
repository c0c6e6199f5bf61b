//! Command-line pipeline: `generate`, `filter`, `eval` and `pipeline`.
//!
//! Data goes to files in the `--out` directory (and the eval report to
//! standard output); logs go to standard error. Data files contain no
//! timestamps, so identical inputs give byte-identical outputs. Each run
//! also writes a `run-<command>.json` sidecar with its configuration and
//! start time.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::evaluation::{aggregate, before_after, load_ratings, EvalReport};
use crate::filters::{run_filters, FilterConfig, FilterId, FilterVerdict};
use crate::lexicon::{load_lexicon, SemanticLexicon};
use crate::morphology::{load_marker_table, MarkerTable};
use crate::rules::{generate_with_notes, QuestionCandidate, RuleId};
use crate::treebank::{load_treebank, ParsedSentence};

pub const CANDIDATES_FILE: &str = "candidates.jsonl";
pub const KEPT_FILE: &str = "kept.jsonl";
pub const VERDICTS_FILE: &str = "verdicts.jsonl";
pub const GENERATE_SUMMARY_FILE: &str = "generate_summary.json";
pub const FILTER_SUMMARY_FILE: &str = "filter_summary.json";

#[derive(Debug, Parser)]
#[command(name = "karaka-qg", version, about = "Generate Hindi questions from karaka-labeled dependency parses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the question rules to a treebank and write candidates.jsonl.
    Generate(GenerateArgs),
    /// Prune candidates and write kept.jsonl and verdicts.jsonl.
    Filter(FilterArgs),
    /// Aggregate ratings into per-karaka and before/after tables.
    Eval(EvalArgs),
    /// generate, filter and (with --ratings) eval in one go.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Karaka-annotated treebank.
    #[arg(long)]
    pub input: PathBuf,
    /// Marker table extending the built-in one.
    #[arg(long)]
    pub markers: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Semantic lexicon TSV; repeatable, later files override earlier ones.
    #[arg(long)]
    pub lexicon: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated rule ids (R_K1,R_K7T,...) or "all".
    #[arg(long, default_value = "all", value_parser = parse_rules)]
    pub rules: BTreeSet<RuleId>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Candidates to filter [default: <out>/candidates.jsonl]
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub filters: FilterFlags,
}

#[derive(Debug, Args)]
pub struct FilterFlags {
    /// Longest phrase allowed on either side of a coof conjunct.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub theta: u64,
    /// Filter to switch off (F_ANAPHORA, F_WORD_ORDER, ...); repeatable.
    #[arg(long = "disable-filter")]
    pub disable_filter: Vec<FilterId>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ratings CSV.
    #[arg(long)]
    pub ratings: PathBuf,
    /// Directory holding candidates.jsonl and verdicts.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub lexicon: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "all", value_parser = parse_rules)]
    pub rules: BTreeSet<RuleId>,
    #[command(flatten)]
    pub filters: FilterFlags,
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn parse_rules(s: &str) -> Result<BTreeSet<RuleId>, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(RuleId::all());
    }
    s.split(',').filter(|r| !r.trim().is_empty()).map(str::parse).collect()
}

/// Resolved settings shared by the subcommands.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub input_path: PathBuf,
    pub lexicon_paths: Vec<PathBuf>,
    pub marker_table_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub theta: usize,
    pub enabled_rules: BTreeSet<RuleId>,
    pub enabled_filters: BTreeSet<FilterId>,
    pub format: Format,
}

impl PipelineConfig {
    pub fn new(input_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input_path: input_path.into(),
            lexicon_paths: Vec::new(),
            marker_table_path: None,
            output_dir: output_dir.into(),
            theta: 5,
            enabled_rules: RuleId::all(),
            enabled_filters: FilterId::ALL.into_iter().collect(),
            format: Format::Text,
        }
    }

    fn with_filter_flags(mut self, flags: &FilterFlags) -> Self {
        self.theta = flags.theta as usize;
        for f in &flags.disable_filter {
            self.enabled_filters.remove(f);
        }
        self
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input data (exit status 1).
    Input(String),
    /// Invalid configuration (exit status 2).
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Config(m) => f.write_str(m),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = PipelineConfig {
                lexicon_paths: args.lexicon,
                marker_table_path: args.source.markers,
                enabled_rules: args.rules,
                ..PipelineConfig::new(args.source.input, args.out)
            };
            write_sidecar(&cfg, "generate")?;
            let summary = cmd_generate(&cfg)?;
            print_counts(&summary);
            Ok(())
        }
        Command::Filter(args) => {
            let cfg = PipelineConfig {
                marker_table_path: args.source.markers,
                ..PipelineConfig::new(args.source.input, args.out)
            }
            .with_filter_flags(&args.filters);
            let candidates = args
                .candidates
                .unwrap_or_else(|| cfg.output_dir.join(CANDIDATES_FILE));
            write_sidecar(&cfg, "filter")?;
            let summary = cmd_filter(&cfg, &candidates)?;
            print_counts(&summary);
            Ok(())
        }
        Command::Eval(args) => {
            let candidates = match (&args.candidates, &args.out) {
                (Some(path), _) => path.clone(),
                (None, Some(out)) => out.join(CANDIDATES_FILE),
                (None, None) => return Err(CliError::Config("eval needs --candidates or --out".into())),
            };
            let verdicts = match (&args.verdicts, &args.out) {
                (Some(path), _) => Some(path.clone()),
                (None, Some(out)) => Some(out.join(VERDICTS_FILE)).filter(|p| p.exists()),
                (None, None) => None,
            };
            let report = cmd_eval(&candidates, verdicts.as_deref(), &args.ratings)?;
            print!("{}", render_report(&report, args.format));
            Ok(())
        }
        Command::Pipeline(args) => {
            let cfg = PipelineConfig {
                lexicon_paths: args.lexicon,
                marker_table_path: args.source.markers,
                enabled_rules: args.rules,
                format: args.format,
                ..PipelineConfig::new(args.source.input, args.out)
            }
            .with_filter_flags(&args.filters);
            write_sidecar(&cfg, "pipeline")?;
            cmd_generate(&cfg)?;
            let candidates = cfg.output_dir.join(CANDIDATES_FILE);
            cmd_filter(&cfg, &candidates)?;
            if let Some(ratings) = &args.ratings {
                let verdicts = cfg.output_dir.join(VERDICTS_FILE);
                let report = cmd_eval(&candidates, Some(&verdicts), ratings)?;
                print!("{}", render_report(&report, cfg.format));
            }
            Ok(())
        }
    }
}

/// Parses arguments, runs the command and maps failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{}", e);
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_markers(cfg: &PipelineConfig) -> Result<MarkerTable, CliError> {
    let mut markers = MarkerTable::default();
    if let Some(path) = &cfg.marker_table_path {
        markers.extend(&load_marker_table(path).map_err(input_err)?);
    }
    Ok(markers)
}

fn load_lexicons(cfg: &PipelineConfig) -> Result<SemanticLexicon, CliError> {
    let mut lexicon = SemanticLexicon::builtin();
    for path in &cfg.lexicon_paths {
        let extra = load_lexicon(path).map_err(input_err)?;
        if extra.duplicates() > 0 {
            log::warn!("{}: {} duplicate lemmas, last entry kept", path.display(), extra.duplicates());
        }
        lexicon.overlay(&extra);
    }
    Ok(lexicon)
}

fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create output directory {}: {}", dir.display(), e)))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {}", path.display(), e)))
}

fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("failed to read {}: {}", path.display(), e)))?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| CliError::Input(format!("{}:{}: {}", path.display(), i + 1, e)))
        })
        .collect()
}

fn write_sidecar(cfg: &PipelineConfig, command: &str) -> Result<(), CliError> {
    prepare_out_dir(&cfg.output_dir)?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "started_unix": started,
        "config": cfg,
    });
    let path = cfg.output_dir.join(format!("run-{}.json", command));
    write_file(&path, &format!("{:#}\n", meta))
}

fn print_counts(counts: &BTreeMap<String, usize>) {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for (key, n) in counts {
        let _ = writeln!(lock, "{}\t{}", key, n);
    }
}

/// Generates candidates for every sentence and writes `candidates.jsonl`
/// plus a per-karaka count summary, which is also returned.
pub fn cmd_generate(cfg: &PipelineConfig) -> Result<BTreeMap<String, usize>, CliError> {
    let lexicon = load_lexicons(cfg)?;
    let markers = load_markers(cfg)?;
    let sentences = load_treebank(&cfg.input_path).map_err(input_err)?;
    prepare_out_dir(&cfg.output_dir)?;

    let mut candidates = Vec::new();
    for s in &sentences {
        let generation = generate_with_notes(s, &lexicon, &markers, &cfg.enabled_rules);
        for note in &generation.skipped {
            log::info!(
                "{}: {} skipped token {}: {}",
                note.sentence_id,
                note.rule,
                note.target_token_id,
                note.reason
            );
        }
        candidates.extend(generation.candidates);
    }
    log::info!("{} sentences, {} candidates", sentences.len(), candidates.len());

    let mut summary: BTreeMap<String, usize> = cfg
        .enabled_rules
        .iter()
        .flat_map(|r| r.karakas())
        .map(|k| (k.to_string(), 0))
        .collect();
    for c in &candidates {
        *summary.entry(c.karaka.to_string()).or_default() += 1;
    }

    write_file(&cfg.output_dir.join(CANDIDATES_FILE), &to_jsonl(&candidates))?;
    write_file(
        &cfg.output_dir.join(GENERATE_SUMMARY_FILE),
        &format!("{}\n", serde_json::to_string_pretty(&summary).expect("serializable")),
    )?;
    Ok(summary)
}

/// Filters the candidates at `candidates_path` against the treebank and
/// writes `kept.jsonl`, `verdicts.jsonl` and the drop count per filter.
pub fn cmd_filter(cfg: &PipelineConfig, candidates_path: &Path) -> Result<BTreeMap<String, usize>, CliError> {
    let markers = load_markers(cfg)?;
    let sentences: Vec<ParsedSentence> = load_treebank(&cfg.input_path).map_err(input_err)?;
    let candidates: Vec<QuestionCandidate> = read_jsonl(candidates_path)?;
    prepare_out_dir(&cfg.output_dir)?;

    let filter_cfg = FilterConfig {
        theta: cfg.theta,
        enabled: cfg.enabled_filters.clone(),
        markers,
        ..FilterConfig::default()
    };
    if filter_cfg.theta == 0 {
        return Err(CliError::Config("theta must be at least 1".into()));
    }
    let (kept, verdicts) = run_filters(&candidates, &sentences, &filter_cfg).map_err(input_err)?;

    let mut summary: BTreeMap<String, usize> = FilterId::ALL.iter().map(|f| (f.to_string(), 0)).collect();
    for v in &verdicts {
        if let Some(f) = v.dropped_by {
            *summary.entry(f.to_string()).or_default() += 1;
        }
    }
    log::info!("{} of {} candidates kept", kept.len(), candidates.len());

    write_file(&cfg.output_dir.join(KEPT_FILE), &to_jsonl(&kept))?;
    write_file(&cfg.output_dir.join(VERDICTS_FILE), &to_jsonl(&verdicts))?;
    write_file(
        &cfg.output_dir.join(FILTER_SUMMARY_FILE),
        &format!("{}\n", serde_json::to_string_pretty(&summary).expect("serializable")),
    )?;
    Ok(summary)
}

/// Builds the evaluation report from candidates, optional verdicts and ratings.
pub fn cmd_eval(candidates_path: &Path, verdicts_path: Option<&Path>, ratings_path: &Path) -> Result<EvalReport, CliError> {
    let candidates: Vec<QuestionCandidate> = read_jsonl(candidates_path)?;
    let ratings = load_ratings(ratings_path).map_err(input_err)?;
    let table = aggregate(&ratings, &candidates).map_err(input_err)?;
    let before_after = match verdicts_path {
        Some(path) => {
            let verdicts: Vec<FilterVerdict> = read_jsonl(path)?;
            Some(before_after(&ratings, &candidates, &verdicts).map_err(input_err)?)
        }
        None => None,
    };
    Ok(EvalReport { table, before_after })
}

pub fn render_report(report: &EvalReport, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(report).expect("serializable")),
    }
}
