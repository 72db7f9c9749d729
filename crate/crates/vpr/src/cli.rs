//! The `vpr` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use vpr_core::event::{validate_log, ParseOptions, ValidateOptions, DEFAULT_IDLE_GAP_MS};
use vpr_core::render::{OutputKind, RenderConfig, RenderError};
use vpr_core::stats::{build_report, score_responses, AnswerKey, ReportConfig, StatsError};
use vpr_core::synth::{synth_assets, SynthError};
use vpr_core::{
    build_from_logs, deserialize_document, render, serialize_document, serialize_log, synth_log,
    EventLog, MineOptions, Profile,
};

use crate::config::{env_asset_dir, ConfigError, ConfigFile, Settings};
use crate::io::{read_log, read_to_string, write_file, DirAssets, IoError};
use crate::tables::{read_answers, read_likert, read_responses, TableError};
use crate::VIEWER_STUB;

const EXIT_CODES: &str =
    "Exit codes: 0 success, 1 invalid input or failed check, 2 I/O or usage error.";

#[derive(Debug, Parser)]
#[command(name = "vpr", version, about = "Turn expert interaction logs into step-by-step process documents", after_help = EXIT_CODES)]
pub struct Cli {
    /// Config file; defaults to ./vpr.config.json when present
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a log and report problems
    Validate(ValidateArgs),
    /// Map logs to steps, mine patterns and write a model file
    Mine(MineArgs),
    /// Render a model file as HTML or SVG
    Render(RenderArgs),
    /// Score study responses and compare prototypes
    Analyze(AnalyzeArgs),
    /// Generate a synthetic log with placeholder screenshots
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub log: PathBuf,
    /// Where screenshots live; defaults to assets/ beside the log
    #[arg(long)]
    pub asset_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_IDLE_GAP_MS)]
    pub idle_gap_ms: u64,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Logs forming the pattern database; the first one is rendered
    #[arg(required = true, num_args = 1..)]
    pub logs: Vec<PathBuf>,
    #[arg(short, long)]
    pub out: PathBuf,
    /// Rule table replacing the built-in one
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub asset_dir: Option<PathBuf>,
    #[arg(long)]
    pub coalesce_gap_ms: Option<u64>,
    #[arg(long)]
    pub min_support: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Document title; defaults to the log's task title
    #[arg(long)]
    pub title: Option<String>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub model: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    /// p1 text, p2 pictorial, p3 text with context, p4 pictorial with context
    #[arg(long, value_parser = ["p1", "p2", "p3", "p4"])]
    pub format: Option<String>,
    /// Static SVG instead of interactive HTML
    #[arg(long = "static")]
    pub static_vector: bool,
    /// default or high-contrast
    #[arg(long)]
    pub palette: Option<String>,
    #[arg(long)]
    pub no_section_colors: bool,
    /// Reference screenshots as assets/<file> instead of inlining them
    #[arg(long)]
    pub link_assets: bool,
    #[arg(long)]
    pub asset_dir: Option<PathBuf>,
    /// Viewer script to inline in place of the built-in one
    #[arg(long)]
    pub runtime: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub responses: PathBuf,
    pub answers: PathBuf,
    /// Output directory for report.json and report.txt
    #[arg(short, long)]
    pub out: PathBuf,
    /// Questionnaire ratings (participant_id, prototype, question_id, rating)
    #[arg(long)]
    pub likert: Option<PathBuf>,
    #[arg(long)]
    pub threshold_sec: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    /// marking_correction or poll_creation
    #[arg(long, default_value = "marking_correction")]
    pub profile: String,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) | CliError::Usage(_) => 2,
        }
    }

    fn domain(e: impl std::fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io(e) => CliError::Io(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        if e.is_io() {
            CliError::Usage(e.to_string())
        } else {
            CliError::domain(e)
        }
    }
}

/// Parses `args` and runs the command, printing to stdout and stderr.
/// Returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = OsString>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let file = ConfigFile::discover(cli.config.as_deref(), Path::new("."))?;
    match &cli.command {
        Command::Validate(a) => validate(a, file),
        Command::Mine(a) => mine(a, file),
        Command::Render(a) => render_cmd(a, file),
        Command::Analyze(a) => analyze(a, file),
        Command::Synth(a) => synth(a),
    }
}

fn load_log(path: &Path) -> Result<EventLog, CliError> {
    read_log(path, ParseOptions::default()).map_err(|e| match e {
        IoError::Parse { .. } => CliError::domain(e),
        io => CliError::Io(io),
    })
}

fn validate(a: &ValidateArgs, file: ConfigFile) -> Result<(), CliError> {
    let flags = ConfigFile {
        asset_dir: a.asset_dir.clone(),
        ..ConfigFile::default()
    };
    let settings = Settings::resolve(flags.or(file), env_asset_dir())?;
    let log = load_log(&a.log)?;
    let assets = DirAssets::new(settings.asset_dir_for(&a.log));
    let diagnostics = validate_log(
        &log,
        &ValidateOptions {
            idle_gap_ms: a.idle_gap_ms,
            assets: Some(&assets),
        },
    );
    for d in &diagnostics {
        eprintln!("{d}");
    }
    println!(
        "{}: {} events, {} warnings",
        a.log.display(),
        log.len(),
        diagnostics.len()
    );
    Ok(())
}

/// Trace ids are file names, made unique with a `#n` suffix.
fn trace_ids(paths: &[PathBuf]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    paths
        .iter()
        .map(|p| {
            let base = p.file_name().map_or_else(
                || p.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            );
            let mut id = base.clone();
            let mut n = 1;
            while !seen.insert(id.clone()) {
                n += 1;
                id = format!("{base}#{n}");
            }
            id
        })
        .collect()
}

fn mine(a: &MineArgs, file: ConfigFile) -> Result<(), CliError> {
    let flags = ConfigFile {
        rules_path: a.rules.clone(),
        asset_dir: a.asset_dir.clone(),
        coalesce_gap_ms: a.coalesce_gap_ms,
        min_support: a.min_support,
        max_len: a.max_len,
        ..ConfigFile::default()
    };
    let settings = Settings::resolve(flags.or(file), env_asset_dir())?;
    let mut logs = Vec::with_capacity(a.logs.len());
    for (id, path) in trace_ids(&a.logs).into_iter().zip(&a.logs) {
        logs.push((id, load_log(path)?));
    }
    let opts = MineOptions {
        min_support: settings.min_support,
        max_len: Some(settings.max_len),
        title: a.title.clone(),
    };
    let doc = build_from_logs(&logs, &settings.rules, &opts).map_err(CliError::domain)?;
    let assets = DirAssets::new(settings.asset_dir_for(&a.logs[0]));
    if !doc.assets.is_empty() && !assets.exists() {
        return Err(CliError::domain(
            vpr_core::step::StepError::AssetDirMissing(assets.root().display().to_string()),
        ));
    }
    write_file(&a.out, serialize_document(&doc).as_bytes())?;
    println!("{}", a.out.display());
    Ok(())
}

fn render_cmd(a: &RenderArgs, file: ConfigFile) -> Result<(), CliError> {
    let flags = ConfigFile {
        asset_dir: a.asset_dir.clone(),
        format: a.format.clone(),
        palette: a.palette.clone(),
        section_colors: a.no_section_colors.then_some(false),
        embed_assets: a.link_assets.then_some(false),
        ..ConfigFile::default()
    };
    let settings = Settings::resolve(flags.or(file), env_asset_dir())?;
    let doc = deserialize_document(&read_to_string(&a.model)?).map_err(CliError::domain)?;
    let runtime = match &a.runtime {
        Some(p) => read_to_string(p)?,
        None => VIEWER_STUB.to_string(),
    };
    let cfg = RenderConfig {
        format: settings.format,
        embed_assets: settings.embed_assets,
        palette: settings.palette,
        section_colors: settings.section_colors,
        output: if a.static_vector {
            OutputKind::StaticVector
        } else {
            OutputKind::InteractiveDocument
        },
    };
    let assets = DirAssets::new(settings.asset_dir_for(&a.model));
    let out = render(&doc, &cfg, &assets, &runtime).map_err(|e| match e {
        RenderError::UnresolvedAsset(paths) => CliError::Domain(format!(
            "unresolved assets in {}: {}",
            assets.root().display(),
            paths.join(", ")
        )),
        other => CliError::domain(other),
    })?;
    write_file(&a.out, out.as_bytes())?;
    println!("{}", a.out.display());
    Ok(())
}

fn analyze(a: &AnalyzeArgs, file: ConfigFile) -> Result<(), CliError> {
    let flags = ConfigFile {
        threshold_sec: a.threshold_sec,
        ..ConfigFile::default()
    };
    let settings = Settings::resolve(flags.or(file), None)?;
    let responses = read_responses(&a.responses)?;
    let key = AnswerKey::new(read_answers(&a.answers)?).map_err(CliError::domain)?;
    let likert = match &a.likert {
        Some(p) => read_likert(p)?,
        None => Vec::new(),
    };
    let stats_err = |e: StatsError| CliError::domain(e);
    let rows = score_responses(&responses, &key).map_err(stats_err)?;
    let report = build_report(
        &rows,
        &likert,
        &ReportConfig {
            threshold_sec: settings.threshold_sec,
        },
    )
    .map_err(stats_err)?;
    let json = serde_json::to_string_pretty(&report).map_err(CliError::domain)? + "\n";
    let text = report.to_text();
    let json_path = a.out.join("report.json");
    let text_path = a.out.join("report.txt");
    write_file(&json_path, json.as_bytes())?;
    write_file(&text_path, text.as_bytes())?;
    print!("{text}");
    println!("\n{}\n{}", json_path.display(), text_path.display());
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<(), CliError> {
    let profile: Profile = a
        .profile
        .parse()
        .map_err(|e: SynthError| CliError::Usage(e.to_string()))?;
    let log = synth_log(a.seed, a.n, profile).map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&a.out, serialize_log(&log).as_bytes())?;
    let dir = a.out.parent().unwrap_or(Path::new("")).join("assets");
    for (name, bytes) in synth_assets(&log) {
        write_file(&dir.join(name), &bytes)?;
    }
    println!("{}", a.out.display());
    Ok(())
}
