//! Batch command-line front end.
//!
//! `causet <command> [flags]` with commands `count`, `eval`, `limit`,
//! `check`, `simulate`, `tree` and `grid`. Flags may also come from a TOML
//! config file (`--config`); flags on the command line win. Exit status is
//! 0 on success, 1 when a check fails, 2 on usage or config errors and 3
//! on domain errors.

mod commands;
mod emit;
pub mod presets;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use serde::Deserialize;
use thiserror::Error;

pub use emit::{emit, CommandOutput, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

pub const COMMANDS: &[&str] = &["count", "eval", "limit", "check", "simulate", "tree", "grid"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) | CliError::Io(_) => EXIT_DOMAIN,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "causet", version, about = "Order-invariant measures on causal sets")]
pub struct Args {
    /// count | eval | limit | check | simulate | tree | grid
    pub command: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub measure: Option<String>,
    /// Preset parameter, repeatable: `--param q=1/3`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Whitespace-separated element labels.
    #[arg(long)]
    pub stem: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub depth: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, env = "CAUSET_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<u64>,
    /// json | csv
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Poset file: JSON with `elements` and `covers`.
    #[arg(long)]
    pub poset: Option<PathBuf>,
    /// Property for `check`.
    #[arg(long)]
    pub property: Option<String>,
    /// full | adjacent, for order-invariance checks.
    #[arg(long)]
    pub mode: Option<String>,
    /// prefix or a family-specific exhaustion name.
    #[arg(long)]
    pub exhaustion: Option<String>,
    /// Element label for element-level checks.
    #[arg(long)]
    pub element: Option<String>,
    /// Comma-separated k values for the essentiality test.
    #[arg(long = "k-grid")]
    pub k_grid: Option<String>,
}

/// Everything a run needs; the TOML config file has the same fields.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub command: Option<String>,
    pub family: Option<String>,
    pub measure: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    pub stem: Option<String>,
    pub n: Option<u64>,
    pub depth: Option<u64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub poset: Option<PathBuf>,
    pub property: Option<String>,
    pub mode: Option<String>,
    pub exhaustion: Option<String>,
    pub element: Option<String>,
    pub k_grid: Option<String>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    /// Flags given on the command line replace config values.
    pub fn overlay(mut self, args: Args) -> Result<Self, CliError> {
        macro_rules! take {
            ($($f:ident),*) => { $( if args.$f.is_some() { self.$f = args.$f; } )* };
        }
        take!(command, family, measure, stem, n, depth, tol, seed, replicas, format, out, poset, property, mode, exhaustion, element, k_grid);
        for kv in args.params {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--param `{kv}` is not KEY=VALUE")))?;
            self.params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(self)
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.format.as_deref() {
            None | Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            Some(f) => Err(CliError::Usage(format!("unknown format `{f}`; use json or csv"))),
        }
    }
}

/// Outcome of one run: exit status and the rendered report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub text: String,
}

/// Dispatch a fully merged config.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let format = config.format()?;
    let out = commands::dispatch(config)?;
    let status = if out.passed { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome { status, text: emit(&out, format) })
}

/// Parse arguments, run, write output; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run_args(args) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("causet: {e}");
            e.exit_code()
        }
    }
}

fn run_args(args: Args) -> Result<i32, CliError> {
    let base = match &args.config {
        Some(path) => RunConfig::from_toml(
            &std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?,
        )?,
        None => RunConfig::default(),
    };
    let config = base.overlay(args)?;
    let outcome = run(&config)?;
    match &config.out {
        Some(path) => std::fs::write(path, &outcome.text)?,
        None => match std::io::stdout().lock().write_all(outcome.text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(outcome.status)
}
