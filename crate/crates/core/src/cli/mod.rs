//! Batch command-line front end.
//!
//! Exit status: 0 on success, 1 on data errors (missing or malformed inputs,
//! numerical failures), 2 on configuration errors.

mod config;
mod manifest;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use config::{
    ClassifierSection, EvaluationSection, PathsSection, PipelineConfig, RelieffSection, ScenarioName, SchemeName,
    SynthSection, WaveletSection,
};
pub use manifest::{relative_to, sha256_file, stage_seed, DirLock, FileDigest, Manifest, LOCK_FILE};
pub use stages::{Run, STAGES};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(
    name = "erpsift",
    version,
    about = "ERP feature selection and classification pipeline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Pipeline configuration file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the global seed of the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reads and writes work and output artifacts in this directory instead
    /// of the configured work_dir and output_dir.
    #[arg(long)]
    pub stage_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Select features on all subjects before cross-validating (optimistic).
    #[arg(long)]
    pub leaky: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset into input_dir.
    Synth(CommonArgs),
    /// Filter, epoch, reject and average every subject.
    Preprocess(CommonArgs),
    /// Build the subject feature matrix.
    Extract(CommonArgs),
    /// Compute ReliefF weights on all subjects.
    Select(CommonArgs),
    /// Fit one model per selection size.
    Train(CommonArgs),
    /// Repeated cross-validation with confusion reports.
    Evaluate(EvalArgs),
    /// Electrode and region attribution of the selected features.
    Roi(CommonArgs),
    /// Summary of the evaluation and region reports.
    Report(CommonArgs),
    /// All stages in order.
    Pipeline(EvalArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &CommonArgs, bool) {
        match self {
            Command::Synth(a) => ("synth", a, false),
            Command::Preprocess(a) => ("preprocess", a, false),
            Command::Extract(a) => ("extract", a, false),
            Command::Select(a) => ("select", a, false),
            Command::Train(a) => ("train", a, false),
            Command::Evaluate(a) => ("evaluate", &a.common, a.leaky),
            Command::Roi(a) => ("roi", a, false),
            Command::Report(a) => ("report", a, false),
            Command::Pipeline(a) => ("pipeline", &a.common, a.leaky),
        }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 2,
        _ => 1,
    }
}

/// Runs one parsed command.
pub fn execute(cmd: &Command) -> crate::Result<()> {
    let (name, common, leaky) = cmd.parts();
    let mut cfg = PipelineConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &common.stage_dir {
        cfg.paths.work_dir = dir.clone();
        cfg.paths.output_dir = dir.clone();
    }
    let _lock = DirLock::acquire(&cfg.paths.work_dir)?;
    let run = Run { cfg, leaky };
    if name == "pipeline" {
        run.pipeline()
    } else {
        run.run_stage(name)
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
