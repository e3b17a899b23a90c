//! Command-line front end: resolves an experiment config, runs the
//! pipeline and writes a self-describing run directory.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod presets;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::config::{apply_override, from_value, merge, parse_file, Command, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{Run, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "symlie", version, about = "Structure-preserving integration and learning on T*SO(3)")]
pub struct Cli {
    /// Directory under which run directories are created.
    #[arg(long, env = "SYMLIE_OUTPUT_ROOT", default_value = "runs", global = true)]
    pub output_root: PathBuf,

    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Integrate trajectories and record conservation diagnostics.
    Simulate(RunArgs),
    /// Generate training and test pairs.
    GenerateData(RunArgs),
    /// Train a model (or a grid of models) and score it on test data.
    Train(RunArgs),
    /// Score a saved checkpoint on a dataset.
    Evaluate(RunArgs),
    /// Fit a Poisson surrogate to a non-geometric integrator.
    Geometrize(RunArgs),
    /// Measure how input noise propagates through the pair reduction.
    ErrorScaling(RunArgs),
    /// Fit global convergence orders against a reference solution.
    OrderStudy(RunArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Built-in preset to start from (see `symlie presets`).
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON config file merged over the preset.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Override a config field, e.g. `--set train.steps=200`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Run directory (default: <output-root>/<name>).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Run name, used for the default run directory.
    #[arg(long)]
    pub name: Option<String>,
    /// Print the resolved config and exit without running.
    #[arg(long)]
    pub print_config: bool,
    /// Checkpoint to evaluate.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Dataset to evaluate on.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
}

/// Resolves preset, config file and overrides into a validated config.
pub fn resolve(command: Command, args: &RunArgs) -> CliResult<ExperimentConfig> {
    let mut doc = serde_json::to_value(ExperimentConfig::default()).expect("defaults serialize");
    if let Some(name) = &args.preset {
        let preset = presets::find(name).ok_or_else(|| {
            let names: Vec<&str> = presets::PRESETS.iter().map(|p| p.name).collect();
            CliError::Config(format!("unknown preset '{name}' (available: {})", names.join(", ")))
        })?;
        merge(&mut doc, preset.config());
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        merge(&mut doc, parse_file(&text, &path.display().to_string())?);
    }
    for spec in &args.overrides {
        apply_override(&mut doc, spec)?;
    }
    if let Some(p) = &args.checkpoint {
        doc["evaluate"]["checkpoint"] = Value::String(p.display().to_string());
    }
    if let Some(p) = &args.dataset {
        doc["evaluate"]["dataset"] = Value::String(p.display().to_string());
    }
    if let Some(n) = &args.name {
        doc["name"] = Value::String(n.clone());
    }
    let mut cfg = from_value(doc)?;
    if let Some(kind) = cfg.kind {
        if kind != command {
            return Err(CliError::Config(format!(
                "kind: this config is for `{}`, not `{}`",
                kind.name(),
                command.name()
            )));
        }
    }
    cfg.kind = Some(command);
    cfg.validate(command)?;
    Ok(cfg)
}

/// Runs one experiment into its run directory and returns the manifest.
pub fn execute(command: Command, cfg: &ExperimentConfig, dir: PathBuf) -> CliResult<RunManifest> {
    let name = cfg.name.clone().unwrap_or_else(|| command.name().to_string());
    let mut run = Run::start(dir, command.name(), &name, cfg)?;
    match command {
        Command::Simulate => commands::simulate(cfg, &mut run)?,
        Command::GenerateData => commands::generate_data(cfg, &mut run)?,
        Command::Train => commands::train(cfg, &mut run)?,
        Command::Evaluate => commands::evaluate(cfg, &mut run)?,
        Command::Geometrize => commands::geometrize_cmd(cfg, &mut run)?,
        Command::ErrorScaling => commands::error_scaling(cfg, &mut run)?,
        Command::OrderStudy => commands::order_study(cfg, &mut run)?,
    }
    run.finish()
}

pub fn run(cli: Cli) -> CliResult<()> {
    let (command, args) = match cli.command {
        Sub::Presets => {
            for p in presets::PRESETS {
                let kind = p.config()["kind"].as_str().unwrap_or_default().to_string();
                println!("{:<24} {:<15} {}", p.name, kind, p.description);
            }
            return Ok(());
        }
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::GenerateData(a) => (Command::GenerateData, a),
        Sub::Train(a) => (Command::Train, a),
        Sub::Evaluate(a) => (Command::Evaluate, a),
        Sub::Geometrize(a) => (Command::Geometrize, a),
        Sub::ErrorScaling(a) => (Command::ErrorScaling, a),
        Sub::OrderStudy(a) => (Command::OrderStudy, a),
    };
    let cfg = resolve(command, &args)?;
    if args.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(());
    }
    let dir = args
        .output
        .clone()
        .unwrap_or_else(|| cli.output_root.join(cfg.name.as_deref().unwrap_or(command.name())));
    let manifest = execute(command, &cfg, dir.clone())?;
    println!("{} finished in {:.1}s -> {}", command.name(), manifest.wall_time_s, dir.display());
    for (k, v) in &manifest.metrics {
        println!("  {k} = {v:.6e}");
    }
    Ok(())
}
