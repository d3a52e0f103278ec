//! Command-line surface and config resolution.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, RunContext};
use crate::config::{InitSpec, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::LoadedConfig;
use crate::presets;

#[derive(Debug, Parser)]
#[command(
    name = "osa",
    version,
    about = "Opportunistic spectrum access experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Scenario JSON, or a run manifest to reproduce.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in scenario (see `osa presets`).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: the config's `output_dir`, else `out`].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Monte-Carlo trials for `roc` (at least 1000).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Literal mode: signal power in the false-alarm probability and the
    /// single-radical sensing time.
    #[arg(long, global = true)]
    pub literal: bool,
    /// Worker threads for independent blocks, seeds or densities.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Predictor weight initialization, `uniform:<scale>` or `constant:<value>`.
    #[arg(long, global = true)]
    pub init: Option<InitSpec>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Analytic and Monte-Carlo detection curves.
    Roc,
    /// Sensing time, control time and channels per user.
    SensePlan,
    /// Slot-level MAC simulation.
    Simulate,
    /// Normalized throughput against secondary-user density.
    Sweep,
    /// Train the occupancy predictor.
    Train,
    /// Verify manifests and aggregate them into report.csv / report.json.
    Report {
        /// Manifest files or directories containing `*.manifest.json`.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// List the built-in presets.
    Presets,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Roc => "roc",
            Command::SensePlan => "sense-plan",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Train => "train",
            Command::Report { .. } => "report",
            Command::Presets => "presets",
        }
    }
}

/// Loads the config and applies the command-line overrides, so the result
/// is exactly what a manifest records.
pub fn effective_config(global: &GlobalArgs, command: &str) -> CliResult<ScenarioConfig> {
    let loaded = match (&global.config, &global.preset) {
        (Some(path), _) => LoadedConfig::from_path(path)?,
        (None, Some(name)) => LoadedConfig::from_json(presets::get(name)?)?,
        (None, None) => {
            return Err(CliError::Usage(
                "need --config <path> or --preset <name>".into(),
            ))
        }
    };
    if let Some(recorded) = &loaded.manifest_command {
        if recorded != command {
            return Err(CliError::Usage(format!(
                "manifest was written by `{recorded}`, not `{command}`"
            )));
        }
    }
    let mut config = loaded.config;
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if global.literal {
        config.literal = true;
    }
    if let Some(trials) = global.trials {
        match config.detector.as_mut() {
            Some(d) => d.trials = trials,
            None => {
                return Err(CliError::Usage(
                    "--trials needs a `detector` section".into(),
                ))
            }
        }
    }
    if let Some(init) = global.init {
        match config.predictor.as_mut() {
            Some(p) => p.init = init,
            None => return Err(CliError::Usage("--init needs a `predictor` section".into())),
        }
    }
    config.validate()?;
    Ok(config)
}

/// Runs one subcommand and returns its stdout text.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Presets => Ok(presets::PRESETS
            .iter()
            .map(|(n, _)| format!("{n}\n"))
            .collect()),
        Command::Report { paths } => {
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            commands::report::run(paths, &out)
        }
        command => {
            let config = effective_config(g, command.name())?;
            for w in config.warnings() {
                eprintln!("warning: {w}");
            }
            let out = g
                .out
                .clone()
                .or_else(|| config.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out"));
            let ctx = RunContext::new(config, out, g.jobs);
            match command {
                Command::Roc => commands::roc::run(&ctx),
                Command::SensePlan => commands::sense_plan::run(&ctx),
                Command::Simulate => commands::simulate::run(&ctx),
                Command::Sweep => commands::sweep::run(&ctx),
                Command::Train => commands::train::run(&ctx),
                Command::Report { .. } | Command::Presets => unreachable!("handled above"),
            }
        }
    }
}
