//! Subcommand implementations. Each returns a short text summary for stdout
//! and leaves its files plus a manifest in the output directory.

pub mod report;
pub mod roc;
pub mod sense_plan;
pub mod simulate;
pub mod sweep;
pub mod train;

use std::path::PathBuf;

use osa_core::mac::{DpPolicy, Policy, Scenario};

use crate::config::{DpSection, MyopicSection, PolicySection, ScenarioConfig};
use crate::error::{CliError, CliResult};

/// Effective settings of one run.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: ScenarioConfig,
    pub out: PathBuf,
    /// Worker threads; results never depend on this.
    pub jobs: usize,
}

impl RunContext {
    pub fn new(config: ScenarioConfig, out: PathBuf, jobs: usize) -> Self {
        RunContext {
            config,
            out,
            jobs: jobs.max(1),
        }
    }

    pub(crate) fn pool(&self) -> CliResult<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", self.jobs)))
    }
}

/// Builds the configured policy; the DP table is solved for `scenario`.
pub fn build_policy(config: &ScenarioConfig, scenario: &Scenario) -> CliResult<Policy> {
    Ok(match config.policy()? {
        PolicySection::AlwaysSleep => Policy::AlwaysSleep,
        PolicySection::Genie => Policy::Genie,
        PolicySection::Myopic(MyopicSection { margin }) => Policy::Myopic { margin },
        PolicySection::Dp(DpSection { grid }) => Policy::Dp(
            DpPolicy::solve(
                &scenario.channel,
                &scenario.rewards,
                scenario.sensing,
                scenario.horizon,
                grid,
            )
            .map_err(|e| CliError::from_core("policy.dp", e))?,
        ),
    })
}

pub(crate) fn core_err(section: &'static str) -> impl Fn(osa_core::Error) -> CliError {
    move |e| CliError::from_core(section, e)
}
