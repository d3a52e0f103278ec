//! JSON scenario configuration.
//!
//! Every section is optional at parse time; a subcommand asks for the
//! sections it needs and reports a missing one by its key. Unknown keys are
//! rejected everywhere. Values are checked with the library constructors, so
//! a config that loads is one the numerical core accepts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use osa_core::channel::ChannelParams;
use osa_core::mac::{InitialState, RewardParams, Scenario, SensingModel};
use osa_core::predictor::{InitMode, RnnConfig};
use osa_core::sensing::{ControlTime, PlanInputs, SensingDuration, SensingTimeForm};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Literal mode: signal power in the false-alarm expression and the
    /// single-radical sensing time.
    #[serde(default)]
    pub literal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensing_plan: Option<PlanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewards: Option<RewardSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictor: Option<PredictorSection>,
}

fn default_seed() -> u64 {
    1
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub p: f64,
    pub q: f64,
    pub sigma_s2: f64,
    pub sigma_n2: f64,
    #[serde(default = "yes")]
    pub require_positive_memory: bool,
    #[serde(default = "default_slot")]
    pub slot_duration: f64,
}

fn default_slot() -> f64 {
    osa_core::channel::DEFAULT_SLOT_DURATION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorForm {
    /// Normalized energy against a power threshold, Gaussian primary signal.
    #[default]
    Energy,
    /// Unnormalized energy with time-bandwidth product `u`, deterministic signal.
    TimeBandwidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    #[serde(default)]
    pub form: DetectorForm,
    #[serde(default = "one")]
    pub nb: usize,
    #[serde(default = "one_u32")]
    pub u: u32,
    pub lambdas: LambdaGrid,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn one_u32() -> u32 {
    1
}

fn default_trials() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaGrid {
    Values(Vec<f64>),
    Linear { start: f64, stop: f64, count: usize },
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            LambdaGrid::Values(ref v) => v.clone(),
            LambdaGrid::Linear { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..count)
                    .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ControlSpec {
    Fixed(f64),
    Components {
        t_b1: f64,
        t_b2: f64,
        t_ms: f64,
        t_sifs: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SensingSpec {
    Fixed(f64),
    Targets {
        snr: f64,
        bandwidth: f64,
        p_d: f64,
        p_f: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeForm {
    #[default]
    Standard,
    Swapped,
    SingleRadical,
}

impl From<TimeForm> for SensingTimeForm {
    fn from(f: TimeForm) -> Self {
        match f {
            TimeForm::Standard => SensingTimeForm::Standard,
            TimeForm::Swapped => SensingTimeForm::Swapped,
            TimeForm::SingleRadical => SensingTimeForm::SingleRadical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub n_channels: usize,
    pub m_s: usize,
    pub t_frame: f64,
    pub t_c: ControlSpec,
    pub t_s: SensingSpec,
    /// Ignored in literal mode, which always uses the single radical.
    #[serde(default)]
    pub time_form: TimeForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardSection {
    pub r_t: f64,
    pub c_c: f64,
    pub c_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MyopicSection {
    #[serde(default)]
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpSection {
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    1001
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicySection {
    AlwaysSleep,
    Genie,
    Myopic(MyopicSection),
    Dp(DpSection),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SensingSection {
    #[default]
    Perfect,
    Imperfect {
        p_d: f64,
        p_f: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateSection {
    #[default]
    Stationary,
    Idle,
    Busy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub horizon: usize,
    #[serde(default = "one")]
    pub n_channels: usize,
    #[serde(default = "one")]
    pub users: usize,
    /// Defaults to the sensing-plan `L` when a plan is configured, else 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels_per_user: Option<usize>,
    #[serde(default)]
    pub sensing: SensingSection,
    #[serde(default)]
    pub initial_state: InitialStateSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_belief: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub densities: Vec<f64>,
    #[serde(default = "default_area")]
    pub area_km2: f64,
}

fn default_area() -> f64 {
    1.0
}

/// Weight initialization written as `mode:scale`, e.g. `uniform:0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct InitSpec {
    pub mode: InitMode,
    pub scale: f64,
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec {
            mode: InitMode::Uniform,
            scale: osa_core::predictor::DEFAULT_INIT_WEIGHT,
        }
    }
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mode, scale) = s.split_once(':').ok_or_else(|| {
            format!("expected `uniform:<scale>` or `constant:<scale>`, got `{s}`")
        })?;
        let mode = match mode {
            "uniform" => InitMode::Uniform,
            "constant" => InitMode::Constant,
            other => return Err(format!("unknown init mode `{other}`")),
        };
        let scale: f64 = scale
            .parse()
            .map_err(|_| format!("bad init scale `{scale}`"))?;
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(format!(
                "init scale must be finite and nonnegative, got {scale}"
            ));
        }
        Ok(InitSpec { mode, scale })
    }
}

impl TryFrom<String> for InitSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            InitMode::Uniform => "uniform",
            InitMode::Constant => "constant",
        };
        write!(f, "{mode}:{:?}", self.scale)
    }
}

impl From<InitSpec> for String {
    fn from(s: InitSpec) -> Self {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TraceSource {
    /// Markov trace drawn from the `channel` section.
    Synthetic { length: usize },
    /// CSV file with a `state` column of 0/1 (1 = idle) or ±1 (+1 = busy).
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorSection {
    #[serde(default = "default_hidden")]
    pub hidden_size: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default = "default_threshold")]
    pub classify_threshold: f64,
    #[serde(default)]
    pub feature_mode: bool,
    #[serde(default = "one")]
    pub batch_size: usize,
    pub trace: TraceSource,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_validation_fraction")]
    pub validation_fraction: f64,
}

fn default_hidden() -> usize {
    RnnConfig::default().hidden_size
}

fn default_window() -> usize {
    RnnConfig::default().window
}

fn default_lr() -> f64 {
    RnnConfig::default().learning_rate
}

fn default_epochs() -> usize {
    osa_core::predictor::DEFAULT_EPOCHS
}

fn default_threshold() -> f64 {
    osa_core::predictor::DEFAULT_THRESHOLD
}

fn default_train_fraction() -> f64 {
    0.7
}

fn default_validation_fraction() -> f64 {
    0.15
}

impl PredictorSection {
    pub fn rnn_config(&self) -> RnnConfig {
        RnnConfig {
            hidden_size: self.hidden_size,
            window: self.window,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            init_weight: self.init.scale,
            init_mode: self.init.mode,
            classify_threshold: self.classify_threshold,
            feature_mode: self.feature_mode,
            batch_size: self.batch_size,
        }
    }
}

fn require<'a, T>(section: &'a Option<T>, key: &str) -> CliResult<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| CliError::config(key, "missing section"))
}

fn core_err(section: &'static str) -> impl Fn(osa_core::Error) -> CliError {
    move |e| CliError::from_core(section, e)
}

impl ScenarioConfig {
    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let config: ScenarioConfig = parse_json(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn channel(&self) -> CliResult<ChannelParams> {
        let c = require(&self.channel, "channel")?;
        ChannelParams::with_memory_check(
            c.p,
            c.q,
            c.sigma_s2,
            c.sigma_n2,
            c.require_positive_memory,
        )
        .map_err(core_err("channel"))
    }

    pub fn slot_duration(&self) -> f64 {
        self.channel
            .as_ref()
            .map_or_else(default_slot, |c| c.slot_duration)
    }

    pub fn rewards(&self) -> CliResult<RewardParams> {
        let r = require(&self.rewards, "rewards")?;
        RewardParams::new(r.r_t, r.c_c, r.c_s).map_err(core_err("rewards"))
    }

    pub fn detector(&self) -> CliResult<&DetectorSection> {
        require(&self.detector, "detector")
    }

    pub fn time_form(&self) -> CliResult<SensingTimeForm> {
        let plan = require(&self.sensing_plan, "sensing_plan")?;
        Ok(if self.literal {
            SensingTimeForm::SingleRadical
        } else {
            plan.time_form.into()
        })
    }

    pub fn plan_inputs(&self) -> CliResult<PlanInputs> {
        let plan = require(&self.sensing_plan, "sensing_plan")?;
        let form = self.time_form()?;
        let t_c = match plan.t_c {
            ControlSpec::Fixed(t) => ControlTime::Fixed(t),
            ControlSpec::Components {
                t_b1,
                t_b2,
                t_ms,
                t_sifs,
            } => ControlTime::Components {
                t_b1,
                t_b2,
                t_ms,
                t_sifs,
            },
        };
        let t_s = match plan.t_s {
            SensingSpec::Fixed(t) => SensingDuration::Fixed(t),
            SensingSpec::Targets {
                snr,
                bandwidth,
                p_d,
                p_f,
            } => SensingDuration::Targets {
                snr,
                bandwidth,
                p_d,
                p_f,
                form,
            },
        };
        Ok(PlanInputs {
            n_channels: plan.n_channels,
            m_s: plan.m_s,
            t_frame: plan.t_frame,
            t_c,
            t_s,
        })
    }

    /// Simulation scenario; the channels per user fall back to the plan `L`.
    pub fn scenario(&self) -> CliResult<Scenario> {
        let sim = require(&self.simulation, "simulation")?;
        let channels_per_user = match (sim.channels_per_user, &self.sensing_plan) {
            (Some(k), _) => k,
            (None, Some(_)) => {
                let inputs = PlanInputs {
                    n_channels: sim.n_channels,
                    m_s: sim.users,
                    ..self.plan_inputs()?
                };
                osa_core::sensing::SensingPlan::compute(&inputs)
                    .map_err(core_err("sensing_plan"))?
                    .l_channels
            }
            (None, None) => 1,
        };
        let scenario = Scenario {
            channel: self.channel()?,
            rewards: self.rewards()?,
            n_channels: sim.n_channels,
            users: sim.users,
            channels_per_user,
            horizon: sim.horizon,
            sensing: match sim.sensing {
                SensingSection::Perfect => SensingModel::Perfect,
                SensingSection::Imperfect { p_d, p_f } => SensingModel::Imperfect { p_d, p_f },
            },
            initial_state: match sim.initial_state {
                InitialStateSection::Stationary => InitialState::Stationary,
                InitialStateSection::Idle => InitialState::Idle,
                InitialStateSection::Busy => InitialState::Busy,
            },
            initial_belief: sim.initial_belief,
            slot_duration: self.slot_duration(),
        };
        scenario.validate().map_err(core_err("simulation"))?;
        Ok(scenario)
    }

    pub fn policy(&self) -> CliResult<PolicySection> {
        require(&self.policy, "policy").copied()
    }

    pub fn sweep(&self) -> CliResult<&SweepSection> {
        require(&self.sweep, "sweep")
    }

    pub fn predictor(&self) -> CliResult<&PredictorSection> {
        require(&self.predictor, "predictor")
    }

    /// Checks every present section against the library preconditions.
    pub fn validate(&self) -> CliResult<()> {
        if self.channel.is_some() {
            self.channel()?;
            let slot = self.slot_duration();
            if !(slot > 0.0 && slot.is_finite()) {
                return Err(CliError::config(
                    "channel.slot_duration",
                    "must be positive",
                ));
            }
        }
        if let Some(d) = &self.detector {
            osa_core::sensing::DetectorConfig::new(1.0, d.nb, d.u).map_err(core_err("detector"))?;
            let lambdas = d.lambdas.values();
            if lambdas.is_empty() {
                return Err(CliError::config(
                    "detector.lambdas",
                    "need at least one threshold",
                ));
            }
            if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
                return Err(CliError::config(
                    "detector.lambdas",
                    format!("thresholds must be positive, got {bad}"),
                ));
            }
        }
        if self.sensing_plan.is_some() {
            let inputs = self.plan_inputs()?;
            osa_core::sensing::SensingPlan::compute(&inputs).map_err(core_err("sensing_plan"))?;
        }
        if self.rewards.is_some() {
            self.rewards()?;
        }
        if let Some(PolicySection::Dp(DpSection { grid })) = self.policy {
            if grid < 2 {
                return Err(CliError::config(
                    "policy.dp.grid",
                    "need at least two belief points",
                ));
            }
        }
        if let Some(PolicySection::Myopic(MyopicSection { margin })) = self.policy {
            if !margin.is_finite() {
                return Err(CliError::config("policy.myopic.margin", "must be finite"));
            }
        }
        if self.simulation.is_some() {
            self.scenario()?;
        }
        if let Some(s) = &self.sweep {
            osa_core::mac::validate_densities(&s.densities, s.area_km2)
                .map_err(core_err("sweep"))?;
        }
        if let Some(p) = &self.predictor {
            p.rnn_config().validate().map_err(core_err("predictor"))?;
            let (a, b) = (p.train_fraction, p.validation_fraction);
            if !(a > 0.0 && b > 0.0 && a + b < 1.0) {
                return Err(CliError::config(
                    "predictor.train_fraction",
                    "train and validation fractions must be positive and leave room for a test split",
                ));
            }
            if let TraceSource::Synthetic { length } = p.trace {
                require(&self.channel, "channel")?;
                if length <= p.window + 3 {
                    return Err(CliError::config(
                        "predictor.trace.synthetic.length",
                        "trace too short for the window",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Warnings that do not stop a run.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let (Ok(ch), Ok(r)) = (self.channel(), self.rewards()) {
            if !r.protects_primary(&ch) {
                out.push(format!(
                    "collision cost C_c = {} is below the break-even value for this channel; \
                     transmitting blind may pay off at the primary user's expense",
                    r.c_c()
                ));
            }
        }
        out
    }
}

/// Deserializes with the dotted key path of the first error.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." {
            "<root>".to_string()
        } else {
            path
        };
        CliError::config(key, e.into_inner().to_string())
    })?;
    de.end()
        .map_err(|e| CliError::config("<root>", e.to_string()))?;
    Ok(value)
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}
