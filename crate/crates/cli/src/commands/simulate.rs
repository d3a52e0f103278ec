//! Slot-by-slot MAC simulation.

use osa_core::channel::{OccupancyTrace, SlotState};
use osa_core::mac::{run_simulation, SimulationOutput, SimulationSummary};
use serde::Serialize;

use super::{build_policy, core_err, RunContext};
use crate::error::CliResult;
use crate::format::{fmt12, CsvText};
use crate::manifest::OutputDir;

#[derive(Debug, Clone, Serialize)]
pub struct SummaryJson {
    pub policy: String,
    pub seed: u64,
    pub horizon: usize,
    pub users: usize,
    pub n_channels: usize,
    pub channels_per_user: usize,
    pub total_reward: f64,
    pub successes: usize,
    pub throughput: f64,
    pub collisions: usize,
    pub sense_count: usize,
    pub idle_slot_channels: usize,
    pub used_slot_channels: usize,
    pub normalized_throughput: f64,
}

impl SummaryJson {
    fn new(
        policy: &str,
        seed: u64,
        n_channels: usize,
        channels_per_user: usize,
        s: &SimulationSummary,
    ) -> Self {
        SummaryJson {
            policy: policy.to_string(),
            seed,
            horizon: s.horizon,
            users: s.users,
            n_channels,
            channels_per_user,
            total_reward: s.total_reward,
            successes: s.successes,
            throughput: s.throughput,
            collisions: s.collisions,
            sense_count: s.sense_count,
            idle_slot_channels: s.idle_slot_channels,
            used_slot_channels: s.used_slot_channels,
            normalized_throughput: s.normalized_throughput,
        }
    }
}

fn state_name(s: SlotState) -> &'static str {
    if s.is_idle() {
        "idle"
    } else {
        "busy"
    }
}

pub fn records_csv(out: &SimulationOutput) -> String {
    let mut c = CsvText::with_header(&[
        "slot",
        "user",
        "channel",
        "action",
        "true_state",
        "belief",
        "reward",
        "collision",
    ]);
    for r in &out.records {
        c.row([
            r.slot.to_string(),
            r.user.to_string(),
            r.channel.to_string(),
            r.action.name().to_string(),
            state_name(r.true_state).to_string(),
            fmt12(r.belief),
            fmt12(r.reward),
            u8::from(r.collision).to_string(),
        ]);
    }
    c.into_string()
}

/// Occupancy trace as `slot,state` with state 1 = idle, 0 = busy.
pub fn trace_csv(trace: &OccupancyTrace) -> String {
    let mut c = CsvText::with_header(&["slot", "state"]);
    for (i, s) in trace.states().iter().enumerate() {
        c.row([i.to_string(), s.indicator().to_string()]);
    }
    c.into_string()
}

pub fn run(ctx: &RunContext) -> CliResult<String> {
    let config = &ctx.config;
    let scenario = config.scenario()?;
    let policy = build_policy(config, &scenario)?;
    let output = run_simulation(&scenario, &policy, config.seed).map_err(core_err("simulation"))?;

    let policy_name = serde_json::to_value(config.policy()?)
        .ok()
        .and_then(|v| match v {
            serde_json::Value::String(s) => Some(s),
            serde_json::Value::Object(m) => m.keys().next().cloned(),
            _ => None,
        })
        .unwrap_or_default();
    let summary = SummaryJson::new(
        &policy_name,
        config.seed,
        scenario.n_channels,
        scenario.channels_per_user,
        &output.summary,
    );

    let mut out = OutputDir::create(&ctx.out)?;
    out.write("simulation.csv", records_csv(&output).as_bytes())?;
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    out.write("summary.json", json.as_bytes())?;
    for (c, trace) in output.traces.iter().enumerate() {
        out.write(
            &format!("trace_channel{c}.csv"),
            trace_csv(trace).as_bytes(),
        )?;
    }
    let manifest = out.finish("simulate", config)?;

    Ok(format!(
        "policy {policy_name}: total reward {}, successes {}, collisions {}, normalized throughput {}\nmanifest: {}\n",
        fmt12(summary.total_reward),
        summary.successes,
        summary.collisions,
        fmt12(summary.normalized_throughput),
        manifest.display()
    ))
}
