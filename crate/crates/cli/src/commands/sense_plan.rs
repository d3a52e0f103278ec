//! Sensing time, control time and channels per user for one frame.

use osa_core::sensing::SensingPlan;

use super::{core_err, RunContext};
use crate::error::CliResult;
use crate::format::{fmt12, CsvText};
use crate::manifest::OutputDir;

pub fn run(ctx: &RunContext) -> CliResult<String> {
    let config = &ctx.config;
    let inputs = config.plan_inputs()?;
    let plan = SensingPlan::compute(&inputs).map_err(core_err("sensing_plan"))?;

    let mut c = CsvText::with_header(&["n_channels", "m_s", "t_frame", "t_c", "t_s", "l_channels"]);
    c.row([
        inputs.n_channels.to_string(),
        inputs.m_s.to_string(),
        fmt12(inputs.t_frame),
        fmt12(plan.t_c),
        fmt12(plan.t_s),
        plan.l_channels.to_string(),
    ]);
    let mut out = OutputDir::create(&ctx.out)?;
    out.write("sense_plan.csv", c.into_string().as_bytes())?;
    let manifest = out.finish("sense-plan", config)?;

    Ok(format!(
        "{:>10} {:>6} {:>14} {:>14} {:>14} {:>4}\n{:>10} {:>6} {:>14} {:>14} {:>14} {:>4}\nmanifest: {}\n",
        "N",
        "M_s",
        "T (s)",
        "T_c (s)",
        "t_s (s)",
        "L",
        inputs.n_channels,
        inputs.m_s,
        fmt12(inputs.t_frame),
        fmt12(plan.t_c),
        fmt12(plan.t_s),
        plan.l_channels,
        manifest.display()
    ))
}
