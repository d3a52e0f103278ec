//! Normalized throughput against secondary-user density.

use osa_core::mac::{sweep_point, validate_densities, SweepRow};
use rayon::prelude::*;

use super::{build_policy, core_err, RunContext};
use crate::error::CliResult;
use crate::format::{fmt12, CsvText};
use crate::manifest::OutputDir;
use crate::plot::{line_chart, Chart, Series};

pub fn csv(rows: &[SweepRow]) -> String {
    let mut c = CsvText::with_header(&[
        "density",
        "users",
        "channels_per_user",
        "normalized_throughput",
        "per_user_throughput",
    ]);
    for r in rows {
        c.row([
            fmt12(r.density),
            r.users.to_string(),
            r.channels_per_user.to_string(),
            fmt12(r.normalized_throughput),
            fmt12(r.per_user_throughput),
        ]);
    }
    c.into_string()
}

/// Every density point is independent; they run in parallel on the pool.
pub fn sweep_rows(ctx: &RunContext) -> CliResult<Vec<SweepRow>> {
    let config = &ctx.config;
    let sweep = config.sweep()?;
    validate_densities(&sweep.densities, sweep.area_km2).map_err(core_err("sweep"))?;
    let base = config.scenario()?;
    let policy = build_policy(config, &base)?;
    let plan = config.plan_inputs()?;
    let rows = ctx.pool()?.install(|| {
        sweep
            .densities
            .par_iter()
            .map(|&d| sweep_point(&base, &policy, &plan, d, sweep.area_km2, config.seed))
            .collect::<osa_core::Result<Vec<_>>>()
    });
    rows.map_err(core_err("sweep"))
}

pub fn run(ctx: &RunContext) -> CliResult<String> {
    let rows = sweep_rows(ctx)?;
    let mut out = OutputDir::create(&ctx.out)?;
    out.write("sweep.csv", csv(&rows).as_bytes())?;
    let chart = Chart {
        title: "Normalized throughput against secondary-user density".into(),
        x_label: "average secondary-user density (per km²)".into(),
        y_label: "normalized throughput".into(),
        series: vec![
            Series::new(
                "total",
                rows.iter()
                    .map(|r| (r.density, r.normalized_throughput))
                    .collect(),
            ),
            Series::new(
                "per user",
                rows.iter()
                    .map(|r| (r.density, r.per_user_throughput))
                    .collect(),
            ),
        ],
        y_range: Some((0.0, 1.0)),
    };
    out.write("sweep.svg", line_chart(&chart).as_bytes())?;
    let manifest = out.finish("sweep", &ctx.config)?;

    let mut text = format!(
        "{:>10} {:>6} {:>4} {:>12} {:>12}\n",
        "density", "users", "L", "total", "per_user"
    );
    for r in &rows {
        text.push_str(&format!(
            "{:>10} {:>6} {:>4} {:>12.6} {:>12.6}\n",
            fmt12(r.density),
            r.users,
            r.channels_per_user,
            r.normalized_throughput,
            r.per_user_throughput
        ));
    }
    text.push_str(&format!("manifest: {}\n", manifest.display()));
    Ok(text)
}
