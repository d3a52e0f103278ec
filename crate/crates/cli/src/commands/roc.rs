//! Analytic and Monte-Carlo detection curves of the energy detector.

use num_complex::Complex64;
use osa_core::channel::{complex_gaussian, sample_slot_signal, ChannelParams, SlotState};
use osa_core::rng::{derive_seed, seeded};
use osa_core::sensing::{
    analytic_pd_marcum, analytic_pd_nb, analytic_pf_gamma, analytic_pf_nb, analytic_pf_nb_literal,
    detect, energy_statistic, DetectorConfig, Hypothesis,
};
use rayon::prelude::*;

use super::{core_err, RunContext};
use crate::config::DetectorForm;
use crate::error::{CliError, CliResult};
use crate::format::{fmt12, CsvText};
use crate::manifest::OutputDir;
use crate::plot::{line_chart, Chart, Series};

/// Trials per independently seeded block; block `b` uses `derive_seed(seed, b)`.
pub const BLOCK: usize = 10_000;
pub const MIN_TRIALS: usize = 1_000;
/// Extra threshold evaluated in literal mode.
pub const LITERAL_LAMBDA: f64 = 0.181;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocRow {
    pub lambda: f64,
    pub pf_analytic: f64,
    pub pd_analytic: f64,
    pub pf_empirical: f64,
    pub pd_empirical: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct RocSpec {
    pub channel: ChannelParams,
    pub form: DetectorForm,
    pub nb: usize,
    pub u: u32,
    pub lambdas: Vec<f64>,
    pub trials: usize,
    pub literal: bool,
    pub seed: u64,
}

/// One trial under each hypothesis: the detector statistic when idle and when busy.
fn trial_pair<R: rand::Rng + ?Sized>(spec: &RocSpec, rng: &mut R) -> osa_core::Result<(f64, f64)> {
    match spec.form {
        DetectorForm::Energy => {
            let idle = sample_slot_signal(SlotState::Idle, &spec.channel, spec.nb, rng)?;
            let busy = sample_slot_signal(SlotState::Busy, &spec.channel, spec.nb, rng)?;
            Ok((
                energy_statistic(&idle, true)?,
                energy_statistic(&busy, true)?,
            ))
        }
        DetectorForm::TimeBandwidth => {
            // 2u real degrees of freedom scaled to unit variance; the busy
            // hypothesis adds a constant signal of total energy r·σ_n².
            let n2 = spec.channel.sigma_n2();
            let u = spec.u as usize;
            let amp = (spec.channel.snr() * n2 / u as f64).sqrt();
            let s = Complex64::new(amp, 0.0);
            let (mut e0, mut e1) = (0.0, 0.0);
            for _ in 0..u {
                e0 += complex_gaussian(n2, rng).norm_sqr();
                e1 += (complex_gaussian(n2, rng) + s).norm_sqr();
            }
            Ok((2.0 * e0 / n2, 2.0 * e1 / n2))
        }
    }
}

fn block_counts(spec: &RocSpec, block: usize) -> osa_core::Result<(Vec<u64>, Vec<u64>)> {
    let start = block * BLOCK;
    let n = BLOCK.min(spec.trials - start);
    let mut rng = seeded(derive_seed(spec.seed, block as u64));
    let mut false_alarms = vec![0u64; spec.lambdas.len()];
    let mut detections = vec![0u64; spec.lambdas.len()];
    for _ in 0..n {
        let (y0, y1) = trial_pair(spec, &mut rng)?;
        for (i, &lambda) in spec.lambdas.iter().enumerate() {
            false_alarms[i] += u64::from(detect(y0, lambda) == Hypothesis::H1Busy);
            detections[i] += u64::from(detect(y1, lambda) == Hypothesis::H1Busy);
        }
    }
    Ok((false_alarms, detections))
}

fn analytic(spec: &RocSpec, lambda: f64) -> osa_core::Result<(f64, f64)> {
    let ch = &spec.channel;
    match spec.form {
        DetectorForm::Energy => {
            let pf = if spec.literal {
                analytic_pf_nb_literal(lambda, spec.nb, ch.sigma_s2())?
            } else {
                analytic_pf_nb(lambda, spec.nb, ch.sigma_n2())?
            };
            Ok((
                pf,
                analytic_pd_nb(lambda, spec.nb, ch.sigma_n2(), ch.sigma_s2())?,
            ))
        }
        DetectorForm::TimeBandwidth => {
            let cfg = DetectorConfig::new(lambda, 1, spec.u)?;
            Ok((
                analytic_pf_gamma(&cfg)?,
                analytic_pd_marcum(&cfg, ch.snr())?,
            ))
        }
    }
}

/// Analytic and empirical false-alarm and detection probabilities per threshold.
///
/// Blocks are independent, so the result is the same for any pool size.
pub fn roc_table(spec: &RocSpec, pool: &rayon::ThreadPool) -> CliResult<Vec<RocRow>> {
    if spec.trials < MIN_TRIALS {
        return Err(CliError::Usage(format!(
            "trials must be at least {MIN_TRIALS}, got {}",
            spec.trials
        )));
    }
    DetectorConfig::new(1.0, spec.nb, spec.u).map_err(core_err("detector"))?;
    let blocks = spec.trials.div_ceil(BLOCK);
    let per_block = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| block_counts(spec, b))
            .collect::<osa_core::Result<Vec<_>>>()
    });
    let per_block = per_block.map_err(core_err("detector"))?;
    let mut fa = vec![0u64; spec.lambdas.len()];
    let mut det = vec![0u64; spec.lambdas.len()];
    for (f, d) in per_block {
        for i in 0..fa.len() {
            fa[i] += f[i];
            det[i] += d[i];
        }
    }
    let n = spec.trials as f64;
    spec.lambdas
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let (pf, pd) = analytic(spec, lambda).map_err(core_err("detector"))?;
            Ok(RocRow {
                lambda,
                pf_analytic: pf,
                pd_analytic: pd,
                pf_empirical: fa[i] as f64 / n,
                pd_empirical: det[i] as f64 / n,
                trials: spec.trials,
            })
        })
        .collect()
}

pub fn csv(rows: &[RocRow]) -> String {
    let mut c = CsvText::with_header(&[
        "lambda",
        "pf_analytic",
        "pd_analytic",
        "pf_empirical",
        "pd_empirical",
        "trials",
    ]);
    for r in rows {
        c.row([
            fmt12(r.lambda),
            fmt12(r.pf_analytic),
            fmt12(r.pd_analytic),
            fmt12(r.pf_empirical),
            fmt12(r.pd_empirical),
            r.trials.to_string(),
        ]);
    }
    c.into_string()
}

pub fn run(ctx: &RunContext) -> CliResult<String> {
    let config = &ctx.config;
    let det = config.detector()?;
    let mut lambdas = det.lambdas.values();
    if config.literal && !lambdas.contains(&LITERAL_LAMBDA) {
        lambdas.push(LITERAL_LAMBDA);
    }
    lambdas.sort_by(f64::total_cmp);
    let spec = RocSpec {
        channel: config.channel()?,
        form: det.form,
        nb: det.nb,
        u: det.u,
        lambdas,
        trials: det.trials,
        literal: config.literal,
        seed: config.seed,
    };
    let rows = roc_table(&spec, &ctx.pool()?)?;

    let mut out = OutputDir::create(&ctx.out)?;
    out.write("roc.csv", csv(&rows).as_bytes())?;
    let chart = Chart {
        title: "Receiver operating characteristic".into(),
        x_label: "false-alarm probability".into(),
        y_label: "detection probability".into(),
        series: vec![
            Series::new(
                "analytic",
                rows.iter()
                    .map(|r| (r.pf_analytic, r.pd_analytic))
                    .collect(),
            ),
            Series::new(
                "empirical",
                rows.iter()
                    .map(|r| (r.pf_empirical, r.pd_empirical))
                    .collect(),
            ),
        ],
        y_range: Some((0.0, 1.0)),
    };
    out.write("roc.svg", line_chart(&chart).as_bytes())?;
    let manifest = out.finish("roc", config)?;

    let mut text = format!(
        "{:>12} {:>12} {:>12} {:>12} {:>12}\n",
        "lambda", "pf", "pd", "pf_mc", "pd_mc"
    );
    for r in &rows {
        text.push_str(&format!(
            "{:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}\n",
            r.lambda, r.pf_analytic, r.pd_analytic, r.pf_empirical, r.pd_empirical
        ));
    }
    text.push_str(&format!("manifest: {}\n", manifest.display()));
    Ok(text)
}
