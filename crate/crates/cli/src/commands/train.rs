//! Predictor training with per-epoch RMSE log and held-out metrics.
//!
//! The windows of the trace are split in time order into training,
//! validation and test sets. Random streams: stream 0 draws the synthetic
//! trace, stream 1 drives initialization and shuffling, stream 2 draws the
//! synthetic features.

use std::path::Path;

use osa_core::channel::{generate_trace, stationary_idle_prob, OccupancyTrace, SlotState};
use osa_core::metrics::{mse, nrmse, psnr_db, rmse, snr_db, SignalPair};
use osa_core::predictor::{
    evaluate, make_samples, synthetic_features, train, Evaluation, RnnModel, Sample,
};
use osa_core::rng::{derive_seed, seeded};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{core_err, RunContext};
use crate::config::TraceSource;
use crate::error::{CliError, CliResult};
use crate::format::{fmt12, fmt_exact, CsvText};
use crate::manifest::OutputDir;
use crate::plot::{line_chart, Chart, Series};

/// Peak value for PSNR: the span of the ±1 encoding.
pub const PSNR_MAX: f64 = 2.0;

/// Held-out metrics of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMetrics {
    pub rmse_train: f64,
    pub rmse_val: f64,
    pub rmse_test: f64,
    /// Test-set mean squared error.
    pub mse: f64,
    /// Test-set PSNR in dB with peak value [`PSNR_MAX`].
    pub psnr_db: f64,
    /// Test-set mean target power over MSE, in dB.
    pub snr_db: f64,
    /// Test-set RMSE over the observed target range; absent for a constant test set.
    pub nrmse: Option<f64>,
    pub hit_rate_test: f64,
    pub classify_threshold: f64,
    /// Validation RMSE of the model before training.
    pub baseline_rmse_val: f64,
    /// `1 - rmse_val / baseline_rmse_val`.
    pub improvement: f64,
    pub epochs: usize,
    pub train_windows: usize,
    pub validation_windows: usize,
    pub test_windows: usize,
}

/// Test-set metrics computed from targets and predictions alone.
pub fn test_metrics(
    targets: &[f64],
    predictions: &[f64],
) -> CliResult<(f64, f64, f64, Option<f64>)> {
    let pair = SignalPair::new(targets, predictions).map_err(core_err("predictor"))?;
    let m = mse(&pair);
    let signal = targets.iter().map(|t| t * t).sum::<f64>() / targets.len() as f64;
    let psnr = psnr_db(PSNR_MAX, m).map_err(core_err("predictor"))?;
    let snr = if m == 0.0 {
        f64::INFINITY
    } else {
        snr_db(signal, m).map_err(core_err("predictor"))?
    };
    let (lo, hi) = targets
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| {
            (a.min(t), b.max(t))
        });
    let n = nrmse(&pair, lo, hi).ok();
    Ok((m, psnr, snr, n))
}

/// RMSE of one split, from targets and predictions.
pub fn split_rmse(targets: &[f64], predictions: &[f64]) -> CliResult<f64> {
    let pair = SignalPair::new(targets, predictions).map_err(core_err("predictor"))?;
    Ok(rmse(&pair))
}

/// Reads a trace CSV: a `state` column (1 = idle, 0 = busy) or a `symbol`
/// column (+1 = busy, -1 = idle).
pub fn read_trace_csv(path: &Path, slot_duration: f64) -> CliResult<OccupancyTrace> {
    let input_err = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => input_err(format!("{other:?}")),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| input_err(e.to_string()))?
        .clone();
    let (column, symbols) = if let Some(i) = headers.iter().position(|h| h == "state") {
        (i, false)
    } else if let Some(i) = headers.iter().position(|h| h == "symbol") {
        (i, true)
    } else {
        return Err(input_err("need a `state` or `symbol` column".into()));
    };
    let mut states = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| input_err(e.to_string()))?;
        let cell = record.get(column).unwrap_or("").trim();
        let value: f64 = cell
            .parse()
            .map_err(|_| input_err(format!("row {}: `{cell}` is not a number", line + 1)))?;
        let state = if symbols {
            SlotState::from_symbol(value)
        } else if value == 0.0 || value == 1.0 {
            SlotState::from_indicator(value as u8)
        } else {
            None
        };
        states.push(
            state
                .ok_or_else(|| input_err(format!("row {}: bad state value `{cell}`", line + 1)))?,
        );
    }
    OccupancyTrace::new(states, slot_duration).map_err(|e| input_err(e.to_string()))
}

fn load_trace(ctx: &RunContext) -> CliResult<OccupancyTrace> {
    let config = &ctx.config;
    match &config.predictor()?.trace {
        TraceSource::Synthetic { length } => {
            let channel = config.channel()?;
            let mut rng = seeded(derive_seed(config.seed, 0));
            let pi = stationary_idle_prob(&channel).map_err(core_err("channel"))?;
            let initial = if rng.random::<f64>() < pi {
                SlotState::Idle
            } else {
                SlotState::Busy
            };
            generate_trace(&channel, *length, initial, config.slot_duration(), &mut rng)
                .map_err(core_err("predictor.trace"))
        }
        TraceSource::Csv { path } => read_trace_csv(path, config.slot_duration()),
    }
}

/// Contiguous split of the windows by the configured fractions.
fn split(
    samples: Vec<Sample>,
    train_fraction: f64,
    validation_fraction: f64,
) -> CliResult<[Vec<Sample>; 3]> {
    let n = samples.len();
    let n_train = (n as f64 * train_fraction).floor() as usize;
    let n_val = (n as f64 * validation_fraction).floor() as usize;
    if n_train == 0 || n_val == 0 || n_train + n_val >= n {
        return Err(CliError::config(
            "predictor.trace",
            format!("{n} windows are too few for the train/validation/test split"),
        ));
    }
    let mut rest = samples;
    let test = rest.split_off(n_train + n_val);
    let val = rest.split_off(n_train);
    Ok([rest, val, test])
}

#[derive(Serialize)]
struct ModelJson {
    input_size: usize,
    hidden_size: usize,
    window: usize,
    w_xh: Vec<f64>,
    w_hh: Vec<f64>,
    w_hy: Vec<f64>,
    b_h: Vec<f64>,
    b_y: f64,
}

fn model_json(model: &RnnModel) -> String {
    let params = model.parameters();
    let [w_xh, w_hh, w_hy, b_h, b_y] = model.group_offsets().map(|(_, r)| params[r].to_vec());
    let json = ModelJson {
        input_size: model.input_size(),
        hidden_size: model.hidden_size(),
        window: model.window(),
        w_xh,
        w_hh,
        w_hy,
        b_h,
        b_y: b_y[0],
    };
    let mut text = serde_json::to_string_pretty(&json).expect("model serializes");
    text.push('\n');
    text
}

fn predictions_csv(splits: [(&str, &Evaluation); 3]) -> String {
    let mut c = CsvText::with_header(&["split", "index", "target", "prediction"]);
    for (name, eval) in splits {
        for (i, (t, y)) in eval.targets.iter().zip(&eval.predictions).enumerate() {
            c.row([
                name.to_string(),
                i.to_string(),
                fmt_exact(*t),
                fmt_exact(*y),
            ]);
        }
    }
    c.into_string()
}

pub fn run(ctx: &RunContext) -> CliResult<String> {
    let config = &ctx.config;
    let section = config.predictor()?;
    let rnn = section.rnn_config();
    let trace = load_trace(ctx)?;
    let series = trace.encode();
    let features = if rnn.feature_mode {
        Some(synthetic_features(
            series.len(),
            &mut seeded(derive_seed(config.seed, 2)),
        ))
    } else {
        None
    };
    let samples =
        make_samples(&series, features.as_deref(), rnn.window).map_err(core_err("predictor"))?;
    let [train_set, val_set, test_set] =
        split(samples, section.train_fraction, section.validation_fraction)?;

    let mut rng = seeded(derive_seed(config.seed, 1));
    let (model, report) =
        train(&rnn, &train_set, &val_set, &mut rng).map_err(core_err("predictor"))?;
    let eval_train = evaluate(&model, &train_set).map_err(core_err("predictor"))?;
    let eval_val = evaluate(&model, &val_set).map_err(core_err("predictor"))?;
    let eval_test = evaluate(&model, &test_set).map_err(core_err("predictor"))?;
    if !model.is_finite() {
        return Err(CliError::Numeric("trained weights are not finite".into()));
    }

    let (mse_test, psnr, snr, nrmse_test) =
        test_metrics(&eval_test.targets, &eval_test.predictions)?;
    let metrics = TrainMetrics {
        rmse_train: eval_train.rmse,
        rmse_val: eval_val.rmse,
        rmse_test: eval_test.rmse,
        mse: mse_test,
        psnr_db: psnr,
        snr_db: snr,
        nrmse: nrmse_test,
        hit_rate_test: eval_test.hit_rate(rnn.classify_threshold),
        classify_threshold: rnn.classify_threshold,
        baseline_rmse_val: report.initial_val_rmse,
        improvement: 1.0 - eval_val.rmse / report.initial_val_rmse,
        epochs: rnn.epochs,
        train_windows: train_set.len(),
        validation_windows: val_set.len(),
        test_windows: test_set.len(),
    };

    let mut log = CsvText::with_header(&["epoch", "rmse_train", "rmse_val"]);
    for (e, (t, v)) in report.train_rmse.iter().zip(&report.val_rmse).enumerate() {
        log.row([(e + 1).to_string(), fmt12(*t), fmt12(*v)]);
    }
    let mut trace_csv = CsvText::with_header(&["slot", "state"]);
    for (i, s) in trace.states().iter().enumerate() {
        trace_csv.row([i.to_string(), s.indicator().to_string()]);
    }

    let mut out = OutputDir::create(&ctx.out)?;
    out.write("model.bin", &model.to_bytes())?;
    out.write("model.json", model_json(&model).as_bytes())?;
    out.write("training_log.csv", log.into_string().as_bytes())?;
    out.write(
        "predictions.csv",
        predictions_csv([
            ("train", &eval_train),
            ("validation", &eval_val),
            ("test", &eval_test),
        ])
        .as_bytes(),
    )?;
    out.write("trace.csv", trace_csv.into_string().as_bytes())?;
    let mut json = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
    json.push('\n');
    out.write("metrics.json", json.as_bytes())?;
    let epochs = |v: &[f64]| {
        v.iter()
            .enumerate()
            .map(|(e, &r)| ((e + 1) as f64, r))
            .collect()
    };
    let chart = Chart {
        title: "Training and validation RMSE".into(),
        x_label: "epoch".into(),
        y_label: "RMSE".into(),
        series: vec![
            Series::new("training", epochs(&report.train_rmse)),
            Series::new("validation", epochs(&report.val_rmse)),
        ],
        y_range: None,
    };
    out.write("training.svg", line_chart(&chart).as_bytes())?;
    let manifest = out.finish("train", config)?;

    Ok(format!(
        "RMSE train {} val {} test {} (untrained val {})\nMSE {}  PSNR {} dB  SNR {} dB  hit rate {}\nmanifest: {}\n",
        fmt12(metrics.rmse_train),
        fmt12(metrics.rmse_val),
        fmt12(metrics.rmse_test),
        fmt12(metrics.baseline_rmse_val),
        fmt12(metrics.mse),
        fmt12(metrics.psnr_db),
        fmt12(metrics.snr_db),
        fmt12(metrics.hit_rate_test),
        manifest.display()
    ))
}
