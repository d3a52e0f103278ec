//! Recurrent next-slot occupancy predictor.
//!
//! A single-hidden-layer Elman network reads a window of the ±1 occupancy
//! series (+1 busy) and emits a value in (−1, 1):
//!
//! ```text
//! h_t = tanh(W_xh x_t + W_hh h_{t-1} + b_h),   h_0 = 0
//! y   = tanh(w_hy · h_T + b_y)
//! ```
//!
//! Training minimizes `½ (y − target)²` averaged over mini-batches of
//! sliding windows, with gradients from backpropagation through the window
//! (truncated BPTT). The slot is predicted busy when `y` exceeds the
//! classification threshold.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::{OccupancyTrace, SlotState};
use crate::error::{invalid, Error, Result};
use crate::metrics::{mse, rmse, SignalPair};

/// Default busy/idle decision threshold on the network output.
pub const DEFAULT_THRESHOLD: f64 = 0.181;
/// Default number of training epochs.
pub const DEFAULT_EPOCHS: usize = 400;
/// Default initial weight scale.
pub const DEFAULT_INIT_WEIGHT: f64 = 0.5;

const FEATURES: usize = 3;

/// ±1 series of a trace (+1 busy, −1 idle).
pub fn encode_series(trace: &OccupancyTrace) -> Vec<f64> {
    trace.encode()
}

/// Weight initialization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Weights uniform in `[-init_weight, init_weight]`.
    #[default]
    Uniform,
    /// Every weight equal to `init_weight`.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RnnConfig {
    pub hidden_size: usize,
    pub window: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub init_weight: f64,
    pub init_mode: InitMode,
    pub classify_threshold: f64,
    /// Append exogenous [`FeatureVector`]s to every timestep.
    pub feature_mode: bool,
    /// Windows per gradient step; 0 means the whole training set.
    pub batch_size: usize,
}

impl Default for RnnConfig {
    fn default() -> Self {
        RnnConfig {
            hidden_size: 8,
            window: 10,
            learning_rate: 0.05,
            epochs: DEFAULT_EPOCHS,
            init_weight: DEFAULT_INIT_WEIGHT,
            init_mode: InitMode::Uniform,
            classify_threshold: DEFAULT_THRESHOLD,
            feature_mode: false,
            batch_size: 1,
        }
    }
}

impl RnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_size == 0 {
            return Err(invalid("hidden_size", "must be at least 1"));
        }
        if self.window == 0 {
            return Err(invalid("window", "must be at least 1"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(invalid("learning_rate", "must be finite and nonnegative"));
        }
        if self.epochs == 0 {
            return Err(invalid("epochs", "must be at least 1"));
        }
        if !(self.init_weight >= 0.0 && self.init_weight.is_finite()) {
            return Err(invalid("init_weight", "must be finite and nonnegative"));
        }
        if !self.classify_threshold.is_finite() {
            return Err(invalid("classify_threshold", "must be finite"));
        }
        Ok(())
    }

    pub fn input_size(&self) -> usize {
        if self.feature_mode {
            1 + FEATURES
        } else {
            1
        }
    }
}

/// Exogenous per-slot inputs, each normalized to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub channel_capacity: f64,
    pub qualitative_efficiency: f64,
    pub base_station_distance: f64,
}

impl FeatureVector {
    pub fn new(
        channel_capacity: f64,
        qualitative_efficiency: f64,
        base_station_distance: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("channel_capacity", channel_capacity),
            ("qualitative_efficiency", qualitative_efficiency),
            ("base_station_distance", base_station_distance),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(name, "normalized feature must lie in [0, 1]"));
            }
        }
        Ok(FeatureVector {
            channel_capacity,
            qualitative_efficiency,
            base_station_distance,
        })
    }

    fn as_array(&self) -> [f64; FEATURES] {
        [
            self.channel_capacity,
            self.qualitative_efficiency,
            self.base_station_distance,
        ]
    }
}

/// Synthetic features for `len` slots: capacity and efficiency are uniform
/// draws, the base-station distance is one draw held for the whole series.
/// They carry no information about occupancy.
pub fn synthetic_features<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<FeatureVector> {
    let distance: f64 = rng.random();
    (0..len)
        .map(|_| FeatureVector {
            channel_capacity: rng.random(),
            qualitative_efficiency: rng.random(),
            base_station_distance: distance,
        })
        .collect()
}

/// One training example: a flattened `window × input_size` input and the
/// next-slot target.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub inputs: Vec<f64>,
    pub target: f64,
}

/// Sliding windows over `series`: inputs `series[i..i + window]` (with the
/// matching features appended per step) and target `series[i + window]`.
pub fn make_samples(
    series: &[f64],
    features: Option<&[FeatureVector]>,
    window: usize,
) -> Result<Vec<Sample>> {
    if window == 0 {
        return Err(invalid("window", "must be at least 1"));
    }
    if series.len() <= window {
        return Err(invalid("series", "must be longer than the window"));
    }
    if let Some(f) = features {
        if f.len() != series.len() {
            return Err(Error::LengthMismatch {
                left: series.len(),
                right: f.len(),
            });
        }
    }
    let step = if features.is_some() { 1 + FEATURES } else { 1 };
    Ok((0..series.len() - window)
        .map(|i| {
            let mut inputs = Vec::with_capacity(window * step);
            for t in i..i + window {
                inputs.push(series[t]);
                if let Some(f) = features {
                    inputs.extend_from_slice(&f[t].as_array());
                }
            }
            Sample {
                inputs,
                target: series[i + window],
            }
        })
        .collect())
}

/// Elman network weights. Matrices are row-major with one row per hidden unit.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnModel {
    input_size: usize,
    hidden_size: usize,
    window: usize,
    w_xh: Vec<f64>,
    w_hh: Vec<f64>,
    w_hy: Vec<f64>,
    b_h: Vec<f64>,
    b_y: f64,
}

/// Gradients laid out like [`RnnModel::parameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub Vec<f64>);

impl RnnModel {
    pub fn zeros(input_size: usize, hidden_size: usize, window: usize) -> Result<Self> {
        if input_size == 0 || hidden_size == 0 || window == 0 {
            return Err(invalid(
                "dimensions",
                "input, hidden and window sizes must be positive",
            ));
        }
        Ok(RnnModel {
            input_size,
            hidden_size,
            window,
            w_xh: vec![0.0; hidden_size * input_size],
            w_hh: vec![0.0; hidden_size * hidden_size],
            w_hy: vec![0.0; hidden_size],
            b_h: vec![0.0; hidden_size],
            b_y: 0.0,
        })
    }

    /// Initial model for `config`; biases start at zero.
    pub fn init<R: Rng + ?Sized>(config: &RnnConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let mut model = Self::zeros(config.input_size(), config.hidden_size, config.window)?;
        let scale = config.init_weight;
        let mut draw = || match config.init_mode {
            InitMode::Uniform if scale > 0.0 => rng.random_range(-scale..=scale),
            InitMode::Uniform => 0.0,
            InitMode::Constant => scale,
        };
        for w in model
            .w_xh
            .iter_mut()
            .chain(model.w_hh.iter_mut())
            .chain(model.w_hy.iter_mut())
        {
            *w = draw();
        }
        Ok(model)
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn parameter_count(&self) -> usize {
        self.w_xh.len() + self.w_hh.len() + self.w_hy.len() + self.b_h.len() + 1
    }

    /// Flattened parameters in the order `W_xh, W_hh, w_hy, b_h, b_y`.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        out.extend_from_slice(&self.w_xh);
        out.extend_from_slice(&self.w_hh);
        out.extend_from_slice(&self.w_hy);
        out.extend_from_slice(&self.b_h);
        out.push(self.b_y);
        out
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(Error::LengthMismatch {
                left: params.len(),
                right: self.parameter_count(),
            });
        }
        let mut rest = params;
        for dst in [
            &mut self.w_xh,
            &mut self.w_hh,
            &mut self.w_hy,
            &mut self.b_h,
        ] {
            let (head, tail) = rest.split_at(dst.len());
            dst.copy_from_slice(head);
            rest = tail;
        }
        self.b_y = rest[0];
        Ok(())
    }

    /// Start offsets of the parameter groups within [`RnnModel::parameters`].
    pub fn group_offsets(&self) -> [(&'static str, core::ops::Range<usize>); 5] {
        let a = self.w_xh.len();
        let b = a + self.w_hh.len();
        let c = b + self.w_hy.len();
        let d = c + self.b_h.len();
        [
            ("w_xh", 0..a),
            ("w_hh", a..b),
            ("w_hy", b..c),
            ("b_h", c..d),
            ("b_y", d..d + 1),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.parameters().iter().all(|w| w.is_finite())
    }

    fn check_inputs(&self, inputs: &[f64]) -> Result<()> {
        let expected = self.window * self.input_size;
        if inputs.len() != expected {
            return Err(Error::LengthMismatch {
                left: inputs.len(),
                right: expected,
            });
        }
        Ok(())
    }

    // Hidden states h_1..h_T stacked row by row, plus the output.
    fn run(&self, inputs: &[f64]) -> (Vec<f64>, f64) {
        let (n, d) = (self.hidden_size, self.input_size);
        let mut states = vec![0.0; self.window * n];
        let mut prev = vec![0.0; n];
        for t in 0..self.window {
            let x = &inputs[t * d..(t + 1) * d];
            let h = &mut states[t * n..(t + 1) * n];
            for j in 0..n {
                let mut a = self.b_h[j];
                let wx = &self.w_xh[j * d..(j + 1) * d];
                for k in 0..d {
                    a += wx[k] * x[k];
                }
                let wh = &self.w_hh[j * n..(j + 1) * n];
                for k in 0..n {
                    a += wh[k] * prev[k];
                }
                h[j] = libm::tanh(a);
            }
            prev.copy_from_slice(h);
        }
        let mut z = self.b_y;
        for j in 0..n {
            z += self.w_hy[j] * prev[j];
        }
        (states, libm::tanh(z))
    }

    /// Network output for a flattened input window.
    pub fn forward(&self, inputs: &[f64]) -> Result<f64> {
        self.check_inputs(inputs)?;
        Ok(self.run(inputs).1)
    }

    /// Output for a ±1 history window plus optional per-step features.
    pub fn forward_window(
        &self,
        history: &[f64],
        features: Option<&[FeatureVector]>,
    ) -> Result<f64> {
        let wants_features = self.input_size == 1 + FEATURES;
        if history.len() != self.window {
            return Err(Error::LengthMismatch {
                left: history.len(),
                right: self.window,
            });
        }
        let mut inputs = Vec::with_capacity(self.window * self.input_size);
        match (features, wants_features) {
            (Some(f), true) if f.len() == history.len() => {
                for (x, fv) in history.iter().zip(f) {
                    inputs.push(*x);
                    inputs.extend_from_slice(&fv.as_array());
                }
            }
            (None, false) => inputs.extend_from_slice(history),
            _ => return Err(invalid("features", "feature inputs do not match the model")),
        }
        self.forward(&inputs)
    }

    /// Adds the gradient of `½ (y − target)²` for one sample to `grad`, and
    /// returns the output `y`.
    fn accumulate_gradient(&self, sample: &Sample, grad: &mut [f64]) -> f64 {
        let (n, d) = (self.hidden_size, self.input_size);
        let (states, y) = self.run(&sample.inputs);
        let [(_, r_xh), (_, r_hh), (_, r_hy), (_, r_bh), (_, r_by)] = self.group_offsets();

        let dz = (y - sample.target) * (1.0 - y * y);
        let last = &states[(self.window - 1) * n..];
        for j in 0..n {
            grad[r_hy.start + j] += dz * last[j];
        }
        grad[r_by.start] += dz;

        let mut dh: Vec<f64> = self.w_hy.iter().map(|w| w * dz).collect();
        let mut da = vec![0.0; n];
        for t in (0..self.window).rev() {
            let h = &states[t * n..(t + 1) * n];
            let x = &sample.inputs[t * d..(t + 1) * d];
            for j in 0..n {
                da[j] = dh[j] * (1.0 - h[j] * h[j]);
            }
            for j in 0..n {
                grad[r_bh.start + j] += da[j];
                for k in 0..d {
                    grad[r_xh.start + j * d + k] += da[j] * x[k];
                }
            }
            if t > 0 {
                let prev = &states[(t - 1) * n..t * n];
                for j in 0..n {
                    for k in 0..n {
                        grad[r_hh.start + j * n + k] += da[j] * prev[k];
                    }
                }
            }
            for k in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += self.w_hh[j * n + k] * da[j];
                }
                dh[k] = s;
            }
        }
        y
    }

    /// Gradient of `Σ_batch ½ (y − target)²` with respect to every parameter.
    pub fn gradient(&self, batch: &[Sample]) -> Result<Gradients> {
        let mut grad = vec![0.0; self.parameter_count()];
        let mut scratch = vec![0.0; self.parameter_count()];
        for s in batch {
            self.check_inputs(&s.inputs)?;
            self.sample_gradient(s, &mut grad, &mut scratch);
        }
        Ok(Gradients(grad))
    }

    // Per-sample gradient added to `grad` in one pass, so the batch gradient
    // is an elementwise sum of per-sample gradients.
    fn sample_gradient(&self, sample: &Sample, grad: &mut [f64], scratch: &mut [f64]) {
        scratch.iter_mut().for_each(|g| *g = 0.0);
        self.accumulate_gradient(sample, scratch);
        for (g, s) in grad.iter_mut().zip(scratch.iter()) {
            *g += s;
        }
    }

    /// `Σ_batch ½ (y − target)²`.
    pub fn loss(&self, batch: &[Sample]) -> Result<f64> {
        let mut total = 0.0;
        for s in batch {
            let y = self.forward(&s.inputs)?;
            total += 0.5 * (y - s.target) * (y - s.target);
        }
        Ok(total)
    }

    fn apply(&mut self, grad: &[f64], step: f64) {
        let mut params = self.parameters();
        for (w, g) in params.iter_mut().zip(grad) {
            *w -= step * g;
        }
        self.set_parameters(&params)
            .expect("gradient length matches model");
    }

    const MAGIC: [u8; 4] = *b"ORNN";
    const VERSION: u32 = 1;

    /// Binary model file: magic `ORNN`, then little-endian `u32` version,
    /// input size, hidden size and window, a `u64` parameter count, and the
    /// parameters as `f64` little-endian in [`RnnModel::parameters`] order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let params = self.parameters();
        let mut out = Vec::with_capacity(28 + 8 * params.len());
        out.extend_from_slice(&Self::MAGIC);
        for v in [
            Self::VERSION,
            self.input_size as u32,
            self.hidden_size as u32,
            self.window as u32,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(params.len() as u64).to_le_bytes());
        for p in params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = bytes
            .get(..28)
            .ok_or(Error::MalformedModel("truncated header"))?;
        if header[..4] != Self::MAGIC {
            return Err(Error::MalformedModel("bad magic"));
        }
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        if word(4) != Self::VERSION {
            return Err(Error::MalformedModel("unsupported version"));
        }
        let mut model = Self::zeros(word(8) as usize, word(12) as usize, word(16) as usize)
            .map_err(|_| Error::MalformedModel("zero dimension"))?;
        let count = u64::from_le_bytes(header[20..28].try_into().unwrap()) as usize;
        if count != model.parameter_count() {
            return Err(Error::MalformedModel(
                "parameter count does not match dimensions",
            ));
        }
        let body = &bytes[28..];
        if body.len() != 8 * count {
            return Err(Error::MalformedModel(
                "parameter block has the wrong length",
            ));
        }
        let params: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        model.set_parameters(&params)?;
        Ok(model)
    }
}

/// Busy when the output exceeds `threshold`, otherwise idle.
pub fn classify(output: f64, threshold: f64) -> SlotState {
    if output > threshold {
        SlotState::Busy
    } else {
        SlotState::Idle
    }
}

/// Predicted state of the slot following `history`.
pub fn predict_next(model: &RnnModel, history: &[f64], threshold: f64) -> Result<SlotState> {
    Ok(classify(model.forward_window(history, None)?, threshold))
}

/// Model outputs against targets over a set of windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub predictions: Vec<f64>,
    pub targets: Vec<f64>,
    pub rmse: f64,
    pub mse: f64,
}

impl Evaluation {
    /// Fraction of windows whose thresholded prediction matches the target.
    pub fn hit_rate(&self, threshold: f64) -> f64 {
        let hits = self
            .predictions
            .iter()
            .zip(&self.targets)
            .filter(|(&y, &t)| classify(y, threshold).symbol() == t)
            .count();
        hits as f64 / self.targets.len() as f64
    }
}

pub fn evaluate(model: &RnnModel, samples: &[Sample]) -> Result<Evaluation> {
    let predictions = samples
        .iter()
        .map(|s| model.forward(&s.inputs))
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<f64> = samples.iter().map(|s| s.target).collect();
    let pair = SignalPair::new(&targets, &predictions)?;
    let (rmse, mse) = (rmse(&pair), mse(&pair));
    Ok(Evaluation {
        predictions,
        targets,
        rmse,
        mse,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    /// Training-set RMSE after each epoch.
    pub train_rmse: Vec<f64>,
    /// Validation-set RMSE after each epoch.
    pub val_rmse: Vec<f64>,
    /// Validation RMSE of the model before any update.
    pub initial_val_rmse: f64,
}

/// Trains a fresh model on the windows of `train`, tracking RMSE on both
/// sets after every epoch. Mini-batch order is reshuffled per epoch from `rng`.
pub fn train<R: Rng + ?Sized>(
    config: &RnnConfig,
    train: &[Sample],
    validation: &[Sample],
    rng: &mut R,
) -> Result<(RnnModel, TrainingReport)> {
    let model = RnnModel::init(config, rng)?;
    train_from(model, config, train, validation, rng)
}

/// Like [`train`] but continues from an existing model.
pub fn train_from<R: Rng + ?Sized>(
    mut model: RnnModel,
    config: &RnnConfig,
    train: &[Sample],
    validation: &[Sample],
    rng: &mut R,
) -> Result<(RnnModel, TrainingReport)> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("training samples"));
    }
    if validation.is_empty() {
        return Err(Error::Empty("validation samples"));
    }
    for s in train.iter().chain(validation) {
        model.check_inputs(&s.inputs)?;
    }
    let batch = if config.batch_size == 0 {
        train.len()
    } else {
        config.batch_size.min(train.len())
    };
    let initial_val_rmse = evaluate(&model, validation)?.rmse;
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut grad = vec![0.0; model.parameter_count()];
    let mut scratch = vec![0.0; model.parameter_count()];
    let mut report = TrainingReport {
        train_rmse: Vec::with_capacity(config.epochs),
        val_rmse: Vec::with_capacity(config.epochs),
        initial_val_rmse,
    };
    for epoch in 1..=config.epochs {
        if batch < train.len() {
            order.shuffle(rng);
        }
        for chunk in order.chunks(batch) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in chunk {
                model.sample_gradient(&train[i], &mut grad, &mut scratch);
            }
            if config.learning_rate > 0.0 {
                model.apply(&grad, config.learning_rate / chunk.len() as f64);
            }
        }
        let train_rmse = evaluate(&model, train)?.rmse;
        let val_rmse = evaluate(&model, validation)?.rmse;
        if !model.is_finite() || !train_rmse.is_finite() || !val_rmse.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        report.train_rmse.push(train_rmse);
        report.val_rmse.push(val_rmse);
    }
    Ok((model, report))
}

/// Outcome of comparing analytic gradients with central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    /// Largest `|analytic − numeric| / max(|analytic|, |numeric|, 1e-6)`.
    pub max_relative_error: f64,
    /// Largest absolute deviation within each parameter group.
    pub max_abs_error: [(&'static str, f64); 5],
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
}

/// Finite-difference step used by [`gradient_check`].
pub const FD_STEP: f64 = 1e-5;

/// Checks [`RnnModel::gradient`] against central differences of
/// [`RnnModel::loss`] on every parameter.
pub fn gradient_check(model: &RnnModel, batch: &[Sample]) -> Result<GradientCheck> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    let analytic = model.gradient(batch)?.0;
    let base = model.parameters();
    let mut probe = model.clone();
    let mut params = base.clone();
    let mut numeric = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        params[i] = base[i] + FD_STEP;
        probe.set_parameters(&params)?;
        let up = probe.loss(batch)?;
        params[i] = base[i] - FD_STEP;
        probe.set_parameters(&params)?;
        let down = probe.loss(batch)?;
        params[i] = base[i];
        numeric.push((up - down) / (2.0 * FD_STEP));
    }
    let mut max_relative_error = 0.0f64;
    let groups = model.group_offsets();
    let mut max_abs_error = groups.clone().map(|(name, _)| (name, 0.0f64));
    for (g, (_, range)) in groups.into_iter().enumerate() {
        for i in range {
            let diff = (analytic[i] - numeric[i]).abs();
            let scale = analytic[i].abs().max(numeric[i].abs()).max(1e-6);
            max_relative_error = max_relative_error.max(diff / scale);
            max_abs_error[g].1 = max_abs_error[g].1.max(diff);
        }
    }
    Ok(GradientCheck {
        max_relative_error,
        max_abs_error,
        analytic,
        numeric,
    })
}
