//! Energy detection and the per-frame sensing plan.
//!
//! The detector compares the received power against a threshold `λ`:
//! `Y = (1/NB) Σ |y_i|²`, deciding busy (H1) iff `Y > λ`. With complex
//! Gaussian noise of power `σ_n²`, `NB·Y/σ_n²` is Gamma(NB, 1) under H0 and
//! `NB·Y/(σ_n² + σ_s²)` is Gamma(NB, 1) under H1, which gives the closed
//! forms in [`analytic_pf_nb`] and [`analytic_pd_nb`].
//!
//! The time-bandwidth form ([`analytic_pf_gamma`], [`analytic_pd_marcum`])
//! is the classical chi-squared / noncentral chi-squared description of the
//! same detector with `2u` degrees of freedom.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::special::{gamma_q, gaussian_q_inv, marcum_q};

/// Decided hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Noise only: the primary user is silent.
    H0Idle,
    /// Primary signal present.
    H1Busy,
}

/// Energy detector settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    lambda: f64,
    nb: usize,
    u: u32,
}

impl DetectorConfig {
    pub fn new(lambda: f64, nb: usize, u: u32) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "threshold must be positive"));
        }
        if nb == 0 {
            return Err(invalid("nb", "sample count must be at least 1"));
        }
        if u == 0 {
            return Err(invalid("u", "time-bandwidth product must be at least 1"));
        }
        Ok(DetectorConfig { lambda, nb, u })
    }

    /// Sample count `NB = round(B · duration)`, at least 1.
    pub fn sample_count(bandwidth_hz: f64, duration_s: f64) -> Result<usize> {
        let product = bandwidth_hz * duration_s;
        if !(product.is_finite() && product > 0.0) {
            return Err(invalid("bandwidth, duration", "product must be positive"));
        }
        Ok((libm::round(product) as usize).max(1))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    /// Normalized statistic and decision for one slot's samples.
    pub fn sense(&self, samples: &[Complex64]) -> Result<SensingOutcome> {
        let statistic = energy_statistic(samples, true)?;
        Ok(SensingOutcome {
            statistic,
            decision: detect(statistic, self.lambda),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingOutcome {
    pub statistic: f64,
    pub decision: Hypothesis,
}

/// `Σ|y_i|²`, or the mean power `(1/NB) Σ|y_i|²` when `normalized`.
pub fn energy_statistic(samples: &[Complex64], normalized: bool) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    let total: f64 = samples.iter().map(|y| y.norm_sqr()).sum();
    Ok(if normalized {
        total / samples.len() as f64
    } else {
        total
    })
}

/// Busy iff the statistic strictly exceeds `lambda`; a tie decides idle.
pub fn detect(statistic: f64, lambda: f64) -> Hypothesis {
    if statistic > lambda {
        Hypothesis::H1Busy
    } else {
        Hypothesis::H0Idle
    }
}

/// False-alarm probability of the time-bandwidth form, `Γ(u, λ/2) / Γ(u)`.
pub fn analytic_pf_gamma(config: &DetectorConfig) -> Result<f64> {
    gamma_q(config.u as f64, config.lambda / 2.0)
}

/// Detection probability of the time-bandwidth form, `Q_u(√(2r), √λ)`.
pub fn analytic_pd_marcum(config: &DetectorConfig, snr_r: f64) -> Result<f64> {
    if !(snr_r >= 0.0) {
        return Err(invalid("snr_r", "SNR must be nonnegative"));
    }
    if snr_r.is_infinite() {
        return Ok(1.0);
    }
    marcum_q(config.u, libm::sqrt(2.0 * snr_r), libm::sqrt(config.lambda))
}

fn check_nb_inputs(lambda: f64, nb: usize, power: f64, power_name: &'static str) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "threshold must be positive"));
    }
    if nb == 0 {
        return Err(invalid("nb", "sample count must be at least 1"));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(invalid(power_name, "power must be positive"));
    }
    Ok(())
}

/// `Pr{Y > λ | H0} = 1 - P(NB·λ/σ_n², NB)`.
pub fn analytic_pf_nb(lambda: f64, nb: usize, sigma_n2: f64) -> Result<f64> {
    check_nb_inputs(lambda, nb, sigma_n2, "sigma_n2")?;
    gamma_q(nb as f64, nb as f64 * lambda / sigma_n2)
}

/// The false-alarm expression with the signal power as divisor,
/// `1 - P(NB·λ/σ_s², NB)`. Kept only for side-by-side comparison with
/// [`analytic_pf_nb`]; it is not the H0 tail of the detector.
pub fn analytic_pf_nb_literal(lambda: f64, nb: usize, sigma_s2: f64) -> Result<f64> {
    check_nb_inputs(lambda, nb, sigma_s2, "sigma_s2")?;
    gamma_q(nb as f64, nb as f64 * lambda / sigma_s2)
}

/// `Pr{Y > λ | H1} = 1 - P(NB·λ/(σ_n² + σ_s²), NB)`.
pub fn analytic_pd_nb(lambda: f64, nb: usize, sigma_n2: f64, sigma_s2: f64) -> Result<f64> {
    if !(sigma_s2 >= 0.0) {
        return Err(invalid("sigma_s2", "signal power must be nonnegative"));
    }
    check_nb_inputs(lambda, nb, sigma_n2, "sigma_n2")?;
    gamma_q(nb as f64, nb as f64 * lambda / (sigma_n2 + sigma_s2))
}

fn check_variances(sigma_n2: f64, sigma_s2: f64) -> Result<()> {
    if !(sigma_n2 > 0.0 && sigma_n2.is_finite()) {
        return Err(invalid("sigma_n2", "noise power must be positive"));
    }
    if !(sigma_s2 > 0.0 && sigma_s2.is_finite()) {
        return Err(invalid("sigma_s2", "signal power must be positive"));
    }
    Ok(())
}

/// Natural log of the likelihood ratio `f(y | H0) / f(y | H1)` for
/// zero-mean circular Gaussian samples with variance `σ_n²` under H0 and
/// `σ_n² + σ_s²` under H1.
///
/// Both hypotheses are simple, so the suprema are attained at the single
/// parameter point of each. The ratio is oriented with H0 in the numerator:
/// large values favour H0, and it falls strictly as the received energy grows.
pub fn lrt_log_statistic(samples: &[Complex64], sigma_n2: f64, sigma_s2: f64) -> Result<f64> {
    check_variances(sigma_n2, sigma_s2)?;
    let energy = energy_statistic(samples, false)?;
    Ok(log_ratio(energy, samples.len(), sigma_n2, sigma_s2))
}

fn log_ratio(energy: f64, n: usize, sigma_n2: f64, sigma_s2: f64) -> f64 {
    let sigma_1 = sigma_n2 + sigma_s2;
    n as f64 * libm::log1p(sigma_s2 / sigma_n2) - energy * (sigma_s2 / (sigma_n2 * sigma_1))
}

/// The likelihood ratio itself, `exp` of [`lrt_log_statistic`].
pub fn lrt_statistic(samples: &[Complex64], sigma_n2: f64, sigma_s2: f64) -> Result<f64> {
    lrt_log_statistic(samples, sigma_n2, sigma_s2).map(libm::exp)
}

/// Log-ratio threshold equivalent to the energy threshold `lambda` on `n`
/// samples: `Y > λ` exactly when the log ratio falls below this value.
pub fn lrt_log_threshold(lambda: f64, n: usize, sigma_n2: f64, sigma_s2: f64) -> Result<f64> {
    check_variances(sigma_n2, sigma_s2)?;
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "threshold must be positive"));
    }
    Ok(log_ratio(lambda * n as f64, n, sigma_n2, sigma_s2))
}

/// Rejects H0 when the log ratio is strictly below `log_threshold`.
pub fn lrt_detect(log_statistic: f64, log_threshold: f64) -> Hypothesis {
    if log_statistic < log_threshold {
        Hypothesis::H1Busy
    } else {
        Hypothesis::H0Idle
    }
}

/// Result of a chi-squared goodness-of-fit computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquared {
    pub statistic: f64,
    /// Fraction of categories whose observed count is below 5.
    pub low_count_fraction: f64,
    /// Set when more than 20% of categories have observed count below 5.
    pub small_count_warning: bool,
}

/// Pearson's `X² = Σ (O_t - E_t)² / E_t`.
pub fn chi_squared(observed: &[u64], expected: &[f64]) -> Result<ChiSquared> {
    if observed.len() != expected.len() {
        return Err(Error::LengthMismatch {
            left: observed.len(),
            right: expected.len(),
        });
    }
    if observed.len() < 2 {
        return Err(invalid("observed", "need at least two categories"));
    }
    if expected.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(invalid("expected", "expected counts must be positive"));
    }
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let low = observed.iter().filter(|&&o| o < 5).count();
    let low_count_fraction = low as f64 / observed.len() as f64;
    Ok(ChiSquared {
        statistic,
        low_count_fraction,
        small_count_warning: low_count_fraction > 0.2,
    })
}

/// Arrangement of the sensing-time numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SensingTimeForm {
    /// `√(2λ+1)·Q⁻¹(P_d) − Q⁻¹(P_f)`.
    #[default]
    Standard,
    /// `√(2λ+1)·Q⁻¹(P_f) − Q⁻¹(P_d)`: the square-root factor on the other term.
    Swapped,
    /// `√(2λ + Q⁻¹(P_d) − Q⁻¹(P_f))`: one radical over the whole numerator.
    /// Fails when the radicand is negative.
    SingleRadical,
}

/// Sensing time per channel,
/// `t_s = (numerator / (λ√B))²` with the numerator chosen by `form`.
pub fn sensing_time(
    snr_lambda: f64,
    bandwidth_b: f64,
    p_d: f64,
    p_f: f64,
    form: SensingTimeForm,
) -> Result<f64> {
    if !(snr_lambda > 0.0 && snr_lambda.is_finite()) {
        return Err(invalid("snr_lambda", "SNR must be positive"));
    }
    if !(bandwidth_b > 0.0 && bandwidth_b.is_finite()) {
        return Err(invalid("bandwidth_b", "bandwidth must be positive"));
    }
    let qd =
        gaussian_q_inv(p_d).map_err(|_| invalid("p_d", "must lie strictly between 0 and 1"))?;
    let qf =
        gaussian_q_inv(p_f).map_err(|_| invalid("p_f", "must lie strictly between 0 and 1"))?;
    let root = libm::sqrt(2.0 * snr_lambda + 1.0);
    let numerator = match form {
        SensingTimeForm::Standard => root * qd - qf,
        SensingTimeForm::Swapped => root * qf - qd,
        SensingTimeForm::SingleRadical => {
            let radicand = 2.0 * snr_lambda + qd - qf;
            if radicand < 0.0 {
                return Err(invalid(
                    "p_d, p_f",
                    "radicand of the single-radical form is negative",
                ));
            }
            libm::sqrt(radicand)
        }
    };
    let ratio = numerator / (snr_lambda * libm::sqrt(bandwidth_b));
    Ok(ratio * ratio)
}

/// Control-message duration `T_c = T_B1 + T_B2 + N·T_ms + 5·T_SIFS`.
pub fn control_time(
    t_b1: f64,
    t_b2: f64,
    n_channels: usize,
    t_ms: f64,
    t_sifs: f64,
) -> Result<f64> {
    for (name, v) in [
        ("t_b1", t_b1),
        ("t_b2", t_b2),
        ("t_ms", t_ms),
        ("t_sifs", t_sifs),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(invalid(name, "durations must be nonnegative"));
        }
    }
    Ok(t_b1 + t_b2 + n_channels as f64 * t_ms + 5.0 * t_sifs)
}

/// Channels each sensing user covers per frame,
/// `L = min(⌈N/M_s⌉, ⌈(T − T_c)/(2 t_s)⌉)`, never below 1.
///
/// `t_s = 0` leaves the time-budget term unbounded.
pub fn channels_to_sense(n: usize, m_s: usize, t_frame: f64, t_c: f64, t_s: f64) -> Result<usize> {
    if n == 0 {
        return Err(invalid("n", "need at least one channel"));
    }
    if m_s == 0 {
        return Err(invalid("m_s", "need at least one sensing user"));
    }
    if !(t_s >= 0.0 && t_s.is_finite()) {
        return Err(invalid("t_s", "sensing time must be nonnegative"));
    }
    if !(t_frame > t_c) {
        return Err(Error::NoSensingBudget { t_frame, t_c });
    }
    let share = n.div_ceil(m_s);
    if t_s == 0.0 {
        return Ok(share.max(1));
    }
    let budget = libm::ceil((t_frame - t_c) / (2.0 * t_s));
    let budget = if budget >= share as f64 {
        share
    } else {
        budget as usize
    };
    Ok(share.min(budget).max(1))
}

/// Inputs for [`SensingPlan::compute`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanInputs {
    pub n_channels: usize,
    pub m_s: usize,
    pub t_frame: f64,
    pub t_c: ControlTime,
    pub t_s: SensingDuration,
}

/// Control-message time, given directly or from its components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlTime {
    Fixed(f64),
    Components {
        t_b1: f64,
        t_b2: f64,
        t_ms: f64,
        t_sifs: f64,
    },
}

/// Per-channel sensing time, given directly or from the detection targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensingDuration {
    Fixed(f64),
    Targets {
        snr: f64,
        bandwidth: f64,
        p_d: f64,
        p_f: f64,
        form: SensingTimeForm,
    },
}

/// Sensing time, control time and channels per user for one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingPlan {
    pub t_s: f64,
    pub t_c: f64,
    pub l_channels: usize,
}

impl SensingPlan {
    pub fn compute(inputs: &PlanInputs) -> Result<Self> {
        let t_c = match inputs.t_c {
            ControlTime::Fixed(t) if t >= 0.0 => t,
            ControlTime::Fixed(_) => {
                return Err(invalid("t_c", "control time must be nonnegative"))
            }
            ControlTime::Components {
                t_b1,
                t_b2,
                t_ms,
                t_sifs,
            } => control_time(t_b1, t_b2, inputs.n_channels, t_ms, t_sifs)?,
        };
        let t_s = match inputs.t_s {
            SensingDuration::Fixed(t) => t,
            SensingDuration::Targets {
                snr,
                bandwidth,
                p_d,
                p_f,
                form,
            } => sensing_time(snr, bandwidth, p_d, p_f, form)?,
        };
        let l_channels =
            channels_to_sense(inputs.n_channels, inputs.m_s, inputs.t_frame, t_c, t_s)?;
        Ok(SensingPlan {
            t_s,
            t_c,
            l_channels,
        })
    }
}

/// Round-robin partition of `n_channels` among `users`, each user taking at
/// most `per_user` channels. With more users than channels, user `u` gets
/// channel `u mod N`.
pub fn assign_channels(n_channels: usize, users: usize, per_user: usize) -> Vec<Vec<usize>> {
    (0..users)
        .map(|u| {
            if users >= n_channels {
                alloc::vec![u % n_channels]
            } else {
                (u..n_channels)
                    .step_by(users)
                    .take(per_user.max(1))
                    .collect()
            }
        })
        .collect()
}
