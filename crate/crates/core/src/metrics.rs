//! Evaluation metrics for predictors and links.

use crate::error::{invalid, Error, Result};

/// Reference values paired with their estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalPair<'a> {
    reference: &'a [f64],
    estimate: &'a [f64],
}

impl<'a> SignalPair<'a> {
    pub fn new(reference: &'a [f64], estimate: &'a [f64]) -> Result<Self> {
        if reference.len() != estimate.len() {
            return Err(Error::LengthMismatch {
                left: reference.len(),
                right: estimate.len(),
            });
        }
        if reference.is_empty() {
            return Err(Error::Empty("reference"));
        }
        Ok(SignalPair {
            reference,
            estimate,
        })
    }

    pub fn reference(&self) -> &'a [f64] {
        self.reference
    }

    pub fn estimate(&self) -> &'a [f64] {
        self.estimate
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }
}

/// Link quality bands for an SNR in dB.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrBand {
    /// Below 12 dB.
    Serious,
    /// 12 dB up to 20 dB.
    Marginal,
    /// Above 20 dB up to 30 dB.
    Satisfying,
    /// Above 30 dB.
    Suitable,
}

impl SnrBand {
    pub fn classify(snr_db: f64) -> Self {
        if snr_db < 12.0 {
            SnrBand::Serious
        } else if snr_db <= 20.0 {
            SnrBand::Marginal
        } else if snr_db <= 30.0 {
            SnrBand::Satisfying
        } else {
            SnrBand::Suitable
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SnrBand::Serious => "serious problem",
            SnrBand::Marginal => "marginal",
            SnrBand::Satisfying => "satisfying",
            SnrBand::Suitable => "suitable",
        }
    }
}

/// Power in dB, `10·log10(p)`.
pub fn power_db(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid("power", "must be positive"));
    }
    Ok(10.0 * libm::log10(p))
}

/// `10·log10(P_signal / P_noise)`, computed as the difference of the two
/// powers in dB.
pub fn snr_db(p_signal: f64, p_noise: f64) -> Result<f64> {
    Ok(power_db(p_signal)? - power_db(p_noise)?)
}

pub fn mse(pair: &SignalPair<'_>) -> f64 {
    let sum: f64 = pair
        .reference
        .iter()
        .zip(pair.estimate)
        .map(|(r, e)| (r - e) * (r - e))
        .sum();
    sum / pair.len() as f64
}

pub fn rmse(pair: &SignalPair<'_>) -> f64 {
    libm::sqrt(mse(pair))
}

/// RMSE divided by the observed range; a fraction, not a percentage.
pub fn nrmse(pair: &SignalPair<'_>, observed_min: f64, observed_max: f64) -> Result<f64> {
    if !(observed_max > observed_min) {
        return Err(invalid(
            "observed range",
            "constant observations: max must exceed min",
        ));
    }
    Ok(rmse(pair) / (observed_max - observed_min))
}

/// `10·log10(MAX² / MSE)`; a zero MSE gives `+∞`.
pub fn psnr_db(max_value: f64, mse: f64) -> Result<f64> {
    if !(max_value > 0.0) {
        return Err(invalid("max_value", "must be positive"));
    }
    if !(mse >= 0.0) {
        return Err(invalid("mse", "must be nonnegative"));
    }
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(max_value * max_value / mse))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_values() {
        assert_eq!(snr_db(3.0, 3.0).unwrap(), 0.0);
        assert!((snr_db(1000.0, 1.0).unwrap() - 30.0).abs() < 1e-12);
        assert!(snr_db(0.0, 1.0).is_err());
        assert!(snr_db(1.0, -1.0).is_err());
    }

    #[test]
    fn bands() {
        assert_eq!(SnrBand::classify(5.0), SnrBand::Serious);
        assert_eq!(SnrBand::classify(15.0), SnrBand::Marginal);
        assert_eq!(SnrBand::classify(27.4231), SnrBand::Satisfying);
        assert_eq!(SnrBand::classify(31.0), SnrBand::Suitable);
        assert_eq!(SnrBand::Serious.label(), "serious problem");
    }

    #[test]
    fn error_metrics() {
        let a = [0.0, 0.0];
        let b = [1.0, 1.0];
        let p = SignalPair::new(&a, &b).unwrap();
        assert_eq!(mse(&p), 1.0);
        assert_eq!(rmse(&p), 1.0);
        let same = SignalPair::new(&a, &a).unwrap();
        assert_eq!(rmse(&same), 0.0);
        assert_eq!(nrmse(&same, 0.0, 1.0).unwrap(), 0.0);
        assert!(SignalPair::new(&a, &[1.0]).is_err());
        assert!(SignalPair::new(&[], &[]).is_err());
    }

    #[test]
    fn nrmse_scaling() {
        let r = [0.0, 0.0, 0.0, 0.0];
        let e = [0.5, -0.5, 0.5, -0.5];
        let p = SignalPair::new(&r, &e).unwrap();
        assert_eq!(nrmse(&p, 0.0, 1.0).unwrap(), 0.5);
        assert_eq!(nrmse(&p, 0.0, 2.0).unwrap(), 0.25);
        assert!(nrmse(&p, 1.0, 1.0).is_err());
    }

    #[test]
    fn psnr_values() {
        assert_eq!(psnr_db(0.5, 0.25).unwrap(), 0.0);
        assert!((psnr_db(1.0, 0.01).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(psnr_db(1.0, 0.0).unwrap(), f64::INFINITY);
        assert!(psnr_db(0.0, 0.1).is_err());
    }
}
