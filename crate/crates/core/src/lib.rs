//! Opportunistic spectrum access for OFDM cognitive radio networks.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the numerical core:
//!
//! * [`channel`] – two-state Markov primary-user occupancy and baseband samples,
//! * [`sensing`] – energy detection, analytic ROC, LRT and the sensing plan,
//! * [`mac`] – belief-state secondary-user MAC, policies and slot simulation,
//! * [`predictor`] – Elman recurrent predictor of next-slot occupancy,
//! * [`metrics`] – SNR, MSE/RMSE/NRMSE and PSNR,
//! * [`special`] – incomplete gamma, Marcum Q and Gaussian tail functions.
//!
//! Every stochastic routine takes an explicit random source; use
//! [`rng::seeded`] for the reproducible generator used throughout.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod error;
pub mod mac;
pub mod metrics;
pub mod predictor;
pub mod rng;
pub mod sensing;
pub mod special;

pub use error::{Error, Result};
