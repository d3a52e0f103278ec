//! Two-state Markov primary-user channel.
//!
//! Transition convention: `p = P(busy → idle)` and `q = P(idle → busy)`, so
//! the stationary idle probability is `p / (p + q)` and the belief recursion
//! in [`crate::mac`] reads `x' = x(1 - q) + (1 - x)p`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};

/// Default slot length in seconds.
pub const DEFAULT_SLOT_DURATION: f64 = 0.01;

/// Occupancy of one primary channel during one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotState {
    Idle,
    Busy,
}

impl SlotState {
    /// Channel status indicator: 1 when idle, 0 when busy.
    pub fn indicator(self) -> u8 {
        match self {
            SlotState::Idle => 1,
            SlotState::Busy => 0,
        }
    }

    pub fn from_indicator(value: u8) -> Option<Self> {
        match value {
            1 => Some(SlotState::Idle),
            0 => Some(SlotState::Busy),
            _ => None,
        }
    }

    /// Binary-series symbol: +1 when busy (occupied), −1 when idle.
    pub fn symbol(self) -> f64 {
        match self {
            SlotState::Idle => -1.0,
            SlotState::Busy => 1.0,
        }
    }

    pub fn from_symbol(symbol: f64) -> Option<Self> {
        if symbol == 1.0 {
            Some(SlotState::Busy)
        } else if symbol == -1.0 {
            Some(SlotState::Idle)
        } else {
            None
        }
    }

    pub fn is_idle(self) -> bool {
        self == SlotState::Idle
    }
}

/// Markov transition probabilities and powers for one primary channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    p: f64,
    q: f64,
    sigma_s2: f64,
    sigma_n2: f64,
}

impl ChannelParams {
    /// Validated parameters, requiring positive slot memory `1 - p - q > 0`.
    pub fn new(p: f64, q: f64, sigma_s2: f64, sigma_n2: f64) -> Result<Self> {
        Self::with_memory_check(p, q, sigma_s2, sigma_n2, true)
    }

    /// Like [`ChannelParams::new`]; `require_positive_memory = false` also
    /// admits chains with `1 - p - q ≤ 0`.
    pub fn with_memory_check(
        p: f64,
        q: f64,
        sigma_s2: f64,
        sigma_n2: f64,
        require_positive_memory: bool,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("p", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(invalid("q", "must lie in [0, 1]"));
        }
        if require_positive_memory && !(1.0 - p - q > 0.0) {
            return Err(invalid("p, q", "1 - p - q must be positive"));
        }
        if !(sigma_s2 > 0.0 && sigma_s2.is_finite()) {
            return Err(invalid("sigma_s2", "signal power must be positive"));
        }
        if !(sigma_n2 > 0.0 && sigma_n2.is_finite()) {
            return Err(invalid("sigma_n2", "noise power must be positive"));
        }
        Ok(ChannelParams {
            p,
            q,
            sigma_s2,
            sigma_n2,
        })
    }

    /// P(busy → idle).
    pub fn p(&self) -> f64 {
        self.p
    }

    /// P(idle → busy).
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn sigma_s2(&self) -> f64 {
        self.sigma_s2
    }

    pub fn sigma_n2(&self) -> f64 {
        self.sigma_n2
    }

    /// Linear SNR `σ_s² / σ_n²`.
    pub fn snr(&self) -> f64 {
        self.sigma_s2 / self.sigma_n2
    }
}

/// Stationary probability that the channel is idle, `p / (p + q)`.
pub fn stationary_idle_prob(params: &ChannelParams) -> Result<f64> {
    let total = params.p + params.q;
    if total == 0.0 {
        return Err(Error::DegenerateChain);
    }
    Ok(params.p / total)
}

/// One Markov transition.
pub fn step_channel<R: Rng + ?Sized>(
    state: SlotState,
    params: &ChannelParams,
    rng: &mut R,
) -> SlotState {
    let u: f64 = rng.random();
    match state {
        SlotState::Idle if u < params.q => SlotState::Busy,
        SlotState::Idle => SlotState::Idle,
        SlotState::Busy if u < params.p => SlotState::Idle,
        SlotState::Busy => SlotState::Busy,
    }
}

/// Per-slot primary-user states.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyTrace {
    states: Vec<SlotState>,
    slot_duration: f64,
}

impl OccupancyTrace {
    pub fn new(states: Vec<SlotState>, slot_duration: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty("trace"));
        }
        if !(slot_duration > 0.0 && slot_duration.is_finite()) {
            return Err(invalid("slot_duration", "must be positive"));
        }
        Ok(OccupancyTrace {
            states,
            slot_duration,
        })
    }

    pub fn states(&self) -> &[SlotState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn slot_duration(&self) -> f64 {
        self.slot_duration
    }

    pub fn idle_fraction(&self) -> f64 {
        let idle = self.states.iter().filter(|s| s.is_idle()).count();
        idle as f64 / self.states.len() as f64
    }

    /// ±1 binary series (+1 busy).
    pub fn encode(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.symbol()).collect()
    }

    /// Inverse of [`OccupancyTrace::encode`]; any symbol other than ±1 is rejected.
    pub fn decode(series: &[f64], slot_duration: f64) -> Result<Self> {
        let states = series
            .iter()
            .map(|&x| {
                SlotState::from_symbol(x).ok_or(invalid("series", "symbols must be +1 or -1"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(states, slot_duration)
    }
}

/// Draws `length` slots starting from `initial`.
pub fn generate_trace<R: Rng + ?Sized>(
    params: &ChannelParams,
    length: usize,
    initial: SlotState,
    slot_duration: f64,
    rng: &mut R,
) -> Result<OccupancyTrace> {
    if length == 0 {
        return Err(invalid("length", "trace needs at least one slot"));
    }
    let mut states = Vec::with_capacity(length);
    let mut state = initial;
    states.push(state);
    for _ in 1..length {
        state = step_channel(state, params, rng);
        states.push(state);
    }
    OccupancyTrace::new(states, slot_duration)
}

/// Circularly-symmetric complex Gaussian with total variance `variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let scale = libm::sqrt(variance / 2.0);
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(scale * re, scale * im)
}

/// Received baseband samples for one slot: noise only when idle, noise plus
/// an independent Gaussian primary signal when busy.
pub fn sample_slot_signal<R: Rng + ?Sized>(
    state: SlotState,
    params: &ChannelParams,
    nb: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if nb == 0 {
        return Err(invalid("nb", "need at least one sample"));
    }
    let samples = (0..nb)
        .map(|_| {
            let noise = complex_gaussian(params.sigma_n2, rng);
            match state {
                SlotState::Idle => noise,
                SlotState::Busy => noise + complex_gaussian(params.sigma_s2, rng),
            }
        })
        .collect();
    Ok(samples)
}
