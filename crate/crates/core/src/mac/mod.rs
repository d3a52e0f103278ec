//! Belief-state secondary-user MAC.
//!
//! A secondary user keeps `x`, its probability that the channel is idle in
//! the current slot, and picks one of three actions per slot. Transmitting or
//! sleeping carries the belief forward with the Markov prediction
//! `x' = x(1 - q) + (1 - x)p`; sensing collapses it to 1 or 0 (or applies a
//! Bayes update when sensing is imperfect) before the prediction.

mod dp;
mod sim;

pub use dp::DpPolicy;
pub use sim::{
    density_sweep, run_simulation, sweep_point, validate_densities, InitialState, Policy, Scenario,
    SensingModel, SimulationOutput, SimulationSummary, SlotRecord, SweepRow,
};

use crate::channel::{ChannelParams, SlotState};
use crate::error::{invalid, Result};
use crate::sensing::Hypothesis;

/// Probability that the channel is idle in the current slot.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BeliefState(f64);

impl BeliefState {
    pub fn new(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(invalid("belief", "must lie in [0, 1]"));
        }
        Ok(BeliefState(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    // Clamps rounding drift from affine updates.
    fn clamped(x: f64) -> Self {
        BeliefState(x.clamp(0.0, 1.0))
    }
}

/// Per-slot decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Action {
    Transmit = 0,
    Sense = 1,
    Sleep = 2,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Transmit, Action::Sense, Action::Sleep];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Action::Transmit),
            1 => Some(Action::Sense),
            2 => Some(Action::Sleep),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Transmit => "transmit",
            Action::Sense => "sense",
            Action::Sleep => "sleep",
        }
    }
}

/// Transmit reward, collision cost and sensing cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardParams {
    r_t: f64,
    c_c: f64,
    c_s: f64,
}

impl RewardParams {
    pub fn new(r_t: f64, c_c: f64, c_s: f64) -> Result<Self> {
        if !(r_t > 0.0 && r_t.is_finite()) {
            return Err(invalid("r_t", "transmit reward must be positive"));
        }
        if !(c_c >= 0.0 && c_c.is_finite()) {
            return Err(invalid("c_c", "collision cost must be nonnegative"));
        }
        if !(c_s >= 0.0 && c_s.is_finite()) {
            return Err(invalid("c_s", "sensing cost must be nonnegative"));
        }
        Ok(RewardParams { r_t, c_c, c_s })
    }

    pub fn r_t(&self) -> f64 {
        self.r_t
    }

    pub fn c_c(&self) -> f64 {
        self.c_c
    }

    pub fn c_s(&self) -> f64 {
        self.c_s
    }

    /// Belief at which transmitting breaks even, `C_c / (R_t + C_c)`.
    pub fn break_even(&self) -> f64 {
        self.c_c / (self.r_t + self.c_c)
    }

    /// Whether blind transmission at the stationary belief does not pay,
    /// `C_c / (R_t + C_c) ≥ p / (p + q)`. Scenario loaders warn when it fails.
    pub fn protects_primary(&self, channel: &ChannelParams) -> bool {
        match crate::channel::stationary_idle_prob(channel) {
            Ok(stationary) => self.break_even() >= stationary,
            Err(_) => true,
        }
    }
}

/// Markov prediction of next slot's idle probability.
pub fn belief_predict(x: BeliefState, params: &ChannelParams) -> BeliefState {
    let x = x.0;
    BeliefState::clamped(x * (1.0 - params.q()) + (1.0 - x) * params.p())
}

/// Belief after a perfect observation of the current slot.
pub fn belief_collapse(sensed: SlotState) -> BeliefState {
    match sensed {
        SlotState::Idle => BeliefState(1.0),
        SlotState::Busy => BeliefState(0.0),
    }
}

/// Bayes update of the idle belief after an imperfect sensing decision with
/// detection probability `p_d` and false-alarm probability `p_f`.
pub fn belief_update_imperfect(
    x: BeliefState,
    observed: Hypothesis,
    p_d: f64,
    p_f: f64,
) -> BeliefState {
    let x = x.0;
    let (idle_like, busy_like) = match observed {
        Hypothesis::H1Busy => (p_f, p_d),
        Hypothesis::H0Idle => (1.0 - p_f, 1.0 - p_d),
    };
    let evidence = x * idle_like + (1.0 - x) * busy_like;
    if evidence == 0.0 {
        return BeliefState(x);
    }
    BeliefState::clamped(x * idle_like / evidence)
}

/// Expected one-slot reward at belief `x`.
pub fn reward(x: BeliefState, action: Action, params: &RewardParams) -> f64 {
    match action {
        Action::Transmit => x.0 * (params.r_t + params.c_c) - params.c_c,
        Action::Sense => -params.c_s,
        Action::Sleep => 0.0,
    }
}

/// Greedy policy: transmit when the expected reward is positive, sense when
/// the belief lies within `sense_margin` of the break-even point, else sleep.
/// Exact break-even with no margin sleeps.
pub fn myopic_policy(x: BeliefState, params: &RewardParams, sense_margin: f64) -> Action {
    if reward(x, Action::Transmit, params) > 0.0 {
        Action::Transmit
    } else if (x.0 - params.break_even()).abs() < sense_margin {
        Action::Sense
    } else {
        Action::Sleep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(p: f64, q: f64) -> ChannelParams {
        ChannelParams::new(p, q, 1.0, 1.0).unwrap()
    }

    fn b(x: f64) -> BeliefState {
        BeliefState::new(x).unwrap()
    }

    #[test]
    fn belief_bounds() {
        assert!(BeliefState::new(1.2).is_err());
        assert!(BeliefState::new(-0.1).is_err());
        assert!(BeliefState::new(f64::NAN).is_err());
    }

    #[test]
    fn prediction_points() {
        let c = ch(0.2, 0.3);
        assert!((belief_predict(b(0.4), &c).value() - 0.4).abs() < 1e-15);
        assert!((belief_predict(b(1.0), &c).value() - 0.7).abs() < 1e-15);
        assert!((belief_predict(belief_collapse(SlotState::Idle), &c).value() - 0.7).abs() < 1e-15);
        assert!((belief_predict(belief_collapse(SlotState::Busy), &c).value() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn prediction_converges() {
        let c = ch(0.2, 0.3);
        let mut x = b(0.0);
        for _ in 0..60 {
            x = belief_predict(x, &c);
        }
        assert!((x.value() - 0.4).abs() < 1e-9);
    }

    #[test]
    fn collapse_values() {
        assert_eq!(belief_collapse(SlotState::Idle).value(), 1.0);
        assert_eq!(belief_collapse(SlotState::Busy).value(), 0.0);
    }

    #[test]
    fn imperfect_update_limits() {
        let x = b(0.4);
        assert_eq!(
            belief_update_imperfect(x, Hypothesis::H0Idle, 1.0, 0.0).value(),
            1.0
        );
        assert_eq!(
            belief_update_imperfect(x, Hypothesis::H1Busy, 1.0, 0.0).value(),
            0.0
        );
        // Uninformative sensor.
        let same = belief_update_imperfect(x, Hypothesis::H1Busy, 0.3, 0.3).value();
        assert!((same - 0.4).abs() < 1e-15);
        let post = belief_update_imperfect(x, Hypothesis::H0Idle, 0.9, 0.1).value();
        assert!((post - 0.4 * 0.9 / (0.4 * 0.9 + 0.6 * 0.1)).abs() < 1e-15);
    }

    #[test]
    fn reward_cases() {
        let r = RewardParams::new(1.0, 9.0, 0.05).unwrap();
        assert_eq!(reward(b(1.0), Action::Transmit, &r), 1.0);
        assert!(reward(b(0.9), Action::Transmit, &r).abs() < 1e-12);
        assert_eq!(reward(b(0.3), Action::Sleep, &r), 0.0);
        assert_eq!(reward(b(0.3), Action::Sense, &r), -0.05);
        assert!(RewardParams::new(0.0, 1.0, 0.0).is_err());
        assert!(RewardParams::new(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn myopic_cases() {
        let r = RewardParams::new(1.0, 9.0, 0.05).unwrap();
        assert_eq!(myopic_policy(b(0.95), &r, 0.0), Action::Transmit);
        assert_eq!(myopic_policy(b(0.0), &r, 0.0), Action::Sleep);
        let r = RewardParams::new(1.0, 1.0, 0.05).unwrap();
        assert_eq!(myopic_policy(b(0.5), &r, 0.0), Action::Sleep);
        assert_eq!(myopic_policy(b(0.45), &r, 0.1), Action::Sense);
        assert_eq!(myopic_policy(b(0.3), &r, 0.1), Action::Sleep);
    }

    #[test]
    fn safety_assumption() {
        let r = RewardParams::new(1.0, 9.0, 0.05).unwrap();
        assert!(r.protects_primary(&ch(0.2, 0.3)));
        let r = RewardParams::new(1.0, 0.1, 0.05).unwrap();
        assert!(!r.protects_primary(&ch(0.2, 0.3)));
    }

    #[test]
    fn action_codes() {
        for a in Action::ALL {
            assert_eq!(Action::from_code(a.code()), Some(a));
        }
        assert_eq!(Action::from_code(3), None);
    }
}
