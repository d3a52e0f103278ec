use alloc::vec;
use alloc::vec::Vec;

use super::{
    belief_predict, belief_update_imperfect, reward, Action, BeliefState, RewardParams,
    SensingModel,
};
use crate::channel::ChannelParams;
use crate::error::{invalid, Result};
use crate::sensing::Hypothesis;

/// Finite-horizon value iteration over a uniform belief grid.
///
/// `V_0 = 0` and for `h ≥ 1`
///
/// ```text
/// V_h(x) = max { G(x, transmit) + V_{h-1}(f(x)),
///                -C_s + E[V_{h-1}(f(x⁺))],
///                V_{h-1}(f(x)) }
/// ```
///
/// where `f` is the Markov prediction and `x⁺` the post-sensing belief.
/// Off-grid values are linearly interpolated. Equal values resolve in the
/// order sleep, transmit, sense.
#[derive(Debug, Clone, PartialEq)]
pub struct DpPolicy {
    grid: usize,
    horizon: usize,
    // actions[(h - 1) * grid + i] for h remaining slots
    actions: Vec<Action>,
    // values[h * grid + i], h = 0..=horizon
    values: Vec<f64>,
}

impl DpPolicy {
    pub fn solve(
        channel: &ChannelParams,
        rewards: &RewardParams,
        sensing: SensingModel,
        horizon: usize,
        grid: usize,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        if grid < 2 {
            return Err(invalid("grid", "need at least two belief points"));
        }
        let step = 1.0 / (grid - 1) as f64;
        let beliefs: Vec<BeliefState> = (0..grid)
            .map(|i| BeliefState::clamped(i as f64 * step))
            .collect();
        let predicted: Vec<f64> = beliefs
            .iter()
            .map(|&x| belief_predict(x, channel).value())
            .collect();

        // Post-sensing branches: (probability, next-slot belief) pairs per grid point.
        let sense_branches: Vec<[(f64, f64); 2]> = beliefs
            .iter()
            .map(|&x| match sensing {
                SensingModel::Perfect => [
                    (x.value(), belief_predict(BeliefState(1.0), channel).value()),
                    (
                        1.0 - x.value(),
                        belief_predict(BeliefState(0.0), channel).value(),
                    ),
                ],
                SensingModel::Imperfect { p_d, p_f } => {
                    let xv = x.value();
                    let p_busy_obs = xv * p_f + (1.0 - xv) * p_d;
                    let after_busy = belief_update_imperfect(x, Hypothesis::H1Busy, p_d, p_f);
                    let after_idle = belief_update_imperfect(x, Hypothesis::H0Idle, p_d, p_f);
                    [
                        (
                            1.0 - p_busy_obs,
                            belief_predict(after_idle, channel).value(),
                        ),
                        (p_busy_obs, belief_predict(after_busy, channel).value()),
                    ]
                }
            })
            .collect();

        let mut values = vec![0.0; (horizon + 1) * grid];
        let mut actions = Vec::with_capacity(horizon * grid);
        for h in 1..=horizon {
            let (done, rest) = values.split_at_mut(h * grid);
            let prev = &done[(h - 1) * grid..];
            let row = &mut rest[..grid];
            for i in 0..grid {
                let carry = interpolate(prev, predicted[i]);
                let transmit = reward(beliefs[i], Action::Transmit, rewards) + carry;
                let sense = -rewards.c_s()
                    + sense_branches[i]
                        .iter()
                        .map(|&(w, next)| {
                            if w == 0.0 {
                                0.0
                            } else {
                                w * interpolate(prev, next)
                            }
                        })
                        .sum::<f64>();
                let sleep = carry;
                let (mut best, mut value) = (Action::Sleep, sleep);
                if transmit > value {
                    best = Action::Transmit;
                    value = transmit;
                }
                if sense > value {
                    best = Action::Sense;
                    value = sense;
                }
                row[i] = value;
                actions.push(best);
            }
        }
        Ok(DpPolicy {
            grid,
            horizon,
            actions,
            values,
        })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn grid_belief(&self, index: usize) -> f64 {
        index as f64 / (self.grid - 1) as f64
    }

    /// Action at grid point `index` with `remaining` slots to go.
    pub fn grid_action(&self, remaining: usize, index: usize) -> Action {
        let h = remaining.clamp(1, self.horizon);
        self.actions[(h - 1) * self.grid + index]
    }

    /// Optimal value row with `remaining` slots to go (row 0 is all zeros).
    pub fn values(&self, remaining: usize) -> &[f64] {
        let h = remaining.min(self.horizon);
        &self.values[h * self.grid..(h + 1) * self.grid]
    }

    /// Action for an arbitrary belief, taken at the nearest grid point.
    /// Remaining horizons beyond the solved one reuse the longest row.
    pub fn action(&self, x: BeliefState, remaining: usize) -> Action {
        let index = libm::round(x.value() * (self.grid - 1) as f64) as usize;
        self.grid_action(remaining, index.min(self.grid - 1))
    }
}

fn interpolate(row: &[f64], x: f64) -> f64 {
    let last = row.len() - 1;
    let pos = x.clamp(0.0, 1.0) * last as f64;
    let i = (libm::floor(pos) as usize).min(last);
    if i == last {
        return row[last];
    }
    let frac = pos - i as f64;
    row[i] + frac * (row[i + 1] - row[i])
}
