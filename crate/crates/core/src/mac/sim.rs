use alloc::vec::Vec;

use rand::Rng;

use super::{
    belief_collapse, belief_predict, belief_update_imperfect, myopic_policy, Action, BeliefState,
    DpPolicy, RewardParams,
};
use crate::channel::{
    generate_trace, stationary_idle_prob, ChannelParams, OccupancyTrace, SlotState,
};
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, seeded};
use crate::sensing::{assign_channels, Hypothesis, PlanInputs, SensingPlan};

/// How a sensing action observes the channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SensingModel {
    /// The sensed state is the true state.
    #[default]
    Perfect,
    /// Busy is reported with probability `p_d` when busy and `p_f` when idle.
    Imperfect { p_d: f64, p_f: f64 },
}

/// Decision rule used by every secondary user in a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    AlwaysSleep,
    Myopic {
        margin: f64,
    },
    Dp(DpPolicy),
    /// Sees the true state: transmits exactly on idle slots.
    Genie,
}

impl Policy {
    fn act(
        &self,
        x: BeliefState,
        rewards: &RewardParams,
        remaining: usize,
        truth: SlotState,
    ) -> Action {
        match self {
            Policy::AlwaysSleep => Action::Sleep,
            Policy::Myopic { margin } => myopic_policy(x, rewards, *margin),
            Policy::Dp(dp) => dp.action(x, remaining),
            Policy::Genie if truth.is_idle() => Action::Transmit,
            Policy::Genie => Action::Sleep,
        }
    }
}

/// Primary state of each channel in slot 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// Drawn from the stationary distribution.
    #[default]
    Stationary,
    Idle,
    Busy,
}

/// One multi-channel, multi-user access experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub channel: ChannelParams,
    pub rewards: RewardParams,
    pub n_channels: usize,
    pub users: usize,
    /// Channels each user tracks, normally the sensing-plan `L`.
    pub channels_per_user: usize,
    pub horizon: usize,
    pub sensing: SensingModel,
    pub initial_state: InitialState,
    /// Starting belief; the stationary idle probability when `None`.
    pub initial_belief: Option<f64>,
    pub slot_duration: f64,
}

impl Scenario {
    /// Single user on a single channel.
    pub fn single(channel: ChannelParams, rewards: RewardParams, horizon: usize) -> Self {
        Scenario {
            channel,
            rewards,
            n_channels: 1,
            users: 1,
            channels_per_user: 1,
            horizon,
            sensing: SensingModel::Perfect,
            initial_state: InitialState::Stationary,
            initial_belief: None,
            slot_duration: crate::channel::DEFAULT_SLOT_DURATION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(invalid("n_channels", "need at least one channel"));
        }
        if self.users == 0 {
            return Err(invalid("users", "need at least one secondary user"));
        }
        if self.channels_per_user == 0 {
            return Err(invalid("channels_per_user", "must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        if let SensingModel::Imperfect { p_d, p_f } = self.sensing {
            if !(0.0..=1.0).contains(&p_d) || !(0.0..=1.0).contains(&p_f) {
                return Err(invalid("sensing", "p_d and p_f must lie in [0, 1]"));
            }
        }
        if let Some(x) = self.initial_belief {
            BeliefState::new(x)?;
        }
        if self.initial_belief.is_none() || self.initial_state == InitialState::Stationary {
            stationary_idle_prob(&self.channel)?;
        }
        Ok(())
    }
}

/// One user's activity in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRecord {
    pub slot: usize,
    pub user: usize,
    pub channel: usize,
    pub action: Action,
    pub true_state: SlotState,
    /// Idle belief held before acting.
    pub belief: f64,
    pub reward: f64,
    /// Transmitted while the primary user was active.
    pub collision: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSummary {
    pub horizon: usize,
    pub users: usize,
    pub total_reward: f64,
    pub successes: usize,
    /// Successful packets per slot.
    pub throughput: f64,
    pub collisions: usize,
    pub sense_count: usize,
    /// Idle (slot, channel) pairs over all channels.
    pub idle_slot_channels: usize,
    /// Idle (slot, channel) pairs carrying at least one successful packet.
    pub used_slot_channels: usize,
    /// `used_slot_channels / idle_slot_channels`, 0 when nothing was idle.
    pub normalized_throughput: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub records: Vec<SlotRecord>,
    pub summary: SimulationSummary,
    pub traces: Vec<OccupancyTrace>,
}

const USER_STREAM: u64 = 1 << 32;

/// Runs `scenario` under `policy`. Channel `c` draws its primary-user trace
/// from stream `c` of `seed` and user `u` its sensing noise from a separate
/// stream, so a channel's occupancy does not depend on the number of users.
pub fn run_simulation(scenario: &Scenario, policy: &Policy, seed: u64) -> Result<SimulationOutput> {
    scenario.validate()?;
    let params = &scenario.channel;
    let horizon = scenario.horizon;

    let traces = (0..scenario.n_channels)
        .map(|c| {
            let mut rng = seeded(derive_seed(seed, c as u64));
            let initial = match scenario.initial_state {
                InitialState::Idle => SlotState::Idle,
                InitialState::Busy => SlotState::Busy,
                InitialState::Stationary => {
                    let pi = stationary_idle_prob(params)?;
                    if rng.random::<f64>() < pi {
                        SlotState::Idle
                    } else {
                        SlotState::Busy
                    }
                }
            };
            generate_trace(params, horizon, initial, scenario.slot_duration, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let start = match scenario.initial_belief {
        Some(x) => x,
        None => stationary_idle_prob(params)?,
    };
    let assignment = assign_channels(
        scenario.n_channels,
        scenario.users,
        scenario.channels_per_user,
    );
    let mut beliefs: Vec<Vec<BeliefState>> = assignment
        .iter()
        .map(|chs| chs.iter().map(|_| BeliefState(start)).collect())
        .collect();
    let mut user_rngs: Vec<_> = (0..scenario.users)
        .map(|u| seeded(derive_seed(seed, USER_STREAM + u as u64)))
        .collect();

    let mut records = Vec::with_capacity(horizon * scenario.users);
    let mut used = Vec::with_capacity(scenario.n_channels);
    let mut summary = SimulationSummary {
        horizon,
        users: scenario.users,
        total_reward: 0.0,
        successes: 0,
        throughput: 0.0,
        collisions: 0,
        sense_count: 0,
        idle_slot_channels: 0,
        used_slot_channels: 0,
        normalized_throughput: 0.0,
    };

    for slot in 0..horizon {
        used.clear();
        used.resize(scenario.n_channels, false);
        let remaining = horizon - slot;
        for (user, channels) in assignment.iter().enumerate() {
            let own = &mut beliefs[user];
            // Track the most promising channel; ties go to the lower index.
            let mut pick = 0;
            for j in 1..own.len() {
                if own[j].value() > own[pick].value() {
                    pick = j;
                }
            }
            let channel = channels[pick];
            let truth = traces[channel].states()[slot];
            let belief = own[pick];
            let action = policy.act(belief, &scenario.rewards, remaining, truth);

            let mut collision = false;
            let reward = match action {
                Action::Transmit if truth.is_idle() => {
                    summary.successes += 1;
                    used[channel] = true;
                    scenario.rewards.r_t()
                }
                Action::Transmit => {
                    collision = true;
                    summary.collisions += 1;
                    -scenario.rewards.c_c()
                }
                Action::Sense => {
                    summary.sense_count += 1;
                    -scenario.rewards.c_s()
                }
                Action::Sleep => 0.0,
            };
            summary.total_reward += reward;
            records.push(SlotRecord {
                slot,
                user,
                channel,
                action,
                true_state: truth,
                belief: belief.value(),
                reward,
                collision,
            });

            if action == Action::Sense {
                own[pick] = match scenario.sensing {
                    SensingModel::Perfect => belief_collapse(truth),
                    SensingModel::Imperfect { p_d, p_f } => {
                        let fire = if truth.is_idle() { p_f } else { p_d };
                        let observed = if user_rngs[user].random::<f64>() < fire {
                            Hypothesis::H1Busy
                        } else {
                            Hypothesis::H0Idle
                        };
                        belief_update_imperfect(belief, observed, p_d, p_f)
                    }
                };
            }
            for x in own.iter_mut() {
                *x = belief_predict(*x, params);
            }
        }
        for (c, trace) in traces.iter().enumerate() {
            if trace.states()[slot].is_idle() {
                summary.idle_slot_channels += 1;
                if used[c] {
                    summary.used_slot_channels += 1;
                }
            }
        }
    }

    summary.throughput = summary.successes as f64 / horizon as f64;
    if summary.idle_slot_channels > 0 {
        summary.normalized_throughput =
            summary.used_slot_channels as f64 / summary.idle_slot_channels as f64;
    }
    Ok(SimulationOutput {
        records,
        summary,
        traces,
    })
}

/// One density point of a throughput sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Secondary users per km².
    pub density: f64,
    pub users: usize,
    pub channels_per_user: usize,
    pub normalized_throughput: f64,
    /// `normalized_throughput / users`.
    pub per_user_throughput: f64,
}

/// Normalized throughput as the secondary-user density grows.
///
/// Each density maps to `max(1, round(density · area_km2))` sensing users;
/// the channels per user come from the sensing plan with that user count.
/// Every point reuses `seed`, so all points see the same primary traffic.
pub fn density_sweep(
    base: &Scenario,
    policy: &Policy,
    plan: &PlanInputs,
    densities: &[f64],
    area_km2: f64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    validate_densities(densities, area_km2)?;
    densities
        .iter()
        .map(|&density| sweep_point(base, policy, plan, density, area_km2, seed))
        .collect()
}

/// Checks the density list and area accepted by [`density_sweep`].
pub fn validate_densities(densities: &[f64], area_km2: f64) -> Result<()> {
    if densities.is_empty() {
        return Err(invalid("densities", "need at least one density"));
    }
    if densities.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(invalid("densities", "densities must be positive"));
    }
    if densities.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("densities", "densities must be ascending"));
    }
    if !(area_km2 > 0.0 && area_km2.is_finite()) {
        return Err(invalid("area_km2", "area must be positive"));
    }
    Ok(())
}

/// A single point of [`density_sweep`]; independent of the other points.
pub fn sweep_point(
    base: &Scenario,
    policy: &Policy,
    plan: &PlanInputs,
    density: f64,
    area_km2: f64,
    seed: u64,
) -> Result<SweepRow> {
    let users = (libm::round(density * area_km2) as usize).max(1);
    let plan = SensingPlan::compute(&PlanInputs {
        n_channels: base.n_channels,
        m_s: users,
        ..*plan
    })?;
    let scenario = Scenario {
        users,
        channels_per_user: plan.l_channels,
        ..base.clone()
    };
    let out = run_simulation(&scenario, policy, seed)?;
    let normalized = out.summary.normalized_throughput;
    Ok(SweepRow {
        density,
        users,
        channels_per_user: plan.l_channels,
        normalized_throughput: normalized,
        per_user_throughput: normalized / users as f64,
    })
}
