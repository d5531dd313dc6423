//! Generalized alpha-investing (GAI) state machine.
//!
//! For every incoming p-value the engine first fixes `α_k` from the rejection
//! history alone, then rejects when `p_k ≤ α_k`, then updates
//!
//! ```text
//! W(k) = W(k−1) − α_k + R_k·β_{r(k)}        W(0) = β₀
//! ```
//!
//! where `r(k)` is the rejection count after step `k`. `α_k ≤ W(k−1)` holds at
//! every step, so wealth never goes negative.

use serde::{Deserialize, Serialize};

use crate::boost::{validate_boosts, BoostSequence, SupLordParams, ValidationReport};
use crate::error::{Error, Result};
use crate::schedule::{ScheduleConfig, ScheduleState};
use crate::tolerance;

/// The algorithm whose error guarantee the boosts must honour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum Policy {
    SupLord(SupLordParams),
    Lord { level: f64 },
    AlphaSpending { level: f64 },
}

impl Policy {
    /// `r*` for SupLORD; baselines control from the first rejection.
    pub fn r_star(&self) -> usize {
        match self {
            Policy::SupLord(p) => p.r_star,
            _ => 1,
        }
    }

    pub fn suplord_params(&self) -> Option<&SupLordParams> {
        match self {
            Policy::SupLord(p) => Some(p),
            _ => None,
        }
    }
}

/// One decision of the engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step index.
    pub k: usize,
    pub alpha: f64,
    pub p_value: f64,
    pub rejected: bool,
    pub wealth_after: f64,
}

/// Rejection rule: `p ≤ α`, and a zero alpha never rejects.
#[inline]
pub fn rejects(p_value: f64, alpha: f64) -> bool {
    alpha > 0.0 && p_value <= alpha
}

/// Mutable record of one GAI stream.
#[derive(Debug, Clone)]
pub struct GaiState {
    step: usize,
    wealth: f64,
    rejection_times: Vec<usize>,
    cumulative_alpha: f64,
    earned: f64,
    schedule_state: ScheduleState,
    boosts: BoostSequence,
    schedule: ScheduleConfig,
    policy: Policy,
}

/// Builds the initial state: `k = 0`, `W(0) = β₀`, no rejections.
pub fn init_state(policy: Policy, boosts: &BoostSequence, schedule: &ScheduleConfig) -> Result<GaiState> {
    GaiState::new(policy, boosts.clone(), schedule.clone())
}

/// Functional form of [`GaiState::step`].
pub fn step(mut state: GaiState, p_value: f64) -> Result<(StepRecord, GaiState)> {
    let rec = state.step(p_value)?;
    Ok((rec, state))
}

impl GaiState {
    pub fn new(policy: Policy, boosts: BoostSequence, schedule: ScheduleConfig) -> Result<Self> {
        boosts.check_nonnegative()?;
        match &policy {
            Policy::SupLord(params) => {
                validate_boosts(&boosts, params).map_err(ValidationReport::into_error)?;
            }
            Policy::Lord { level } | Policy::AlphaSpending { level } => {
                if !(*level > 0.0 && *level < 1.0) {
                    return Err(Error::Domain(format!("level must lie in (0,1), got {level}")));
                }
            }
        }
        let schedule_state = ScheduleState::new(&schedule, boosts.beta0)?;
        Ok(GaiState {
            step: 0,
            wealth: boosts.beta0,
            rejection_times: Vec::new(),
            cumulative_alpha: 0.0,
            earned: 0.0,
            schedule_state,
            boosts,
            schedule,
            policy,
        })
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn wealth(&self) -> f64 {
        self.wealth
    }

    pub fn rejection_times(&self) -> &[usize] {
        &self.rejection_times
    }

    pub fn cumulative_alpha(&self) -> f64 {
        self.cumulative_alpha
    }

    /// Sum of boosts earned so far (excluding `β₀`).
    pub fn earned(&self) -> f64 {
        self.earned
    }

    pub fn schedule_state(&self) -> &ScheduleState {
        &self.schedule_state
    }

    pub fn boosts(&self) -> &BoostSequence {
        &self.boosts
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    /// The alpha value for the next step, a function of the rejection history only.
    pub fn next_alpha(&self) -> Result<f64> {
        let k = self.step + 1;
        let raw = self.schedule.alpha(&self.schedule_state, &self.boosts, k).min(1.0);
        if raw <= self.wealth {
            return Ok(raw);
        }
        let slack = tolerance::WEALTH_ROUNDING * (1.0 + self.boosts.beta0 + self.earned);
        if raw - self.wealth <= slack {
            Ok(self.wealth)
        } else {
            Err(Error::Invariant {
                step: k,
                detail: format!("schedule emitted alpha {raw} above wealth {}", self.wealth),
            })
        }
    }

    /// Tests one p-value and updates wealth.
    pub fn step(&mut self, p_value: f64) -> Result<StepRecord> {
        if !(0.0..=1.0).contains(&p_value) {
            return Err(Error::Input(format!("p-value {p_value} outside [0,1]")));
        }
        let alpha = self.next_alpha()?;
        Ok(self.commit(alpha, p_value, rejects(p_value, alpha)))
    }

    /// Advances with a given decision and no p-value; used to replay a
    /// rejection history. The record's `p_value` is NaN.
    pub fn step_with_decision(&mut self, rejected: bool) -> Result<StepRecord> {
        let alpha = self.next_alpha()?;
        if rejected && alpha <= 0.0 {
            return Err(Error::Input(format!("step {}: cannot reject at alpha 0", self.step + 1)));
        }
        Ok(self.commit(alpha, f64::NAN, rejected))
    }

    fn commit(&mut self, alpha: f64, p_value: f64, rejected: bool) -> StepRecord {
        self.step += 1;
        let k = self.step;
        let boost = if rejected { self.boosts.boost(self.rejection_times.len() + 1) } else { 0.0 };
        // alpha <= wealth, so the difference is nonnegative.
        self.wealth = (self.wealth - alpha).max(0.0) + boost;
        self.cumulative_alpha += alpha;
        self.earned += boost;
        if rejected {
            self.rejection_times.push(k);
            self.schedule_state.record_rejection(&self.schedule, k, self.wealth);
        }
        StepRecord { k, alpha, p_value, rejected, wealth_after: self.wealth }
    }
}

/// Decisions for a whole stream, plus what produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub policy: Policy,
    pub boosts: BoostSequence,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn rejection_count(&self) -> usize {
        self.records.iter().filter(|r| r.rejected).count()
    }

    /// `t_1 < t_2 < …`
    pub fn rejection_times(&self) -> Vec<usize> {
        self.records.iter().filter(|r| r.rejected).map(|r| r.k).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.alpha).collect()
    }

    pub fn decisions(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.rejected).collect()
    }
}

/// Runs a finite stream through a fresh engine.
pub fn run_stream(
    policy: Policy,
    boosts: &BoostSequence,
    schedule: &ScheduleConfig,
    p_values: &[f64],
) -> Result<Trajectory> {
    let mut state = init_state(policy, boosts, schedule)?;
    let mut records = Vec::with_capacity(p_values.len());
    for (i, &p) in p_values.iter().enumerate() {
        let rec = state
            .step(p)
            .map_err(|e| Error::Stream { index: i + 1, source: Box::new(e) })?;
        records.push(rec);
    }
    Ok(Trajectory { records, policy, boosts: boosts.clone() })
}

/// Alpha values implied by a rejection history, without any p-values.
pub fn replay_alphas(
    policy: Policy,
    boosts: &BoostSequence,
    schedule: &ScheduleConfig,
    decisions: &[bool],
) -> Result<Vec<f64>> {
    let mut state = init_state(policy, boosts, schedule)?;
    decisions
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            state
                .step_with_decision(d)
                .map(|r| r.alpha)
                .map_err(|e| Error::Stream { index: i + 1, source: Box::new(e) })
        })
        .collect()
}
