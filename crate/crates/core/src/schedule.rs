//! Spending sequences and alpha schedules.
//!
//! A spending sequence `γ` is a nonnegative sequence summing to at most one.
//! A schedule turns `γ`, the boosts and the rejection history into the next
//! alpha value:
//!
//! - steady: `α_k = γ_k β₀ + Σ_j γ_{k−t_j} β_j`
//! - aggressive: `α_k = γ_{k−τ} W(τ)`, `τ` the latest rejection time (0 if none)
//! - dynamic: like steady, but the rejection at `t_j` spends its boost with a
//!   sequence `γ̃(W(t_j), W(0))` that front-loads spending when wealth is high.

use serde::{Deserialize, Serialize};

use crate::boost::BoostSequence;
use crate::error::{Error, Result};

/// Unnormalised default weight `log(i ∨ 2) / (i·exp(√log i))`.
fn default_weight(i: usize) -> f64 {
    let x = i as f64;
    (x.max(2.0)).ln() / (x * x.ln().sqrt().exp())
}

/// How [`default_gamma_with`] normalises the default weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GammaNormalization {
    /// Sum to exactly one over the finite horizon.
    #[default]
    Horizon,
    /// Divide by the sum of the infinite series; the horizon then carries
    /// less than unit mass.
    Infinite,
}

/// Sum of the unnormalised default weights over all `i >= 1`.
///
/// Direct summation up to `M` plus the closed-form integral of the tail,
/// `∫_M^∞ log x/(x e^{√log x}) dx = 2e^{-s}(s³+3s²+6s+6)` with `s = √log M`,
/// and the half-term Euler–Maclaurin correction.
pub fn default_gamma_infinite_mass() -> f64 {
    infinite_mass_with_cutoff(1 << 20)
}

fn infinite_mass_with_cutoff(m: usize) -> f64 {
    let head: f64 = (1..m).map(default_weight).sum();
    let s = (m as f64).ln().sqrt();
    let tail = 2.0 * (-s).exp() * (s * s * s + 3.0 * s * s + 6.0 * s + 6.0);
    head + tail + 0.5 * default_weight(m)
}

/// Finite spending sequence `γ_1..γ_n`; entries past the horizon read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpendingSequence {
    gamma: Vec<f64>,
}

impl SpendingSequence {
    pub fn from_weights(gamma: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::Input("spending sequence needs at least one entry".into()));
        }
        if let Some(g) = gamma.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::Input(format!("spending sequence entry {g} is not a nonnegative number")));
        }
        let total: f64 = gamma.iter().sum();
        if total > 1.0 + 1e-9 {
            return Err(Error::Input(format!("spending sequence sums to {total} > 1")));
        }
        Ok(SpendingSequence { gamma })
    }

    /// `γ_i` for 1-based `i`; zero for `i = 0` or beyond the horizon.
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        self.gamma.get(i - 1).copied().unwrap_or(0.0)
    }

    pub fn horizon(&self) -> usize {
        self.gamma.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gamma
    }

    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

/// The default spending sequence normalised to sum to one over `1..=n`.
pub fn default_gamma(n: usize) -> Result<SpendingSequence> {
    default_gamma_with(n, GammaNormalization::Horizon)
}

pub fn default_gamma_with(n: usize, normalization: GammaNormalization) -> Result<SpendingSequence> {
    if n == 0 {
        return Err(Error::Input("spending sequence horizon must be at least 1".into()));
    }
    let raw: Vec<f64> = (1..=n).map(default_weight).collect();
    let norm = match normalization {
        GammaNormalization::Horizon => raw.iter().sum::<f64>(),
        GammaNormalization::Infinite => default_gamma_infinite_mass(),
    };
    SpendingSequence::from_weights(raw.into_iter().map(|g| g / norm).collect())
}

/// Default acceleration coefficient of the dynamic schedule.
///
/// The branch test compares `ξ·W/W(0)` with one, so `ξ` must sit well below
/// one: `W(0) = β₀` is small and the wealth of a productive stream grows to
/// tens of times `W(0)`. With `ξ ≥ 1` the initial term is always active and
/// `β₀` is spent within the first few steps.
pub const DEFAULT_XI: f64 = 0.07;
/// Default active-window length of the dynamic schedule.
pub const DEFAULT_RHO: usize = 150;

fn default_xi() -> f64 {
    DEFAULT_XI
}

fn default_rho() -> usize {
    DEFAULT_RHO
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleKind {
    Steady,
    Aggressive,
    /// `xi` scales the wealth ratio into an exponent; `rho` is the length of
    /// the window over which an active boost is spent.
    Dynamic {
        #[serde(default = "default_xi")]
        xi: f64,
        #[serde(default = "default_rho")]
        rho: usize,
    },
}

impl ScheduleKind {
    pub fn dynamic_default() -> Self {
        ScheduleKind::Dynamic { xi: DEFAULT_XI, rho: DEFAULT_RHO }
    }

    pub fn label(&self) -> String {
        match self {
            ScheduleKind::Steady => "steady".into(),
            ScheduleKind::Aggressive => "aggressive".into(),
            ScheduleKind::Dynamic { xi, rho } => format!("dynamic-xi{xi}-rho{rho}"),
        }
    }
}

/// A schedule kind bound to its base spending sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    pub base: SpendingSequence,
    /// `ln γ_i`, cached for the dynamic schedule.
    log_gamma: Vec<f64>,
}

impl ScheduleConfig {
    pub fn new(kind: ScheduleKind, base: SpendingSequence) -> Result<Self> {
        if let ScheduleKind::Dynamic { xi, rho } = kind {
            if !(xi > 0.0 && xi.is_finite()) {
                return Err(Error::Input(format!("dynamic xi must be positive, got {xi}")));
            }
            if rho == 0 {
                return Err(Error::Input("dynamic rho must be at least 1".into()));
            }
        }
        let log_gamma = match kind {
            ScheduleKind::Dynamic { .. } => base.as_slice().iter().map(|g| g.ln()).collect(),
            _ => Vec::new(),
        };
        Ok(ScheduleConfig { kind, base, log_gamma })
    }

    /// Schedule over the default `γ` with horizon `n`.
    pub fn with_default_gamma(kind: ScheduleKind, n: usize) -> Result<Self> {
        Self::new(kind, default_gamma(n)?)
    }

    pub fn steady(n: usize) -> Result<Self> {
        Self::with_default_gamma(ScheduleKind::Steady, n)
    }

    pub fn aggressive(n: usize) -> Result<Self> {
        Self::with_default_gamma(ScheduleKind::Aggressive, n)
    }

    pub fn dynamic(n: usize, xi: f64, rho: usize) -> Result<Self> {
        Self::with_default_gamma(ScheduleKind::Dynamic { xi, rho }, n)
    }

    /// `α_k` for the current history. Not clamped; the engine applies the
    /// `[0, 1]` and wealth caps.
    pub fn alpha(&self, state: &ScheduleState, boosts: &BoostSequence, k: usize) -> f64 {
        match self.kind {
            ScheduleKind::Steady => steady_alpha(state, boosts, &self.base, k),
            ScheduleKind::Aggressive => aggressive_alpha(state, &self.base, k),
            ScheduleKind::Dynamic { .. } => dynamic_alpha(state, boosts, self, k),
        }
    }

    fn window(&self, wealth: f64, initial_wealth: f64) -> Window {
        let ScheduleKind::Dynamic { xi, rho } = self.kind else {
            return Window::Inactive;
        };
        let ratio = xi * wealth / initial_wealth;
        if !(ratio > 1.0) {
            return Window::Inactive;
        }
        let exponent = ratio.max(1.0);
        let logs = &self.log_gamma[..rho.min(self.log_gamma.len())];
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (exponent * (l - peak)).exp()).sum();
        Window::Active { exponent, log_norm: exponent * peak + sum.ln() }
    }

    fn windowed_gamma(&self, window: Window, i: usize) -> f64 {
        match window {
            Window::Inactive => self.base.get(i),
            Window::Active { exponent, log_norm } => {
                let ScheduleKind::Dynamic { rho, .. } = self.kind else { unreachable!() };
                if i == 0 || i > rho || i > self.log_gamma.len() {
                    0.0
                } else {
                    (exponent * self.log_gamma[i - 1] - log_norm).exp()
                }
            }
        }
    }
}

/// Per-rejection spending window of the dynamic schedule.
///
/// The active normaliser `Σ_{j≤ρ} γ_j^e` is held in log space, so large
/// exponents never underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Window {
    Inactive,
    Active { exponent: f64, log_norm: f64 },
}

/// Wealth immediately after the step at which a rejection was made.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub time: usize,
    pub wealth: f64,
    window: Window,
}

impl Snapshot {
    /// Whether the dynamic schedule spends this rejection's boost in the
    /// accelerated window.
    pub fn is_active(&self) -> bool {
        matches!(self.window, Window::Active { .. })
    }
}

/// Rejection history seen by the schedules: the `t₀ = 0` entry with
/// `W(0) = β₀` and one immutable snapshot per rejection.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleState {
    initial: Snapshot,
    snapshots: Vec<Snapshot>,
}

impl ScheduleState {
    pub fn new(config: &ScheduleConfig, beta0: f64) -> Result<Self> {
        if matches!(config.kind, ScheduleKind::Dynamic { .. }) && !(beta0 > 0.0) {
            return Err(Error::Input("dynamic schedule needs positive initial wealth W(0)".into()));
        }
        let window = config.window(beta0, beta0);
        Ok(ScheduleState { initial: Snapshot { time: 0, wealth: beta0, window }, snapshots: Vec::new() })
    }

    pub fn record_rejection(&mut self, config: &ScheduleConfig, time: usize, wealth_after: f64) {
        debug_assert!(self.last().time < time);
        let window = config.window(wealth_after, self.initial.wealth);
        self.snapshots.push(Snapshot { time, wealth: wealth_after, window });
    }

    pub fn initial_wealth(&self) -> f64 {
        self.initial.wealth
    }

    pub fn rejections(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Latest rejection, or the `t₀ = 0` entry.
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().unwrap_or(&self.initial)
    }
}

/// `α_k = γ_k β₀ + Σ_{j ≤ r(k−1)} γ_{k−t_j} β_j`.
pub fn steady_alpha(state: &ScheduleState, boosts: &BoostSequence, base: &SpendingSequence, k: usize) -> f64 {
    let mut alpha = base.get(k) * boosts.beta0;
    for (j, s) in state.snapshots.iter().enumerate() {
        alpha += base.get(k - s.time) * boosts.boost(j + 1);
    }
    alpha
}

/// `α_k = γ_{k−τ} W(τ)` with `τ` the most recent rejection time.
pub fn aggressive_alpha(state: &ScheduleState, base: &SpendingSequence, k: usize) -> f64 {
    let last = state.last();
    base.get(k - last.time) * last.wealth
}

/// `γ̃_i(W, W(0))`: when `ξ·W/W(0) > 1` the first `ρ` entries of `γ` raised
/// to `e = ξ·W/W(0) ∨ 1` and renormalised (zero past `ρ`), else `γ_i`.
pub fn dynamic_gamma(i: usize, wealth: f64, initial_wealth: f64, config: &ScheduleConfig) -> Result<f64> {
    if !matches!(config.kind, ScheduleKind::Dynamic { .. }) {
        return Err(Error::Input("dynamic_gamma needs a dynamic schedule".into()));
    }
    if !(initial_wealth > 0.0) {
        return Err(Error::Input(format!("W(0) must be positive, got {initial_wealth}")));
    }
    if i == 0 || !(wealth >= 0.0) {
        return Err(Error::Input(format!("need i >= 1 and W >= 0, got i={i}, W={wealth}")));
    }
    Ok(config.windowed_gamma(config.window(wealth, initial_wealth), i))
}

/// `α_k = γ̃_k(W(0), W(0)) β₀ + Σ_j γ̃_{k−t_j}(W(t_j), W(0)) β_j`.
pub fn dynamic_alpha(state: &ScheduleState, boosts: &BoostSequence, config: &ScheduleConfig, k: usize) -> f64 {
    let mut alpha = config.windowed_gamma(state.initial.window, k) * boosts.beta0;
    for (j, s) in state.snapshots.iter().enumerate() {
        alpha += config.windowed_gamma(s.window, k - s.time) * boosts.boost(j + 1);
    }
    alpha
}
