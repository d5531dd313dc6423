//! Checks shared by the property suite and the acceptance run.

#![allow(dead_code)]

use online_fdx::boost::{alpha_spending_boosts, suplord_default_boosts, BoostSequence, SupLordParams};
use online_fdx::engine::{replay_alphas, Policy, Trajectory};
use online_fdx::schedule::{ScheduleConfig, ScheduleKind};

pub fn suplord_defaults() -> (Policy, BoostSequence) {
    let p = SupLordParams::new(0.15, 0.05, 30, 1.0).unwrap();
    (Policy::SupLord(p), suplord_default_boosts(&p).unwrap())
}

pub fn alpha_spending() -> (Policy, BoostSequence) {
    (Policy::AlphaSpending { level: 0.05 }, alpha_spending_boosts(0.05).unwrap())
}

/// `W(k) = β₀ − Σα + Σ R·β_r` and `W(k) ≥ 0` at every step, `α_k ≤ W(k−1)`,
/// and the rejection rule.
pub fn check_wealth_identity(traj: &Trajectory, boosts: &BoostSequence) -> Result<(), String> {
    let mut spent = 0.0;
    let mut earned = 0.0;
    let mut prev = boosts.beta0;
    let mut r = 0;
    for rec in &traj.records {
        if !(rec.alpha >= 0.0 && rec.alpha <= 1.0 && rec.alpha <= prev + 1e-12) {
            return Err(format!("step {}: alpha {} with wealth {}", rec.k, rec.alpha, prev));
        }
        if rec.rejected != (rec.alpha > 0.0 && rec.p_value <= rec.alpha) {
            return Err(format!("step {}: wrong decision", rec.k));
        }
        spent += rec.alpha;
        if rec.rejected {
            r += 1;
            earned += boosts.boost(r);
        }
        let identity = boosts.beta0 - spent + earned;
        if rec.wealth_after < 0.0 || (rec.wealth_after - identity).abs() > 1e-12 * (1.0 + boosts.beta0 + earned) {
            return Err(format!("step {}: wealth {} vs identity {}", rec.k, rec.wealth_after, identity));
        }
        prev = rec.wealth_after;
    }
    Ok(())
}

/// Histories that differ by one extra early rejection, looking for a later
/// step whose alpha strictly drops. Returns `(early, late, k)`.
pub fn find_non_monotone_witness(
    kind: ScheduleKind,
    (policy, boosts): (Policy, BoostSequence),
) -> Option<(usize, usize, usize)> {
    let n = 60;
    let sched = ScheduleConfig::with_default_gamma(kind, n).unwrap();
    for late in 2..n {
        for early in 1..late {
            let mut base = vec![false; n];
            base[late - 1] = true;
            let mut more = base.clone();
            more[early - 1] = true;
            let (Ok(a), Ok(b)) = (
                replay_alphas(policy, &boosts, &sched, &base),
                replay_alphas(policy, &boosts, &sched, &more),
            ) else {
                continue;
            };
            if let Some(k) = (late..n).find(|&k| b[k] < a[k] - 1e-12) {
                return Some((early, late, k + 1));
            }
        }
    }
    None
}
