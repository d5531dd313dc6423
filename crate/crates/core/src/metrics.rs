//! Error metrics and FDP estimators.
//!
//! Per-trial quantities come from a trajectory plus its null labels; the
//! cross-trial reductions (FDR, supFD, FDX, power, mFDR) live in [`aggregate`].
//! Suprema are taken over the finite horizon of the stream, which can only
//! bias supFD and FDX downwards.

use serde::{Deserialize, Serialize};

use crate::boost::coef;
use crate::engine::Trajectory;
use crate::error::{Error, Result};

/// A trajectory with ground truth: `labels[i]` is true when hypothesis `i+1` is null.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTrajectory {
    pub trajectory: Trajectory,
    pub labels: Vec<bool>,
}

impl LabeledTrajectory {
    pub fn new(trajectory: Trajectory, labels: Vec<bool>) -> Result<Self> {
        if trajectory.len() != labels.len() {
            return Err(Error::Input(format!(
                "trajectory has {} steps but {} labels",
                trajectory.len(),
                labels.len()
            )));
        }
        Ok(LabeledTrajectory { trajectory, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// `|V_k| / (|R_k| ∨ 1)` over the first `k` steps.
pub fn fdp(lt: &LabeledTrajectory, k: usize) -> f64 {
    let (v, r) = lt.trajectory.records[..k]
        .iter()
        .zip(&lt.labels)
        .filter(|(rec, _)| rec.rejected)
        .fold((0usize, 0usize), |(v, r), (_, &null)| (v + null as usize, r + 1));
    v as f64 / r.max(1) as f64
}

/// FDP after every step.
pub fn fdp_path(lt: &LabeledTrajectory) -> Vec<f64> {
    let mut v = 0usize;
    let mut r = 0usize;
    lt.trajectory
        .records
        .iter()
        .zip(&lt.labels)
        .map(|(rec, &null)| {
            if rec.rejected {
                r += 1;
                v += null as usize;
            }
            v as f64 / r.max(1) as f64
        })
        .collect()
}

fn alpha_sum_and_rejections(traj: &Trajectory, k: usize) -> (f64, usize) {
    traj.records[..k]
        .iter()
        .fold((0.0, 0), |(s, r), rec| (s + rec.alpha, r + rec.rejected as usize))
}

/// LORD estimator `Σ_{i≤k} α_i / (|R_k| ∨ 1)`.
pub fn fdp_hat_lord(traj: &Trajectory, k: usize) -> f64 {
    let (s, r) = alpha_sum_and_rejections(traj, k);
    s / r.max(1) as f64
}

/// `C_a(1/δ)·(Σ_{i≤k} α_i + a)/|R_k|`; `+∞` before the first rejection.
pub fn fdp_bar(traj: &Trajectory, k: usize, delta: f64, a: f64) -> Result<f64> {
    let c = coef(delta, a)?;
    let (s, r) = alpha_sum_and_rejections(traj, k);
    Ok(fdp_bar_from(c, s, r, a))
}

#[inline]
fn fdp_bar_from(c: f64, alpha_sum: f64, rejections: usize, a: f64) -> f64 {
    if rejections == 0 {
        f64::INFINITY
    } else {
        c * (alpha_sum + a) / rejections as f64
    }
}

/// Time-uniform upper band on the FDP: `fdp_bar` at every step, clipped to `[0, 1]`.
///
/// Under conditional superuniformity of the nulls, the FDP stays below the
/// band at all steps simultaneously with probability at least `1 − δ`.
pub fn kr_band(traj: &Trajectory, delta: f64, a: f64) -> Result<Vec<f64>> {
    let c = coef(delta, a)?;
    let mut s = 0.0;
    let mut r = 0;
    Ok(traj
        .records
        .iter()
        .map(|rec| {
            s += rec.alpha;
            r += rec.rejected as usize;
            fdp_bar_from(c, s, r, a).clamp(0.0, 1.0)
        })
        .collect())
}

/// Settings for per-trial metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    /// Rejection count from which supFD and FDX are measured.
    pub r_star: usize,
    /// Confidence parameter of the FDP band.
    pub band_delta: f64,
    /// Offset of the FDP band.
    pub band_a: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { r_star: 1, band_delta: 0.05, band_a: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub fdp_path: Vec<f64>,
    /// `|V_k|` after each step.
    pub false_rejections: Vec<u32>,
    /// `|R_k|` after each step.
    pub rejections: Vec<u32>,
    pub wealth_path: Vec<f64>,
    pub alpha_path: Vec<f64>,
    pub band_path: Vec<f64>,
    /// Fraction of non-nulls rejected by the end; `None` with no non-nulls.
    pub power_final: Option<f64>,
    /// `t_r` for `r = 1, 2, …`
    pub rejection_times: Vec<usize>,
    pub r_star: usize,
    pub reached_rstar: bool,
    /// Whether the FDP ever rose above the band.
    pub band_exceeded: bool,
    /// `sup_{j ≥ k} FDP(j)` indexed by `k − 1`.
    suffix_sup: Vec<f64>,
}

impl TrialMetrics {
    pub fn len(&self) -> usize {
        self.fdp_path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fdp_path.is_empty()
    }

    /// `max_{k ∈ [from, n]} FDP(k)`; zero for an empty range.
    pub fn sup_fdp_from(&self, from: usize) -> f64 {
        let idx = from.max(1) - 1;
        self.suffix_sup.get(idx).copied().unwrap_or(0.0)
    }

    /// Supremum from `t_{r*}`, or zero if `r*` rejections never happened.
    pub fn sup_fdp_from_rstar(&self) -> f64 {
        match self.rejection_times.get(self.r_star - 1) {
            Some(&t) => self.sup_fdp_from(t),
            None => 0.0,
        }
    }

    pub fn final_rejections(&self) -> u32 {
        self.rejections.last().copied().unwrap_or(0)
    }
}

pub fn trial_metrics(lt: &LabeledTrajectory, cfg: &MetricsConfig) -> Result<TrialMetrics> {
    if cfg.r_star == 0 {
        return Err(Error::Input("r* must be at least 1".into()));
    }
    let traj = &lt.trajectory;
    let n = lt.len();
    let fdp_path = fdp_path(lt);
    let band_path = kr_band(traj, cfg.band_delta, cfg.band_a)?;
    let mut v = 0u32;
    let mut r = 0u32;
    let mut false_rejections = Vec::with_capacity(n);
    let mut rejections = Vec::with_capacity(n);
    let mut rejection_times = Vec::new();
    let mut true_rejections = 0usize;
    for (rec, &null) in traj.records.iter().zip(&lt.labels) {
        if rec.rejected {
            r += 1;
            rejection_times.push(rec.k);
            if null {
                v += 1;
            } else {
                true_rejections += 1;
            }
        }
        false_rejections.push(v);
        rejections.push(r);
    }
    let non_nulls = lt.labels.iter().filter(|&&null| !null).count();
    let power_final = (non_nulls > 0).then(|| true_rejections as f64 / non_nulls as f64);
    let mut suffix_sup = fdp_path.clone();
    for i in (0..n.saturating_sub(1)).rev() {
        suffix_sup[i] = suffix_sup[i].max(suffix_sup[i + 1]);
    }
    let band_exceeded = fdp_path.iter().zip(&band_path).any(|(f, b)| f > b);
    Ok(TrialMetrics {
        reached_rstar: rejection_times.len() >= cfg.r_star,
        wealth_path: traj.records.iter().map(|r| r.wealth_after).collect(),
        alpha_path: traj.records.iter().map(|r| r.alpha).collect(),
        fdp_path,
        false_rejections,
        rejections,
        band_path,
        power_final,
        rejection_times,
        r_star: cfg.r_star,
        band_exceeded,
        suffix_sup,
    })
}

/// Where the supremum for supFD and FDX starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMode {
    /// From `t_{r*}` of each trial; trials that never reach `r*` contribute 0.
    FromRStar,
    /// From a fixed step `K`.
    FixedK(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub trial_count: usize,
    pub epsilon_star: f64,
    pub mode: SupMode,
    /// Mean FDP at each step.
    pub fdr_path: Vec<f64>,
    pub fdr_se_path: Vec<f64>,
    /// Mean of `sup_{j ≥ k} FDP(j)` at each step `k`.
    pub supfd_path: Vec<f64>,
    pub band_path: Vec<f64>,
    /// Cross-trial 95th percentile of the FDP at each step.
    pub fdp_q95_path: Vec<f64>,
    pub mean_wealth_path: Vec<f64>,
    pub mean_alpha_path: Vec<f64>,
    /// `E|V_k| / E[|R_k| ∨ 1]`.
    pub mfdr_path: Vec<f64>,
    pub mfdr_se_path: Vec<f64>,
    pub supfd: f64,
    pub supfd_se: f64,
    pub fdx: f64,
    pub power: Option<f64>,
    pub power_se: Option<f64>,
    pub fraction_reached_rstar: f64,
    pub mean_rejections: f64,
    pub band_exceedance: f64,
}

impl AggregateMetrics {
    pub fn horizon(&self) -> usize {
        self.fdr_path.len()
    }

    pub fn fdr_final(&self) -> f64 {
        self.fdr_path.last().copied().unwrap_or(0.0)
    }

    pub fn fdr_max(&self) -> f64 {
        self.fdr_path.iter().copied().fold(0.0, f64::max)
    }

    pub fn mfdr_final(&self) -> f64 {
        self.mfdr_path.last().copied().unwrap_or(0.0)
    }
}

fn mean_se(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Reduces per-trial metrics in the given order.
pub fn aggregate(trials: &[TrialMetrics], epsilon_star: f64, mode: SupMode) -> Result<AggregateMetrics> {
    let first = trials.first().ok_or_else(|| Error::Input("aggregate needs at least one trial".into()))?;
    let n = first.len();
    if trials.iter().any(|t| t.len() != n) {
        return Err(Error::Input("trials have different lengths".into()));
    }
    let count = trials.len();
    let cf = count as f64;
    let sups: Vec<f64> = trials
        .iter()
        .map(|t| match mode {
            SupMode::FromRStar => t.sup_fdp_from_rstar(),
            SupMode::FixedK(k) => t.sup_fdp_from(k),
        })
        .collect();
    let (supfd, supfd_se) = mean_se(sups.iter().copied());
    let fdx = sups.iter().filter(|&&s| s >= epsilon_star).count() as f64 / cf;

    let powers: Vec<f64> = trials.iter().filter_map(|t| t.power_final).collect();
    let (power, power_se) = if powers.is_empty() {
        (None, None)
    } else {
        let (m, se) = mean_se(powers.iter().copied());
        (Some(m), Some(se))
    };

    let mut fdr_path = Vec::with_capacity(n);
    let mut fdr_se_path = Vec::with_capacity(n);
    let mut supfd_path = Vec::with_capacity(n);
    let mut band_path = Vec::with_capacity(n);
    let mut fdp_q95_path = Vec::with_capacity(n);
    let mut mean_wealth_path = Vec::with_capacity(n);
    let mut mean_alpha_path = Vec::with_capacity(n);
    let mut mfdr_path = Vec::with_capacity(n);
    let mut mfdr_se_path = Vec::with_capacity(n);
    let q_rank = ((0.95 * cf).ceil() as usize).clamp(1, count) - 1;
    let mut column = vec![0.0; count];
    for k in 0..n {
        let (m, se) = mean_se(trials.iter().map(|t| t.fdp_path[k]));
        fdr_path.push(m);
        fdr_se_path.push(se);
        supfd_path.push(trials.iter().map(|t| t.suffix_sup[k]).sum::<f64>() / cf);
        band_path.push(trials.iter().map(|t| t.band_path[k]).sum::<f64>() / cf);
        mean_wealth_path.push(trials.iter().map(|t| t.wealth_path[k]).sum::<f64>() / cf);
        mean_alpha_path.push(trials.iter().map(|t| t.alpha_path[k]).sum::<f64>() / cf);
        for (c, t) in column.iter_mut().zip(trials) {
            *c = t.fdp_path[k];
        }
        column.sort_by(f64::total_cmp);
        fdp_q95_path.push(column[q_rank]);

        let v_mean = trials.iter().map(|t| t.false_rejections[k] as f64).sum::<f64>() / cf;
        let d_mean = trials.iter().map(|t| t.rejections[k].max(1) as f64).sum::<f64>() / cf;
        let ratio = v_mean / d_mean;
        mfdr_path.push(ratio);
        // Delta-method standard error of a ratio of means.
        let se = if count < 2 {
            0.0
        } else {
            let resid: f64 = trials
                .iter()
                .map(|t| {
                    let e = t.false_rejections[k] as f64 - ratio * t.rejections[k].max(1) as f64;
                    e * e
                })
                .sum();
            (resid / (cf * (cf - 1.0))).sqrt() / d_mean
        };
        mfdr_se_path.push(se);
    }

    Ok(AggregateMetrics {
        trial_count: count,
        epsilon_star,
        mode,
        fdr_path,
        fdr_se_path,
        supfd_path,
        band_path,
        fdp_q95_path,
        mean_wealth_path,
        mean_alpha_path,
        mfdr_path,
        mfdr_se_path,
        supfd,
        supfd_se,
        fdx,
        power,
        power_se,
        fraction_reached_rstar: trials.iter().filter(|t| t.reached_rstar).count() as f64 / cf,
        mean_rejections: trials.iter().map(|t| t.final_rejections() as f64).sum::<f64>() / cf,
        band_exceedance: trials.iter().filter(|t| t.band_exceeded).count() as f64 / cf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boost::BoostSequence;
    use crate::engine::{Policy, StepRecord};

    fn traj(steps: &[(f64, bool)]) -> Trajectory {
        Trajectory {
            records: steps
                .iter()
                .enumerate()
                .map(|(i, &(alpha, rejected))| StepRecord {
                    k: i + 1,
                    alpha,
                    p_value: if rejected { 0.0 } else { 1.0 },
                    rejected,
                    wealth_after: 0.0,
                })
                .collect(),
            policy: Policy::Lord { level: 0.05 },
            boosts: BoostSequence::custom(0.0, vec![], 0.0),
        }
    }

    fn labeled(steps: &[(f64, bool)], labels: &[bool]) -> LabeledTrajectory {
        LabeledTrajectory::new(traj(steps), labels.to_vec()).unwrap()
    }

    #[test]
    fn fdp_basic_cases() {
        let none = labeled(&[(0.1, false), (0.1, false)], &[true, false]);
        assert_eq!(fdp(&none, 2), 0.0);
        let all_null = labeled(&[(0.1, true), (0.1, true)], &[true, true]);
        assert_eq!(fdp(&all_null, 2), 1.0);
        let quarter = labeled(&[(0.1, true); 4], &[true, false, false, false]);
        assert_eq!(fdp(&quarter, 4), 0.25);
        assert_eq!(fdp_path(&quarter), vec![1.0, 0.5, 1.0 / 3.0, 0.25]);
    }

    #[test]
    fn label_length_mismatch() {
        assert!(LabeledTrajectory::new(traj(&[(0.1, false)]), vec![]).is_err());
    }

    #[test]
    fn lord_estimator() {
        let t = traj(&[(0.0, false), (0.0, false)]);
        assert_eq!(fdp_hat_lord(&t, 2), 0.0);
        let t = traj(&[(0.2, false), (0.3, true)]);
        assert_eq!(fdp_hat_lord(&t, 2), 0.5);
    }

    #[test]
    fn fdp_bar_formula() {
        let mut steps = vec![(0.05, true); 10];
        steps[0].0 = 0.05;
        let t = traj(&steps);
        let c = coef(0.05, 1.0).unwrap();
        let v = fdp_bar(&t, 10, 0.05, 1.0).unwrap();
        assert!((v - c * 1.5 / 10.0).abs() < 1e-12);
        assert!((v - 0.32439).abs() < 1e-5);
        let t = traj(&[(0.1, false)]);
        assert_eq!(fdp_bar(&t, 1, 0.05, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn band_clipped_and_decreasing_in_rejections() {
        let t = traj(&[(0.0, false), (0.0, true), (0.0, true), (0.0, true), (0.0, true)]);
        let band = kr_band(&t, 0.05, 1.0).unwrap();
        assert_eq!(band[0], 1.0);
        for w in band[1..].windows(2) {
            assert!(w[1] <= w[0]);
        }
        // Linear in the coefficient before clipping.
        let c = coef(0.05, 1.0).unwrap();
        assert!((band[4] - c * 1.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn trial_metrics_fields() {
        let lt = labeled(&[(0.1, true), (0.1, false), (0.1, true)], &[false, false, true]);
        let m = trial_metrics(&lt, &MetricsConfig { r_star: 2, ..Default::default() }).unwrap();
        assert_eq!(m.rejection_times, vec![1, 3]);
        assert!(m.reached_rstar);
        assert_eq!(m.power_final, Some(0.5));
        assert_eq!(m.sup_fdp_from_rstar(), 0.5);
        assert_eq!(m.sup_fdp_from(1), 0.5);
        assert_eq!(m.sup_fdp_from(4), 0.0);
        let m = trial_metrics(&lt, &MetricsConfig { r_star: 3, ..Default::default() }).unwrap();
        assert!(!m.reached_rstar);
        assert_eq!(m.sup_fdp_from_rstar(), 0.0);
    }

    #[test]
    fn all_null_power_undefined() {
        let lt = labeled(&[(0.1, true)], &[true]);
        assert_eq!(trial_metrics(&lt, &MetricsConfig::default()).unwrap().power_final, None);
    }

    #[test]
    fn perfect_rejector() {
        let labels = [true, false, true, false, false];
        let steps: Vec<(f64, bool)> = labels.iter().map(|&n| (0.1, !n)).collect();
        let m = trial_metrics(&labeled(&steps, &labels), &MetricsConfig::default()).unwrap();
        assert_eq!(m.power_final, Some(1.0));
        assert!(m.fdp_path.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn aggregate_single_trial_exceedance() {
        // FDP sup 0.2 from the first rejection on.
        let labels = [true, false, false, false, false];
        let steps = vec![(0.1, false), (0.1, true), (0.1, true), (0.1, true), (0.1, true)];
        let mut labels = labels.to_vec();
        labels[0] = false;
        labels[1] = true;
        let m = trial_metrics(&labeled(&steps, &labels), &MetricsConfig::default()).unwrap();
        let agg = aggregate(&[m.clone()], 0.15, SupMode::FromRStar).unwrap();
        assert_eq!(agg.supfd, 1.0);
        assert_eq!(agg.fdx, 1.0);
        let agg = aggregate(&[m], 0.15, SupMode::FixedK(5)).unwrap();
        assert_eq!(agg.supfd, 0.25);
        assert_eq!(agg.fdx, 1.0);
        assert!(aggregate(&[], 0.15, SupMode::FromRStar).is_err());
    }

    #[test]
    fn aggregate_mfdr_denominator_floor() {
        let m = trial_metrics(&labeled(&[(0.1, false)], &[true]), &MetricsConfig::default()).unwrap();
        let agg = aggregate(&[m.clone(), m], 0.15, SupMode::FromRStar).unwrap();
        assert_eq!(agg.mfdr_path, vec![0.0]);
        assert_eq!(agg.power, None);
    }
}
