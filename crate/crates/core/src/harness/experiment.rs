//! Grid execution.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{AlgorithmSpec, DataSpec, ExperimentConfig};
use super::io::ingest_csv;
use crate::boost::BoostSequence;
use crate::engine::{run_stream, Policy, Trajectory};
use crate::error::{Error, Result};
use crate::metrics::{aggregate, trial_metrics, AggregateMetrics, LabeledTrajectory, MetricsConfig, TrialMetrics};
use crate::schedule::{default_gamma_with, ScheduleConfig, ScheduleKind};
use crate::simgen::{derive_seed, generate, LabeledStream};

/// Whether trials of a cell run on the rayon pool or one after another.
/// Both produce bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

/// Per-step means that do not need labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellPaths {
    pub mean_wealth: Vec<f64>,
    pub mean_alpha: Vec<f64>,
    pub mean_rejections: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub trials: usize,
    pub mean_final_rejections: f64,
    pub paths: CellPaths,
    /// Oracle metrics; `None` for unlabeled data.
    pub metrics: Option<AggregateMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub id: String,
    pub algorithm: String,
    pub schedule: String,
    pub data: String,
    pub outcome: std::result::Result<CellSummary, String>,
}

impl CellResult {
    pub fn summary(&self) -> Option<&CellSummary> {
        self.outcome.as_ref().ok()
    }

    pub fn metrics(&self) -> Option<&AggregateMetrics> {
        self.summary().and_then(|s| s.metrics.as_ref())
    }
}

/// Every cell of the grid, in algorithm-major, then schedule, then data order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultsBundle {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellResult>,
}

impl ResultsBundle {
    pub fn cell(&self, id: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.id == id)
    }
}

pub fn cell_id(algorithm: &AlgorithmSpec, schedule: &ScheduleKind, data: &DataSpec) -> String {
    format!("{}__{}__{}", algorithm.label(), schedule.label(), data.label())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsBundle> {
    run_experiment_with(config, Execution::Parallel)
}

pub fn run_experiment_with(config: &ExperimentConfig, execution: Execution) -> Result<ResultsBundle> {
    config.validate()?;
    let mut cells = Vec::new();
    for alg in &config.algorithms {
        for sched in &config.schedules {
            for data in &config.data {
                let outcome = run_cell(config, alg, sched, data, execution).map_err(|e| e.to_string());
                cells.push(CellResult {
                    id: cell_id(alg, sched, data),
                    algorithm: alg.label(),
                    schedule: sched.label(),
                    data: data.label(),
                    outcome,
                });
            }
        }
    }
    Ok(ResultsBundle { tool_version: env!("CARGO_PKG_VERSION").into(), config: config.clone(), cells })
}

struct CellPlan<'a> {
    config: &'a ExperimentConfig,
    data: &'a DataSpec,
    data_key: String,
    policy: Policy,
    boosts: BoostSequence,
    schedule: ScheduleConfig,
    metrics: MetricsConfig,
    fixed: Option<LabeledStream>,
}

struct TrialOutput {
    trajectory: Trajectory,
    metrics: Option<TrialMetrics>,
}

impl CellPlan<'_> {
    fn stream(&self, trial: usize) -> Result<LabeledStream> {
        match &self.fixed {
            Some(s) => Ok(s.clone()),
            None => {
                let seed = derive_seed(self.config.base_seed, &self.data_key, trial as u64);
                generate(&self.data.generator(seed).expect("generator data"))
            }
        }
    }

    fn trial(&self, trial: usize) -> Result<TrialOutput> {
        let stream = self.stream(trial)?;
        let trajectory = run_stream(self.policy, &self.boosts, &self.schedule, &stream.p_values)?;
        let metrics = match stream.labels {
            Some(labels) => {
                let lt = LabeledTrajectory::new(trajectory.clone(), labels)?;
                Some(trial_metrics(&lt, &self.metrics)?)
            }
            None => None,
        };
        Ok(TrialOutput { trajectory, metrics })
    }
}

fn run_cell(
    config: &ExperimentConfig,
    alg: &AlgorithmSpec,
    sched: &ScheduleKind,
    data: &DataSpec,
    execution: Execution,
) -> Result<CellSummary> {
    let (policy, boosts) = alg.build()?;
    let fixed = match data {
        DataSpec::Csv { path } => Some(ingest_csv(path)?),
        DataSpec::Generator { .. } => None,
    };
    let n = match (&fixed, data) {
        (Some(s), _) => s.len(),
        (None, DataSpec::Generator { n, .. }) => *n,
        (None, DataSpec::Csv { .. }) => unreachable!(),
    };
    if n == 0 {
        return Err(Error::Input("empty stream".into()));
    }
    let trials = if fixed.is_some() { 1 } else { config.trials };
    let (epsilon, r_star) = match policy.suplord_params() {
        Some(p) => (p.epsilon_star, p.r_star),
        None => (config.baseline_epsilon, config.baseline_r_star),
    };
    let plan = CellPlan {
        config,
        data,
        data_key: data.label(),
        policy,
        boosts,
        schedule: ScheduleConfig::new(*sched, default_gamma_with(n, config.gamma)?)?,
        metrics: MetricsConfig { r_star, band_delta: config.band_delta, band_a: config.band_a },
        fixed,
    };
    let outputs: Vec<TrialOutput> = match execution {
        Execution::Parallel => (0..trials).into_par_iter().map(|t| plan.trial(t)).collect::<Result<_>>()?,
        Execution::Serial => (0..trials).map(|t| plan.trial(t)).collect::<Result<_>>()?,
    };
    summarize(outputs, epsilon, config)
}

fn summarize(outputs: Vec<TrialOutput>, epsilon: f64, config: &ExperimentConfig) -> Result<CellSummary> {
    let count = outputs.len() as f64;
    let n = outputs[0].trajectory.len();
    let mut mean_wealth = vec![0.0; n];
    let mut mean_alpha = vec![0.0; n];
    let mut mean_rejections = vec![0.0; n];
    for o in &outputs {
        let mut r = 0usize;
        for (i, rec) in o.trajectory.records.iter().enumerate() {
            r += rec.rejected as usize;
            mean_wealth[i] += rec.wealth_after;
            mean_alpha[i] += rec.alpha;
            mean_rejections[i] += r as f64;
        }
    }
    for v in [&mut mean_wealth, &mut mean_alpha, &mut mean_rejections] {
        v.iter_mut().for_each(|x| *x /= count);
    }
    let mean_final_rejections = mean_rejections.last().copied().unwrap_or(0.0);
    let per_trial: Option<Vec<TrialMetrics>> = outputs.into_iter().map(|o| o.metrics).collect();
    let metrics = match per_trial {
        Some(m) => Some(aggregate(&m, epsilon, config.metrics.into())?),
        None => None,
    };
    Ok(CellSummary {
        trials: count as usize,
        mean_final_rejections,
        paths: CellPaths { mean_wealth, mean_alpha, mean_rejections },
        metrics,
    })
}
