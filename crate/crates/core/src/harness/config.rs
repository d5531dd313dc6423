//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boost::{
    alpha_spending_boosts, lord_boosts, mfdr_safe_boosts, suplord_default_boosts, BoostSequence, SupLordParams,
};
use crate::engine::Policy;
use crate::error::{Error, Result};
use crate::metrics::SupMode;
use crate::schedule::{GammaNormalization, ScheduleKind};
use crate::simgen::{GeneratorConfig, Setting};

/// The offset `a`: a number, or `"canonical"` to maximise `w₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OffsetChoice {
    Value(f64),
    Named(NamedOffset),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedOffset {
    Canonical,
}

impl Default for OffsetChoice {
    fn default() -> Self {
        OffsetChoice::Value(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoostChoice {
    #[default]
    Default,
    MfdrSafe,
}

fn default_eps() -> f64 {
    0.15
}
fn default_delta() -> f64 {
    0.05
}
fn default_rstar() -> usize {
    30
}
fn default_level() -> f64 {
    0.05
}
fn default_lord_beta0_fraction() -> f64 {
    0.1
}

/// One algorithm of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    SupLord {
        #[serde(default = "default_eps")]
        epsilon_star: f64,
        #[serde(default = "default_delta")]
        delta_star: f64,
        #[serde(default = "default_rstar")]
        r_star: usize,
        #[serde(default)]
        a: OffsetChoice,
        #[serde(default)]
        boosts: BoostChoice,
    },
    Lord {
        #[serde(default = "default_level")]
        level: f64,
        #[serde(default = "default_lord_beta0_fraction")]
        beta0_fraction: f64,
    },
    AlphaSpending {
        #[serde(default = "default_level")]
        level: f64,
    },
}

impl AlgorithmSpec {
    pub fn suplord(epsilon_star: f64, delta_star: f64, r_star: usize, a: OffsetChoice, boosts: BoostChoice) -> Self {
        AlgorithmSpec::SupLord { epsilon_star, delta_star, r_star, a, boosts }
    }

    /// SupLORD with `ε* = 0.15`, `δ* = 0.05`, `r* = 30`, `a = 1` and default boosts.
    pub fn suplord_defaults() -> Self {
        Self::suplord(0.15, 0.05, 30, OffsetChoice::Value(1.0), BoostChoice::Default)
    }

    pub fn label(&self) -> String {
        match *self {
            AlgorithmSpec::SupLord { epsilon_star, delta_star, r_star, a, boosts } => {
                let a = match a {
                    OffsetChoice::Value(v) => format!("{v}"),
                    OffsetChoice::Named(NamedOffset::Canonical) => "canonical".into(),
                };
                let boosts = match boosts {
                    BoostChoice::Default => "",
                    BoostChoice::MfdrSafe => "-mfdr",
                };
                format!("suplord-eps{epsilon_star}-delta{delta_star}-r{r_star}-a{a}{boosts}")
            }
            AlgorithmSpec::Lord { level, .. } => format!("lord-{level}"),
            AlgorithmSpec::AlphaSpending { level } => format!("alpha_spending-{level}"),
        }
    }

    /// Resolves the policy and its boost sequence; fails for infeasible parameters.
    pub fn build(&self) -> Result<(Policy, BoostSequence)> {
        match *self {
            AlgorithmSpec::SupLord { epsilon_star, delta_star, r_star, a, boosts } => {
                let params = match a {
                    OffsetChoice::Value(a) => SupLordParams::new(epsilon_star, delta_star, r_star, a)?,
                    OffsetChoice::Named(NamedOffset::Canonical) => {
                        SupLordParams::with_canonical_a(epsilon_star, delta_star, r_star)?
                    }
                };
                let seq = match boosts {
                    BoostChoice::Default => suplord_default_boosts(&params)?,
                    BoostChoice::MfdrSafe => mfdr_safe_boosts(&params)?,
                };
                Ok((Policy::SupLord(params), seq))
            }
            AlgorithmSpec::Lord { level, beta0_fraction } => {
                Ok((Policy::Lord { level }, lord_boosts(level, beta0_fraction)?))
            }
            AlgorithmSpec::AlphaSpending { level } => {
                Ok((Policy::AlphaSpending { level }, alpha_spending_boosts(level)?))
            }
        }
    }
}

/// Where a cell's p-values come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DataSpec {
    /// Synthetic streams, one per trial.
    Generator { n: usize, setting: Setting },
    /// A fixed stream read from disk; the cell runs a single trial.
    Csv { path: PathBuf },
}

impl DataSpec {
    pub fn constant(n: usize, pi: f64, mu: f64) -> Self {
        DataSpec::Generator { n, setting: Setting::Constant { pi, mu } }
    }

    pub fn hmm(n: usize, transprob: f64, mu: f64) -> Self {
        DataSpec::Generator { n, setting: Setting::Hmm { transprob, mu } }
    }

    /// Stable id; per-trial seeds are keyed on it.
    pub fn label(&self) -> String {
        match self {
            DataSpec::Generator { n, setting } => format!("{}_n{n}", setting.label()),
            DataSpec::Csv { path } => {
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                format!("csv_{stem}")
            }
        }
    }

    pub fn generator(&self, seed: u64) -> Option<GeneratorConfig> {
        match *self {
            DataSpec::Generator { n, setting } => Some(GeneratorConfig { n, setting, seed }),
            DataSpec::Csv { .. } => None,
        }
    }
}

/// Window over which supFD and FDX are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MetricsMode {
    #[default]
    FromRStar,
    FixedK { k: usize },
}

impl From<MetricsMode> for SupMode {
    fn from(m: MetricsMode) -> Self {
        match m {
            MetricsMode::FromRStar => SupMode::FromRStar,
            MetricsMode::FixedK { k } => SupMode::FixedK(k),
        }
    }
}

fn default_trials() -> usize {
    200
}
fn default_schedules() -> Vec<ScheduleKind> {
    vec![ScheduleKind::Steady]
}
fn default_baseline_r_star() -> usize {
    30
}

/// Algorithm × schedule × data grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_schedules")]
    pub schedules: Vec<ScheduleKind>,
    pub data: Vec<DataSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub metrics: MetricsMode,
    /// FDX threshold and supFD start for algorithms without their own `ε*`, `r*`.
    #[serde(default = "default_eps")]
    pub baseline_epsilon: f64,
    #[serde(default = "default_baseline_r_star")]
    pub baseline_r_star: usize,
    /// Parameters of the reported FDP band.
    #[serde(default = "default_delta")]
    pub band_delta: f64,
    #[serde(default = "default_band_a")]
    pub band_a: f64,
    #[serde(default)]
    pub gamma: GammaNormalization,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_band_a() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn new(algorithms: Vec<AlgorithmSpec>, schedules: Vec<ScheduleKind>, data: Vec<DataSpec>, trials: usize) -> Self {
        ExperimentConfig {
            algorithms,
            schedules,
            data,
            trials,
            base_seed: 0,
            metrics: MetricsMode::FromRStar,
            baseline_epsilon: default_eps(),
            baseline_r_star: default_baseline_r_star(),
            band_delta: default_delta(),
            band_a: default_band_a(),
            gamma: GammaNormalization::Horizon,
            output_dir: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        // Relative CSV paths are taken relative to the config file.
        if let Some(dir) = path.parent() {
            for d in &mut cfg.data {
                if let DataSpec::Csv { path } = d {
                    if path.is_relative() {
                        *path = dir.join(&*path);
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Structural checks. Feasibility of individual cells is checked when they run.
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() || self.schedules.is_empty() || self.data.is_empty() {
            return Err(Error::Input("algorithms, schedules and data must all be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Input("trials must be at least 1".into()));
        }
        if self.baseline_r_star == 0 {
            return Err(Error::Input("baseline_r_star must be at least 1".into()));
        }
        if let MetricsMode::FixedK { k: 0 } = self.metrics {
            return Err(Error::Input("fixed-K metrics need K >= 1".into()));
        }
        for d in &self.data {
            if let Some(g) = d.generator(0) {
                g.validate()?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "algorithms": [{"policy": "sup_lord"}, {"policy": "alpha_spending"},
                               {"policy": "sup_lord", "r_star": 20, "a": "canonical", "boosts": "mfdr_safe"}],
                "data": [{"source": "generator", "n": 100, "setting": {"kind": "constant", "pi": 0.3, "mu": 3}}]
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.trials, 200);
        assert_eq!(cfg.schedules, vec![ScheduleKind::Steady]);
        assert_eq!(cfg.algorithms[0], AlgorithmSpec::suplord_defaults());
        assert_eq!(cfg.algorithms[2].label(), "suplord-eps0.15-delta0.05-r20-acanonical-mfdr");
        let (_, seq) = cfg.algorithms[2].build().unwrap();
        assert!(seq.beta0 > 0.0);
    }

    #[test]
    fn rejects_empty_grid_and_unknown_fields() {
        assert!(ExperimentConfig::from_json(r#"{"algorithms": [], "data": []}"#).is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"algorithms": [{"policy": "lord"}], "data": [{"source": "csv", "path": "x.csv"}], "trails": 3}"#
        )
        .is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig::new(
            vec![AlgorithmSpec::suplord_defaults(), AlgorithmSpec::Lord { level: 0.05, beta0_fraction: 0.1 }],
            vec![ScheduleKind::Steady, ScheduleKind::dynamic_default()],
            vec![DataSpec::constant(50, 0.2, 2.0), DataSpec::hmm(50, 0.1, 3.0)],
            3,
        );
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap(), cfg);
    }

    #[test]
    fn infeasible_algorithm_fails_to_build() {
        let spec = AlgorithmSpec::suplord(0.15, 0.05, 1, OffsetChoice::Value(1.0), BoostChoice::Default);
        assert!(matches!(spec.build(), Err(Error::Infeasible(_))));
    }
}
