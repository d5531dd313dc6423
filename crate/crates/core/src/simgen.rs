//! Seeded synthetic p-value streams.
//!
//! Each step consumes exactly two 64-bit words from a ChaCha8 stream keyed by
//! the config seed: one for the label, one for the test statistic. Step `i`
//! therefore always reads the same keystream position, so a stream prefix
//! does not depend on `n`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

/// How labels and signal strengths are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Setting {
    /// Independent labels, non-null with probability `pi`.
    Constant { pi: f64, mu: f64 },
    /// Two-state label chain; see [`hmm_stream`].
    Hmm { transprob: f64, mu: f64 },
}

impl Setting {
    pub fn mu(&self) -> f64 {
        match *self {
            Setting::Constant { mu, .. } | Setting::Hmm { mu, .. } => mu,
        }
    }

    /// Short id such as `const_pi0.3_mu3`.
    pub fn label(&self) -> String {
        match *self {
            Setting::Constant { pi, mu } => format!("const_pi{pi}_mu{mu}"),
            Setting::Hmm { transprob, mu } => format!("hmm_tp{transprob}_mu{mu}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Setting::Constant { pi, mu } => {
                if !(0.0..=1.0).contains(&pi) {
                    return Err(Error::Input(format!("pi must lie in [0, 1], got {pi}")));
                }
                if !mu.is_finite() {
                    return Err(Error::Input(format!("mu must be finite, got {mu}")));
                }
            }
            Setting::Hmm { transprob, mu } => {
                if !(transprob > 0.0 && transprob < 1.0) {
                    return Err(Error::Input(format!("transprob must lie in (0, 1), got {transprob}")));
                }
                if !mu.is_finite() {
                    return Err(Error::Input(format!("mu must be finite, got {mu}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub setting: Setting,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn constant(n: usize, pi: f64, mu: f64, seed: u64) -> Self {
        GeneratorConfig { n, setting: Setting::Constant { pi, mu }, seed }
    }

    pub fn hmm(n: usize, transprob: f64, mu: f64, seed: u64) -> Self {
        GeneratorConfig { n, setting: Setting::Hmm { transprob, mu }, seed }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        GeneratorConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Input("stream length n must be positive".into()));
        }
        self.setting.validate()
    }
}

/// p-values with optional null labels (`true` = null).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledStream {
    pub p_values: Vec<f64>,
    pub labels: Option<Vec<bool>>,
}

impl LabeledStream {
    pub fn new(p_values: Vec<f64>, labels: Option<Vec<bool>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != p_values.len() {
                return Err(Error::Input(format!(
                    "{} p-values but {} labels",
                    p_values.len(),
                    l.len()
                )));
            }
        }
        if let Some((i, p)) = p_values.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Input(format!("p-value {p} at position {} outside [0, 1]", i + 1)));
        }
        Ok(LabeledStream { p_values, labels })
    }

    pub fn len(&self) -> usize {
        self.p_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_values.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    pub fn null_count(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l.iter().filter(|&&b| b).count())
    }
}

/// Standard normal upper tail `Φ(−z) = 1 − Φ(z)` without cancellation.
pub fn phi_neg(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Quantile `Φ⁻¹(u)` for `u ∈ (0, 1)`.
pub fn normal_quantile(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

/// Maps a word to the open interval `(0, 1)` on a 2⁻⁵³ grid.
#[inline]
pub fn unit_open(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

struct StepDraws {
    rng: ChaCha8Rng,
}

impl StepDraws {
    fn new(seed: u64) -> Self {
        StepDraws { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform for the label and standard normal for the statistic.
    fn next(&mut self) -> (f64, f64) {
        let u_label = unit_open(self.rng.next_u64());
        let z = normal_quantile(unit_open(self.rng.next_u64()));
        (u_label, z)
    }
}

fn p_value(null: bool, z: f64, mu: f64) -> f64 {
    let stat = if null { z } else { z + mu };
    phi_neg(stat)
}

/// Independent Bernoulli(`pi`) non-null indicators with `N(mu, 1)` signals.
pub fn gaussian_stream(config: &GeneratorConfig) -> Result<LabeledStream> {
    config.validate()?;
    let Setting::Constant { pi, mu } = config.setting else {
        return Err(Error::Input("gaussian_stream needs a constant setting".into()));
    };
    let mut draws = StepDraws::new(config.seed);
    let mut p_values = Vec::with_capacity(config.n);
    let mut labels = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let (u, z) = draws.next();
        let null = u >= pi;
        labels.push(null);
        p_values.push(p_value(null, z, mu));
    }
    Ok(LabeledStream { p_values, labels: Some(labels) })
}

/// Symmetric two-state chain: the first hypothesis is non-null with
/// probability 0.5; afterwards it is non-null with probability `transprob`
/// after a null and `1 − transprob` after a non-null.
pub fn hmm_stream(config: &GeneratorConfig) -> Result<LabeledStream> {
    config.validate()?;
    let Setting::Hmm { transprob, mu } = config.setting else {
        return Err(Error::Input("hmm_stream needs an hmm setting".into()));
    };
    let mut draws = StepDraws::new(config.seed);
    let mut p_values = Vec::with_capacity(config.n);
    let mut labels = Vec::with_capacity(config.n);
    let mut prev_null: Option<bool> = None;
    for _ in 0..config.n {
        let (u, z) = draws.next();
        let pi = match prev_null {
            None => 0.5,
            Some(true) => transprob,
            Some(false) => 1.0 - transprob,
        };
        let null = u >= pi;
        prev_null = Some(null);
        labels.push(null);
        p_values.push(p_value(null, z, mu));
    }
    Ok(LabeledStream { p_values, labels: Some(labels) })
}

pub fn generate(config: &GeneratorConfig) -> Result<LabeledStream> {
    match config.setting {
        Setting::Constant { .. } => gaussian_stream(config),
        Setting::Hmm { .. } => hmm_stream(config),
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0100_0000_01b3;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Stable per-trial seed from `(base_seed, key, trial)`.
///
/// The value depends only on its arguments, never on process, platform or
/// the order in which trials are scheduled.
pub fn derive_seed(base_seed: u64, key: &str, trial: u64) -> u64 {
    let mut h = splitmix64(base_seed);
    h = splitmix64(h ^ fnv1a(key.as_bytes()));
    splitmix64(h ^ splitmix64(trial))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_neg_values() {
        assert_eq!(phi_neg(0.0), 0.5);
        assert!((phi_neg(1.6448536269514722) - 0.05).abs() < 1e-9);
        for z in [-8.0, -3.2, -0.7, 0.1, 2.5, 7.9] {
            assert!((phi_neg(-z) - (1.0 - phi_neg(z))).abs() < 1e-15);
        }
        // Deep tail stays positive.
        let t = phi_neg(30.0);
        assert!(t > 0.0 && t < 1e-190);
        assert_eq!(phi_neg(f64::INFINITY), 0.0);
    }

    #[test]
    fn phi_neg_tail_relative_accuracy() {
        let cases = [
            (8.0, 6.2209605742717841235e-16),
            (5.0, 2.8665157187919391167e-7),
            (2.0, 0.0227501319481792072),
            (0.5, 0.30853753872598689636),
            (-3.0, 0.99865010196836990547),
        ];
        for (z, want) in cases {
            assert!(((phi_neg(z) - want) / want).abs() < 1e-14, "z = {z}");
        }
    }

    #[test]
    fn quantile_inverts_tail() {
        for u in [1e-12, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-9] {
            let back = phi_neg(-normal_quantile(u));
            assert!((back - u).abs() < 1e-9 * u.min(1.0 - u), "u = {u}, got {back}");
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let cfg = GeneratorConfig::constant(200, 0.3, 3.0, 7);
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        assert_ne!(generate(&cfg).unwrap(), generate(&cfg.with_seed(8)).unwrap());
    }

    #[test]
    fn prefix_stable_in_n() {
        let long = generate(&GeneratorConfig::hmm(100, 0.2, 2.0, 3)).unwrap();
        let short = generate(&GeneratorConfig::hmm(40, 0.2, 2.0, 3)).unwrap();
        assert_eq!(&long.p_values[..40], &short.p_values[..]);
    }

    #[test]
    fn pi_zero_all_null() {
        let s = generate(&GeneratorConfig::constant(500, 0.0, 3.0, 1)).unwrap();
        assert_eq!(s.null_count(), Some(500));
    }

    #[test]
    fn config_validation() {
        assert!(generate(&GeneratorConfig::constant(0, 0.1, 1.0, 0)).is_err());
        assert!(generate(&GeneratorConfig::constant(5, 1.1, 1.0, 0)).is_err());
        assert!(generate(&GeneratorConfig::hmm(5, 1.0, 1.0, 0)).is_err());
        assert!(gaussian_stream(&GeneratorConfig::hmm(5, 0.5, 1.0, 0)).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, "cell", 0);
        assert_eq!(a, derive_seed(1, "cell", 0));
        assert_ne!(a, derive_seed(1, "cell", 1));
        assert_ne!(a, derive_seed(2, "cell", 0));
        assert_ne!(a, derive_seed(1, "cell2", 0));
    }

    #[test]
    fn labeled_stream_checks() {
        assert!(LabeledStream::new(vec![0.2, 1.5], None).is_err());
        assert!(LabeledStream::new(vec![0.2], Some(vec![])).is_err());
        assert!(LabeledStream::new(vec![0.2, 0.0, 1.0], Some(vec![true, false, true])).is_ok());
    }
}
