//! Distributional checks on the synthetic streams.

use online_fdx::simgen::{derive_seed, generate, phi_neg, GeneratorConfig};

const N: usize = 100_000;

/// One-sample Kolmogorov–Smirnov statistic against Uniform(0, 1).
fn ks_uniform(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

#[test]
fn all_null_stream_is_uniform() {
    let s = generate(&GeneratorConfig::constant(N, 0.0, 3.0, 1)).unwrap();
    assert!(s.labels.as_ref().unwrap().iter().all(|&l| l));
    let d = ks_uniform(&s.p_values);
    assert!(d < ks_critical_1pct(N), "KS {d}");
}

#[test]
fn null_p_values_are_superuniform() {
    let s = generate(&GeneratorConfig::constant(N, 0.3, 3.0, 2)).unwrap();
    let nulls: Vec<f64> = s.p_values.iter().zip(s.labels.as_ref().unwrap()).filter(|(_, &l)| l).map(|(p, _)| *p).collect();
    let n = nulls.len() as f64;
    for t in [0.01, 0.05, 0.1, 0.5] {
        let frac = nulls.iter().filter(|&&p| p <= t).count() as f64 / n;
        assert!(frac <= t + 3.0 * (t * (1.0 - t) / n).sqrt(), "threshold {t}: {frac}");
    }
}

#[test]
fn zero_signal_makes_labels_irrelevant() {
    let s = generate(&GeneratorConfig::constant(N, 0.5, 0.0, 3)).unwrap();
    let labels = s.labels.as_ref().unwrap();
    let (nulls, alts): (Vec<(f64, bool)>, Vec<(f64, bool)>) =
        s.p_values.iter().copied().zip(labels.iter().copied()).partition(|(_, l)| *l);
    let nulls: Vec<f64> = nulls.into_iter().map(|(p, _)| p).collect();
    let alts: Vec<f64> = alts.into_iter().map(|(p, _)| p).collect();
    assert!(ks_uniform(&nulls) < ks_critical_1pct(nulls.len()));
    assert!(ks_uniform(&alts) < ks_critical_1pct(alts.len()));
}

#[test]
fn non_nulls_stochastically_smaller() {
    let mut last = 0.05;
    for mu in [0.5, 1.0, 2.0, 3.0] {
        let s = generate(&GeneratorConfig::constant(20_000, 1.0, mu, 4)).unwrap();
        let frac = s.p_values.iter().filter(|&&p| p <= 0.05).count() as f64 / s.len() as f64;
        assert!(frac > last, "mu {mu}: {frac}");
        // Exact rejection probability of a one-sided z-test.
        let want = phi_neg(1.6448536269514722 - mu);
        assert!((frac - want).abs() < 4.0 * (want * (1.0 - want) / 20_000.0).sqrt());
        last = frac;
    }
}

#[test]
fn hmm_balanced_in_the_long_run() {
    for tp in [0.01, 0.05, 0.2, 0.5, 0.8] {
        let s = generate(&GeneratorConfig::hmm(N, tp, 3.0, 5)).unwrap();
        let frac = s.labels.as_ref().unwrap().iter().filter(|&&l| !l).count() as f64 / N as f64;
        // Variance of a symmetric two-state chain mean with switch probability tp.
        let se = (0.25 * (1.0 - tp) / (N as f64 * tp)).sqrt();
        assert!((frac - 0.5).abs() <= 3.0 * se, "tp {tp}: {frac} (se {se})");
    }
}

#[test]
fn hmm_run_lengths_are_geometric() {
    for tp in [0.01, 0.02, 0.05] {
        let s = generate(&GeneratorConfig::hmm(N, tp, 3.0, 6)).unwrap();
        let labels = s.labels.unwrap();
        let runs = 1 + labels.windows(2).filter(|w| w[0] != w[1]).count();
        let mean = N as f64 / runs as f64;
        assert!((mean * tp - 1.0).abs() < 0.1, "tp {tp}: mean run {mean}");
    }
}

#[test]
fn hmm_half_switch_is_fair_coin() {
    let s = generate(&GeneratorConfig::hmm(N, 0.5, 3.0, 7)).unwrap();
    let l = s.labels.unwrap();
    let same = l.windows(2).filter(|w| w[0] == w[1]).count() as f64 / (N - 1) as f64;
    assert!((same - 0.5).abs() < 3.0 * (0.25 / N as f64).sqrt());
}

#[test]
fn split_seeds_are_uncorrelated() {
    let a = generate(&GeneratorConfig::constant(N, 0.0, 0.0, derive_seed(9, "cell", 0))).unwrap();
    let b = generate(&GeneratorConfig::constant(N, 0.0, 0.0, derive_seed(9, "cell", 1))).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(&a.p_values), mean(&b.p_values));
    let cov: f64 = a.p_values.iter().zip(&b.p_values).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / N as f64;
    let corr = cov / (1.0 / 12.0);
    assert!(corr.abs() < 4.0 / (N as f64).sqrt(), "corr {corr}");
}
