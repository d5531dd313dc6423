//! Randomised invariants of the engine, schedules and boosts.

use online_fdx::boost::{
    alpha_spending_boosts, lord_boosts, mfdr_safe_boosts, suplord_default_boosts, validate_boosts, BoostSequence,
    SupLordParams,
};
use online_fdx::engine::{replay_alphas, run_stream, Policy};
use online_fdx::harness::{run_experiment_with, AlgorithmSpec, DataSpec, Execution, ExperimentConfig};
use online_fdx::schedule::{default_gamma, dynamic_gamma, ScheduleConfig, ScheduleKind};
use proptest::prelude::*;

mod common;
use common::{alpha_spending, find_non_monotone_witness, suplord_defaults};

fn policy_strategy() -> impl Strategy<Value = (Policy, BoostSequence)> {
    prop_oneof![
        (0.05f64..0.5, 0.01f64..0.3, 15usize..80, 0.1f64..3.0, any::<bool>()).prop_filter_map(
            "feasible",
            |(eps, delta, r, a, safe)| {
                let p = SupLordParams::new(eps, delta, r, a).ok()?;
                let seq = if safe { mfdr_safe_boosts(&p).ok()? } else { suplord_default_boosts(&p).ok()? };
                Some((Policy::SupLord(p), seq))
            }
        ),
        (0.01f64..0.3, 0.0f64..1.0)
            .prop_map(|(l, f)| (Policy::Lord { level: l }, lord_boosts(l, f).unwrap())),
        (0.01f64..0.3).prop_map(|l| (Policy::AlphaSpending { level: l }, alpha_spending_boosts(l).unwrap())),
    ]
}

fn schedule_strategy() -> impl Strategy<Value = ScheduleKind> {
    prop_oneof![
        Just(ScheduleKind::Steady),
        Just(ScheduleKind::Aggressive),
        (0.01f64..20.0, 1usize..200).prop_map(|(xi, rho)| ScheduleKind::Dynamic { xi, rho }),
    ]
}

/// p-values with atoms at 0 and 1 and a cluster of tiny values.
fn p_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![
            3 => 0.0f64..=1.0,
            2 => 0.0f64..0.01,
            1 => Just(0.0),
            1 => Just(1.0),
        ],
        1..max_len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]

    #[test]
    fn wealth_identity_and_nonnegativity(
        (policy, boosts) in policy_strategy(),
        kind in schedule_strategy(),
        p in p_strategy(120),
    ) {
        let sched = ScheduleConfig::with_default_gamma(kind, p.len()).unwrap();
        let traj = run_stream(policy, &boosts, &sched, &p).unwrap();
        let check = common::check_wealth_identity(&traj, &boosts);
        prop_assert!(check.is_ok(), "{}", check.unwrap_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    /// Alpha values depend on past decisions only, never on the current or future p-values.
    #[test]
    fn alphas_are_predictable(
        (policy, boosts) in policy_strategy(),
        kind in schedule_strategy(),
        p in p_strategy(150),
        cut in 0usize..150,
        tail in prop::collection::vec(0.0f64..=1.0, 150),
    ) {
        let sched = ScheduleConfig::with_default_gamma(kind, p.len()).unwrap();
        let traj = run_stream(policy, &boosts, &sched, &p).unwrap();
        prop_assert_eq!(replay_alphas(policy, &boosts, &sched, &traj.decisions()).unwrap(), traj.alphas());

        let cut = cut.min(p.len() - 1);
        let mut q = p.clone();
        q[cut..].copy_from_slice(&tail[..p.len() - cut]);
        let other = run_stream(policy, &boosts, &sched, &q).unwrap();
        for k in 0..=cut {
            prop_assert_eq!(traj.records[k].alpha, other.records[k].alpha);
        }
    }

    /// Adding rejections never lowers a later steady alpha.
    #[test]
    fn steady_schedule_is_monotone(
        (policy, boosts) in policy_strategy(),
        base in prop::collection::vec(any::<bool>(), 2..120),
        extra in prop::collection::vec(any::<bool>(), 120),
    ) {
        let sched = ScheduleConfig::steady(base.len()).unwrap();
        let superset: Vec<bool> = base.iter().zip(&extra).map(|(a, b)| *a || *b).collect();
        // Both histories must be realisable: no rejection at alpha 0.
        let (Ok(lo), Ok(hi)) = (
            replay_alphas(policy, &boosts, &sched, &base),
            replay_alphas(policy, &boosts, &sched, &superset),
        ) else {
            return Ok(());
        };
        let nondecreasing = boosts.phase1.windows(2).all(|w| w[0] <= w[1])
            && boosts.phase1.last().is_none_or(|&b| b <= boosts.phase2)
            && boosts.phase1.first().is_none_or(|&b| b >= 0.0);
        prop_assume!(nondecreasing);
        for (k, (a, b)) in lo.iter().zip(&hi).enumerate() {
            prop_assert!(b + 1e-15 >= *a, "k={} base {} superset {}", k + 1, a, b);
        }
    }

    #[test]
    fn gamma_normalised(n in 1usize..5000) {
        let g = default_gamma(n).unwrap();
        prop_assert!((g.total() - 1.0).abs() < 1e-9);
        prop_assert!(g.as_slice().iter().all(|&v| v > 0.0));
        prop_assert!(g.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn dynamic_gamma_is_a_spending_sequence(
        xi in 0.01f64..50.0,
        rho in 1usize..300,
        ratio in 0.0f64..100.0,
    ) {
        let sched = ScheduleConfig::dynamic(400, xi, rho).unwrap();
        let vals: Vec<f64> = (1..=400).map(|i| dynamic_gamma(i, ratio, 1.0, &sched).unwrap()).collect();
        let total: f64 = vals.iter().sum();
        prop_assert!(vals.iter().all(|&v| v >= 0.0));
        prop_assert!(total <= 1.0 + 1e-9);
        if xi * ratio > 1.0 {
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert!(vals[rho.min(400)..].iter().all(|&v| v == 0.0));
        } else {
            let base = default_gamma(400).unwrap();
            prop_assert_eq!(vals.as_slice(), base.as_slice());
        }
    }

    #[test]
    fn default_boosts_validate_and_perturbations_fail(
        eps in 0.05f64..0.5,
        delta in 0.01f64..0.3,
        r in 1usize..100,
        bump in 1e-9f64..0.1,
        which in 0usize..2,
    ) {
        let Ok(p) = SupLordParams::with_canonical_a(eps, delta, r) else { return Ok(()); };
        let seq = suplord_default_boosts(&p).unwrap();
        prop_assert!(validate_boosts(&seq, &p).is_ok());
        prop_assert!(validate_boosts(&mfdr_safe_boosts(&p).unwrap(), &p).is_ok());
        let mut bad = seq.clone();
        if which == 0 {
            bad.beta0 += bump;
        } else {
            bad.phase2 += bump;
        }
        prop_assert!(validate_boosts(&bad, &p).is_err());
    }
}

#[test]
fn aggressive_schedule_is_not_monotone() {
    // Without boosts, an extra rejection restarts the spending clock on a
    // smaller remainder of wealth.
    let w = find_non_monotone_witness(ScheduleKind::Aggressive, alpha_spending());
    assert_eq!(w.map(|(e, l, _)| (e, l)), Some((1, 2)));
}

#[test]
fn dynamic_schedule_is_not_monotone() {
    let w = find_non_monotone_witness(ScheduleKind::Dynamic { xi: 0.5, rho: 20 }, suplord_defaults());
    assert!(w.is_some(), "no witness found");
}

#[test]
fn steady_schedule_has_no_witness() {
    assert_eq!(find_non_monotone_witness(ScheduleKind::Steady, suplord_defaults()), None);
    assert_eq!(find_non_monotone_witness(ScheduleKind::Steady, alpha_spending()), None);
}

#[test]
fn parallel_and_serial_runs_are_bit_identical() {
    let cfg = ExperimentConfig::new(
        vec![AlgorithmSpec::suplord_defaults()],
        vec![ScheduleKind::dynamic_default()],
        vec![DataSpec::constant(1000, 0.3, 3.0)],
        200,
    )
    .with_seed(2024);
    let a = run_experiment_with(&cfg, Execution::Serial).unwrap();
    let b = run_experiment_with(&cfg, Execution::Parallel).unwrap();
    let (ma, mb) = (a.cells[0].metrics().unwrap(), b.cells[0].metrics().unwrap());
    assert_eq!(ma.power.unwrap().to_bits(), mb.power.unwrap().to_bits());
    assert_eq!(a, b);
}
