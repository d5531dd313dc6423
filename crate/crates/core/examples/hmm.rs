//! Clustered non-nulls from a two-state label chain.

use online_fdx::harness::{run_experiment, AlgorithmSpec, DataSpec, ExperimentConfig};
use online_fdx::schedule::ScheduleKind;

fn main() -> online_fdx::Result<()> {
    let data = [0.01, 0.05, 0.1, 0.3, 0.5].map(|tp| DataSpec::hmm(1000, tp, 3.0)).to_vec();
    let cfg = ExperimentConfig::new(
        vec![AlgorithmSpec::suplord_defaults()],
        vec![ScheduleKind::Steady, ScheduleKind::Aggressive, ScheduleKind::dynamic_default()],
        data,
        50,
    );
    let bundle = run_experiment(&cfg)?;
    for cell in &bundle.cells {
        let m = cell.metrics().expect("labeled data");
        println!("{:<24} {:<22} power {:.4}  supFD {:.4}", cell.schedule, cell.data, m.power.unwrap_or(0.0), m.supfd);
    }
    Ok(())
}
