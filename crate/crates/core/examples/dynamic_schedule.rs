//! Steady, aggressive and dynamic schedules: power and wealth.

use online_fdx::harness::{run_experiment, AlgorithmSpec, DataSpec, ExperimentConfig};
use online_fdx::schedule::ScheduleKind;

fn main() -> online_fdx::Result<()> {
    let cfg = ExperimentConfig::new(
        vec![AlgorithmSpec::suplord_defaults()],
        vec![ScheduleKind::Steady, ScheduleKind::Aggressive, ScheduleKind::dynamic_default()],
        vec![DataSpec::constant(1000, 0.3, 3.0)],
        200,
    );
    let bundle = run_experiment(&cfg)?;
    println!("{:<24} {:>7} {:>10} {:>10} {:>10}", "schedule", "power", "W(200)", "W(1000)", "mean alpha");
    for cell in &bundle.cells {
        let s = cell.summary().expect("feasible cell");
        let m = s.metrics.as_ref().expect("labeled data");
        let alpha = &s.paths.mean_alpha[99..];
        println!(
            "{:<24} {:>7.4} {:>10.4} {:>10.4} {:>10.5}",
            cell.schedule,
            m.power.unwrap_or(0.0),
            s.paths.mean_wealth[199],
            s.paths.mean_wealth[999],
            alpha.iter().sum::<f64>() / alpha.len() as f64
        );
    }
    Ok(())
}
