//! SupLORD against alpha-spending on Gaussian streams.

use online_fdx::harness::{run_experiment, AlgorithmSpec, DataSpec, ExperimentConfig};
use online_fdx::schedule::ScheduleKind;

fn main() -> online_fdx::Result<()> {
    let data = [0.1, 0.3].iter().flat_map(|&pi| [2.0, 3.0].map(|mu| DataSpec::constant(1000, pi, mu))).collect();
    let cfg = ExperimentConfig::new(
        vec![AlgorithmSpec::suplord_defaults(), AlgorithmSpec::AlphaSpending { level: 0.05 }],
        vec![ScheduleKind::Steady],
        data,
        100,
    );
    let bundle = run_experiment(&cfg)?;
    println!("{:<48} {:<22} {:>7} {:>7} {:>7}", "algorithm", "data", "power", "FDX", "supFD");
    for cell in &bundle.cells {
        let m = cell.metrics().expect("labeled data");
        println!(
            "{:<48} {:<22} {:>7.4} {:>7.3} {:>7.4}",
            cell.algorithm,
            cell.data,
            m.power.unwrap_or(0.0),
            m.fdx,
            m.supfd
        );
    }
    Ok(())
}
