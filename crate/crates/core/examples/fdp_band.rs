//! One SupLORD run with its FDP, the LORD estimate and the time-uniform band.

use online_fdx::boost::{suplord_default_boosts, SupLordParams};
use online_fdx::engine::{run_stream, Policy};
use online_fdx::metrics::{fdp_hat_lord, fdp_path, kr_band, LabeledTrajectory};
use online_fdx::schedule::ScheduleConfig;
use online_fdx::simgen::{generate, GeneratorConfig};

fn main() -> online_fdx::Result<()> {
    let stream = generate(&GeneratorConfig::constant(1000, 0.3, 3.0, 42))?;
    let params = SupLordParams::new(0.15, 0.05, 30, 1.0)?;
    let boosts = suplord_default_boosts(&params)?;
    let traj = run_stream(Policy::SupLord(params), &boosts, &ScheduleConfig::steady(1000)?, &stream.p_values)?;

    let band = kr_band(&traj, 0.05, 1.0)?;
    let lt = LabeledTrajectory::new(traj.clone(), stream.labels.expect("synthetic streams are labeled"))?;
    let fdp = fdp_path(&lt);
    println!("{:>5} {:>5} {:>8} {:>8} {:>8}", "k", "R_k", "FDP", "LORD", "band");
    let mut r = 0;
    for (i, rec) in traj.records.iter().enumerate() {
        r += rec.rejected as usize;
        if (i + 1) % 100 == 0 {
            println!("{:>5} {:>5} {:>8.4} {:>8.4} {:>8.4}", i + 1, r, fdp[i], fdp_hat_lord(&traj, i + 1), band[i]);
        }
    }
    Ok(())
}
