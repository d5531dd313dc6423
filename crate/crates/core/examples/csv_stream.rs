//! Round-trip a stream through CSV and run it through SupLORD.

use online_fdx::boost::{suplord_default_boosts, SupLordParams};
use online_fdx::engine::{run_stream, Policy};
use online_fdx::harness::{ingest_csv, write_stream_csv};
use online_fdx::schedule::ScheduleConfig;
use online_fdx::simgen::{generate, GeneratorConfig, LabeledStream};

fn main() -> online_fdx::Result<()> {
    let dir = std::env::temp_dir().join(format!("online-fdx-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("stream.csv");

    // Drop the labels, as with real data where the truth is unknown.
    let synthetic = generate(&GeneratorConfig::constant(500, 0.2, 3.0, 9))?;
    write_stream_csv(&LabeledStream::new(synthetic.p_values, None)?, &path)?;

    let stream = ingest_csv(&path)?;
    let params = SupLordParams::new(0.15, 0.05, 30, 1.0)?;
    let boosts = suplord_default_boosts(&params)?;
    let traj = run_stream(Policy::SupLord(params), &boosts, &ScheduleConfig::steady(stream.len())?, &stream.p_values)?;
    println!("{} p-values from {}, {} discoveries", stream.len(), path.display(), traj.rejection_count());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
