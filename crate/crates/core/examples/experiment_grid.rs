//! A JSON-configured grid written out as CSV files.

use online_fdx::harness::{emit_results, run_experiment, ExperimentConfig};

const CONFIG: &str = r#"{
  "algorithms": [
    {"policy": "sup_lord"},
    {"policy": "sup_lord", "boosts": "mfdr_safe"},
    {"policy": "sup_lord", "r_star": 10},
    {"policy": "lord", "level": 0.05},
    {"policy": "alpha_spending", "level": 0.05}
  ],
  "schedules": [{"kind": "steady"}, {"kind": "dynamic"}],
  "data": [{"source": "generator", "n": 500, "setting": {"kind": "constant", "pi": 0.2, "mu": 3}}],
  "trials": 40,
  "base_seed": 7
}"#;

fn main() -> online_fdx::Result<()> {
    let cfg = ExperimentConfig::from_json(CONFIG)?;
    let bundle = run_experiment(&cfg)?;
    let dir = std::env::temp_dir().join(format!("online-fdx-grid-{}", std::process::id()));
    emit_results(&bundle, &dir)?;
    print!("{}", std::fs::read_to_string(dir.join("summary.csv"))?);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
