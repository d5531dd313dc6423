use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use online_fdx::boost::{
    alpha_spending_boosts, guarantee_summary, lord_boosts, mfdr_safe_boosts, suplord_default_boosts, SupLordParams,
};
use online_fdx::engine::{run_stream, Policy};
use online_fdx::harness::{emit_results, fmt_f64, ingest_csv, run_experiment_with, Execution, ExperimentConfig};
use online_fdx::schedule::{default_gamma_with, GammaNormalization, ScheduleConfig, ScheduleKind, DEFAULT_RHO, DEFAULT_XI};
use online_fdx::{Error, Result};

#[derive(Parser)]
#[command(name = "online-fdx", version, about = "Online FDX/FDR control with SupLORD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid from a JSON config and write CSV results.
    Simulate {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Run trials one after another instead of on the thread pool.
        #[arg(long)]
        serial: bool,
    },
    /// Run one p-value stream through a policy and print the decisions.
    Run {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "suplord")]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value = "steady")]
        schedule: ScheduleArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "default")]
        boosts: BoostArg,
        /// Level for the LORD and alpha-spending baselines.
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[arg(long, default_value_t = DEFAULT_XI)]
        xi: f64,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho: usize,
        /// Write the decisions CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the guarantees implied by SupLORD parameters.
    Bounds {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "default")]
        boosts: BoostArg,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Print the default spending sequence.
    Gamma {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "horizon")]
        normalization: NormArg,
    },
}

#[derive(clap::Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.15)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 30)]
    rstar: usize,
    #[arg(long, default_value_t = 1.0, conflicts_with = "canonical_a")]
    a: f64,
    /// Use the `a` that maximises the initial budget.
    #[arg(long)]
    canonical_a: bool,
}

impl ParamArgs {
    fn build(&self) -> Result<SupLordParams> {
        if self.canonical_a {
            SupLordParams::with_canonical_a(self.eps, self.delta, self.rstar)
        } else {
            SupLordParams::new(self.eps, self.delta, self.rstar, self.a)
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Suplord,
    Lord,
    AlphaSpending,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Steady,
    Aggressive,
    Dynamic,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoostArg {
    Default,
    MfdrSafe,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Horizon,
    Infinite,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error kind=usage message={first}");
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error kind={} message={msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { config, output, serial } => simulate(config, output, serial),
        Command::Run { input, policy, schedule, params, boosts, level, xi, rho, output } => {
            run(input, policy, schedule, &params, boosts, level, xi, rho, output)
        }
        Command::Bounds { params, boosts, format } => {
            let p = params.build()?;
            let seq = match boosts {
                BoostArg::Default => suplord_default_boosts(&p)?,
                BoostArg::MfdrSafe => mfdr_safe_boosts(&p)?,
            };
            let g = guarantee_summary(&p, &seq)?;
            match format {
                FormatArg::Text => print!("{}", g.to_key_value()),
                FormatArg::Csv => print!("{}", g.to_csv()),
            }
            Ok(())
        }
        Command::Gamma { n, normalization } => {
            let norm = match normalization {
                NormArg::Horizon => GammaNormalization::Horizon,
                NormArg::Infinite => GammaNormalization::Infinite,
            };
            let g = default_gamma_with(n, norm)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "i,gamma")?;
            for (i, v) in g.as_slice().iter().enumerate() {
                writeln!(out, "{},{}", i + 1, fmt_f64(*v))?;
            }
            Ok(())
        }
    }
}

fn simulate(config: PathBuf, output: Option<PathBuf>, serial: bool) -> Result<()> {
    let cfg = ExperimentConfig::load(&config)?;
    let dir = output
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| Error::Input("no output directory: pass --output or set output_dir".into()))?;
    let execution = if serial { Execution::Serial } else { Execution::Parallel };
    let bundle = run_experiment_with(&cfg, execution)?;
    emit_results(&bundle, &dir)?;
    let failed = bundle.cells.iter().filter(|c| c.outcome.is_err()).count();
    println!("cells={} failed={} output={}", bundle.cells.len(), failed, dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run(
    input: PathBuf,
    policy: PolicyArg,
    schedule: ScheduleArg,
    params: &ParamArgs,
    boosts: BoostArg,
    level: f64,
    xi: f64,
    rho: usize,
    output: Option<PathBuf>,
) -> Result<()> {
    let stream = ingest_csv(&input)?;
    if stream.is_empty() {
        return Err(Error::Input("input stream is empty".into()));
    }
    let (pol, seq) = match policy {
        PolicyArg::Suplord => {
            let p = params.build()?;
            let seq = match boosts {
                BoostArg::Default => suplord_default_boosts(&p)?,
                BoostArg::MfdrSafe => mfdr_safe_boosts(&p)?,
            };
            (Policy::SupLord(p), seq)
        }
        PolicyArg::Lord => (Policy::Lord { level }, lord_boosts(level, 0.1)?),
        PolicyArg::AlphaSpending => (Policy::AlphaSpending { level }, alpha_spending_boosts(level)?),
    };
    let kind = match schedule {
        ScheduleArg::Steady => ScheduleKind::Steady,
        ScheduleArg::Aggressive => ScheduleKind::Aggressive,
        ScheduleArg::Dynamic => ScheduleKind::Dynamic { xi, rho },
    };
    let sched = ScheduleConfig::with_default_gamma(kind, stream.len())?;
    let traj = run_stream(pol, &seq, &sched, &stream.p_values)?;

    let mut buf = Vec::new();
    {
        let mut w = std::io::BufWriter::new(&mut buf);
        writeln!(w, "index,p_value,alpha,rejected,wealth")?;
        for r in &traj.records {
            writeln!(w, "{},{},{},{},{}", r.k, fmt_f64(r.p_value), fmt_f64(r.alpha), r.rejected as u8, fmt_f64(r.wealth_after))?;
        }
    }
    match output {
        Some(path) => std::fs::write(path, &buf)?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    eprintln!("steps={} rejections={}", traj.len(), traj.rejection_count());
    Ok(())
}
