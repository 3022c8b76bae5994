use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dta::{compare_modes, load_config, load_plan, run_experiment, run_sweep, Report};
use dta_core::sim::Mode;

#[derive(Parser)]
#[command(name = "dta", version, about = "Robot soccer role assignment under a packet budget")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one match and print its CSV rows.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        #[arg(long)]
        seed: u64,
    },
    /// Play every mode and seed of a plan and write runs.csv and report.json.
    Experiment {
        #[arg(long)]
        plan: PathBuf,
    },
    /// Print per-role mean overlap by mode and whether it is ordered.
    Compare {
        #[arg(long)]
        report: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::from_name(s).ok_or_else(|| format!("unknown mode {s:?}, expected FixedRate, EventBased or EventVoronoi"))
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dta: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<(), Box<dyn std::error::Error>> {
    let mut out = std::io::stdout().lock();
    match command {
        Command::Run { config, mode, seed } => {
            let base = load_config(&config)?;
            out.write_all(&run_sweep(&base, &[mode], &[seed])?.to_csv()?)?;
        }
        Command::Experiment { plan } => {
            let plan = load_plan(&plan)?;
            let report = run_experiment(&plan)?;
            report.write(&plan.output_dir)?;
            for m in &report.modes {
                let striker = m.role(dta_core::task_assignment::Role::Striker).map_or(0.0, |r| r.mean_s);
                writeln!(
                    out,
                    "{:<13} runs {:>3}  mean striker overlap {:>8.2} s  mean packets {:>7.1}",
                    m.mode.name(),
                    m.runs,
                    striker,
                    m.mean_packets_sent
                )?;
            }
            writeln!(out, "wrote {}", plan.output_dir.display())?;
        }
        Command::Compare { report } => {
            let text = std::fs::read_to_string(&report).map_err(|e| format!("{}: {e}", report.display()))?;
            let report: Report = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", report.display()))?;
            for v in compare_modes(&report)? {
                let means: Vec<String> = v.means.iter().map(|(m, s)| format!("{}={s:.2}", m.name())).collect();
                writeln!(out, "{:<13} {}  ordered={}", v.role.name(), means.join(" "), v.ordered)?;
            }
        }
    }
    Ok(())
}
