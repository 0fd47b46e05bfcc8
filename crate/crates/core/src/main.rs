use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hallsim::config::{parse_assignment, RunConfig};
use hallsim::diagnostics::csv_header;
use hallsim::run::{diagnose, run_quantize, run_simulate};
use hallsim::Error;

/// Lattice Schroedinger-Chern-Simons simulator.
#[derive(Parser)]
#[command(name = "hallsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Configuration override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_assignment)]
    set: Vec<(String, String)>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the coupled fields and record diagnostics.
    Simulate {
        #[command(flatten)]
        shared: Shared,
    },
    /// Scan candidate Hall conductivities for single-valuedness.
    Quantize {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, allow_negative_numbers = true)]
        sigma_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma_max: Option<f64>,
        #[arg(long)]
        sigma_step: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print one diagnostics row for saved snapshots.
    Diagnose {
        #[command(flatten)]
        shared: Shared,
        /// HSFIELD psi file; omit for gauge-only diagnostics.
        #[arg(long)]
        psi: Option<PathBuf>,
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a2: PathBuf,
    },
}

fn load(shared: &Shared, extra: Vec<(String, String)>) -> Result<RunConfig, Error> {
    let mut pairs = shared.set.clone();
    pairs.extend(extra);
    if let Some(out) = &shared.out {
        pairs.push(("output.dir".into(), out.display().to_string()));
    }
    RunConfig::load(shared.config.as_deref(), &pairs)
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate { shared } => {
            let cfg = load(&shared, Vec::new())?;
            let summary = run_simulate(&cfg)?;
            eprintln!(
                "wrote {} rows to {} in {:.2} s",
                summary.rows,
                summary.out_dir.display(),
                summary.wall_time_s
            );
        }
        Command::Quantize {
            shared,
            sigma_min,
            sigma_max,
            sigma_step,
            tol,
        } => {
            let extra = [
                ("quantize.sigma_min", sigma_min),
                ("quantize.sigma_max", sigma_max),
                ("quantize.sigma_step", sigma_step),
                ("quantize.tol", tol),
            ]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), format!("{v:?}"))))
            .collect();
            let cfg = load(&shared, extra)?;
            let (spectrum, text) = run_quantize(&cfg)?;
            if spectrum.tolerance_dominates() {
                eprintln!(
                    "warning: tolerance {} is at least 2, the largest possible mismatch; every candidate is allowed",
                    spectrum.tol
                );
            }
            print!("{text}");
        }
        Command::Diagnose { shared, psi, a1, a2 } => {
            let cfg = load(&shared, Vec::new())?;
            let row = diagnose(&cfg, psi.as_deref(), &a1, &a2)?;
            println!("{}", csv_header(row.holonomies.len()));
            println!("{}", row.csv_row());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
