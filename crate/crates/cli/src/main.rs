//! `semiclassical`: cyclotron and spin-precession checks on N-level Landau
//! wave packets.

mod commands;
mod config;
mod failure;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{converge, oracle, trajectory, verify};
use config::ConfigArgs;
use failure::Failure;

#[derive(Parser)]
#[command(name = "semiclassical", version, about = "Semiclassical limit of Landau-level wave packets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum, closed-form and classical trajectories for one packet.
    Trajectory {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Factor and quantum-classical gap for a list of packet sizes.
    Converge {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_value = "3,10,100")]
        n_list: Vec<u32>,
    },
    /// Run every identity check and write verify.json.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        /// Corrupt one packet amplitude; the checks must then fail.
        #[arg(long)]
        perturb: bool,
    },
    /// Exact matrix elements against their semiclassical limits.
    Oracle {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        n_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0,2")]
        s_list: Vec<u32>,
    },
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Trajectory { config } => {
            let rc = config.resolve()?;
            let s = trajectory::run(&rc)?;
            println!(
                "N={} factor={:.12} (expected {:.12}) quantum-vs-closed-form={:.3e} transverse gap={:.6e} (b_perp/N={:.6e})",
                s.levels,
                s.measured_factor,
                s.expected_factor,
                s.quantum_vs_closed_form.max_linf,
                s.transverse_gap,
                s.expected_transverse_gap
            );
            println!("wrote {}", rc.output_dir.display());
        }
        Command::Converge { config, n_list } => {
            let rc = config.resolve()?;
            let rows = converge::run(&rc, &n_list)?;
            print!("{}", converge::to_csv(&rows));
        }
        Command::Verify { config, perturb } => {
            let rc = config.resolve()?;
            let report = verify::run(&rc, perturb)?;
            print_checks(&report);
            verify::outcome(&report)?;
        }
        Command::Oracle { config, n_list, s_list } => {
            let rc = config.resolve()?;
            let report = oracle::run(&rc, &n_list, &s_list)?;
            for e in &report.exponents {
                println!("s={} exponent_x={:.4} exponent_y={:.4}", e.s, e.exponent_x, e.exponent_y);
            }
        }
    }
    Ok(())
}

fn print_checks(report: &verify::Report) {
    for c in &report.checks {
        let tag = if c.tolerance.is_none() {
            "INFO"
        } else if c.passed {
            "PASS"
        } else {
            "FAIL"
        };
        println!("{tag} {:<28} {:.3e}", c.name, c.residual);
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
