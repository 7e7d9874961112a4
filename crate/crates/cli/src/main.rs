use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mpslab::runner::{run_path, RunOptions, EXIT_VIOLATION};
use mpslab::{selftest, Experiment};

#[derive(Parser)]
#[command(name = "mpslab", version, about = "Matrix product state bound checks and quench experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory (beats the config's output_dir and MPSLAB_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the registered experiments.
    List,
    /// Run the built-in sanity checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in Experiment::ALL {
                let kind = if e.is_stochastic() { "seeded" } else { "deterministic" };
                println!("{:<20} {:<14} {}", e.key(), kind, e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Selftest => {
            let checks = selftest::run();
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            ExitCode::from(if failed == 0 { 0 } else { EXIT_VIOLATION as u8 })
        }
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => match run_path(&config, &RunOptions { out, seed, threads }) {
            Ok(r) => {
                let o = &r.outcome;
                println!(
                    "{}: {} checks, {} violations, {} skipped, {:.2} s -> {}",
                    r.config.experiment,
                    o.checks,
                    o.violations,
                    o.skipped,
                    r.wall_seconds,
                    r.out_dir.display()
                );
                for n in &o.notes {
                    println!("note: {n}");
                }
                ExitCode::from(r.exit_code as u8)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
