mod bench;
mod prox;
mod records;
mod verify;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use persprox::verify::{parse_entries, CatalogEntry};
use persprox::SolverConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

/// Proximity operators of perspective functions.
#[derive(Debug, Parser)]
#[command(name = "persprox", version, about)]
struct Cli {
    /// Absolute tolerance of the scalar root searches.
    #[arg(long, global = true, value_parser = positive_f64)]
    tol: Option<f64>,

    /// Iteration cap of the scalar root searches.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_iter: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read JSON Lines queries on stdin, write JSON Lines results on stdout.
    Prox,
    /// Run the randomized verification suites.
    Verify {
        /// Queries per function and suite.
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Comma-separated function tags, or `all`.
        #[arg(long, default_value = "all", value_parser = entry_list)]
        functions: Entries,
        /// Fine grid step of the brute-force oracle.
        #[arg(long, default_value_t = 1e-4, value_parser = positive_f64)]
        grid_step: f64,
    },
    /// Time the prox on seeded random queries.
    Bench {
        /// Queries per function.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated function tags, or `all`.
        #[arg(long, default_value = "all", value_parser = entry_list)]
        functions: Entries,
    },
}

#[derive(Debug, Clone)]
struct Entries(Vec<CatalogEntry>);

fn entry_list(s: &str) -> Result<Entries, String> {
    parse_entries(s).map(Entries).map_err(|e| e.to_string())
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive finite number, got {s}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    let mut solver = SolverConfig::default();
    if let Some(tol) = cli.tol {
        solver.abs_tol = tol;
    }
    if let Some(m) = cli.max_iter {
        solver.max_iter = m as usize;
    }

    let code = match cli.command {
        Command::Prox => prox::run(&solver),
        Command::Verify {
            samples,
            seed,
            functions,
            grid_step,
        } => verify::run(&solver, samples as usize, seed, &functions.0, grid_step),
        Command::Bench {
            samples,
            seed,
            functions,
        } => bench::run(&solver, samples as usize, seed, &functions.0),
    };
    ExitCode::from(code)
}
