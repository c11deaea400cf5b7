use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracbvp::cli;

/// Fractional difference boundary value problems: kernels, existence
/// constants, hypothesis checks, and positive solutions.
#[derive(Parser)]
#[command(name = "fracbvp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the Green's function table as CSV `t,s,G`.
    Green {
        #[arg(long)]
        config: PathBuf,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the existence constants γ, η, σ and the cone geometry.
    Constants {
        #[arg(long)]
        config: PathBuf,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
        /// Drop the h weight from σ's defining sum.
        #[arg(long)]
        sigma_unweighted: bool,
    },
    /// Check the growth hypotheses H1-H4 on a grid of radii.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated positive radii for the H1/H2 scans.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1,10,100")]
        radii: Vec<f64>,
        /// Number of y samples per radius (minimum 64).
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Search for positive solutions from the configured starts.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Base path for per-solution CSV files (suffixed _1, _2, ...).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve over a geometric λ grid and emit CSV `lambda,num_solutions,norm_1,...`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lambda_from: f64,
        #[arg(long)]
        lambda_to: f64,
        #[arg(long)]
        steps: u32,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let code = match args.command {
        Command::Green { config, out } => cli::cmd_green(&config, out.as_deref()),
        Command::Constants { config, json, sigma_unweighted } => {
            cli::cmd_constants(&config, json, sigma_unweighted)
        }
        Command::Check { config, radii, samples, json } => {
            cli::cmd_check(&config, &radii, samples, json)
        }
        Command::Solve { config, out } => cli::cmd_solve(&config, out.as_deref()),
        Command::Sweep { config, lambda_from, lambda_to, steps, out } => {
            cli::cmd_sweep(&config, lambda_from, lambda_to, steps, out.as_deref())
        }
    };
    ExitCode::from(code as u8)
}
