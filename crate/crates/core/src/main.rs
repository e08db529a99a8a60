use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use inexact_opt::cli;

#[derive(Parser)]
#[command(name = "inexact-opt", version, about = "Inexact nonconvex solvers with certified traces")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trace.csv, report.json, constants.json, solution.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Repeat a power-law noise experiment for several decay exponents.
    AlphaSweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma separated, e.g. 0.5,1,1.5,2,3
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Number of worker threads; 1 runs sequentially.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Tabulate c(θ) = (2θ − 1)/(2(θ − 1)).
    Ctheta {
        #[arg(long, default_value_t = 1.1)]
        theta_min: f64,
        #[arg(long, default_value_t = 5.0)]
        theta_max: f64,
        #[arg(long, default_value_t = 40)]
        points: usize,
        /// CSV output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the report of a stored run.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        constants: PathBuf,
        /// Directory for report.json; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_USAGE as u8 } else { 0 });
        }
    };
    let code = match args.command {
        Command::Run { config, out } => cli::cmd_run(&config, &out),
        Command::AlphaSweep {
            config,
            alphas,
            out,
            parallel,
        } => cli::cmd_alpha_sweep(&config, &alphas, &out, parallel),
        Command::Ctheta {
            theta_min,
            theta_max,
            points,
            out,
        } => cli::cmd_ctheta(theta_min, theta_max, points, out.as_deref()),
        Command::Verify { trace, constants, out } => cli::cmd_verify(&trace, &constants, out.as_deref()),
    };
    ExitCode::from(code as u8)
}
