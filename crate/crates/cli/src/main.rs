use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fembem_cli::config::Method;
use fembem_cli::{run_convergence, run_oracle, run_solve, run_validate, CliError, OracleArgs, OracleKind, RunConfig, SolveOverrides};

#[derive(Parser)]
#[command(name = "fembem", version, about = "Overlapping FEM-BEM solver for 2-D Helmholtz scattering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write its artifacts.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        solver: Option<Method>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace existing artifacts.
        #[arg(long)]
        force: bool,
    },
    /// Tabulate far-field errors over mesh levels and N.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Write the series far field of a disk.
    Oracle {
        #[arg(long, value_enum)]
        kind: OracleKind,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        n0: Option<f64>,
        #[arg(long)]
        core_radius: Option<f64>,
        /// Incident angle in radians.
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
        #[arg(long, default_value_t = 1000)]
        angles: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Check a configuration without solving.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { config, solver, tol, out, force } => {
            let cfg = RunConfig::load(&config)?;
            let summary = run_solve(&cfg, &SolveOverrides { method: solver, tol, out, force })?;
            println!(
                "{}: {} iterations, residual {:.3e}, L = {}, M = {}, N = {}",
                summary.method, summary.iterations, summary.residual, summary.l, summary.m, summary.n
            );
        }
        Command::Convergence { config, levels, n, out, force } => {
            let cfg = RunConfig::load(&config)?;
            print!("{}", run_convergence(&cfg, &levels, &n, out.as_deref(), force)?);
        }
        Command::Oracle { kind, k, radius, n0, core_radius, angle, angles, out, force } => {
            let path = run_oracle(&OracleArgs { kind, k, radius, n0, core_radius, angle, angles, out, force })?;
            println!("wrote {}", path.display());
        }
        Command::Validate { config } => {
            let cfg = RunConfig::load(&config)?;
            print!("{}", run_validate(&cfg)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
