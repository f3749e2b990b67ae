use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use purify_cli::commands::{self, OracleKind, OracleParams, Source};
use purify_cli::error::{CliError, EXIT_USAGE};
use purify_core::verify::{VerifyOptions, MAX_VERIFY_DIM};

/// Continuous-measurement purification: trajectory ensembles, analytic
/// oracles and identity checks.
///
/// Strengths: qudits use gamma, registers use kappa, with kappa = gamma/4.
/// Config files state which one they give via `strength_convention`.
#[derive(Debug, Parser)]
#[command(name = "purify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the ensemble described by a TOML config and write CSV
    /// `t,mean_L,stderr_L,n_traj,clip_fraction`.
    Simulate {
        config: PathBuf,
        /// Overrides `[output] path`; stdout when neither is given.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Worker threads (default: $PURIFY_WORKERS, else all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Evaluate an analytic curve as CSV `t,L`, or the speed-up bound table
    /// `D,lower,upper`.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[command(flatten)]
        params: OracleParams,
        /// Comma-separated sample times.
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value_t = 101)]
        count: usize,
        /// Dimension range for `bounds`.
        #[arg(long, default_value_t = 2)]
        d_min: usize,
        #[arg(long, default_value_t = 8)]
        d_max: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check the unbiased-basis identities for D = min..=max.
    Verify {
        #[arg(long, default_value_t = MAX_VERIFY_DIM)]
        max_dim: usize,
        #[arg(long, default_value_t = 2)]
        min_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Test mode: perturb the transform so the checks must fail.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Compare the time two curves take to reach a target impurity.
    /// Each source is an oracle kind or a config path.
    Speedup {
        #[arg(long)]
        fb: Source,
        #[arg(long)]
        bare: Source,
        #[arg(long)]
        target: f64,
        #[command(flatten)]
        params: OracleParams,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            output,
            workers,
        } => {
            let workers = commands::resolve_workers(workers)?;
            commands::simulate(&config, output.as_deref(), workers)
        }
        Command::Oracle {
            kind,
            params,
            times,
            t_final,
            count,
            d_min,
            d_max,
            output,
        } => {
            let grid = if kind == OracleKind::Bounds {
                Vec::new()
            } else {
                commands::time_grid(&times, t_final, count)?
            };
            commands::oracle(kind, &params, &grid, (d_min, d_max), output.as_deref())
        }
        Command::Verify {
            max_dim,
            min_dim,
            seed,
            inject_fault,
        } => {
            let opts = VerifyOptions {
                min_dim,
                max_dim,
                seed,
                inject_fault,
                ..VerifyOptions::default()
            };
            commands::verify(&opts).map(|_| ())
        }
        Command::Speedup {
            fb,
            bare,
            target,
            params,
            workers,
        } => {
            let workers = commands::resolve_workers(workers)?;
            commands::speedup(&fb, &bare, target, &params, workers).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
