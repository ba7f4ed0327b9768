//! `interphase <mode> --config <path> [--out <dir>] [--threads N]`

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use config::{Diagnostic, Mode};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration")]
    Validation(Vec<Diagnostic>),
    #[error("{name}: {source}", name = .source.name())]
    Solver {
        #[from]
        source: interphase::Error,
    },
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use interphase::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver {
                source: E::InvalidModel(_) | E::InvalidInput(_) | E::GeometryViolation(_) | E::OutOfRange { .. },
            } => 2,
            CliError::Solver { .. } => 3,
            CliError::Io(..) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Mode taken from the `mode` key of the configuration.
    Run,
    /// Check the configuration and list every problem.
    Validate,
    Equilibrium,
    Classify,
    DispersionSweep,
    Evolve,
    Sweep,
}

#[derive(Debug, Parser)]
#[command(name = "interphase", version, about = "Equilibria and linear stability of two-phase flows with phase transitions")]
struct Args {
    #[arg(value_enum)]
    mode: Command,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: `output.dir` of the config, else `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn print_diagnostics(d: &[Diagnostic]) {
    for x in d {
        eprintln!("  {x}");
    }
}

fn execute(args: &Args) -> Result<(), CliError> {
    if args.mode == Command::Validate {
        let diags = config::validate(&args.config).map_err(|e| CliError::Io(args.config.display().to_string(), e))?;
        if diags.is_empty() {
            println!("{}: ok", args.config.display());
            return Ok(());
        }
        return Err(CliError::Validation(diags));
    }
    let cfg = match config::load(&args.config).map_err(|e| CliError::Io(args.config.display().to_string(), e))? {
        Ok(c) => c,
        Err(d) => return Err(CliError::Validation(d)),
    };
    let mode = match args.mode {
        Command::Run => cfg.mode.ok_or_else(|| {
            CliError::Validation(vec![Diagnostic {
                key: "mode".into(),
                message: "`interphase run` needs a mode key in the configuration".into(),
            }])
        })?,
        Command::Equilibrium => Mode::Equilibrium,
        Command::Classify => Mode::Classify,
        Command::DispersionSweep => Mode::DispersionSweep,
        Command::Evolve => Mode::Evolve,
        Command::Sweep => Mode::Sweep,
        Command::Validate => unreachable!(),
    };
    if let Some(m) = cfg.mode.filter(|&m| m != mode) {
        log::warn!("command-line mode {} overrides configured mode {}", mode.as_str(), m.as_str());
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| {
                CliError::Validation(vec![Diagnostic {
                    key: "--threads".into(),
                    message: e.to_string(),
                }])
            })?;
    }
    let report = pipeline::run(mode, &cfg, &out)?;
    print!("{}", report.to_text());
    log::info!("wrote results to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("INTERPHASE_LOG", "warn")).init();
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Validation(d) = &e {
                print_diagnostics(d);
            }
            ExitCode::from(e.exit_code())
        }
    }
}
