//! `pacsafe`: plan, certify, validate and plot PAC one-step safety
//! certificates.
//!
//! Exit status: 0 accepted or success, 1 validation failure, 2 configuration
//! error, 3 rejected, 4 plugin failure, 5 solver failure. Log level comes
//! from `PAC_CERT_LOG` (default `warn`).

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{CertifyStatus, ValidateArgs};
use crate::config::{resolve, ConfigFile, Overrides};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "pacsafe", version, about = "PAC one-step safety certificates for black-box stochastic systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named parameter set, e.g. table1/ex6-sbc3.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// External simulator command line.
    #[arg(long)]
    plugin: Option<String>,
}

impl RunArgs {
    fn resolve(&self) -> Result<config::RunConfig> {
        let file = ConfigFile::load_opt(self.config.as_deref())?;
        resolve(
            &file,
            &Overrides {
                preset: self.preset.clone(),
                seed: self.seed,
                workers: self.workers,
                out: self.out.clone(),
                plugin: self.plugin.clone(),
            },
        )
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print sample sizes and the guarantee a run would give.
    Plan(RunArgs),
    /// Sample, solve and write a certificate (exit 0 accepted, 3 rejected).
    Certify(RunArgs),
    /// Check a certificate's integrity and test its claim by Monte Carlo.
    Validate {
        certificate: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        plugin: Option<String>,
        /// Seed of the validation stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fresh states to test.
        #[arg(long)]
        states: Option<usize>,
        /// Disturbance draws per state.
        #[arg(long)]
        mc: Option<usize>,
    },
    /// Write the state-wise bound of a stochastic certificate on a grid (CSV).
    Grid {
        certificate: PathBuf,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Fixed coordinates for systems with more than two states, e.g. "3=0,4=0.5".
        #[arg(long)]
        slice: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve a built-in benchmark over the plugin protocol on stdin/stdout.
    ServeBuiltin { name: String },
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Plan(args) => commands::plan_cmd(&args.resolve()?)?,
        Command::Certify(args) => {
            return Ok(match commands::certify_cmd(&args.resolve()?)? {
                CertifyStatus::Accepted => ExitCode::SUCCESS,
                CertifyStatus::Rejected => ExitCode::from(3),
            })
        }
        Command::Validate {
            certificate,
            config,
            plugin,
            seed,
            workers,
            out,
            states,
            mc,
        } => commands::validate_cmd(&ValidateArgs {
            certificate: &certificate,
            config: config.as_deref(),
            plugin: plugin.as_deref(),
            seed,
            workers,
            out: out.as_deref(),
            states,
            mc,
        })?,
        Command::Grid {
            certificate,
            resolution,
            slice,
            out,
        } => commands::grid_cmd(&certificate, resolution, slice.as_deref(), out.as_deref())?,
        Command::ServeBuiltin { name } => commands::serve_builtin_cmd(&name)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PAC_CERT_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
