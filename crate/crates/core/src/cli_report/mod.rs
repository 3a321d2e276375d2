//! The `bn6` pipeline: configuration, stage commands, byte-stable outputs and the verdict
//! report.
//!
//! Stages read and write a single output directory. Each JSON output carries the config
//! digest, and a stage refuses inputs written under a different configuration.
//!
//! | stage | needs | writes |
//! |---|---|---|
//! | `constants` | nothing | `constants.json` |
//! | `lambda0` | nothing | `lambda0.json` |
//! | `ground-state` | `lambda0.json` | `ground_state.json`, `u0.profile`, `v0.profile` |
//! | `expansion` | ground-state outputs | `expansion.{csv,json,svg}` |
//! | `branch` | ground-state outputs | `branch.{csv,json,svg}`, `branch_opposite.csv` |
//! | `report` | all of the above | `report.{txt,json}` |

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;
pub mod verdicts;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

pub use commands::Context;
pub use config::{load_config, RunConfig, SeedOverrides};
pub use output::{RunManifest, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bubble constants with closed-form/quadrature cross-checks.
    Constants,
    /// The critical parameter lambda0.
    Lambda0,
    /// Ground state at lambda0, nondegeneracy, v0 and the reduced-energy constants.
    GroundState,
    /// Energy expansion sweep over eps and d.
    Expansion,
    /// Sign-changing branch continuation and the blow-up rate fit.
    Branch,
    /// Verdict table over every acceptance criterion.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Lambda0 => "lambda0",
            Command::GroundState => "ground-state",
            Command::Expansion => "expansion",
            Command::Branch => "branch",
            Command::Report => "report",
        }
    }

    /// Pipeline order.
    pub const ALL: [Command; 6] = [
        Command::Constants,
        Command::Lambda0,
        Command::GroundState,
        Command::Expansion,
        Command::Branch,
        Command::Report,
    ];
}

#[derive(Debug, Parser)]
#[command(name = "bn6", version, about = "Sign-changing blow-up solutions of the critical problem on the 6-ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Output directory; overrides the config file and BN6_OUTPUT_DIR.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Process exit status for an error escaping a stage.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MissingDependency { .. } | Error::MixedDigest(_) | Error::ConfigError(_) => 2,
        Error::DegenerateLinearization { .. } | Error::AssumptionV00Violated { .. } => 3,
        _ => 4,
    }
}

/// Resolves the configuration: file values, then BN6_OUTPUT_DIR, then `--out`.
pub fn resolve_config(config: Option<&PathBuf>, out: Option<&PathBuf>) -> Result<RunConfig> {
    let mut cfg = match config {
        Some(p) => load_config(p)?,
        None => {
            let mut c = RunConfig::default();
            config::apply_env(&mut c);
            c
        }
    };
    if let Some(o) = out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

/// Runs one stage and updates the manifest; returns the exit status.
pub fn run_stage(cmd: Command, cfg: &RunConfig) -> Result<i32> {
    let ctx = Context::new(cfg.clone())?;
    std::fs::create_dir_all(&ctx.dir)?;
    let mut manifest = RunManifest::load_or_fresh(&ctx.dir, cfg)?;
    let result = match cmd {
        Command::Constants => commands::cmd_constants(&ctx, &mut manifest),
        Command::Lambda0 => commands::cmd_lambda0(&ctx, &mut manifest),
        Command::GroundState => commands::cmd_ground_state(&ctx, &mut manifest),
        Command::Expansion => commands::cmd_expansion(&ctx, &mut manifest),
        Command::Branch => commands::cmd_branch(&ctx, &mut manifest),
        Command::Report => commands::cmd_report(&ctx, &mut manifest),
    };
    manifest.save(&ctx.dir)?;
    result
}

/// Entry point shared by the binary: parses nothing, runs `cli` and maps errors to exit codes.
pub fn main_with(cli: &Cli) -> i32 {
    let cfg = match resolve_config(cli.config.as_ref(), cli.out.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bn6: {e}");
            return exit_code(&e);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("bn6: cannot start worker pool: {e}");
            return 4;
        }
    };
    let started = std::time::Instant::now();
    let status = pool.install(|| run_stage(cli.command, &cfg));
    let code = match status {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bn6 {}: {e}", cli.command.name());
            exit_code(&e)
        }
    };
    eprintln!(
        "bn6 {} finished in {:.1}s with status {code}",
        cli.command.name(),
        started.elapsed().as_secs_f64()
    );
    code
}
