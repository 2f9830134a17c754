//! Command-line front end: run configuration, text checkpoints, and the
//! subcommand implementations behind the `kaf` binary.
//!
//! Exit codes: 0 on success, 2 for configuration or data errors, 3 when
//! training diverges to non-finite values.

pub mod args;
pub mod checkpoint;
pub mod commands;
pub mod config;

pub use checkpoint::{
    format_hex_f64, load_checkpoint, parse_hex_f64, save_checkpoint, Checkpoint, TensorBlock,
    CHECKPOINT_HEADER,
};
pub use config::{ModelKind, RunConfig, ENV_SEED};

use crate::error::Result;
use args::{Cli, Command};

/// Runs one parsed subcommand.
pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => commands::cmd_fit(&a.into_config()?),
        Command::KernelCheck(a) => commands::cmd_kernel_check(&a.into_config()?),
        Command::SigmaOpt(a) => commands::cmd_sigma_opt(&a.into_config()?),
        Command::Params(a) => commands::cmd_params(&a.into_config()?),
        Command::Spectrum(a) => commands::cmd_spectrum(&a.into_config()?),
        Command::Ablate(a) => commands::cmd_ablate(&a.into_config()?),
    }
}

/// Parses `std::env::args`, runs the command, and maps errors to exit codes.
pub fn run() -> i32 {
    use clap::Parser;
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
