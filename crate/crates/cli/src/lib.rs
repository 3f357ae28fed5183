//! `resokam` command-line frontend.
//!
//! Every subcommand reads a model spec (and, where needed, covering
//! parameters), runs the corresponding library operation, writes a JSON
//! report embedding its [`config::RunConfig`] plus any CSV/SVG side files into
//! the output directory, and prints a one-line summary.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use crate::args::{Cli, Command};
use crate::config::{ParamsFile, RunConfig};
use crate::error::{CliError, CliResult};

/// Shared state of one invocation.
pub struct Ctx {
    pub argv: Vec<String>,
    pub threads: Option<usize>,
    pub out: PathBuf,
}

impl Ctx {
    pub fn config(
        &self,
        command: &str,
        spec_path: Option<&std::path::Path>,
        spec: Option<&resokam_core::model::ModelSpec>,
        params: Option<&ParamsFile>,
        options: &impl Serialize,
        seed: Option<u64>,
    ) -> CliResult<RunConfig> {
        Ok(RunConfig {
            command: command.to_string(),
            argv: self.argv.clone(),
            spec_path: spec_path.map(|p| p.to_path_buf()),
            spec: spec.cloned(),
            params: params.cloned(),
            options: serde_json::to_value(options).map_err(|e| CliError::Internal(e.to_string()))?,
            seed,
            threads: self.threads,
            out: self.out.clone(),
        })
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Errors are printed to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let ctx = Ctx {
        argv: argv.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect(),
        threads: cli.threads,
        out: cli.out.clone(),
    };
    match execute(&ctx, cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            write_error_report(&ctx, &e);
            e.exit_code()
        }
    }
}

/// Leaves `error.json` with the message (and witness, for invariant
/// failures) next to any partial output. Best effort.
fn write_error_report(ctx: &Ctx, e: &CliError) {
    if matches!(e, CliError::Usage(_)) {
        return;
    }
    let body = serde_json::json!({
        "schema_version": report::SCHEMA_VERSION,
        "argv": ctx.argv,
        "exit_code": e.exit_code(),
        "error": e.to_string(),
    });
    if std::fs::create_dir_all(&ctx.out).is_ok() {
        let _ = std::fs::write(ctx.out.join("error.json"), format!("{body:#}\n"));
    }
}

fn execute(ctx: &Ctx, command: Command) -> CliResult<String> {
    let pool = match ctx.threads {
        Some(0) => return Err(CliError::usage("--threads must be at least 1")),
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    pool.install(|| commands::dispatch(ctx, command))
}
