//! Command line front end.
//!
//! Configuration is layered: built-in defaults, then `--config`, then each
//! `--set key=value`, then the dedicated flags.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use serde_json::json;
use thiserror::Error;

pub use config::{Command, Format, RunConfig};
use output::to_json;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn runtime<E: std::fmt::Display>(e: E) -> Self {
        CliError::Runtime(e.to_string())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Runtime(_) => "runtime",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spinlock", version, about = "Spin-spin resonances of two orbiting ellipsoids")]
pub struct Cli {
    /// Subcommand; may also come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Dotted-path override, e.g. `scan.n_e=31`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// System JSON file.
    #[arg(long, global = true)]
    pub system: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[arg(long, env = "SPINLOCK_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Print the merged configuration and exit.
    #[arg(long, global = true)]
    pub show_config: bool,
}

impl Cli {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = config::layered(self.config.as_deref(), &self.set)?;
        if let Some(c) = self.command {
            cfg.command = Some(c);
        }
        if let Some(s) = &self.system {
            cfg.system = Some(config::SystemSource::Path(s.clone()));
            if self.config.is_some() && s.is_relative() {
                cfg.system = Some(config::SystemSource::Path(std::env::current_dir()?.join(s)));
            }
        }
        if let Some(o) = &self.output {
            cfg.output.path = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        Ok(cfg)
    }
}

/// Runs a validated configuration and returns the rendered output.
pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    let cmd = cfg.validate()?;
    let emitted = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(CliError::runtime)?
            .install(|| commands::dispatch(cmd, cfg))?,
        None => commands::dispatch(cmd, cfg)?,
    };
    Ok(match cfg.output.format {
        Format::Json => {
            let mut v = emitted.json;
            if let Some(obj) = v.as_object_mut() {
                obj.insert("command".into(), json!(cmd.as_str()));
            }
            to_json(&v)
        }
        Format::Csv => emitted.table.to_csv(),
        Format::Svg => emitted.svg.expect("format validated against the command"),
    })
}

fn write_out(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Error JSON as written to the error stream.
pub fn error_json(e: &CliError) -> String {
    to_json(&json!({"error": {"kind": e.kind(), "message": e.to_string()}}))
}

/// Parses `args`, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = CliError::Config(e.to_string().trim_end().to_string());
            eprint!("{}", error_json(&err));
            return err.exit_code();
        }
    };
    let result = cli.resolve().and_then(|cfg| {
        if cli.show_config {
            print!("{}", to_json(&cfg));
            return Ok(());
        }
        let text = execute(&cfg)?;
        write_out(&cfg, &text)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprint!("{}", error_json(&e));
            e.exit_code()
        }
    }
}
