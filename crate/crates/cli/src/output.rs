//! Artifact writers. CSV files open with `#` comment lines carrying the tool
//! version and the resolved configuration; JSON reports wrap the payload in
//! an envelope with the same information.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const TOOL: &str = "gls";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn open(cfg: &ExperimentConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::config(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn config_json(cfg: &ExperimentConfig) -> String {
    serde_json::to_string(cfg).expect("config serializes")
}

/// Comma-separated table with a commented preamble.
pub struct CsvSink {
    out: Box<dyn Write>,
}

impl CsvSink {
    pub fn create(cfg: &ExperimentConfig, header: &str) -> Result<Self, CliError> {
        let mut out = open(cfg)?;
        writeln!(out, "# {TOOL} {VERSION} {}", cfg.command)?;
        writeln!(out, "# config {}", config_json(cfg))?;
        writeln!(out, "{header}")?;
        Ok(Self { out })
    }

    pub fn row(&mut self, line: &str) -> Result<(), CliError> {
        writeln!(self.out, "{line}")?;
        Ok(())
    }

    /// Trailing `#` line for summaries that do not fit the row schema.
    pub fn comment(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.out, "# {text}")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    payload: &'a T,
}

pub fn write_json<T: Serialize>(cfg: &ExperimentConfig, payload: &T) -> Result<(), CliError> {
    let mut out = open(cfg)?;
    let env = Envelope {
        tool: TOOL,
        version: VERSION,
        config: cfg,
        payload,
    };
    serde_json::to_writer_pretty(&mut out, &env).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
