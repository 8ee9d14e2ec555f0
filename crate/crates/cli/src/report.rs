//! Report and CSV persistence.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::commands::{Command, Outcome, Status};

/// Everything needed to rerun an experiment; embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    pub experiment: Command,
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    status: Status,
    result: &'a Value,
    /// The only field that differs between identical runs.
    timestamp: String,
}

pub fn write(config: &ExperimentConfig, outcome: &Outcome) -> Result<()> {
    let report = Report {
        tool: "b2disc",
        version: env!("CARGO_PKG_VERSION"),
        config,
        status: outcome.status,
        result: &outcome.result,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match &config.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("out: cannot write {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    if let Some(path) = &config.csv {
        let Some(table) = &outcome.table else {
            bail!("csv: this command produces no grid");
        };
        let mut w = csv::Writer::from_path(path).with_context(|| format!("csv: cannot write {}", path.display()))?;
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|x| format!("{x:e}")))?;
        }
        w.flush()?;
    }
    Ok(())
}
