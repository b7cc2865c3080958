use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use rearrange_lab_core::necessity::ReportRow;

use crate::cli::Format;
use crate::error::{CliError, CliResult};

/// What a subcommand produced, before serialization.
pub struct Outcome {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub verdict: String,
    pub result: Value,
    pub rows: Option<Vec<ReportRow>>,
    pub exit_code: u8,
}

impl Outcome {
    /// Moves a serde `verdict` tag out of `result`, if present.
    pub fn from_tagged(command: &str, config: Value, seed: Option<u64>, mut result: Value) -> Self {
        let verdict = match result.as_object_mut().and_then(|m| m.remove("verdict")) {
            Some(Value::String(s)) => s,
            _ => "ok".into(),
        };
        Outcome {
            command: command.into(),
            config,
            seed,
            verdict,
            result,
            rows: None,
            exit_code: 0,
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: &'a Value,
    seed: Option<u64>,
    verdict: &'a str,
    #[serde(flatten)]
    result: &'a Map<String, Value>,
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

pub fn render_json(outcome: &Outcome) -> String {
    let empty = Map::new();
    let wrapped;
    let result = match &outcome.result {
        Value::Object(m) => m,
        Value::Null => &empty,
        other => {
            wrapped = Map::from_iter([("result".to_string(), other.clone())]);
            &wrapped
        }
    };
    let report = Report {
        command: &outcome.command,
        config: &outcome.config,
        seed: outcome.seed,
        verdict: &outcome.verdict,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}

pub fn render_csv(outcome: &Outcome) -> CliResult<String> {
    let rows = outcome.rows.as_ref().ok_or_else(|| {
        CliError::Usage(format!(
            "--format csv is only available for demo and find-witness, not {}",
            outcome.command
        ))
    })?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Usage(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn emit(outcome: &Outcome, format: Format, out: Option<&Path>) -> CliResult<()> {
    let text = match format {
        Format::Json => render_json(outcome),
        Format::Csv => render_csv(outcome)?,
    };
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
