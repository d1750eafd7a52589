//! Result files.
//!
//! JSON: `{tool, version, config, summary, results, details}`.
//!
//! CSV: `#`-prefixed preamble lines (tool and version, resolved config as
//! one-line JSON, summary), then the frozen columns
//! `estimator,value,std_error,shots,seed,settings` where `settings` holds a
//! JSON object.

use eprsim_core::measure::ExperimentResult;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::experiments::Report;
use crate::CliError;

pub const TOOL: &str = "eprsim";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CSV_COLUMNS: [&str; 6] = [
    "estimator",
    "value",
    "std_error",
    "shots",
    "seed",
    "settings",
];

/// `cfg` with the experiment parameters replaced by their resolved form.
///
/// Where the files go (`output.dir`) is left out, like the worker count, so
/// that identical runs into different directories produce identical bytes.
pub fn resolved_config(cfg: &RunConfig, report: &Report) -> Value {
    let mut resolved = cfg.clone();
    resolved.params = report.params.clone();
    let mut v = serde_json::to_value(resolved).expect("config serializes");
    if let Some(out) = v.get_mut("output").and_then(Value::as_object_mut) {
        out.remove("dir");
    }
    v
}

pub fn json_document(cfg: &RunConfig, report: &Report) -> String {
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "config": resolved_config(cfg, report),
        "summary": report.summary,
        "results": report.results,
        "details": report.details,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

fn number(v: f64) -> String {
    Value::from(v).to_string()
}

pub fn csv_document(cfg: &RunConfig, report: &Report) -> Result<String, CliError> {
    let mut out = format!(
        "# {TOOL} {VERSION}\n# config: {}\n# summary: {}\n",
        resolved_config(cfg, report),
        report.summary
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in &report.results {
        w.write_record(row(r)).map_err(csv_err)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| CliError::Config(format!("csv: {e}")))?;
    out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    Ok(out)
}

fn row(r: &ExperimentResult) -> [String; 6] {
    [
        r.estimator.clone(),
        number(r.value),
        number(r.std_error),
        r.shots.to_string(),
        r.seed.to_string(),
        serde_json::to_string(&r.settings).expect("settings serialize"),
    ]
}

/// Writes the requested formats and returns the paths written.
pub fn write_outputs(cfg: &RunConfig, report: &Report) -> Result<Vec<PathBuf>, CliError> {
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut written = Vec::new();
    if cfg.output.format.json() {
        written.push(write(
            dir,
            &format!("{}.json", cfg.stem()),
            &json_document(cfg, report),
        )?);
    }
    if cfg.output.format.csv() {
        written.push(write(
            dir,
            &format!("{}.csv", cfg.stem()),
            &csv_document(cfg, report)?,
        )?);
    }
    Ok(written)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
