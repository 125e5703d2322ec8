//! The `fracscreen` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod jsonout;

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub use commands::{command_name, execute, Outputs};
pub use config::{Cli, RunConfig, OUT_DIR_ENV, VERSION};
pub use error::{CliError, ErrorKind};

/// Reads a configuration from a summary file (its `config` field) or from a
/// bare configuration. Unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| CliError::validation(path.display().to_string(), e.to_string()))?;
    if let Some(inner) = v.get_mut("config") {
        v = inner.take();
    }
    serde_json::from_value(v).map_err(|e| CliError::validation(path.display().to_string(), e.to_string()))
}

pub fn output_dir(cli_value: Option<&Path>) -> PathBuf {
    cli_value
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Runs a configuration, writes its artifacts and `summary.json`, and returns
/// the summary.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<Value, CliError> {
    let cfg = match cfg {
        RunConfig::Replay { path } => load_config(path)?,
        other => other.clone(),
    };
    let mut out = Outputs::new(out_dir)?;
    let result = execute(&cfg, &mut out)?;
    let mut outputs = out.files.clone();
    outputs.push("summary.json".into());
    let summary = json!({
        "command": command_name(&cfg),
        "version": VERSION,
        "config": cfg,
        "outputs": outputs,
        "result": result,
    });
    out.write_json("summary.json", &summary)?;
    Ok(summary)
}

pub fn error_json(e: &CliError) -> String {
    jsonout::to_string(&json!({ "error": e, "exit_code": e.exit_code(), "version": VERSION }))
}
