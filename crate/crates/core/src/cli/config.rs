use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::CliError;

/// Settings read from `--config`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    /// Keys in the same kebab-case spelling as the flags.
    pub settings: Map<String, Value>,
}

/// Reads a TOML settings file or a JSON run manifest. A manifest must have
/// been written by the same command.
pub fn load_config(path: &Path, command: &str) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    let mut table: Map<String, Value> = if is_json {
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
    } else {
        let t: toml::Table = toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        match serde_json::to_value(t) {
            Ok(Value::Object(m)) => m,
            _ => return Err(CliError::usage(format!("{}: not a table", path.display()))),
        }
    };
    if table.contains_key("tool_version") && table.contains_key("config") {
        let recorded = table.get("command").and_then(Value::as_str).unwrap_or_default();
        if recorded != command {
            return Err(CliError::usage(format!(
                "manifest {} was written by '{recorded}', not '{command}'",
                path.display()
            )));
        }
        let seed = table.get("seed").and_then(Value::as_u64);
        let settings = match table.remove("config") {
            Some(Value::Object(m)) => m,
            _ => return Err(CliError::usage(format!("{}: manifest config is not an object", path.display()))),
        };
        return Ok(ConfigFile { seed, settings });
    }
    let seed = match table.remove("seed") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| CliError::usage(format!("{}: seed must be a non-negative integer", path.display())))?,
        ),
    };
    Ok(ConfigFile { seed, settings: table })
}

/// Built-in defaults overlaid with file settings. Unknown keys are errors.
pub(crate) fn resolve<S: Serialize + DeserializeOwned + Default>(file: Option<Map<String, Value>>) -> Result<S, CliError> {
    let Some(file) = file else {
        return Ok(S::default());
    };
    let mut base = match serde_json::to_value(S::default()) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("settings serialize to an object"),
    };
    for (k, v) in file {
        if !base.contains_key(&k) {
            return Err(CliError::usage(format!("unknown config key '{k}'")));
        }
        base.insert(k, v);
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| CliError::usage(format!("invalid config: {e}")))
}
