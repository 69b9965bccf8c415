//! Config-file loading and flag overrides.
//!
//! Every subcommand's arguments are a struct of optional fields that is both
//! a clap argument group and a serde record. A config file supplies a JSON
//! object with the same keys; flags that were given on the command line
//! replace the corresponding keys.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::report::CliError;

pub fn load(path: Option<&Path>) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::config("config file must contain a JSON object")),
        Err(e) => Err(CliError::config(format!("invalid config JSON: {e}"))),
    }
}

/// Overlays the flags that were set onto the config and parses the result.
pub fn merge<T: Serialize + DeserializeOwned>(
    flags: &T,
    mut config: Map<String, Value>,
) -> Result<(T, Value), CliError> {
    let Value::Object(set) = serde_json::to_value(flags).expect("arguments serialize") else {
        unreachable!("argument structs serialize to objects")
    };
    for (k, v) in set {
        if !v.is_null() {
            config.insert(k, v);
        }
    }
    let merged = Value::Object(config);
    let parsed = serde_json::from_value(merged.clone())
        .map_err(|e| CliError::config(format!("invalid configuration: {e}")))?;
    Ok((parsed, merged))
}

pub fn required<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::config(format!("missing required parameter `{name}`")))
}

pub fn positive(v: f64, name: &str) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(format!(
            "`{name}` must be positive, got {v}"
        )))
    }
}
