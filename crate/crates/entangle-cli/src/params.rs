//! Experiment parameters: JSON config file merged with `--set key=value`
//! overrides (flags win).

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct Params {
    values: BTreeMap<String, Value>,
    /// Keys actually consumed by the experiment, for unknown-key detection.
    used: std::cell::RefCell<Vec<String>>,
}

impl Params {
    pub fn load(config: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Param(format!("cannot read config {path:?}: {e}")))?;
            let parsed: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Param(format!("config {path:?} is not valid JSON: {e}")))?;
            let obj = parsed
                .as_object()
                .ok_or_else(|| CliError::Param("config root must be a JSON object".into()))?;
            for (k, v) in obj {
                values.insert(k.clone(), v.clone());
            }
        }
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::Param(format!("--set needs key=value, got {item:?}")))?;
            // value parses as JSON when possible, else as a bare string
            let v = serde_json::from_str::<Value>(raw)
                .unwrap_or_else(|_| Value::String(raw.to_string()));
            values.insert(key.trim().to_string(), v);
        }
        Ok(Self {
            values,
            used: Default::default(),
        })
    }

    fn mark(&self, key: &str) {
        self.used.borrow_mut().push(key.to_string());
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.mark(key);
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| CliError::Param(format!("parameter {key} must be a number"))),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.mark(key);
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| CliError::Param(format!("parameter {key} must be a non-negative integer"))),
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool, CliError> {
        self.mark(key);
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_bool()
                .ok_or_else(|| CliError::Param(format!("parameter {key} must be a boolean"))),
        }
    }

    pub fn string(&self, key: &str, default: &str) -> Result<String, CliError> {
        self.mark(key);
        match self.values.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(other) => Ok(other.to_string()),
        }
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        self.mark(key);
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| CliError::Param(format!("{key} entries must be numbers")))
                })
                .collect(),
            Some(_) => Err(CliError::Param(format!("parameter {key} must be an array"))),
        }
    }

    pub fn usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, CliError> {
        self.mark(key);
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_u64().map(|x| x as usize).ok_or_else(|| {
                        CliError::Param(format!("{key} entries must be non-negative integers"))
                    })
                })
                .collect(),
            Some(_) => Err(CliError::Param(format!("parameter {key} must be an array"))),
        }
    }

    /// Errors on any provided key the experiment never consumed.
    pub fn reject_unknown(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        for key in self.values.keys() {
            if !used.iter().any(|u| u == key) {
                return Err(CliError::Param(format!(
                    "unknown parameter {key:?} for this experiment"
                )));
            }
        }
        Ok(())
    }

    /// `key=value` summary of all provided parameters for the CSV comment.
    pub fn summary(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}
