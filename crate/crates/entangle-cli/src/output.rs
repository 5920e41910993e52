//! Experiment output: plot-ready CSV (header row + `#` parameter comment) or
//! JSON.

use std::io::Write;
use std::path::Path;

use crate::CliError;

pub enum Output {
    Csv {
        comment: String,
        header: Vec<String>,
        rows: Vec<Vec<String>>,
    },
    Json(serde_json::Value),
}

/// Deterministic fixed-precision float rendering for byte-identical reruns.
pub fn num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:.10e}")
    }
}

impl Output {
    pub fn render(&self, format: crate::Format) -> Result<String, CliError> {
        match (self, format) {
            (Output::Csv { comment, header, rows }, crate::Format::Csv) => {
                let mut s = String::new();
                s.push_str(&format!("# {comment}\n"));
                s.push_str(&header.join(","));
                s.push('\n');
                for row in rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                Ok(s)
            }
            (Output::Csv { comment, header, rows }, crate::Format::Json) => {
                let rows_json: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|row| {
                        let obj: serde_json::Map<String, serde_json::Value> = header
                            .iter()
                            .zip(row)
                            .map(|(h, v)| {
                                let val = v
                                    .parse::<f64>()
                                    .map(|x| serde_json::json!(x))
                                    .unwrap_or_else(|_| serde_json::json!(v));
                                (h.clone(), val)
                            })
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                serde_json::to_string_pretty(&serde_json::json!({
                    "parameters": comment,
                    "rows": rows_json,
                }))
                .map_err(|e| CliError::Numerical(e.to_string()))
            }
            (Output::Json(v), _) => serde_json::to_string_pretty(v)
                .map_err(|e| CliError::Numerical(e.to_string())),
        }
    }

    pub fn write(&self, out: Option<&Path>, format: crate::Format) -> Result<(), CliError> {
        let text = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Numerical(format!("cannot write {path:?}: {e}"))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Numerical(e.to_string()))
            }
        }
    }
}
