//! Machine-readable output: JSON with 17 significant digits and the run manifest.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::special::QuadratureSettings;

/// Format with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                let x = n.as_f64().unwrap_or(f64::NAN);
                if x.is_finite() {
                    out.push_str(&sig17(x));
                } else {
                    out.push_str("null");
                }
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items.iter().all(|x| !x.is_object() && !x.is_array());
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if flat {
                    if i > 0 {
                        out.push(' ');
                    }
                } else {
                    out.push('\n');
                    pad(out, indent + 2);
                }
                write_value(out, x, indent + 2);
            }
            if !flat {
                out.push('\n');
                pad(out, indent);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, x)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                pad(out, indent + 2);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 2);
            }
            out.push('\n');
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON in which every non-integer number carries 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
    pub wall_time_seconds: f64,
    pub threads: usize,
    pub tolerance: QuadratureSettings,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: Value, seed: Option<u64>, threads: usize, tolerance: QuadratureSettings) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds: 0.0,
            threads,
            tolerance,
        }
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_time_seconds = started.elapsed().as_secs_f64();
        self
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(to_json(self)?.as_bytes())?;
        Ok(())
    }
}
