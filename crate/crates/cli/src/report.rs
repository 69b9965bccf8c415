//! Output formatting and the error payload.

use std::io::Write;
use std::path::Path;

use bergman_core::exact_comb::{format_rational, InverseMSeries, Rational, RationalPolynomial};
use bergman_core::Error;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub operation: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            kind: "config_invalid",
            operation: "config",
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_COMPUTE,
            kind: "io",
            operation: "output",
            message: message.into(),
        }
    }

    pub fn payload(&self, command: &str, params: &Value) -> Value {
        json!({
            "error": {
                "kind": self.kind,
                "operation": self.operation,
                "command": command,
                "message": self.message,
                "params": params,
            }
        })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_non_convergence() {
            EXIT_NONCONVERGENCE
        } else if matches!(e, Error::InvalidArgument { .. }) {
            EXIT_CONFIG
        } else {
            EXIT_COMPUTE
        };
        CliError {
            code,
            kind: e.kind(),
            operation: e.operation(),
            message: e.to_string(),
        }
    }
}

/// Writes `text` to the file, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::io(format!("cannot write stdout: {e}")))
        }
    }
}

pub fn json_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Fixed 17-significant-digit float formatting for CSV cells.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn series_json(s: &InverseMSeries) -> Value {
    json!({
        "leading_power": s.leading_power(),
        "coeffs": s.coeffs().iter().map(format_rational).collect::<Vec<_>>(),
    })
}

fn coeff_text(c: &Rational) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format_rational(c)
    }
}

/// `t^3 + 10t^2 + 8t` style rendering, highest power first.
pub fn poly_in_t(p: &RationalPolynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let unit = a.is_one() && i > 0;
        if !unit {
            out.push_str(&coeff_text(&a));
        }
        match i {
            0 => {}
            1 => out.push('t'),
            _ => out.push_str(&format!("t^{i}")),
        }
    }
    out
}
