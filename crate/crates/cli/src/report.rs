//! Flat `key = value` report with a fixed key order.
//!
//! Reals are written in scientific notation with 17 significant digits, so
//! every `f64` survives a print/parse round trip and identical runs give
//! identical bytes.

use std::fmt::Write as _;

use seirs::{StabilityVerdict, State64};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Count(u64),
    Flag(bool),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Real(v) => format_real(*v),
            Value::Count(v) => v.to_string(),
            Value::Flag(v) => v.to_string(),
            Value::Text(s) => format!("{s:?}"),
        }
    }
}

/// `{:.16e}`, with the non-finite values spelled out.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub entries: Vec<(String, Value)>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            entries: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn real(&mut self, key: impl Into<String>, v: f64) {
        self.entries.push((key.into(), Value::Real(v)));
    }

    pub fn count(&mut self, key: impl Into<String>, v: u64) {
        self.entries.push((key.into(), Value::Count(v)));
    }

    pub fn flag(&mut self, key: impl Into<String>, v: bool) {
        self.entries.push((key.into(), Value::Flag(v)));
    }

    pub fn text(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.entries.push((key.into(), Value::Text(v.into())));
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn state(&mut self, prefix: &str, x: &State64) {
        for (name, v) in ["s", "e", "i", "rcv"].iter().zip(x.to_array()) {
            self.real(format!("{prefix}.{name}"), v);
        }
    }

    pub fn verdict(&mut self, prefix: &str, v: &StabilityVerdict<f64>) {
        for (k, c) in v.criteria.iter().enumerate() {
            self.text(format!("{prefix}.criterion.{k}.condition"), c.condition);
            self.real(format!("{prefix}.criterion.{k}.value"), c.value);
            self.flag(format!("{prefix}.criterion.{k}.satisfied"), c.satisfied);
        }
        self.flag(format!("{prefix}.stable"), v.stable);
        self.text(format!("{prefix}.status"), v.status.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command = {:?}", self.command).unwrap();
        for (key, value) in &self.entries {
            writeln!(out, "{key} = {}", value.render()).unwrap();
        }
        writeln!(out, "warnings = {}", self.warnings.len()).unwrap();
        for (k, w) in self.warnings.iter().enumerate() {
            writeln!(out, "warning.{k} = {w:?}").unwrap();
        }
        out
    }
}
