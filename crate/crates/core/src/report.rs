//! Run reports: what a command read, what it found, and which guards fired.
//!
//! JSON reports are canonical: keys sorted, a top-level `"schema": 1`,
//! two-space indentation and a trailing newline. Timings appear only when
//! requested, so reports are byte-identical across runs by default.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRef {
    pub path: String,
    pub sha256: String,
}

impl InputRef {
    pub fn new(path: &str, bytes: &[u8]) -> Self {
        InputRef {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub subcommand: String,
    pub inputs: Vec<InputRef>,
    pub results: Value,
    /// Human-readable body; each line is printed as is in text form.
    pub text: Vec<String>,
    /// Guards and limits that fired, in the order they fired.
    pub flags: Vec<String>,
    /// Milliseconds per phase; empty unless timings were requested.
    pub elapsed: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(subcommand: &str) -> Self {
        RunReport {
            subcommand: subcommand.to_string(),
            inputs: Vec::new(),
            results: Value::Null,
            text: Vec::new(),
            flags: Vec::new(),
            elapsed: BTreeMap::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }
}

/// Serializes a report. Text form is the body, then one `flag:` line per
/// flag, then one `elapsed:` line per timing.
pub fn emit_report(report: &RunReport, format: Format) -> Vec<u8> {
    match format {
        Format::Text => {
            let mut out = String::new();
            for l in &report.text {
                out.push_str(l);
                out.push('\n');
            }
            for f in &report.flags {
                out.push_str(&format!("flag: {f}\n"));
            }
            for (k, v) in &report.elapsed {
                out.push_str(&format!("elapsed: {k} {v:.3} ms\n"));
            }
            out.into_bytes()
        }
        Format::Json => {
            let mut v = json!({
                "schema": SCHEMA,
                "subcommand": report.subcommand,
                "inputs": report.inputs,
                "results": report.results,
                "flags": report.flags,
            });
            if !report.elapsed.is_empty() {
                v["elapsed_ms"] = json!(report.elapsed);
            }
            let mut out = serde_json::to_string_pretty(&canonical(v)).expect("values serialize");
            out.push('\n');
            out.into_bytes()
        }
    }
}

/// Rebuilds every object so keys are sorted whatever map type produced it.
fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let sorted: BTreeMap<String, Value> =
                m.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_sorted_and_versioned() {
        let mut r = RunReport::new("growth table");
        r.inputs.push(InputRef::new("a.json", b"abc"));
        r.results = json!({"zeta": 1, "alpha": [{"b": 2, "a": 1}]});
        let text = String::from_utf8(emit_report(&r, Format::Json)).unwrap();
        assert!(text.starts_with("{\n  \"flags\": [],\n  \"inputs\""));
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
        assert!(text.find("\"a\": 1").unwrap() < text.find("\"b\": 2").unwrap());
        assert!(text.contains("\"schema\": 1"));
        assert!(text.contains("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
        assert!(!text.contains("elapsed_ms"));
        assert_eq!(emit_report(&r, Format::Json), emit_report(&r, Format::Json));
    }

    #[test]
    fn text_appends_flags() {
        let mut r = RunReport::new("x");
        r.line("k=2");
        r.flags.push("guard".into());
        assert_eq!(emit_report(&r, Format::Text), b"k=2\nflag: guard\n");
    }
}
