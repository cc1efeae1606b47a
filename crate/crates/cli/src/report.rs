use std::fmt::Write as _;

use digitfn::value::format_real;
use digitfn::Value;
use serde_json::{Map, Value as Json};

/// Exact values become `"p/q"` strings; reals become numbers rounded to 9 significant digits.
pub fn value(v: &Value) -> Json {
    match v {
        Value::Exact(_) => Json::String(v.to_string()),
        Value::Real(x) => real(*x),
    }
}

pub fn real(x: f64) -> Json {
    let text = format_real(x);
    match text.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(n) => Json::Number(n),
        None => Json::String(text),
    }
}

pub fn reals(xs: &[f64]) -> Json {
    Json::Array(xs.iter().map(|&x| real(x)).collect())
}

pub fn status(pass: bool) -> Json {
    Json::String(if pass { "PASS" } else { "FAIL" }.into())
}

/// Key/value report kept in insertion order.
#[derive(Debug, Default)]
pub struct Report(Map<String, Json>);

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<Json>) -> &mut Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<Json>) -> Self {
        self.set(key, value);
        self
    }

    pub fn into_json(self) -> Json {
        Json::Object(self.0)
    }
}

impl From<Report> for Json {
    fn from(r: Report) -> Json {
        r.into_json()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn render(report: &Json, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            text(&mut out, report, 0);
            out
        }
    }
}

fn scalar(v: &Json) -> Option<String> {
    match v {
        Json::Null => Some("-".into()),
        Json::Bool(b) => Some(b.to_string()),
        Json::Number(n) => Some(n.to_string()),
        Json::String(s) => Some(s.clone()),
        Json::Array(items) if items.is_empty() => Some("none".into()),
        Json::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            Some(items.iter().filter_map(scalar).collect::<Vec<_>>().join(","))
        }
        _ => None,
    }
}

fn text(out: &mut String, v: &Json, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Json::Object(map) => {
            for (k, item) in map {
                match scalar(item) {
                    Some(s) => writeln!(out, "{pad}{k}: {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}{k}:").unwrap();
                        text(out, item, indent + 1);
                    }
                }
            }
        }
        Json::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => writeln!(out, "{pad}- {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}-").unwrap();
                        text(out, item, indent + 1);
                    }
                }
            }
        }
        other => writeln!(out, "{pad}{}", scalar(other).unwrap_or_default()).unwrap(),
    }
}
