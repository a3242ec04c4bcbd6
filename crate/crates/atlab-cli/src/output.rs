//! Result rows, the JSON document and the CSV table.

use std::path::Path;

use atlab::stats::Estimate;
use atlab::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;

pub const FORMAT_VERSION: &str = "atlab-results/1";

/// One (parameter point, observable) record.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub params: Vec<(String, f64)>,
    pub observable: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub backend: &'static str,
    /// exact or mc.
    pub estimator: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Row {
    pub fn exact(params: Vec<(String, f64)>, observable: impl Into<String>, value: f64) -> Self {
        Row {
            params,
            observable: observable.into(),
            value,
            stderr: None,
            backend: "oracle",
            estimator: "exact",
            threshold: None,
            pass: None,
            note: None,
        }
    }

    pub fn mc(params: Vec<(String, f64)>, observable: impl Into<String>, e: Estimate) -> Self {
        Row {
            params,
            observable: observable.into(),
            value: e.value,
            stderr: e.stderr,
            backend: "mcmc",
            estimator: "mc",
            threshold: None,
            pass: None,
            note: None,
        }
    }

    /// Exact for zero-width estimates from the oracle, mc otherwise.
    pub fn from_estimate(params: Vec<(String, f64)>, observable: impl Into<String>, e: Estimate, mcmc: bool) -> Self {
        if mcmc {
            Row::mc(params, observable, e)
        } else {
            Row::exact(params, observable, e.value)
        }
    }
}

/// Rows plus the column names of their parameters and any extra JSON.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub param_names: Vec<String>,
    pub rows: Vec<Row>,
    pub extra: serde_json::Map<String, Value>,
}

impl Report {
    pub fn new(param_names: &[&str]) -> Self {
        Report {
            param_names: param_names.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }
}

pub fn params(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn json_document(
    command: &str,
    config: &ExperimentConfig,
    report: &Report,
    seconds: Option<f64>,
) -> Result<Value> {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            let mut m = serde_json::Map::new();
            let p: serde_json::Map<String, Value> =
                r.params.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect();
            m.insert("params".into(), Value::Object(p));
            m.insert("observable".into(), r.observable.clone().into());
            m.insert("value".into(), finite_or_null(r.value));
            m.insert("stderr".into(), r.stderr.map_or(Value::Null, finite_or_null));
            m.insert("backend".into(), r.backend.into());
            m.insert("estimator".into(), r.estimator.into());
            if let Some(t) = r.threshold {
                m.insert("threshold".into(), t.into());
            }
            if let Some(p) = r.pass {
                m.insert("pass".into(), p.into());
            }
            if let Some(n) = &r.note {
                m.insert("note".into(), n.clone().into());
            }
            Value::Object(m)
        })
        .collect();
    let resolved = serde_json::to_value(config).map_err(|e| Error::Input(e.to_string()))?;
    let mut doc = serde_json::Map::new();
    doc.insert("format_version".into(), FORMAT_VERSION.into());
    doc.insert("command".into(), command.into());
    doc.insert("resolved_config".into(), resolved);
    doc.insert("seed".into(), config.seed().into());
    doc.insert("results".into(), Value::Array(rows));
    for (k, v) in &report.extra {
        doc.insert(k.clone(), v.clone());
    }
    doc.insert(
        "timing".into(),
        seconds.map_or(Value::Null, |s| serde_json::json!({ "wall_seconds": s })),
    );
    Ok(Value::Object(doc))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::Null
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Input(format!("cannot write output: {e}"))
}

/// Columns: params…, observable, value, stderr, backend, seed.
pub fn write_csv(path: &Path, report: &Report, seed: u64) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    let mut header = report.param_names.clone();
    header.extend(["observable", "value", "stderr", "backend", "seed"].map(String::from));
    w.write_record(&header).map_err(io_err)?;
    for r in &report.rows {
        let mut rec: Vec<String> = report
            .param_names
            .iter()
            .map(|n| {
                r.params
                    .iter()
                    .find(|(k, _)| k == n)
                    .map_or(String::new(), |(_, v)| v.to_string())
            })
            .collect();
        rec.push(r.observable.clone());
        rec.push(if r.value.is_finite() { r.value.to_string() } else { String::new() });
        rec.push(r.stderr.map_or(String::new(), |s| s.to_string()));
        rec.push(r.backend.to_string());
        rec.push(seed.to_string());
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let dir = std::env::temp_dir().join(format!("atlab-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("r.csv");
        write_csv(&path, &Report::new(&["beta", "k"]), 3).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "beta,k,observable,value,stderr,backend,seed\n");
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn non_finite_values_become_null() {
        let mut r = Report::new(&[]);
        r.rows.push(Row::exact(vec![], "x", f64::NAN));
        let doc = json_document("verify", &ExperimentConfig::default(), &r, None).unwrap();
        assert!(doc["results"][0]["value"].is_null());
        assert!(doc["timing"].is_null());
        assert_eq!(doc["format_version"], FORMAT_VERSION);
    }
}
