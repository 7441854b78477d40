//! Sample files, profile JSON, matrix CSV and trace lines.

use std::collections::HashMap;
use std::fmt::Write as _;

use pml_core::pseudo::EstimatorReport;
use pml_core::relaxation::TraceRow;
use pml_core::rounding::RoundingResult;
use pml_core::{Matrix, Profile};
use serde_json::{json, Value};

use crate::error::{parse_err, Result};

/// Maps string tokens to dense ids in order of first appearance.
#[derive(Debug, Default, Clone)]
pub struct Tokenizer {
    ids: HashMap<String, usize>,
    names: Vec<String>,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn id(&mut self, token: &str) -> usize {
        if let Some(&i) = self.ids.get(token) {
            return i;
        }
        let i = self.names.len();
        self.ids.insert(token.to_owned(), i);
        self.names.push(token.to_owned());
        i
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Whitespace-separated tokens, one sequence per file.
pub fn parse_samples(text: &str) -> Result<(Vec<usize>, Tokenizer)> {
    let mut tok = Tokenizer::new();
    let seq: Vec<usize> = text.split_whitespace().map(|t| tok.id(t)).collect();
    if seq.is_empty() {
        return parse_err("sample file has no tokens");
    }
    Ok((seq, tok))
}

pub fn profile_to_json(p: &Profile) -> Value {
    let entries: Vec<Value> = p.entries().iter().map(|&(m, phi)| json!([m, phi])).collect();
    json!({ "n": p.n(), "entries": entries })
}

/// `{"n": .., "entries": [[m, phi], ..]}` in any order; `n` is optional
/// but must agree with the entries.
pub fn profile_from_json(text: &str) -> Result<Profile> {
    let v: Value = serde_json::from_str(text)?;
    let Some(raw) = v.get("entries").and_then(Value::as_array) else {
        return parse_err("profile json needs an \"entries\" array");
    };
    let mut entries = Vec::with_capacity(raw.len());
    for e in raw {
        let pair = e.as_array().filter(|a| a.len() == 2);
        let (m, phi) = match pair.map(|a| (a[0].as_u64(), a[1].as_u64())) {
            Some((Some(m), Some(phi))) => (m, phi),
            _ => return parse_err(format!("bad profile entry {e}")),
        };
        entries.push((m, phi));
    }
    entries.sort_unstable();
    let profile = Profile::new(entries)?;
    match v.get("n") {
        None => {}
        Some(n) => match n.as_u64() {
            Some(n) if n == profile.n() => {}
            _ => return parse_err(format!("\"n\" is {n} but the entries sum to {}", profile.n())),
        },
    }
    Ok(profile)
}

pub fn profile_to_csv(p: &Profile) -> String {
    let mut out = String::from("m,phi\n");
    for &(m, phi) in p.entries() {
        writeln!(out, "{m},{phi}").unwrap();
    }
    out
}

/// Header `rows=l cols=c`, then one comma-separated line per row.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = format!("rows={} cols={}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|x| format!("{x}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let Some(header) = lines.next() else {
        return parse_err("empty matrix file");
    };
    let mut rows = None;
    let mut cols = None;
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("rows", v)) => rows = v.parse::<usize>().ok(),
            Some(("cols", v)) => cols = v.parse::<usize>().ok(),
            _ => return parse_err(format!("bad matrix header {header:?}")),
        }
    }
    let (Some(rows), Some(cols)) = (rows, cols) else {
        return parse_err(format!("bad matrix header {header:?}"));
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (i, line) in lines.enumerate() {
        let vals: Vec<&str> = line.split(',').map(str::trim).collect();
        if vals.len() != cols {
            return parse_err(format!("row {i} has {} values, header says {cols}", vals.len()));
        }
        for v in vals {
            match v.parse::<f64>() {
                Ok(x) if x.is_finite() => data.push(x),
                _ => return parse_err(format!("bad number {v:?} in row {i}")),
            }
        }
        seen += 1;
    }
    if seen != rows {
        return parse_err(format!("found {seen} rows, header says {rows}"));
    }
    Ok(Matrix::from_vec(rows, cols, data))
}

/// One JSON object per line: iteration, log_g, gap.
pub fn trace_to_jsonl(trace: &[TraceRow]) -> String {
    let mut out = String::new();
    for t in trace {
        out.push_str(&json!({ "iteration": t.iteration, "log_g": t.log_g, "gap": t.gap }).to_string());
        out.push('\n');
    }
    out
}

pub fn weights_to_json(w: &[f64]) -> Value {
    json!(w)
}

pub fn weights_to_csv(w: &[f64]) -> String {
    let mut out = String::from("element,weight\n");
    for (i, x) in w.iter().enumerate() {
        writeln!(out, "{i},{x}").unwrap();
    }
    out
}

pub fn certificate_to_json(r: &RoundingResult, input: &Matrix) -> Value {
    let c = &r.certificate;
    let s = (0..input.rows()).filter(|&i| input.row_sum(i) > 0.0).count();
    let t = (0..input.cols()).filter(|&j| input.col_sum(j) > 0.0).count();
    json!({
        "holds": c.holds(),
        "below_input": c.below_input,
        "integral_rows": c.integral_rows,
        "integral_cols": c.integral_cols,
        "zeros_preserved": c.zeros_preserved,
        "total_change": r.total_change,
        "nonzero_rows": s,
        "nonzero_cols": t,
        "k": r.k,
    })
}

pub fn report_fields(r: &EstimatorReport) -> Vec<(&'static str, Value)> {
    vec![
        ("estimate", json!(r.estimate)),
        ("pml_part", json!(r.pml_part)),
        ("empirical_part", json!(r.empirical_part)),
        ("bias_correction", json!(r.bias_correction)),
        ("subset_size", json!(r.subset_size)),
        ("n1", json!(r.n1)),
        ("n", json!(r.n)),
        ("pml_support", json!(r.pml_support)),
    ]
}

pub fn report_to_json(r: &EstimatorReport) -> Value {
    Value::Object(report_fields(r).into_iter().map(|(k, v)| (k.to_owned(), v)).collect())
}

pub fn report_to_csv(r: &EstimatorReport) -> String {
    let fields = report_fields(r);
    let names: Vec<&str> = fields.iter().map(|f| f.0).collect();
    let vals: Vec<String> = fields.iter().map(|f| f.1.to_string()).collect();
    format!("{}\n{}\n", names.join(","), vals.join(","))
}
