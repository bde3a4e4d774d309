//! Tables rendered as CSV (12 significant digits) or a JSON envelope.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.into())
    }
}

/// `%.12g`-style formatting; `-0` prints as `0`.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => fmt_sig(*v),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => json!(i),
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub residuals: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            residuals: BTreeMap::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Records a residual and fails the report when it exceeds `tol`.
    pub fn residual(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        let name = name.into();
        if value.is_nan() || value > tol {
            self.passed = false;
            self.notes.push(format!("{name} = {value:e} exceeds {tol:e}"));
        }
        self.residuals.insert(name, value);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, params: Value) -> String {
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert((*c).to_string(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        let residuals: Map<String, Value> = self
            .residuals
            .iter()
            .map(|(k, v)| (k.clone(), Cell::Num(*v).json()))
            .collect();
        let doc = json!({
            "params": params,
            "results": results,
            "residuals": residuals,
            "notes": self.notes,
            "status": if self.passed { "pass" } else { "fail" },
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render(&self, cfg: &RunConfig) -> String {
        match cfg.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(params_json(cfg)),
        }
    }
}

pub fn params_json(cfg: &RunConfig) -> Value {
    json!({
        "delta": cfg.delta,
        "lambda": cfg.lambda,
        "n_max": cfg.n_max,
        "grid": {"x_min": cfg.x_min, "x_max": cfg.x_max, "points": cfg.points},
        "tolerances": {
            "residual": cfg.tol_residual,
            "grid": cfg.tol_grid,
            "spectrum": cfg.tol_spectrum,
        },
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes to `cfg.output` or stdout; CSV notes go to stderr.
pub fn emit(report: &Report, cfg: &RunConfig) -> Result<(), CliError> {
    let text = report.render(cfg);
    match &cfg.output {
        Some(p) => write_text(p, &text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    if cfg.format == Format::Csv {
        for (k, v) in &report.residuals {
            eprintln!("# {k} = {}", fmt_sig(*v));
        }
        for n in &report.notes {
            eprintln!("# {n}");
        }
    }
    Ok(())
}
