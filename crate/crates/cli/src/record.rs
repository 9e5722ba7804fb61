use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value as Json};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Config(format!(
                "unknown format `{other}` (expected csv|json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Complex(Complex64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<Complex64> for Value {
    fn from(v: Complex64) -> Self {
        Value::Complex(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Real(v) => v.len(),
            ColumnData::Complex(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

/// Everything one experiment run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub experiment: String,
    pub inputs: Json,
    pub outputs: Vec<(String, Value)>,
    pub columns: Vec<Column>,
    pub diagnostics: Vec<(String, Value)>,
    pub status: String,
}

impl ResultRecord {
    pub fn new(experiment: &str, inputs: Json) -> Self {
        Self {
            experiment: experiment.to_string(),
            inputs,
            outputs: Vec::new(),
            columns: Vec::new(),
            diagnostics: Vec::new(),
            status: "ok".into(),
        }
    }

    pub fn output(&mut self, name: &str, v: impl Into<Value>) -> &mut Self {
        self.outputs.push((name.to_string(), v.into()));
        self
    }

    pub fn diagnostic(&mut self, name: &str, v: impl Into<Value>) -> &mut Self {
        self.diagnostics.push((name.to_string(), v.into()));
        self
    }

    pub fn real_column(&mut self, name: &str, v: Vec<f64>) -> &mut Self {
        self.columns.push(Column {
            name: name.to_string(),
            data: ColumnData::Real(v),
        });
        self
    }

    pub fn complex_column(&mut self, name: &str, v: Vec<Complex64>) -> &mut Self {
        self.columns.push(Column {
            name: name.to_string(),
            data: ColumnData::Complex(v),
        });
        self
    }

    pub fn get_output(&self, name: &str) -> Option<&Value> {
        self.outputs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> Json {
        let named = |items: &[(String, Value)]| -> Json {
            Json::Object(
                items
                    .iter()
                    .map(|(k, v)| (k.clone(), value_json(v)))
                    .collect::<Map<_, _>>(),
            )
        };
        let columns: Map<String, Json> = self
            .columns
            .iter()
            .map(|c| {
                let data = match &c.data {
                    ColumnData::Real(v) => v.iter().map(|x| json!(x)).collect(),
                    ColumnData::Complex(v) => v.iter().map(complex_json).collect(),
                };
                (c.name.clone(), Json::Array(data))
            })
            .collect();
        json!({
            "experiment": self.experiment,
            "status": self.status,
            "inputs": self.inputs,
            "outputs": named(&self.outputs),
            "columns": columns,
            "diagnostics": named(&self.diagnostics),
        })
    }

    /// Columnar table when the record has columns, otherwise one row of the
    /// scalar outputs. Complex values split into `_re`/`_im` columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.columns.is_empty() {
            let header: Vec<String> = self
                .columns
                .iter()
                .flat_map(|c| match c.data {
                    ColumnData::Real(_) => vec![c.name.clone()],
                    ColumnData::Complex(_) => {
                        vec![format!("{}_re", c.name), format!("{}_im", c.name)]
                    }
                })
                .collect();
            writeln!(out, "{}", header.join(",")).unwrap();
            let rows = self.columns.iter().map(|c| c.data.len()).max().unwrap_or(0);
            for r in 0..rows {
                let cells: Vec<String> = self
                    .columns
                    .iter()
                    .flat_map(|c| match &c.data {
                        ColumnData::Real(v) => {
                            vec![v.get(r).map_or(String::new(), |x| fmt_f64(*x))]
                        }
                        ColumnData::Complex(v) => match v.get(r) {
                            Some(z) => vec![fmt_f64(z.re), fmt_f64(z.im)],
                            None => vec![String::new(), String::new()],
                        },
                    })
                    .collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        } else {
            let mut header = Vec::new();
            let mut row = Vec::new();
            for (name, v) in &self.outputs {
                match v {
                    Value::Complex(z) => {
                        header.push(format!("{name}_re"));
                        header.push(format!("{name}_im"));
                        row.push(fmt_f64(z.re));
                        row.push(fmt_f64(z.im));
                    }
                    other => {
                        header.push(name.clone());
                        row.push(csv_cell(other));
                    }
                }
            }
            writeln!(out, "{}", header.join(",")).unwrap();
            if !row.is_empty() {
                writeln!(out, "{}", row.join(",")).unwrap();
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("record serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Real(x) => fmt_f64(*x),
        Value::Complex(z) => format!("{};{}", fmt_f64(z.re), fmt_f64(z.im)),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
        Value::Text(t) => t.clone(),
    }
}

fn complex_json(z: &Complex64) -> Json {
    json!({ "re": z.re, "im": z.im })
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Real(x) => json!(x),
        Value::Complex(z) => complex_json(z),
        Value::Int(i) => json!(i),
        Value::Bool(b) => json!(b),
        Value::Text(t) => json!(t),
    }
}

/// Writes the rendered record to `path`, or stdout when `path` is `None`.
pub fn emit(record: &ResultRecord, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = record.render(format);
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
