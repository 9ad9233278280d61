//! Tabular datasets and their CSV / JSON renderings.

use serde_json::{json, Map, Value};

use crate::numerics::{default_quad_order, QuadSettings};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Num(Vec<f64>),
    Text(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Num(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cell(&self, i: usize) -> String {
        match self {
            ColumnData::Num(v) => format_number(v[i]),
            ColumnData::Text(v) => v[i].clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            ColumnData::Num(v) => Value::Array(v.iter().map(|&x| number_json(x)).collect()),
            ColumnData::Text(v) => json!(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Unit label; `1` for dimensionless quantities.
    pub unit: String,
    pub data: ColumnData,
}

impl Column {
    pub fn num(name: impl Into<String>, unit: &str, data: Vec<f64>) -> Self {
        Column { name: name.into(), unit: unit.to_string(), data: ColumnData::Num(data) }
    }

    pub fn text(name: impl Into<String>, data: Vec<String>) -> Self {
        Column { name: name.into(), unit: "text".to_string(), data: ColumnData::Text(data) }
    }
}

/// One output artifact: independent grid columns, dependent value columns,
/// and provenance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub params: Map<String, Value>,
    pub grid: Vec<Column>,
    pub values: Vec<Column>,
    pub equations: Vec<&'static str>,
    pub summary: Map<String, Value>,
    pub notes: Vec<String>,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.grid.iter().chain(&self.values).map(|c| c.data.len()).next().unwrap_or(0)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.grid.iter().chain(&self.values).find(|c| c.name == name)
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn summarize_num(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), number_json(value));
    }

    pub fn to_csv(&self) -> String {
        let columns: Vec<&Column> = self.grid.iter().chain(&self.values).collect();
        let n = self.rows();
        debug_assert!(columns.iter().all(|c| c.data.len() == n));
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)))
            .expect("writing to memory");
        for i in 0..n {
            w.write_record(columns.iter().map(|c| c.data.cell(i))).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV is UTF-8")
    }

    pub fn to_json(&self) -> String {
        let cols = |cs: &[Column]| {
            let mut m = Map::new();
            for c in cs {
                m.insert(c.name.clone(), c.data.to_json());
            }
            Value::Object(m)
        };
        let mut units = Map::new();
        for c in self.grid.iter().chain(&self.values) {
            units.insert(c.name.clone(), json!(c.unit));
        }
        let settings = QuadSettings::default();
        let doc = json!({
            "params": Value::Object(self.params.clone()),
            "grid": cols(&self.grid),
            "values": cols(&self.values),
            "meta": {
                "equations": self.equations,
                "quadrature_order": default_quad_order(),
                "tolerance": settings.tolerance,
                "tool_version": env!("CARGO_PKG_VERSION"),
                "units": Value::Object(units),
                "summary": Value::Object(self.summary.clone()),
                "notes": self.notes,
            }
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values are serializable");
        s.push('\n');
        s
    }
}

/// JSON has no encoding for non-finite numbers; they become strings.
pub fn number_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::Null
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Twelve significant digits: fixed notation for `1e-5 <= |x| < 1e15`,
/// scientific otherwise. Trailing zeros are trimmed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-5..1e15).contains(&a) {
        let exponent = a.log10().floor() as i32;
        let decimals = (11 - exponent).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("scientific format has an exponent");
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}
