//! Report entries, number formatting and output files.
//!
//! `report.txt` and `summary.json` are rendered from the same ordered list of
//! entries, so every number in the text report is also in the JSON block.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value as Json};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Missing, Into::into)
    }
}

/// Shortest decimal that round-trips; scientific notation outside
/// `[1e-5, 1e16)`.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Num(x) => fmt_num(*x),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => "none".into(),
        }
    }

    fn json(&self) -> Json {
        match self {
            // non-finite values have no JSON number form
            Value::Num(x) if !x.is_finite() => Json::String(fmt_num(*x)),
            Value::Num(x) => Json::from(*x),
            Value::Int(i) => Json::from(*i),
            Value::Text(s) => Json::String(s.clone()),
            Value::Missing => Json::Null,
        }
    }
}

/// Ordered `(section, key, value)` entries.
#[derive(Debug, Clone, Default)]
pub struct Report {
    entries: Vec<(String, String, Value)>,
}

impl Report {
    pub fn push(&mut self, section: &str, key: &str, value: impl Into<Value>) {
        self.entries.push((section.to_owned(), key.to_owned(), value.into()));
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.entries
            .iter()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut current: Option<&str> = None;
        for (section, key, value) in &self.entries {
            if current != Some(section.as_str()) {
                if current.is_some() {
                    out.push('\n');
                }
                out.push_str(&format!("[{section}]\n"));
                current = Some(section);
            }
            out.push_str(&format!("{key}: {}\n", value.text()));
        }
        out
    }

    pub fn to_json(&self) -> Json {
        let mut root = Map::new();
        for (section, key, value) in &self.entries {
            let slot = root
                .entry(section.clone())
                .or_insert_with(|| Json::Object(Map::new()));
            if let Json::Object(m) = slot {
                m.insert(key.clone(), value.json());
            }
        }
        Json::Object(root)
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::write(dir.join("report.txt"), self.to_text())?;
        let mut json = serde_json::to_string_pretty(&self.to_json()).map_err(io::Error::other)?;
        json.push('\n');
        fs::write(dir.join("summary.json"), json)
    }
}

/// CSV cell.
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> io::Result<()> {
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    writeln!(f, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        writeln!(f, "{}", line.join(","))?;
    }
    f.flush()
}
