//! Result tables and their CSV, JSON and gnuplot `.dat` renderings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::SolverSection;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    pub fn as_text(&self) -> String {
        self.render()
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Num(v) => Some(*v),
            _ => None,
        }
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
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub pass: bool,
    pub error: Option<String>,
}

/// A table-level property, e.g. monotone decay along an `L` sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// An extra output file written next to the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub experiment: String,
    pub config_hash: String,
    pub solver: SolverSection,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub reports: Vec<Value>,
    pub dat: String,
    pub artifacts: Vec<Artifact>,
}

impl Table {
    pub fn new(experiment: &str, config_hash: &str, solver: SolverSection, columns: Vec<&'static str>) -> Self {
        Self {
            experiment: experiment.to_string(),
            config_hash: config_hash.to_string(),
            solver,
            columns,
            rows: Vec::new(),
            checks: Vec::new(),
            reports: Vec::new(),
            dat: String::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>, pass: bool) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(Row { cells, pass, error: None });
    }

    /// A failed case; cells not known are left empty.
    pub fn push_error(&mut self, mut cells: Vec<Cell>, error: String) {
        cells.resize(self.columns.len(), Cell::Text(String::new()));
        self.rows.push(Row { cells, pass: false, error: Some(error) });
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Numeric value of `name` in `row`.
    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        self.column(name).and_then(|j| self.rows[row].cells[j].as_f64())
    }

    pub fn to_csv(&self) -> Result<String, Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = self.columns.clone();
        header.extend(["pass", "error", "config_hash", "h", "dt"]);
        w.write_record(&header)?;
        let h = self.solver.h.to_string();
        let dt = self.solver.dt.to_string();
        for r in &self.rows {
            let mut rec: Vec<String> = r.cells.iter().map(Cell::render).collect();
            rec.push(r.pass.to_string());
            rec.push(r.error.clone().unwrap_or_default());
            rec.push(self.config_hash.clone());
            rec.push(h.clone());
            rec.push(dt.clone());
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(&r.cells) {
                    m.insert(c.to_string(), serde_json::to_value(v).expect("cells serialize"));
                }
                m.insert("pass".into(), r.pass.into());
                m.insert("error".into(), r.error.clone().into());
                Value::Object(m)
            })
            .collect();
        json!({
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "solver": self.solver,
            "passed": self.passed(),
            "rows": rows,
            "checks": self.checks,
            "reports": self.reports,
        })
    }

    /// Writes `<experiment>.csv`, `<experiment>.json`, `<experiment>.dat`
    /// and the artifacts into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, Error> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(dir.to_path_buf(), e))?;
        let json = serde_json::to_string_pretty(&self.to_json())? + "\n";
        let mut files = vec![
            (format!("{}.csv", self.experiment), self.to_csv()?),
            (format!("{}.json", self.experiment), json),
            (format!("{}.dat", self.experiment), self.dat.clone()),
        ];
        files.extend(self.artifacts.iter().map(|a| (a.name.clone(), a.contents.clone())));
        let mut out = Vec::new();
        for (name, contents) in files {
            let p = dir.join(name);
            fs::write(&p, contents).map_err(|e| Error::Io(p.clone(), e))?;
            out.push(p);
        }
        Ok(out)
    }
}
