use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

use super::Mode;

/// Lower and upper slack allowed on any reported fidelity.
pub const OBSERVABLE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Fixed 17 significant digits so every `f64` survives a text round trip.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0" drifting in and out between runs
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => format_f64(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowMeta {
    pub mu: f64,
    pub t0: f64,
    pub g_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub scenario: String,
    pub axes: Vec<(String, Cell)>,
    pub t: f64,
    pub g_t: f64,
    pub mode: Mode,
    pub observables: Vec<(String, f64)>,
    pub meta: RowMeta,
}

impl ResultRow {
    pub fn observable(&self, name: &str) -> Option<f64> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn axis(&self, name: &str) -> Option<&Cell> {
        self.axes.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn axis_num(&self, name: &str) -> Option<f64> {
        match self.axis(name) {
            Some(Cell::Num(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn check_range(&self) -> Result<()> {
        for (name, v) in &self.observables {
            if !(v.is_finite() && *v >= -OBSERVABLE_SLACK && *v <= 1.0 + OBSERVABLE_SLACK) {
                return Err(Error::Numerical(format!(
                    "{}: observable {name} = {v} outside [0, 1]",
                    self.scenario
                )));
            }
        }
        Ok(())
    }
}

/// Which optional column groups a table writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub time: bool,
    pub meta: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub scenario: String,
    pub layout: Layout,
    pub metadata: Map<String, Value>,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new(scenario: impl Into<String>, layout: Layout) -> Self {
        Self {
            scenario: scenario.into(),
            layout,
            metadata: Map::new(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> Vec<String> {
        let Some(first) = self.rows.first() else {
            return Vec::new();
        };
        let mut cols: Vec<String> = first.axes.iter().map(|(n, _)| n.clone()).collect();
        if self.layout.time {
            cols.push("t".into());
            cols.push("g_t".into());
        }
        cols.extend(first.observables.iter().map(|(n, _)| n.clone()));
        if self.layout.meta {
            cols.extend(["mu", "t0", "g_prime"].map(String::from));
        }
        cols
    }

    /// Header line plus one line per row, LF-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns().join(","));
        out.push('\n');
        for row in &self.rows {
            let mut cells: Vec<String> = row.axes.iter().map(|(_, c)| c.to_csv()).collect();
            if self.layout.time {
                cells.push(format_f64(row.t));
                cells.push(format_f64(row.g_t));
            }
            cells.extend(row.observables.iter().map(|(_, v)| format_f64(*v)));
            if self.layout.meta {
                cells.extend([row.meta.mu, row.meta.t0, row.meta.g_prime].map(format_f64));
            }
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Rows as objects keyed by column name.
    pub fn rows_json(&self) -> Value {
        let cols = self.columns();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut values: Vec<Value> = row
                    .axes
                    .iter()
                    .map(|(_, c)| serde_json::to_value(c).expect("cell"))
                    .collect();
                if self.layout.time {
                    values.push(row.t.into());
                    values.push(row.g_t.into());
                }
                values.extend(row.observables.iter().map(|(_, v)| Value::from(*v)));
                if self.layout.meta {
                    values.extend([row.meta.mu, row.meta.t0, row.meta.g_prime].map(Value::from));
                }
                Value::Object(cols.iter().cloned().zip(values).collect())
            })
            .collect();
        Value::Array(rows)
    }

    pub fn rename_observable(&mut self, from: &str, to: &str) {
        for row in &mut self.rows {
            for (name, _) in &mut row.observables {
                if name == from {
                    *name = to.to_string();
                }
            }
        }
    }

    pub fn check_range(&self) -> Result<()> {
        self.rows.iter().try_for_each(ResultRow::check_range)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: f64) -> ResultRow {
        ResultRow {
            scenario: "s".into(),
            axes: vec![("name".into(), "kappa".into()), ("x".into(), 0.25.into())],
            t: 1.0,
            g_t: 0.1,
            mode: Mode::FullClosed,
            observables: vec![("fidelity".into(), v)],
            meta: RowMeta {
                mu: 0.5,
                t0: 2.0,
                g_prime: 1.0,
            },
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new(
            "s",
            Layout {
                time: false,
                meta: false,
            },
        );
        t.rows.push(row(0.7));
        assert_eq!(
            t.to_csv(),
            "name,x,fidelity\nkappa,2.5000000000000000e-1,6.9999999999999996e-1\n"
        );
        t.layout.time = true;
        assert!(t.to_csv().starts_with("name,x,t,g_t,fidelity\n"));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 0.788_675_134_594_812_9, 1e-300, 123456.789] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(format_f64(-0.0), format_f64(0.0));
    }

    #[test]
    fn range_check() {
        assert!(row(1.0 + 5e-9).check_range().is_ok());
        assert!(row(1.0 + 1e-6).check_range().is_err());
        assert!(row(-1e-6).check_range().is_err());
        assert!(row(f64::NAN).check_range().is_err());
    }
}
