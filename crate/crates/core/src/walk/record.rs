use std::io::{self, Write};

use serde::Serialize;
use serde_json::{Map, Value};

/// One CSV cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Floats with 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Empty => String::new(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Rows plus metadata of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub seeds: Vec<u64>,
    pub parameters: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
    /// Approximation status and caveats attached to the numbers.
    pub caveats: Vec<String>,
}

impl ExperimentRecord {
    pub fn new(experiment: impl Into<String>, columns: &[&str]) -> Self {
        ExperimentRecord {
            experiment: experiment.into(),
            seeds: Vec::new(),
            parameters: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Map::new(),
            caveats: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) {
        self.parameters.insert(
            key.into(),
            serde_json::to_value(v).expect("serializable parameter"),
        );
    }

    pub fn summarize(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(
            key.into(),
            serde_json::to_value(v).expect("serializable summary"),
        );
    }

    pub fn caveat(&mut self, text: impl Into<String>) {
        let text = text.into();
        if !self.caveats.contains(&text) {
            self.caveats.push(text);
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 csv")
    }

    /// Summary document: everything except the rows.
    pub fn summary_json(&self) -> String {
        let doc = serde_json::json!({
            "experiment": self.experiment,
            "seeds": self.seeds,
            "parameters": self.parameters,
            "columns": self.columns,
            "row_count": self.rows.len(),
            "summary": self.summary,
            "caveats": self.caveats,
        });
        serde_json::to_string_pretty(&doc).expect("json")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = ExperimentRecord::new("t", &["seed", "step", "v", "note"]);
        r.push_row(vec![
            1u64.into(),
            0usize.into(),
            0.1.into(),
            Cell::Text("a,b".into()),
        ]);
        r.push_row(vec![1u64.into(), 1usize.into(), None.into(), Cell::Empty]);
        let s = r.csv_string();
        assert_eq!(
            s,
            "seed,step,v,note\n1,0,1.0000000000000001e-1,\"a,b\"\n1,1,,\n"
        );
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
        assert!(r.summary_json().contains("\"row_count\": 2"));
    }
}
