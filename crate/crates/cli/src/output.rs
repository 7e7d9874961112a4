//! Result tables: CSV with full-precision reals plus a JSON twin.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};

/// One cell of a result table.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Cell {
    /// CSV text. Reals use 17 significant digits so they round-trip.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) if x.is_nan() => "NaN".into(),
            Cell::Real(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(x) if x.is_finite() => json!(x),
            Cell::Real(_) => json!(self.render()),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Missing => Json::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// CSV text: an optional `# seed=` line, the header, then one line
    /// per row. An empty table is just the header.
    pub fn to_csv(&self, seed: Option<u64>) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells");
        match seed {
            Some(s) => format!("# seed={s}\n{body}"),
            None => body,
        }
    }

    pub fn to_json(&self, seed: Option<u64>) -> Json {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| Json::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        json!({
            "table": self.name,
            "seed": seed,
            "columns": self.columns,
            "rows": rows,
        })
    }

    /// Writes `<name>.csv` and `<name>.json` into `dir`.
    pub fn write(&self, dir: &Path, seed: Option<u64>) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        let json_path = dir.join(format!("{}.json", self.name));
        fs::File::create(&csv_path)?.write_all(self.to_csv(seed).as_bytes())?;
        let text = serde_json::to_string_pretty(&self.to_json(seed)).expect("serializable");
        fs::write(&json_path, text + "\n")?;
        Ok(vec![csv_path, json_path])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new("x", &["a", "b"]);
        assert_eq!(t.to_csv(None), "a,b\n");
        assert_eq!(t.to_csv(Some(7)).lines().count(), 2);
    }

    #[test]
    fn one_row_two_lines() {
        let mut t = Table::new("x", &["n", "s"]);
        t.push(vec![3usize.into(), 0.1.into()]);
        let text = t.to_csv(None);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1).unwrap(), "3,1.0000000000000001e-1");
    }

    #[test]
    fn reals_round_trip() {
        let values = [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-17, -2.5e300, 5e-324];
        let mut t = Table::new("x", &["v"]);
        for &v in &values {
            t.push(vec![v.into()]);
        }
        let text = t.to_csv(Some(1));
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let back: Vec<f64> = r.records().map(|rec| rec.unwrap()[0].parse().unwrap()).collect();
        assert_eq!(back, values);
    }

    #[test]
    fn json_matches_csv() {
        let mut t = Table::new("x", &["a", "b", "c"]);
        t.push(vec![Cell::Real(0.25), Cell::Missing, Cell::Real(f64::NAN)]);
        let j = t.to_json(None);
        assert_eq!(j["rows"][0][0], json!(0.25));
        assert!(j["rows"][0][1].is_null());
        assert_eq!(j["rows"][0][2], json!("NaN"));
    }
}
