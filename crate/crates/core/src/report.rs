//! Tabular output with an embedded provenance line.
//!
//! A report is CSV preceded by one comment line `# {json}` holding the
//! configuration that produced it, so a file alone is enough to rerun it.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub provenance: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(provenance: impl Serialize, columns: &[&str]) -> Result<Self> {
        let provenance = serde_json::to_value(provenance).map_err(|e| Error::parse("provenance", e.to_string()))?;
        Ok(Report { provenance, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() })
    }

    pub fn push<I, S>(&mut self, row: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let row: Vec<String> = row.into_iter().map(|s| s.to_string()).collect();
        if row.len() != self.columns.len() {
            return Err(Error::validation(format!("row has {} fields, expected {}", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Values of column `name`, parsed as floats.
    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>> {
        let k = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::validation(format!("no column '{name}'")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| r[k].parse().map_err(|_| Error::parse(format!("row {}, column {name}", i + 1), r[k].clone())))
            .collect()
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "# {}", self.provenance)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    /// Parses CSV text. The provenance line is optional; missing means `null`.
    pub fn parse(text: &str) -> Result<Self> {
        let (provenance, body) = match text.strip_prefix("# ") {
            Some(rest) => {
                let (line, body) = rest.split_once('\n').unwrap_or((rest, ""));
                let v = serde_json::from_str(line).map_err(|e| Error::parse("line 1", e.to_string()))?;
                (v, body)
            }
            None => (Value::Null, text),
        };
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(body.as_bytes());
        let columns = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()).map_err(csv_error))
            .collect::<Result<_>>()?;
        Ok(Report { provenance, columns, rows })
    }
}

fn csv_error(e: csv::Error) -> Error {
    let location = e.position().map_or_else(|| "csv".to_string(), |p| format!("line {}", p.line()));
    Error::parse(location, e.to_string())
}

/// Reads a `(t, value)` series from the named columns of a report.
pub fn read_series(report: &Report, t: &str, value: &str) -> Result<Vec<(f64, f64)>> {
    Ok(report.column_f64(t)?.into_iter().zip(report.column_f64(value)?).collect())
}
