//! CSV reading and writing for data matrices, estimate tables and
//! analysis outputs.
//!
//! Floats are written in the shortest form that parses back to the same
//! 64-bit value, so a write/load cycle is exact.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::analysis::{Histogram, TrailMatrix};
use crate::data::{DataMatrix, EstimateTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct CsvOptions {
    pub delimiter: u8,
    /// Skip the first row.
    pub header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            header: false,
        }
    }
}

/// Loads a numeric table. Row order is preserved.
pub fn load_csv(path: impl AsRef<Path>, options: CsvOptions) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_matrix(file, options)
}

pub fn read_matrix<R: Read>(reader: R, options: CsvOptions) -> Result<DataMatrix> {
    let mut rdr = reader_builder(options).from_reader(reader);
    let mut values = Vec::new();
    let mut dim = None;
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                return Err(Error::Parse {
                    line,
                    message: e.to_string(),
                });
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match dim {
            None => dim = Some(record.len()),
            Some(d) if d != record.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {d} fields, found {}", record.len()),
                });
            }
            Some(_) => {}
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("'{field}' is not finite"),
                });
            }
            values.push(v);
        }
    }
    match dim {
        None => Err(Error::Empty("no data rows".into())),
        Some(d) => DataMatrix::from_flat(values, d),
    }
}

/// Reads one named numeric column from a CSV file with a header row.
pub fn load_column(path: impl AsRef<Path>, column: &str, delimiter: u8) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::InvalidArgument(format!("no column named '{column}'")))?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = record.get(idx).unwrap_or("");
        out.push(field.parse().map_err(|_| Error::Parse {
            line,
            message: format!("'{field}' is not a number"),
        })?);
    }
    if out.is_empty() {
        return Err(Error::Empty(format!("column '{column}' has no values")));
    }
    Ok(out)
}

fn reader_builder(options: CsvOptions) -> csv::ReaderBuilder {
    let mut b = csv::ReaderBuilder::new();
    b.delimiter(options.delimiter)
        .has_headers(options.header)
        .flexible(true)
        .trim(csv::Trim::All);
    b
}

/// Shortest round-trip decimal form; exponent notation only for very large
/// or very small magnitudes.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Anything that serializes to CSV text.
pub trait ToCsv {
    fn write_csv_to<W: Write>(&self, out: &mut W) -> std::io::Result<()>;
}

impl ToCsv for DataMatrix {
    fn write_csv_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for row in self.rows() {
            write_joined(out, row.iter().map(|&v| format_float(v)))?;
        }
        Ok(())
    }
}

/// Data matrix with a trailing integer label column (e.g. source cube).
pub struct LabeledMatrix<'a> {
    pub data: &'a DataMatrix,
    pub labels: &'a [usize],
}

impl ToCsv for LabeledMatrix<'_> {
    fn write_csv_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (row, label) in self.data.rows().zip(self.labels) {
            write_joined(
                out,
                row.iter()
                    .map(|&v| format_float(v))
                    .chain(std::iter::once(label.to_string())),
            )?;
        }
        Ok(())
    }
}

/// Estimate table with optional diagnostic columns (`mean_cosine`, `flags`).
pub struct TableCsv<'a> {
    pub table: &'a EstimateTable,
    pub diagnostics: bool,
}

impl ToCsv for EstimateTable {
    fn write_csv_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        TableCsv {
            table: self,
            diagnostics: false,
        }
        .write_csv_to(out)
    }
}

impl ToCsv for TableCsv<'_> {
    fn write_csv_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let estimators = self.table.estimators();
        let mut header: Vec<String> = vec!["index".into()];
        header.extend(estimators.iter().map(|e| e.tag().to_string()));
        if self.diagnostics {
            header.push("mean_cosine".into());
            header.push("flags".into());
        }
        write_joined(out, header)?;
        for row in self.table.rows() {
            let mut fields = vec![row.index.to_string()];
            fields.extend(
                estimators
                    .iter()
                    .map(|e| format_float(row.estimates[e].value)),
            );
            if self.diagnostics {
                fields.push(row.mean_cosine.map(format_float).unwrap_or_default());
                let flags: Vec<String> = estimators
                    .iter()
                    .flat_map(|e| {
                        row.estimates[e]
                            .flags
                            .names()
                            .map(move |n| format!("{}:{n}", e.tag()))
                    })
                    .collect();
                fields.push(flags.join(";"));
            }
            write_joined(out, fields)?;
        }
        Ok(())
    }
}

impl ToCsv for Histogram {
    fn write_csv_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "bin_left,count")?;
        for (left, count) in self.dense_bins() {
            writeln!(out, "{},{count}", format_float(left))?;
        }
        Ok(())
    }
}

impl ToCsv for TrailMatrix {
    fn write_csv_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        write_joined(
            out,
            std::iter::once("index".to_string()).chain(self.k_values.iter().map(|k| k.to_string())),
        )?;
        for (idx, row) in self.points.iter().zip(&self.estimates) {
            write_joined(
                out,
                std::iter::once(idx.to_string()).chain(row.iter().map(|&v| format_float(v))),
            )?;
        }
        Ok(())
    }
}

fn write_joined<W: Write, S: AsRef<str>>(
    out: &mut W,
    fields: impl IntoIterator<Item = S>,
) -> std::io::Result<()> {
    let mut first = true;
    for f in fields {
        if !first {
            out.write_all(b",")?;
        }
        first = false;
        out.write_all(f.as_ref().as_bytes())?;
    }
    out.write_all(b"\n")
}

/// Writes any CSV-serializable value to `path`.
pub fn write_csv<T: ToCsv + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    value
        .write_csv_to(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn to_csv_string<T: ToCsv + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    value
        .write_csv_to(&mut buf)
        .expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}
