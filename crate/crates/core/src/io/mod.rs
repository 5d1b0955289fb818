//! On-disk formats: dataset directories, weighing sheets, fit reports,
//! evaluation reports and sensitivity scans. All CSV, comma separated,
//! with a header row. Numbers are written in shortest round-trip form
//! unless a format says otherwise.

mod dataset;
mod reports;

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

pub use dataset::{
    read_dataset, read_spectrum, write_dataset, write_spectrum, MANIFEST_FILE, SPECTRA_DIR,
};
pub use reports::{
    render_summary, write_report_dir, FitReportRow, OverallRow, SgResultRow, TypeRow, WeightRow,
    OVERALL_FILE, PER_FREQUENCY_FILE, PER_TYPE_FILE, SUMMARY_FILE,
};

use crate::error::{Error, Result};

/// A record type with a fixed CSV column contract.
pub trait CsvRow: Sized {
    /// Column names in output order.
    const HEADER: &'static [&'static str];
    /// Columns that may be missing from an input header.
    const OPTIONAL: &'static [&'static str] = &[];

    fn to_fields(&self) -> Vec<String>;
    fn from_fields(rec: &Fields<'_>) -> std::result::Result<Self, FieldError>;
}

/// Column-level parse failure.
#[derive(Debug)]
pub struct FieldError {
    pub column: String,
    pub reason: String,
}

impl FieldError {
    pub fn new(column: &str, reason: impl Into<String>) -> Self {
        Self {
            column: column.to_owned(),
            reason: reason.into(),
        }
    }
}

/// Named access to one parsed CSV record.
pub struct Fields<'a> {
    columns: &'a HashMap<String, usize>,
    record: &'a csv::StringRecord,
}

impl Fields<'_> {
    /// Trimmed raw value; empty string when the column is absent.
    pub fn raw(&self, column: &str) -> &str {
        self.columns
            .get(column)
            .and_then(|&i| self.record.get(i))
            .map(str::trim)
            .unwrap_or("")
    }

    pub fn text(&self, column: &str) -> std::result::Result<String, FieldError> {
        match self.raw(column) {
            "" => Err(FieldError::new(column, "missing value")),
            v => Ok(v.to_owned()),
        }
    }

    pub fn opt_f64(&self, column: &str) -> std::result::Result<Option<f64>, FieldError> {
        match self.raw(column) {
            "" => Ok(None),
            v => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| FieldError::new(column, format!("{v:?} is not a number"))),
        }
    }

    pub fn f64(&self, column: &str) -> std::result::Result<f64, FieldError> {
        self.opt_f64(column)?
            .ok_or_else(|| FieldError::new(column, "missing value"))
    }

    pub fn usize(&self, column: &str) -> std::result::Result<usize, FieldError> {
        let v = self.raw(column);
        v.parse::<usize>()
            .map_err(|_| FieldError::new(column, format!("{v:?} is not a count")))
    }
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::Parse {
            path: path.to_owned(),
            line,
            column: String::new(),
            reason: e.to_string(),
        }
    }
}

/// Shortest round-trip representation.
pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}

pub(crate) fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_rows<R: CsvRow, W: Write>(out: W, rows: &[R], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::HEADER).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row.to_fields())
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows<R: CsvRow, Rd: Read>(input: Rd, path: &Path) -> Result<Vec<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let columns: HashMap<String, usize> = header
        .iter()
        .enumerate()
        .map(|(i, h)| (h.to_owned(), i))
        .collect();
    for col in R::HEADER {
        if !R::OPTIONAL.contains(col) && !columns.contains_key(*col) {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: 1,
                column: (*col).to_owned(),
                reason: "required column missing from header".into(),
            });
        }
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let fields = Fields {
            columns: &columns,
            record: &rec,
        };
        rows.push(R::from_fields(&fields).map_err(|fe| Error::Parse {
            path: path.to_owned(),
            line,
            column: fe.column,
            reason: fe.reason,
        })?);
    }
    Ok(rows)
}

pub fn write_rows_to_path<R: CsvRow>(path: impl AsRef<Path>, rows: &[R]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_rows(file, rows, path)
}

pub fn read_rows_from_path<R: CsvRow>(path: impl AsRef<Path>) -> Result<Vec<R>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_rows(file, path)
}

impl CsvRow for crate::metrics::FrequencyErrors {
    const HEADER: &'static [&'static str] = &["f_ghz", "mae", "mape_pct"];

    fn to_fields(&self) -> Vec<String> {
        vec![num(self.f_ghz), num(self.mae), num(self.mape_pct)]
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        Ok(Self {
            f_ghz: r.f64("f_ghz")?,
            mae: r.f64("mae")?,
            mape_pct: r.f64("mape_pct")?,
        })
    }
}

impl CsvRow for crate::estimator::SensitivityPoint {
    const HEADER: &'static [&'static str] = &["f_ghz", "abs_c1", "delta_sg"];

    fn to_fields(&self) -> Vec<String> {
        vec![num(self.f_ghz), num(self.abs_c1), num(self.delta_sg)]
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        Ok(Self {
            f_ghz: r.f64("f_ghz")?,
            abs_c1: r.f64("abs_c1")?,
            delta_sg: r.f64("delta_sg")?,
        })
    }
}
