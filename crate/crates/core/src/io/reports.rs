use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{num, opt_num, write_rows_to_path, CsvRow, FieldError, Fields};
use crate::error::{Error, Result};
use crate::metrics::{EvaluationReport, PUBLISHED_ACCURACY};

/// Input row of a weighing sheet: `id,w_air_g,w_uww_g,f_float_g`. Exactly
/// one of `w_uww_g` and `f_float_g` is expected per row; that rule is
/// checked by the consumer so it can be reported per row.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRow {
    pub id: String,
    pub w_air_g: f64,
    pub w_uww_g: Option<f64>,
    pub f_float_g: Option<f64>,
}

impl CsvRow for WeightRow {
    const HEADER: &'static [&'static str] = &["id", "w_air_g", "w_uww_g", "f_float_g"];
    const OPTIONAL: &'static [&'static str] = &["w_uww_g", "f_float_g"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.id.clone(),
            num(self.w_air_g),
            opt_num(self.w_uww_g),
            opt_num(self.f_float_g),
        ]
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        Ok(Self {
            id: r.text("id")?,
            w_air_g: r.f64("w_air_g")?,
            w_uww_g: r.opt_f64("w_uww_g")?,
            f_float_g: r.opt_f64("f_float_g")?,
        })
    }
}

/// Output row of the SG computation: `id,sg,verdict`, SG with six decimals
/// and empty when it could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct SgResultRow {
    pub id: String,
    pub sg: Option<f64>,
    pub verdict: String,
}

impl CsvRow for SgResultRow {
    const HEADER: &'static [&'static str] = &["id", "sg", "verdict"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.id.clone(),
            self.sg.map(|v| format!("{v:.6}")).unwrap_or_default(),
            self.verdict.clone(),
        ]
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        Ok(Self {
            id: r.text("id")?,
            sg: r.opt_f64("sg")?,
            verdict: r.text("verdict")?,
        })
    }
}

/// Per-frequency regression coefficients with their polynomial fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReportRow {
    pub f_ghz: f64,
    pub c1: f64,
    pub c2: f64,
    pub r2: f64,
    pub c1_fit: f64,
    pub c2_fit: f64,
}

impl CsvRow for FitReportRow {
    const HEADER: &'static [&'static str] = &["f_ghz", "c1", "c2", "r2", "c1_fit", "c2_fit"];

    fn to_fields(&self) -> Vec<String> {
        [
            self.f_ghz,
            self.c1,
            self.c2,
            self.r2,
            self.c1_fit,
            self.c2_fit,
        ]
        .into_iter()
        .map(num)
        .collect()
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        Ok(Self {
            f_ghz: r.f64("f_ghz")?,
            c1: r.f64("c1")?,
            c2: r.f64("c2")?,
            r2: r.f64("r2")?,
            c1_fit: r.f64("c1_fit")?,
            c2_fit: r.f64("c2_fit")?,
        })
    }
}

/// One row of the per-type table; the first row is `Total`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeRow {
    pub ptype: String,
    pub n: usize,
    pub mae: f64,
    pub mape_pct: f64,
}

impl CsvRow for TypeRow {
    const HEADER: &'static [&'static str] = &["type", "n", "mae", "mape_pct"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.ptype.clone(),
            self.n.to_string(),
            num(self.mae),
            num(self.mape_pct),
        ]
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        Ok(Self {
            ptype: r.text("type")?,
            n: r.usize("n")?,
            mae: r.f64("mae")?,
            mape_pct: r.f64("mape_pct")?,
        })
    }
}

/// Overall, frequency-averaged accuracy plus the worst frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct OverallRow {
    pub n: usize,
    pub mae: f64,
    pub mape_pct: f64,
    pub r2: f64,
    pub max_mae: f64,
    pub max_mae_f_ghz: f64,
    pub max_mape_pct: f64,
    pub max_mape_f_ghz: f64,
    pub model: String,
    pub dataset: String,
}

impl CsvRow for OverallRow {
    const HEADER: &'static [&'static str] = &[
        "n",
        "mae",
        "mape_pct",
        "r2",
        "max_mae",
        "max_mae_f_ghz",
        "max_mape_pct",
        "max_mape_f_ghz",
        "model",
        "dataset",
    ];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            num(self.mae),
            num(self.mape_pct),
            num(self.r2),
            num(self.max_mae),
            num(self.max_mae_f_ghz),
            num(self.max_mape_pct),
            num(self.max_mape_f_ghz),
            self.model.clone(),
            self.dataset.clone(),
        ]
    }

    fn from_fields(r: &Fields<'_>) -> std::result::Result<Self, FieldError> {
        Ok(Self {
            n: r.usize("n")?,
            mae: r.f64("mae")?,
            mape_pct: r.f64("mape_pct")?,
            r2: r.f64("r2")?,
            max_mae: r.f64("max_mae")?,
            max_mae_f_ghz: r.f64("max_mae_f_ghz")?,
            max_mape_pct: r.f64("max_mape_pct")?,
            max_mape_f_ghz: r.f64("max_mape_f_ghz")?,
            model: r.raw("model").to_owned(),
            dataset: r.raw("dataset").to_owned(),
        })
    }
}

impl OverallRow {
    pub fn from_report(report: &EvaluationReport) -> Self {
        let (max_mae, max_mae_f_ghz) = report.max_mae();
        let (max_mape_pct, max_mape_f_ghz) = report.max_mape_pct();
        Self {
            n: report.overall.n,
            mae: report.overall.mae,
            mape_pct: report.overall.mape_pct,
            r2: report.overall.r2,
            max_mae,
            max_mae_f_ghz,
            max_mape_pct,
            max_mape_f_ghz,
            model: report.provenance.model.clone().unwrap_or_default(),
            dataset: report.provenance.dataset.clone().unwrap_or_default(),
        }
    }
}

impl TypeRow {
    /// `Total` followed by one row per type present, in type order.
    pub fn from_report(report: &EvaluationReport) -> Vec<Self> {
        let mut rows = vec![TypeRow {
            ptype: "Total".into(),
            n: report.overall.n,
            mae: report.overall.mae,
            mape_pct: report.overall.mape_pct,
        }];
        rows.extend(report.per_type.iter().map(|(t, s)| TypeRow {
            ptype: t.to_string(),
            n: s.n,
            mae: s.mae,
            mape_pct: s.mape_pct,
        }));
        rows
    }
}

pub const OVERALL_FILE: &str = "overall.csv";
pub const PER_TYPE_FILE: &str = "per_type.csv";
pub const PER_FREQUENCY_FILE: &str = "per_frequency.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Human-readable summary with fixed six-decimal numbers.
pub fn render_summary(report: &EvaluationReport) -> String {
    let mut s = String::new();
    let o = &report.overall;
    let (max_mae, f_mae) = report.max_mae();
    let (max_mape, f_mape) = report.max_mape_pct();
    let _ = writeln!(
        s,
        "model:   {}",
        report.provenance.model.as_deref().unwrap_or("-")
    );
    let _ = writeln!(
        s,
        "dataset: {}",
        report.provenance.dataset.as_deref().unwrap_or("-")
    );
    let _ = writeln!(s, "samples: {}", o.n);
    let _ = writeln!(s, "frequencies: {}", report.per_frequency.len());
    let _ = writeln!(s);
    let _ = writeln!(s, "frequency-averaged MAE:  {:.6}", o.mae);
    let _ = writeln!(s, "frequency-averaged MAPE: {:.6} %", o.mape_pct);
    let _ = writeln!(s, "frequency-averaged R2:   {:.6}", o.r2);
    let _ = writeln!(s, "max per-frequency MAE:   {max_mae:.6} at {f_mae:.6} GHz");
    let _ = writeln!(
        s,
        "max per-frequency MAPE:  {max_mape:.6} % at {f_mape:.6} GHz"
    );
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<10} {:>4} {:>10} {:>10}   {:>10} {:>10}",
        "type", "n", "MAE", "MAPE %", "ref MAE", "ref MAPE %"
    );
    for row in TypeRow::from_report(report) {
        let reference = PUBLISHED_ACCURACY
            .iter()
            .find(|(name, _, _)| *name == row.ptype);
        let (rm, rp) = match reference {
            Some((_, m, p)) => (format!("{m:.6}"), format!("{p:.2}")),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            s,
            "{:<10} {:>4} {:>10.6} {:>10.6}   {:>10} {:>10}",
            row.ptype, row.n, row.mae, row.mape_pct, rm, rp
        );
    }
    s
}

/// Write `overall.csv`, `per_type.csv`, `per_frequency.csv` and
/// `summary.txt` into `dir` (created if needed).
pub fn write_report_dir(report: &EvaluationReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_rows_to_path(dir.join(OVERALL_FILE), &[OverallRow::from_report(report)])?;
    write_rows_to_path(dir.join(PER_TYPE_FILE), &TypeRow::from_report(report))?;
    write_rows_to_path(dir.join(PER_FREQUENCY_FILE), &report.per_frequency)?;
    let summary = dir.join(SUMMARY_FILE);
    fs::write(&summary, render_summary(report)).map_err(|e| Error::io(&summary, e))
}
