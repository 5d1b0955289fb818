//! Validation statistics: MAE, MAPE and R² per frequency, per potato type
//! and overall.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::estimator::estimate_sg;
use crate::numeric::{compensated_sum, shifted_mean};
use crate::poly::SgModel;
use crate::types::{Dataset, PotatoType};

fn check_shapes(truth: &[f64], est: &[f64]) -> Result<()> {
    if truth.len() != est.len() {
        return Err(Error::ShapeMismatch {
            left: truth.len(),
            right: est.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Mean absolute error.
pub fn mae(truth: &[f64], est: &[f64]) -> Result<f64> {
    check_shapes(truth, est)?;
    Ok(compensated_sum(truth.iter().zip(est).map(|(t, e)| (t - e).abs())) / truth.len() as f64)
}

/// Mean absolute percentage error, in percent of the true value.
pub fn mape(truth: &[f64], est: &[f64]) -> Result<f64> {
    check_shapes(truth, est)?;
    if let Some(index) = truth.iter().position(|&t| t == 0.0) {
        return Err(Error::DivisionByZeroTruth { index });
    }
    let s = compensated_sum(truth.iter().zip(est).map(|(t, e)| ((t - e) / t).abs()));
    Ok(100.0 * s / truth.len() as f64)
}

/// Coefficient of determination of `est` against `truth`; 0 when the truth
/// has no variance.
pub fn r_squared(truth: &[f64], est: &[f64]) -> Result<f64> {
    check_shapes(truth, est)?;
    let mean = shifted_mean(truth);
    let sst = compensated_sum(truth.iter().map(|t| (t - mean) * (t - mean)));
    if sst == 0.0 {
        return Ok(0.0);
    }
    let sse = compensated_sum(truth.iter().zip(est).map(|(t, e)| (t - e) * (t - e)));
    Ok(1.0 - sse / sst)
}

/// Errors at one grid frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyErrors {
    pub f_ghz: f64,
    pub mae: f64,
    pub mape_pct: f64,
}

/// Estimates for every sample at every grid frequency, `[frequency][sample]`.
fn estimate_matrix(m: &SgModel, ds: &Dataset) -> Result<Vec<Vec<f64>>> {
    let spectra = ds.averaged_spectra();
    ds.grid()
        .points()
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            spectra
                .iter()
                .zip(ds.samples())
                .map(|(s, sample)| {
                    estimate_sg(m, s.eps_real()[k], f)
                        .map(|e| e.sg)
                        .map_err(|e| Error::for_sample(sample.id(), e))
                })
                .collect::<Result<Vec<f64>>>()
                .map_err(|e| Error::at_frequency(k, f, e))
        })
        .collect()
}

/// MAE and MAPE of the model's estimates against gravimetric SG at each
/// grid frequency of the dataset.
pub fn frequency_sweep_errors(m: &SgModel, ds: &Dataset) -> Result<Vec<FrequencyErrors>> {
    if ds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let truth = ds.sg_values();
    let est = estimate_matrix(m, ds)?;
    ds.grid()
        .points()
        .iter()
        .zip(&est)
        .map(|(&f_ghz, e)| {
            Ok(FrequencyErrors {
                f_ghz,
                mae: mae(&truth, e)?,
                mape_pct: mape(&truth, e)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverallStats {
    pub mae: f64,
    pub mape_pct: f64,
    pub r2: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeStats {
    pub mae: f64,
    pub mape_pct: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReportProvenance {
    pub model: Option<String>,
    pub dataset: Option<String>,
}

/// Frequency-averaged accuracy overall and per type, plus the
/// per-frequency sweep it was averaged from.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub overall: OverallStats,
    pub per_type: BTreeMap<PotatoType, TypeStats>,
    pub per_frequency: Vec<FrequencyErrors>,
    pub provenance: ReportProvenance,
}

impl EvaluationReport {
    /// Largest per-frequency MAE and the frequency where it occurs.
    pub fn max_mae(&self) -> (f64, f64) {
        self.per_frequency.iter().map(|r| (r.mae, r.f_ghz)).fold(
            (f64::NEG_INFINITY, f64::NAN),
            |a, b| if b.0 > a.0 { b } else { a },
        )
    }

    /// Largest per-frequency MAPE (percent) and the frequency where it occurs.
    pub fn max_mape_pct(&self) -> (f64, f64) {
        self.per_frequency
            .iter()
            .map(|r| (r.mape_pct, r.f_ghz))
            .fold(
                (f64::NEG_INFINITY, f64::NAN),
                |a, b| if b.0 > a.0 { b } else { a },
            )
    }
}

fn frequency_average(values: impl Iterator<Item = f64>, count: usize) -> f64 {
    compensated_sum(values) / count as f64
}

/// Accuracy report with equal-weight averages over all grid frequencies,
/// overall and for each potato type present.
pub fn per_type_report(m: &SgModel, ds: &Dataset) -> Result<EvaluationReport> {
    if ds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let truth = ds.sg_values();
    let est = estimate_matrix(m, ds)?;
    let nf = est.len();

    let mut per_frequency = Vec::with_capacity(nf);
    let mut r2s = Vec::with_capacity(nf);
    for (&f_ghz, e) in ds.grid().points().iter().zip(&est) {
        per_frequency.push(FrequencyErrors {
            f_ghz,
            mae: mae(&truth, e)?,
            mape_pct: mape(&truth, e)?,
        });
        r2s.push(r_squared(&truth, e)?);
    }
    let overall = OverallStats {
        mae: frequency_average(per_frequency.iter().map(|r| r.mae), nf),
        mape_pct: frequency_average(per_frequency.iter().map(|r| r.mape_pct), nf),
        r2: frequency_average(r2s.into_iter(), nf),
        n: ds.len(),
    };

    let mut groups: BTreeMap<PotatoType, Vec<usize>> = BTreeMap::new();
    for (i, s) in ds.samples().iter().enumerate() {
        groups.entry(s.ptype().clone()).or_default().push(i);
    }
    let mut per_type = BTreeMap::new();
    for (ptype, idx) in groups {
        let t: Vec<f64> = idx.iter().map(|&i| truth[i]).collect();
        let mut maes = Vec::with_capacity(nf);
        let mut mapes = Vec::with_capacity(nf);
        for e in &est {
            let sub: Vec<f64> = idx.iter().map(|&i| e[i]).collect();
            maes.push(mae(&t, &sub)?);
            mapes.push(mape(&t, &sub)?);
        }
        per_type.insert(
            ptype,
            TypeStats {
                mae: frequency_average(maes.into_iter(), nf),
                mape_pct: frequency_average(mapes.into_iter(), nf),
                n: idx.len(),
            },
        );
    }

    Ok(EvaluationReport {
        overall,
        per_type,
        per_frequency,
        provenance: ReportProvenance {
            model: m.provenance().source.clone(),
            dataset: ds.id().map(str::to_owned),
        },
    })
}

/// Reference accuracy reported for the published calibration on its own
/// held-out set: `(row, MAE, MAPE %)`. Display fixture only.
pub const PUBLISHED_ACCURACY: [(&str, f64, f64); 6] = [
    ("Total", 3.57e-3, 0.33),
    ("Red", 4.55e-3, 0.43),
    ("Russet", 2.45e-3, 0.23),
    ("Yellow", 3.34e-3, 0.31),
    ("Purple", 2.15e-3, 0.20),
    ("Chipper", 5.37e-3, 0.49),
];
