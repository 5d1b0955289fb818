//! Per-frequency simple linear regression of SG on the dielectric constant.
//!
//! Each fit uses centered sums: shifted means first, then
//! `Sxy / Sxx` for the slope, with every sum accumulated left to right in
//! sample order using compensated summation.

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, shifted_mean};
use crate::types::{Dataset, FrequencyGrid};

/// Result of one least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
    /// All targets were identical; `r2` is reported as 0 and the fit is the
    /// horizontal line through the mean.
    pub degenerate_target: bool,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Least-squares fit of `sg = c1 * eps + c2` over `(eps_real, sg)` pairs.
pub fn fit_linear_at_frequency(pairs: &[(f64, f64)]) -> Result<LinearFit> {
    let n = pairs.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if let Some(&(x, y)) = pairs.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidValue(format!("non-finite pair ({x}, {y})")));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let x_mean = shifted_mean(&xs);
    let y_mean = shifted_mean(&ys);

    let sxx = compensated_sum(xs.iter().map(|&x| (x - x_mean) * (x - x_mean)));
    let x_scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sxx <= n as f64 * (f64::EPSILON * x_scale).powi(2) {
        return Err(Error::DegenerateDesign);
    }
    let sxy = compensated_sum(pairs.iter().map(|&(x, y)| (x - x_mean) * (y - y_mean)));
    let syy = compensated_sum(ys.iter().map(|&y| (y - y_mean) * (y - y_mean)));

    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    if syy == 0.0 {
        log::warn!("degenerate target: all {n} SG values equal, r2 reported as 0");
        return Ok(LinearFit {
            slope,
            intercept,
            r2: 0.0,
            n,
            degenerate_target: true,
        });
    }
    let sse = compensated_sum(pairs.iter().map(|&(x, y)| {
        let r = y - (slope * x + intercept);
        r * r
    }));
    let r2 = (1.0 - sse / syy).clamp(0.0, 1.0);
    Ok(LinearFit {
        slope,
        intercept,
        r2,
        n,
        degenerate_target: false,
    })
}

/// Independent per-frequency fits across a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PerFrequencyCoefficients {
    pub grid: FrequencyGrid,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub r2: Vec<f64>,
    pub n: usize,
}

/// Fit `SG = C1 * eps'(f) + C2` independently at every grid frequency,
/// using the replicate-averaged spectrum of each sample.
pub fn fit_all_frequencies(ds: &Dataset) -> Result<PerFrequencyCoefficients> {
    if ds.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: ds.len(),
        });
    }
    let spectra = ds.averaged_spectra();
    let sg = ds.sg_values();
    let grid = ds.grid().clone();
    let mut out = PerFrequencyCoefficients {
        c1: Vec::with_capacity(grid.len()),
        c2: Vec::with_capacity(grid.len()),
        r2: Vec::with_capacity(grid.len()),
        n: ds.len(),
        grid,
    };
    let mut pairs = Vec::with_capacity(ds.len());
    for (k, &f) in out.grid.points().iter().enumerate() {
        pairs.clear();
        pairs.extend(spectra.iter().zip(&sg).map(|(s, &y)| (s.eps_real()[k], y)));
        let fit = fit_linear_at_frequency(&pairs).map_err(|e| Error::at_frequency(k, f, e))?;
        out.c1.push(fit.slope);
        out.c2.push(fit.intercept);
        out.r2.push(fit.r2);
    }
    Ok(out)
}

/// Which permittivity channel to correlate against SG.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Real,
    Imag,
}

/// R² of the simple linear fit of SG on the chosen channel, per frequency.
pub fn correlation_sweep(ds: &Dataset, channel: Channel) -> Result<Vec<f64>> {
    let spectra = ds.averaged_spectra();
    let columns: Vec<&[f64]> = match channel {
        Channel::Real => spectra.iter().map(|s| s.eps_real()).collect(),
        Channel::Imag => spectra
            .iter()
            .map(|s| s.eps_imag().ok_or(Error::MissingChannel))
            .collect::<Result<_>>()?,
    };
    let sg = ds.sg_values();
    ds.grid()
        .points()
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let pairs: Vec<(f64, f64)> = columns.iter().zip(&sg).map(|(c, &y)| (c[k], y)).collect();
            fit_linear_at_frequency(&pairs)
                .map(|fit| fit.r2)
                .map_err(|e| Error::at_frequency(k, f, e))
        })
        .collect()
}
