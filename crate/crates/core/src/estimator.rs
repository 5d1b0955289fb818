//! SG estimation from the dielectric constant at a given frequency, plus
//! propagation of dielectric-constant uncertainty into SG.

use crate::error::{Error, Result};
use crate::gravimetry::{self, Verdict};
use crate::poly::SgModel;
use crate::types::{Dataset, FrequencyGrid, DEFAULT_GRID_POINTS};

/// One SG estimate together with the coefficients that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub sg: f64,
    pub frequency_ghz: f64,
    pub eps_real: f64,
    pub c1_used: f64,
    pub c2_used: f64,
    /// Plausibility of the estimated SG. Out-of-band estimates are flagged,
    /// never clamped.
    pub verdict: Verdict,
}

pub fn estimate_sg(m: &SgModel, eps_real: f64, f_ghz: f64) -> Result<Estimate> {
    if !eps_real.is_finite() || eps_real <= 1.0 {
        return Err(Error::InvalidPermittivity(eps_real));
    }
    let (c1, c2) = m.coefficients_at(f_ghz)?;
    let sg = c1 * eps_real + c2;
    let verdict = gravimetry::validate_sg(sg)?;
    Ok(Estimate {
        sg,
        frequency_ghz: f_ghz,
        eps_real,
        c1_used: c1,
        c2_used: c2,
        verdict,
    })
}

/// Estimate SG for every sample of `ds` at `f_ghz`. The replicate-averaged
/// spectrum is interpolated linearly when `f_ghz` falls between grid points.
pub fn estimate_batch(m: &SgModel, ds: &Dataset, f_ghz: f64) -> Result<Vec<Estimate>> {
    ds.samples()
        .iter()
        .map(|s| {
            s.averaged()
                .eps_real_at(f_ghz)
                .and_then(|eps| estimate_sg(m, eps, f_ghz))
                .map_err(|e| Error::for_sample(s.id(), e))
        })
        .collect()
}

/// Where to evaluate a sensitivity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencySelection {
    Single(f64),
    /// Inclusive band `[lo, hi]` GHz, scanned on a uniform grid.
    Band(f64, f64),
}

/// Worst-case SG change for a given dielectric-constant change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityBound {
    pub delta_sg: f64,
    pub at_frequency_ghz: f64,
}

/// One row of a sensitivity scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub f_ghz: f64,
    pub abs_c1: f64,
    pub delta_sg: f64,
}

fn check_delta(delta_eps: f64) -> Result<()> {
    if delta_eps.is_finite() && delta_eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidValue(format!(
            "delta_eps = {delta_eps} must be finite and >= 0"
        )))
    }
}

/// `|C1(f)| * delta_eps` at every point of `grid`.
pub fn sensitivity_profile(
    m: &SgModel,
    delta_eps: f64,
    grid: &FrequencyGrid,
) -> Result<Vec<SensitivityPoint>> {
    check_delta(delta_eps)?;
    grid.points()
        .iter()
        .map(|&f| {
            let abs_c1 = m.c1().eval(f)?.abs();
            Ok(SensitivityPoint {
                f_ghz: f,
                abs_c1,
                delta_sg: abs_c1 * delta_eps,
            })
        })
        .collect()
}

/// SG change caused by a dielectric-constant change of `delta_eps`; over a
/// band, the maximum over a 283-point uniform scan.
pub fn sensitivity(
    m: &SgModel,
    delta_eps: f64,
    at: FrequencySelection,
) -> Result<SensitivityBound> {
    let grid = match at {
        FrequencySelection::Single(f) => {
            check_delta(delta_eps)?;
            let abs_c1 = m.c1().eval(f)?.abs();
            return Ok(SensitivityBound {
                delta_sg: abs_c1 * delta_eps,
                at_frequency_ghz: f,
            });
        }
        FrequencySelection::Band(lo, hi) => {
            let (mlo, mhi) = m.valid_range();
            for f in [lo, hi] {
                if !(mlo..=mhi).contains(&f) {
                    return Err(Error::FrequencyOutOfRange {
                        f_ghz: f,
                        lo: mlo,
                        hi: mhi,
                    });
                }
            }
            FrequencyGrid::uniform(lo, hi, if lo == hi { 1 } else { DEFAULT_GRID_POINTS })?
        }
    };
    let profile = sensitivity_profile(m, delta_eps, &grid)?;
    let worst = profile.iter().fold(profile[0], |best, p| {
        if p.delta_sg > best.delta_sg {
            *p
        } else {
            best
        }
    });
    Ok(SensitivityBound {
        delta_sg: worst.delta_sg,
        at_frequency_ghz: worst.f_ghz,
    })
}
