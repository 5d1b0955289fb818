//! Specific gravity from flotation weighings.
//!
//! Water density is taken as exactly 1 g/cm³ with no temperature
//! correction, so SG is a plain ratio of weights.

use std::fmt;

use crate::error::{Error, Result};

/// SG at or below this value is unphysical for a submerged tuber.
pub const SG_ERROR_LO: f64 = 1.0;
/// SG at or above this value is treated as a data-entry error.
pub const SG_ERROR_HI: f64 = 1.5;
/// Plausible band for potato tubers; values outside are flagged.
pub const SG_WARN_BAND: (f64, f64) = (1.02, 1.15);

/// A single flotation weighing, in grams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlotationReading {
    /// Weight in air and apparent weight fully submerged.
    Traditional { w_air: f64, w_uww: f64 },
    /// Weight in air and the tared-scale reading (buoyant force over g).
    Buoyancy { w_air: f64, f_float: f64 },
}

impl FlotationReading {
    pub fn sg(&self) -> Result<f64> {
        match *self {
            FlotationReading::Traditional { w_air, w_uww } => sg_traditional(w_air, w_uww),
            FlotationReading::Buoyancy { w_air, f_float } => sg_buoyancy(w_air, f_float),
        }
    }
}

fn check_weight(name: &str, w: f64) -> Result<()> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(format!(
            "{name} = {w} must be finite and > 0"
        )))
    }
}

/// `w_air / (w_air - w_uww)`.
pub fn sg_traditional(w_air: f64, w_uww: f64) -> Result<f64> {
    check_weight("w_air", w_air)?;
    if !w_uww.is_finite() {
        return Err(Error::InvalidWeight(format!(
            "w_uww = {w_uww} must be finite"
        )));
    }
    let buoyancy = w_air - w_uww;
    if buoyancy <= 0.0 {
        return Err(Error::NonPositiveBuoyancy { w_air, w_uww });
    }
    Ok(w_air / buoyancy)
}

/// `w_air / f_float`, where `f_float` is the tared scale reading in grams.
pub fn sg_buoyancy(w_air: f64, f_float: f64) -> Result<f64> {
    check_weight("w_air", w_air)?;
    check_weight("f_float", f_float)?;
    Ok(w_air / f_float)
}

/// Plausibility verdict for an SG value.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Ok,
    Warning(String),
    Error(String),
}

impl Verdict {
    pub fn is_error(&self) -> bool {
        matches!(self, Verdict::Error(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Ok => "Ok",
            Verdict::Warning(_) => "Warning",
            Verdict::Error(_) => "Error",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn validate_sg(sg: f64) -> Result<Verdict> {
    if !sg.is_finite() {
        return Err(Error::InvalidValue(format!("SG {sg} is not finite")));
    }
    let (warn_lo, warn_hi) = SG_WARN_BAND;
    Ok(if sg <= SG_ERROR_LO {
        Verdict::Error(format!("SG {sg} <= {SG_ERROR_LO}: tuber would float"))
    } else if sg >= SG_ERROR_HI {
        Verdict::Error(format!("SG {sg} >= {SG_ERROR_HI}: implausible for a tuber"))
    } else if sg < warn_lo || sg > warn_hi {
        Verdict::Warning(format!("SG {sg} outside [{warn_lo}, {warn_hi}]"))
    } else {
        Verdict::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn traditional_examples() {
        assert!((sg_traditional(110.0, 10.0).unwrap() - 1.1).abs() < 1e-15);
        assert_eq!(sg_traditional(100.0, 0.0).unwrap(), 1.0);
        assert!(matches!(
            sg_traditional(100.0, 100.0),
            Err(Error::NonPositiveBuoyancy { .. })
        ));
        assert!(matches!(
            sg_traditional(0.0, -5.0),
            Err(Error::InvalidWeight(_))
        ));
    }

    #[test]
    fn buoyancy_examples() {
        assert!((sg_buoyancy(105.5, 100.0).unwrap() - 1.055).abs() < 1e-15);
        assert_eq!(sg_buoyancy(123.45, 123.45).unwrap(), 1.0);
        assert!(matches!(
            sg_buoyancy(-1.0, 1.0),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            sg_buoyancy(1.0, 0.0),
            Err(Error::InvalidWeight(_))
        ));
    }

    #[test]
    fn reading_dispatch() {
        let t = FlotationReading::Traditional {
            w_air: 110.0,
            w_uww: 10.0,
        };
        let b = FlotationReading::Buoyancy {
            w_air: 110.0,
            f_float: 100.0,
        };
        assert_eq!(t.sg().unwrap(), b.sg().unwrap());
    }

    #[test]
    fn verdicts() {
        assert_eq!(validate_sg(1.080).unwrap(), Verdict::Ok);
        assert!(validate_sg(0.99).unwrap().is_error());
        assert!(validate_sg(1.0).unwrap().is_error());
        assert!(validate_sg(1.5).unwrap().is_error());
        assert!(matches!(validate_sg(1.16).unwrap(), Verdict::Warning(_)));
        assert!(matches!(validate_sg(1.01).unwrap(), Verdict::Warning(_)));
        assert!(matches!(validate_sg(f64::NAN), Err(Error::InvalidValue(_))));
    }

    #[test]
    fn warn_band_covers_observed_type_ranges() {
        for sg in [
            1.036, 1.079, 1.047, 1.088, 1.056, 1.100, 1.058, 1.101, 1.081, 1.121,
        ] {
            assert_eq!(validate_sg(sg).unwrap(), Verdict::Ok, "{sg}");
        }
    }

    proptest! {
        #[test]
        fn traditional_increasing_in_uww(w in 50.0f64..500.0, a in 0.0f64..0.2, b in 0.0f64..0.2) {
            prop_assume!(a != b);
            let (u1, u2) = (w * a.min(b), w * a.max(b));
            prop_assert!(sg_traditional(w, u1).unwrap() < sg_traditional(w, u2).unwrap());
        }

        #[test]
        fn buoyancy_scale_invariant(w in 50.0f64..500.0, r in 40.0f64..500.0, k in 0.01f64..100.0) {
            let a = sg_buoyancy(w, r).unwrap();
            let b = sg_buoyancy(k * w, k * r).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a);
        }

        #[test]
        fn formulations_agree(w in 50.0f64..500.0, frac in 0.001f64..0.3) {
            let u = w * frac;
            let t = sg_traditional(w, u).unwrap();
            let b = sg_buoyancy(w, w - u).unwrap();
            prop_assert!((t - b).abs() <= 1e-12 * t);
        }
    }
}
