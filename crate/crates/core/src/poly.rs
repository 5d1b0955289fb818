//! Fourth-order polynomial frequency models of the regression coefficients
//! and the combined SG model built from them.
//!
//! Polynomials use the raw monomial basis in frequency (GHz), coefficients
//! stored in ascending degree `a0..a4`.

use crate::error::{Error, Result};
use crate::types::{FrequencyGrid, BAND_HI_GHZ, BAND_LO_GHZ};

/// Number of coefficients of a degree-4 polynomial.
pub const POLY_TERMS: usize = 5;

/// Current model format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// `a0 + a1 f + a2 f² + a3 f³ + a4 f⁴` with an inclusive validity range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poly4 {
    coeffs: [f64; POLY_TERMS],
    valid_range: (f64, f64),
}

impl Poly4 {
    pub fn new(coeffs: [f64; POLY_TERMS], f_lo: f64, f_hi: f64) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomial(format!("a{i} is not finite")));
        }
        if !f_lo.is_finite() || !f_hi.is_finite() || f_lo >= f_hi {
            return Err(Error::InvalidPolynomial(format!(
                "valid range [{f_lo}, {f_hi}] needs lo < hi"
            )));
        }
        if f_lo < BAND_LO_GHZ || f_hi > BAND_HI_GHZ {
            return Err(Error::InvalidPolynomial(format!(
                "valid range [{f_lo}, {f_hi}] exceeds [{BAND_LO_GHZ}, {BAND_HI_GHZ}] GHz"
            )));
        }
        Ok(Self {
            coeffs,
            valid_range: (f_lo, f_hi),
        })
    }

    pub fn coeffs(&self) -> &[f64; POLY_TERMS] {
        &self.coeffs
    }

    pub fn valid_range(&self) -> (f64, f64) {
        self.valid_range
    }

    pub fn contains(&self, f_ghz: f64) -> bool {
        let (lo, hi) = self.valid_range;
        f_ghz >= lo && f_ghz <= hi
    }

    /// Horner evaluation, range-checked.
    pub fn eval(&self, f_ghz: f64) -> Result<f64> {
        if !self.contains(f_ghz) {
            let (lo, hi) = self.valid_range;
            return Err(Error::FrequencyOutOfRange { f_ghz, lo, hi });
        }
        Ok(self.eval_unchecked(f_ghz))
    }

    /// Horner evaluation without the range check.
    pub fn eval_unchecked(&self, f_ghz: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &a| acc * f_ghz + a)
    }
}

/// Least-squares degree-4 polynomial through `values` sampled on `grid`.
///
/// Solves the Vandermonde system by Householder QR. The returned
/// polynomial is valid over `[grid.lo(), grid.hi()]`.
pub fn fit_poly4(grid: &FrequencyGrid, values: &[f64]) -> Result<Poly4> {
    if values.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            left: grid.len(),
            right: values.len(),
        });
    }
    // grid points are strictly increasing, hence distinct
    if grid.len() < POLY_TERMS {
        return Err(Error::RankDeficient {
            distinct: grid.len(),
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidValue(format!("value {i} is not finite")));
    }
    let rows: Vec<[f64; POLY_TERMS]> = grid
        .points()
        .iter()
        .map(|&f| {
            let mut row = [1.0; POLY_TERMS];
            for j in 1..POLY_TERMS {
                row[j] = row[j - 1] * f;
            }
            row
        })
        .collect();
    let coeffs = householder_lstsq(rows, values.to_vec())?;
    Poly4::new(coeffs, grid.lo(), grid.hi())
}

/// Solve `min ||A x - b||` for a tall `m x 5` matrix given as rows.
fn householder_lstsq(mut a: Vec<[f64; POLY_TERMS]>, mut b: Vec<f64>) -> Result<[f64; POLY_TERMS]> {
    let m = a.len();
    let mut diag = [0.0; POLY_TERMS];
    for k in 0..POLY_TERMS {
        let norm = a[k..].iter().map(|r| r[k] * r[k]).sum::<f64>().sqrt();
        let col_scale = a.iter().map(|r| r[k].abs()).fold(0.0, f64::max);
        if norm <= 1e-13 * col_scale.max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient { distinct: k });
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place of column k
        a[k][k] -= alpha;
        let vnorm2: f64 = a[k..].iter().map(|r| r[k] * r[k]).sum();
        for j in k + 1..POLY_TERMS {
            let dot: f64 = a[k..].iter().map(|r| r[k] * r[j]).sum();
            let s = 2.0 * dot / vnorm2;
            for r in a[k..].iter_mut() {
                r[j] -= s * r[k];
            }
        }
        let dot: f64 = a[k..].iter().zip(&b[k..]).map(|(r, bi)| r[k] * bi).sum();
        let s = 2.0 * dot / vnorm2;
        for (r, bi) in a[k..].iter().zip(b[k..].iter_mut()) {
            *bi -= s * r[k];
        }
        diag[k] = alpha;
    }
    debug_assert!(m >= POLY_TERMS);
    let mut x = [0.0; POLY_TERMS];
    for k in (0..POLY_TERMS).rev() {
        let mut acc = b[k];
        for j in k + 1..POLY_TERMS {
            acc -= a[k][j] * x[j];
        }
        x[k] = acc / diag[k];
    }
    Ok(x)
}

/// Provenance carried alongside a fitted model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub source: Option<String>,
    pub n_train: Option<usize>,
    pub created_utc: Option<String>,
}

/// Combined SG estimation model: `SG = C1(f) * eps' + C2(f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SgModel {
    c1: Poly4,
    c2: Poly4,
    provenance: Provenance,
    format_version: u32,
}

impl SgModel {
    pub fn new(c1: Poly4, c2: Poly4, provenance: Provenance) -> Result<Self> {
        if c1.valid_range != c2.valid_range {
            return Err(Error::InvalidPolynomial(format!(
                "C1 range {:?} differs from C2 range {:?}",
                c1.valid_range, c2.valid_range
            )));
        }
        Ok(Self {
            c1,
            c2,
            provenance,
            format_version: MODEL_FORMAT_VERSION,
        })
    }

    pub fn c1(&self) -> &Poly4 {
        &self.c1
    }

    pub fn c2(&self) -> &Poly4 {
        &self.c2
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn format_version(&self) -> u32 {
        self.format_version
    }

    pub fn valid_range(&self) -> (f64, f64) {
        self.c1.valid_range
    }

    /// `(C1(f), C2(f))`, range-checked.
    pub fn coefficients_at(&self, f_ghz: f64) -> Result<(f64, f64)> {
        Ok((self.c1.eval(f_ghz)?, self.c2.eval(f_ghz)?))
    }

    /// Physical sanity warnings: C1 must stay negative across the range
    /// since the dielectric constant falls as SG rises.
    pub fn physical_warnings(&self) -> Vec<String> {
        let (lo, hi) = self.valid_range();
        let scan = FrequencyGrid::uniform(lo, hi, 1001).expect("model range is a valid grid");
        let bad: Vec<f64> = scan
            .points()
            .iter()
            .copied()
            .filter(|&f| self.c1.eval_unchecked(f) >= 0.0)
            .collect();
        if bad.is_empty() {
            Vec::new()
        } else {
            vec![format!(
                "C1 is non-negative at {} of 1001 scan points (first at {} GHz)",
                bad.len(),
                bad[0]
            )]
        }
    }
}

/// C1 coefficients of the published calibration, `a0..a4`.
pub const PUBLISHED_C1: [f64; POLY_TERMS] = [-5.222e-3, 2.320e-3, -1.707e-3, 0.564e-3, -0.068e-3];
/// C2 coefficients of the published calibration, `a0..a4`.
pub const PUBLISHED_C2: [f64; POLY_TERMS] = [1.451, -0.215, 0.151, -0.050, 0.006];

/// The published calibration model, valid over 0.3–3.0 GHz.
pub fn published_model() -> SgModel {
    let c1 = Poly4::new(PUBLISHED_C1, BAND_LO_GHZ, BAND_HI_GHZ).expect("valid");
    let c2 = Poly4::new(PUBLISHED_C2, BAND_LO_GHZ, BAND_HI_GHZ).expect("valid");
    SgModel::new(
        c1,
        c2,
        Provenance {
            source: Some("published".into()),
            n_train: Some(200),
            created_utc: None,
        },
    )
    .expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &[f64; 5], f: f64) -> f64 {
        (0..5).map(|i| a[i] * f.powi(i as i32)).sum()
    }

    #[test]
    fn published_values() {
        let m = published_model();
        // column sums: -4.113e-3 and 1.343
        assert!((m.c1().eval(1.0).unwrap() + 4.113e-3).abs() < 1e-15);
        assert!((m.c2().eval(1.0).unwrap() - 1.343).abs() < 1e-14);
        // frozen from a 40-digit evaluation
        assert!((m.c2().eval(0.3).unwrap() - 1.3987886).abs() < 1e-14);
        assert!((m.c1().eval(0.3).unwrap() + 4.6649528e-3).abs() < 1e-16);
        assert!((m.c1().eval(3.0).unwrap() + 3.905e-3).abs() < 1e-15);
        for f in [0.3, 1.0, 2.2, 3.0] {
            let h = m.c1().eval(f).unwrap();
            assert!((h - naive(&PUBLISHED_C1, f)).abs() <= 1e-15);
        }
    }

    #[test]
    fn range_checks() {
        let m = published_model();
        assert!(matches!(
            m.c1().eval(3.5),
            Err(Error::FrequencyOutOfRange { .. })
        ));
        assert!(m.c1().eval(0.3).is_ok());
        assert!(m.c1().eval(3.0).is_ok());
        assert!(Poly4::new([0.0; 5], 1.0, 1.0).is_err());
        assert!(Poly4::new([f64::NAN, 0.0, 0.0, 0.0, 0.0], 0.3, 3.0).is_err());
        assert!(Poly4::new([0.0; 5], 0.2, 3.0).is_err());
    }

    #[test]
    fn published_c1_negative_across_band() {
        assert!(published_model().physical_warnings().is_empty());
        let g = FrequencyGrid::uniform(0.3, 3.0, 10_001).unwrap();
        assert!(g.points().iter().all(|&f| naive(&PUBLISHED_C1, f) < 0.0));
    }

    #[test]
    fn fit_recovers_published() {
        let grid = FrequencyGrid::default_band();
        for truth in [PUBLISHED_C1, PUBLISHED_C2] {
            let vals: Vec<f64> = grid.points().iter().map(|&f| naive(&truth, f)).collect();
            let p = fit_poly4(&grid, &vals).unwrap();
            for (a, t) in p.coeffs().iter().zip(&truth) {
                assert!((a - t).abs() <= 1e-9 * t.abs(), "{a} vs {t}");
            }
            assert_eq!(p.valid_range(), (0.3, 3.0));
        }
    }

    #[test]
    fn fit_constant() {
        let grid = FrequencyGrid::default_band();
        let p = fit_poly4(&grid, &vec![1.234; grid.len()]).unwrap();
        assert!((p.coeffs()[0] - 1.234).abs() < 1e-9);
        for a in &p.coeffs()[1..] {
            assert!(a.abs() < 1e-9);
        }
    }

    #[test]
    fn fit_needs_five_points() {
        let grid = FrequencyGrid::new(vec![0.5, 1.0, 1.5, 2.0]).unwrap();
        assert!(matches!(
            fit_poly4(&grid, &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::RankDeficient { distinct: 4 })
        ));
        let grid5 = FrequencyGrid::new(vec![0.5, 1.0, 1.5, 2.0, 2.5]).unwrap();
        let vals: Vec<f64> = grid5
            .points()
            .iter()
            .map(|&f| naive(&PUBLISHED_C2, f))
            .collect();
        let p = fit_poly4(&grid5, &vals).unwrap();
        assert!((p.coeffs()[4] - 0.006).abs() < 1e-9);
    }

    #[test]
    fn model_ranges_must_match() {
        let a = Poly4::new(PUBLISHED_C1, 0.3, 3.0).unwrap();
        let b = Poly4::new(PUBLISHED_C2, 0.5, 3.0).unwrap();
        assert!(SgModel::new(a, b, Provenance::default()).is_err());
    }

    #[test]
    fn positive_c1_warns() {
        let a = Poly4::new([1e-3, 0.0, 0.0, 0.0, 0.0], 0.3, 3.0).unwrap();
        let b = Poly4::new(PUBLISHED_C2, 0.3, 3.0).unwrap();
        let m = SgModel::new(a, b, Provenance::default()).unwrap();
        assert_eq!(m.physical_warnings().len(), 1);
    }
}
