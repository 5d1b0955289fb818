//! Domain types: frequency grids, permittivity spectra, replicate sets,
//! tuber samples and datasets.
//!
//! All types validate their invariants on construction and are immutable
//! afterwards.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gravimetry::{self, Verdict};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Lower edge of the supported measurement band, GHz.
pub const BAND_LO_GHZ: f64 = 0.3;
/// Upper edge of the supported measurement band, GHz.
pub const BAND_HI_GHZ: f64 = 3.0;
/// Number of points in the default measurement grid.
pub const DEFAULT_GRID_POINTS: usize = 283;

/// Two grids are equal when pointwise |Δf| is at most this many GHz.
pub const GRID_MATCH_TOL_GHZ: f64 = 1e-9;
/// Adjacent points closer than this are duplicates.
const DUPLICATE_TOL_GHZ: f64 = 1e-12;

/// Strictly increasing list of frequencies in GHz, all inside the band.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        for (i, &f) in points.iter().enumerate() {
            if !f.is_finite() || !(BAND_LO_GHZ..=BAND_HI_GHZ).contains(&f) {
                return Err(Error::InvalidGrid(format!(
                    "point {i} ({f} GHz) outside [{BAND_LO_GHZ}, {BAND_HI_GHZ}] GHz"
                )));
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1] - w[0] <= DUPLICATE_TOL_GHZ {
                return Err(Error::InvalidGrid(format!(
                    "points {i} and {} ({} and {} GHz) are not strictly increasing",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(Self { points })
    }

    /// `n` uniformly spaced points over `[lo, hi]`, endpoints exact.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::InvalidGrid("grid needs at least one point".into())),
            1 if lo == hi => Self::new(vec![lo]),
            1 => Err(Error::InvalidGrid("a one-point grid needs lo == hi".into())),
            _ => {
                if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                    return Err(Error::InvalidGrid(format!(
                        "need lo < hi, got [{lo}, {hi}]"
                    )));
                }
                let last = (n - 1) as f64;
                let points = (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            hi
                        } else {
                            let t = i as f64 / last;
                            lo * (1.0 - t) + hi * t
                        }
                    })
                    .collect();
                Self::new(points)
            }
        }
    }

    /// The 283-point uniform grid over 0.3–3.0 GHz.
    pub fn default_band() -> Self {
        Self::uniform(BAND_LO_GHZ, BAND_HI_GHZ, DEFAULT_GRID_POINTS).expect("default grid is valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Grid equality up to [`GRID_MATCH_TOL_GHZ`].
    pub fn matches(&self, other: &FrequencyGrid) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a - b).abs() <= GRID_MATCH_TOL_GHZ)
    }

    /// Locate `f` for linear interpolation: returns `(i, t)` such that the
    /// value at `f` is `(1 - t) * v[i] + t * v[i + 1]`, or `(i, 0.0)` on an
    /// exact grid point.
    pub fn locate(&self, f_ghz: f64) -> Result<(usize, f64)> {
        let (lo, hi) = (self.lo(), self.hi());
        if !f_ghz.is_finite() || f_ghz < lo || f_ghz > hi {
            return Err(Error::FrequencyOutOfRange { f_ghz, lo, hi });
        }
        match self.points.binary_search_by(|p| p.total_cmp(&f_ghz)) {
            Ok(i) => Ok((i, 0.0)),
            Err(i) => {
                // lo < f < hi so 1 <= i <= len - 1
                let (a, b) = (self.points[i - 1], self.points[i]);
                Ok((i - 1, (f_ghz - a) / (b - a)))
            }
        }
    }
}

/// Complex relative permittivity `ε′ − jε″` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DielectricSpectrum {
    grid: FrequencyGrid,
    eps_real: Vec<f64>,
    eps_imag: Option<Vec<f64>>,
}

impl DielectricSpectrum {
    pub fn new(
        grid: FrequencyGrid,
        eps_real: Vec<f64>,
        eps_imag: Option<Vec<f64>>,
    ) -> Result<Self> {
        if eps_real.len() != grid.len() {
            return Err(Error::InvalidSpectrum(format!(
                "eps_real has {} values for a {}-point grid",
                eps_real.len(),
                grid.len()
            )));
        }
        if let Some((i, v)) = eps_real
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v <= 1.0)
        {
            return Err(Error::InvalidSpectrum(format!(
                "eps_real[{i}] = {v} must be finite and > 1"
            )));
        }
        if let Some(imag) = &eps_imag {
            if imag.len() != grid.len() {
                return Err(Error::InvalidSpectrum(format!(
                    "eps_imag has {} values for a {}-point grid",
                    imag.len(),
                    grid.len()
                )));
            }
            if let Some((i, v)) = imag
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_finite() || **v < 0.0)
            {
                return Err(Error::InvalidSpectrum(format!(
                    "eps_imag[{i}] = {v} must be finite and >= 0"
                )));
            }
        }
        Ok(Self {
            grid,
            eps_real,
            eps_imag,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn eps_real(&self) -> &[f64] {
        &self.eps_real
    }

    pub fn eps_imag(&self) -> Option<&[f64]> {
        self.eps_imag.as_deref()
    }

    /// Dielectric constant at `f_ghz`, piecewise-linear between grid points.
    pub fn eps_real_at(&self, f_ghz: f64) -> Result<f64> {
        let (i, t) = self.grid.locate(f_ghz)?;
        if t == 0.0 {
            return Ok(self.eps_real[i]);
        }
        let (a, b) = (self.eps_real[i], self.eps_real[i + 1]);
        Ok(a + t * (b - a))
    }
}

/// Per-point values of one channel across replicates, sorted so that
/// reductions do not depend on replicate order.
fn sorted_column<'a>(channel: impl Iterator<Item = &'a [f64]>, point: usize, buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend(channel.map(|c| c[point]));
    buf.sort_by(f64::total_cmp);
}

fn mean_of_sorted(values: &[f64]) -> f64 {
    let lo = values[0];
    let hi = values[values.len() - 1];
    let mean = lo + compensated_sum(values.iter().map(|&x| x - lo)) / values.len() as f64;
    mean.clamp(lo, hi)
}

fn check_shared_grid(replicates: &[DielectricSpectrum]) -> Result<()> {
    let Some(first) = replicates.first() else {
        return Err(Error::InsufficientReplicates { got: 0 });
    };
    if replicates
        .iter()
        .skip(1)
        .all(|r| r.grid.matches(&first.grid))
    {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Pointwise mean of replicate spectra. The imaginary channel is averaged
/// only when every replicate carries it.
pub fn average_replicates(replicates: &[DielectricSpectrum]) -> Result<DielectricSpectrum> {
    check_shared_grid(replicates)?;
    let grid = replicates[0].grid.clone();
    let mut buf = Vec::with_capacity(replicates.len());

    let eps_real = (0..grid.len())
        .map(|p| {
            sorted_column(
                replicates.iter().map(|r| r.eps_real.as_slice()),
                p,
                &mut buf,
            );
            mean_of_sorted(&buf)
        })
        .collect();

    let eps_imag = if replicates.iter().all(|r| r.eps_imag.is_some()) {
        Some(
            (0..grid.len())
                .map(|p| {
                    sorted_column(replicates.iter().filter_map(|r| r.eps_imag()), p, &mut buf);
                    mean_of_sorted(&buf)
                })
                .collect(),
        )
    } else {
        None
    };

    DielectricSpectrum::new(grid, eps_real, eps_imag)
}

/// Pointwise sample standard deviation (divisor N − 1) of the dielectric
/// constant across replicates.
pub fn replicate_std(replicates: &[DielectricSpectrum]) -> Result<Vec<f64>> {
    if replicates.len() < 2 {
        return Err(Error::InsufficientReplicates {
            got: replicates.len(),
        });
    }
    check_shared_grid(replicates)?;
    let n = replicates.len();
    let mut buf = Vec::with_capacity(n);
    Ok((0..replicates[0].grid.len())
        .map(|p| {
            sorted_column(
                replicates.iter().map(|r| r.eps_real.as_slice()),
                p,
                &mut buf,
            );
            let mean = mean_of_sorted(&buf);
            let ss = buf
                .iter()
                .map(|&x| (x - mean) * (x - mean))
                .collect::<CompensatedSum>()
                .total();
            (ss / (n - 1) as f64).sqrt()
        })
        .collect())
}

/// One or more replicate spectra taken at different positions on a tuber.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSet {
    replicates: Vec<DielectricSpectrum>,
}

impl ReplicateSet {
    pub fn new(replicates: Vec<DielectricSpectrum>) -> Result<Self> {
        check_shared_grid(&replicates)?;
        Ok(Self { replicates })
    }

    pub fn replicates(&self) -> &[DielectricSpectrum] {
        &self.replicates
    }

    pub fn len(&self) -> usize {
        self.replicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicates.is_empty()
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.replicates[0].grid
    }

    pub fn average(&self) -> DielectricSpectrum {
        average_replicates(&self.replicates).expect("replicate set invariants hold")
    }

    pub fn std(&self) -> Result<Vec<f64>> {
        replicate_std(&self.replicates)
    }
}

/// Market type of a tuber.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PotatoType {
    Red,
    Russet,
    Yellow,
    Purple,
    Chipper,
    Other(String),
}

impl PotatoType {
    /// The five types of the reference study, in report order.
    pub const STANDARD: [PotatoType; 5] = [
        PotatoType::Red,
        PotatoType::Russet,
        PotatoType::Yellow,
        PotatoType::Purple,
        PotatoType::Chipper,
    ];

    pub fn other(label: &str) -> Result<Self> {
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::InvalidPotatoType(label.to_owned()));
        }
        Ok(PotatoType::Other(label.to_owned()))
    }

    pub fn label(&self) -> &str {
        match self {
            PotatoType::Red => "Red",
            PotatoType::Russet => "Russet",
            PotatoType::Yellow => "Yellow",
            PotatoType::Purple => "Purple",
            PotatoType::Chipper => "Chipper",
            PotatoType::Other(label) => label,
        }
    }
}

impl fmt::Display for PotatoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PotatoType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Ok(match t.to_ascii_lowercase().as_str() {
            "red" => PotatoType::Red,
            "russet" => PotatoType::Russet,
            "yellow" => PotatoType::Yellow,
            "purple" => PotatoType::Purple,
            "chipper" | "chipping" => PotatoType::Chipper,
            _ => PotatoType::other(t)?,
        })
    }
}

/// Flotation weighing of a tuber: weight in air and the tared scale
/// reading with the tuber fully submerged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weighing {
    pub w_air_g: f64,
    pub f_float_g: f64,
}

impl Weighing {
    pub fn sg(&self) -> Result<f64> {
        gravimetry::sg_buoyancy(self.w_air_g, self.f_float_g)
    }
}

/// One tuber: identity, type, gravimetric SG and replicate spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct TuberSample {
    id: String,
    ptype: PotatoType,
    weighing: Option<Weighing>,
    sg: f64,
    replicates: ReplicateSet,
    temperature_c: Option<f64>,
}

impl TuberSample {
    /// Build a sample. `sg` wins when supplied; otherwise it is derived
    /// from `weighing`. Unphysical SG (see [`gravimetry::validate_sg`]) is
    /// rejected, out-of-band values are logged.
    pub fn new(
        id: impl Into<String>,
        ptype: PotatoType,
        weighing: Option<Weighing>,
        sg: Option<f64>,
        replicates: ReplicateSet,
    ) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: String| Error::InvalidSample {
            id: id.clone(),
            reason,
        };
        if id.trim().is_empty() {
            return Err(invalid("empty id".into()));
        }
        let derived = weighing
            .map(|w| w.sg())
            .transpose()
            .map_err(|e| invalid(e.to_string()))?;
        let sg = sg
            .or(derived)
            .ok_or_else(|| invalid("no SG and no flotation weighing".into()))?;
        match gravimetry::validate_sg(sg).map_err(|e| invalid(e.to_string()))? {
            Verdict::Ok => {}
            Verdict::Warning(msg) => log::warn!("sample {id}: {msg}"),
            Verdict::Error(msg) => return Err(invalid(msg)),
        }
        Ok(Self {
            id,
            ptype,
            weighing,
            sg,
            replicates,
            temperature_c: None,
        })
    }

    pub fn with_temperature(mut self, temperature_c: f64) -> Self {
        self.temperature_c = Some(temperature_c);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn ptype(&self) -> &PotatoType {
        &self.ptype
    }

    pub fn weighing(&self) -> Option<Weighing> {
        self.weighing
    }

    pub fn sg(&self) -> f64 {
        self.sg
    }

    pub fn replicates(&self) -> &ReplicateSet {
        &self.replicates
    }

    pub fn temperature_c(&self) -> Option<f64> {
        self.temperature_c
    }

    pub fn averaged(&self) -> DielectricSpectrum {
        self.replicates.average()
    }
}

/// A collection of samples measured on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    id: Option<String>,
    grid: FrequencyGrid,
    samples: Vec<TuberSample>,
}

impl Dataset {
    pub fn new(grid: FrequencyGrid, samples: Vec<TuberSample>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(samples.len());
        for s in &samples {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::DuplicateSampleId(s.id.clone()));
            }
            if !s.replicates.grid().matches(&grid) {
                return Err(Error::for_sample(&s.id, Error::GridMismatch));
            }
        }
        Ok(Self {
            id: None,
            grid,
            samples,
        })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[TuberSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sg_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sg).collect()
    }

    /// Replicate-averaged spectrum of every sample, in sample order.
    pub fn averaged_spectra(&self) -> Vec<DielectricSpectrum> {
        self.samples.iter().map(TuberSample::averaged).collect()
    }

    /// New dataset holding the samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        let mut ds = Dataset::new(self.grid.clone(), samples)?;
        ds.id = self.id.clone();
        Ok(ds)
    }
}
