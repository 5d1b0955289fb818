//! Seeded synthetic datasets.
//!
//! Two generators are provided: one inverts an [`SgModel`] so that the
//! model is the exact ground truth, the other builds spectra from a
//! water/dry-matter mixture with Debye relaxation and ionic conduction.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Sample `k` (0-based, types in configuration
//! order, samples within a type in order) draws from stream `k`; the split
//! draws from stream `SPLIT_STREAM_BASE + type index`. Per sample the draw
//! order is: SG (uniform in the type range), biological SG offset (normal),
//! weight in air (uniform 80–400 g), temperature (uniform 19–24 °C, 0.1 °C
//! resolution), then replicate noise replicate-major, frequency-minor.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::poly::SgModel;
use crate::types::{
    Dataset, DielectricSpectrum, FrequencyGrid, PotatoType, ReplicateSet, TuberSample, Weighing,
};

/// Stream offset used by [`stratified_split`], far above any sample index.
pub const SPLIT_STREAM_BASE: u64 = 1 << 48;

const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_per_type: usize,
    /// Types to generate, in order, with their inclusive SG ranges.
    pub sg_ranges: Vec<(PotatoType, (f64, f64))>,
    /// Std of additive Gaussian noise on each ε′ point of each replicate.
    pub noise_eps_std: f64,
    /// Std of the per-sample SG-equivalent heterogeneity offset.
    pub bio_resid_std: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// Observed SG range of each type in the reference study.
pub fn default_sg_ranges() -> Vec<(PotatoType, (f64, f64))> {
    vec![
        (PotatoType::Red, (1.036, 1.079)),
        (PotatoType::Russet, (1.047, 1.088)),
        (PotatoType::Yellow, (1.056, 1.100)),
        (PotatoType::Purple, (1.058, 1.101)),
        (PotatoType::Chipper, (1.081, 1.121)),
    ]
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_per_type: 50,
            sg_ranges: default_sg_ranges(),
            noise_eps_std: 0.35,
            bio_resid_std: 4.5e-3,
            replicates: 3,
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// Same calibration as the default with all noise switched off.
    pub fn noise_free() -> Self {
        Self {
            noise_eps_std: 0.0,
            bio_resid_std: 0.0,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.sg_ranges.is_empty() {
            return bad("no potato types configured".into());
        }
        if self.replicates == 0 {
            return bad("replicates must be >= 1".into());
        }
        for (name, s) in [
            ("noise_eps_std", self.noise_eps_std),
            ("bio_resid_std", self.bio_resid_std),
        ] {
            if !s.is_finite() || s < 0.0 {
                return bad(format!("{name} = {s} must be finite and >= 0"));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (ptype, (lo, hi)) in &self.sg_ranges {
            if !seen.insert(ptype) {
                return bad(format!("type {ptype} listed twice"));
            }
            if !(1.0 < *lo && lo <= hi && *hi < 1.2) {
                return bad(format!(
                    "{ptype} SG range [{lo}, {hi}] must lie within (1.0, 1.2)"
                ));
            }
        }
        Ok(())
    }

    fn for_each_sample(&self) -> impl Iterator<Item = (u64, usize, &PotatoType, (f64, f64))> + '_ {
        self.sg_ranges
            .iter()
            .enumerate()
            .flat_map(move |(t, (ptype, range))| {
                (0..self.n_per_type)
                    .map(move |j| ((t * self.n_per_type + j) as u64, j, ptype, *range))
            })
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal(std: f64) -> Normal<f64> {
    Normal::new(0.0, std).expect("std validated")
}

fn sample_id(ptype: &PotatoType, j: usize) -> String {
    let label: String = ptype
        .label()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    format!("{label}-{:03}", j + 1)
}

/// Per-sample scalar draws shared by both generators.
struct Draw {
    sg: f64,
    bio_offset: f64,
    w_air_g: f64,
    temperature_c: f64,
}

fn draw_scalars(rng: &mut ChaCha8Rng, range: (f64, f64), bio: &Normal<f64>) -> Draw {
    let (lo, hi) = range;
    let sg = if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    };
    let bio_offset = bio.sample(rng);
    let w_air_g = rng.random_range(80.0..=400.0);
    let temperature_c = (rng.random_range(190.0..=240.0f64)).round() / 10.0;
    Draw {
        sg,
        bio_offset,
        w_air_g,
        temperature_c,
    }
}

#[allow(clippy::too_many_arguments)]
fn build_sample(
    id: String,
    ptype: &PotatoType,
    draw: &Draw,
    grid: &FrequencyGrid,
    base_real: &[f64],
    imag: Option<&[f64]>,
    replicates: usize,
    noise: &Normal<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<TuberSample> {
    let reps = (0..replicates)
        .map(|_| {
            let real: Vec<f64> = base_real.iter().map(|&e| e + noise.sample(rng)).collect();
            DielectricSpectrum::new(grid.clone(), real, imag.map(<[f64]>::to_vec))
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::for_sample(&id, e))?;
    let weighing = Weighing {
        w_air_g: draw.w_air_g,
        f_float_g: draw.w_air_g / draw.sg,
    };
    Ok(TuberSample::new(
        id,
        ptype.clone(),
        Some(weighing),
        Some(draw.sg),
        ReplicateSet::new(reps)?,
    )?
    .with_temperature(draw.temperature_c))
}

/// Dataset whose spectra satisfy `SG + b = C1(f) ε′(f) + C2(f)` for the
/// given model, with one SG offset `b` per sample and independent noise per
/// replicate point.
pub fn gen_inverse_model(cfg: &SynthConfig, m: &SgModel, grid: &FrequencyGrid) -> Result<Dataset> {
    cfg.validate()?;
    let coeffs: Vec<(f64, f64)> = grid
        .points()
        .iter()
        .map(|&f| m.coefficients_at(f))
        .collect::<Result<_>>()?;
    let (bio, noise) = (normal(cfg.bio_resid_std), normal(cfg.noise_eps_std));
    let samples = cfg
        .for_each_sample()
        .map(|(k, j, ptype, range)| {
            let mut rng = stream_rng(cfg.seed, k);
            let draw = draw_scalars(&mut rng, range, &bio);
            let target = draw.sg + draw.bio_offset;
            let base: Vec<f64> = coeffs.iter().map(|&(c1, c2)| (target - c2) / c1).collect();
            build_sample(
                sample_id(ptype, j),
                ptype,
                &draw,
                grid,
                &base,
                None,
                cfg.replicates,
                &noise,
                &mut rng,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(grid.clone(), samples)
}

/// Single-pole Debye parameters of free water.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DebyeWater {
    pub eps_static: f64,
    pub eps_inf: f64,
    pub tau_ps: f64,
}

/// Parameters of the water/dry-matter mixture generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureParams {
    pub water: DebyeWater,
    /// Ionic conductivity of the tissue water, S/m.
    pub sigma_ion: f64,
    /// Dry-matter dielectric constant at `starch_ref_ghz`.
    pub starch_eps_ref: f64,
    pub starch_ref_ghz: f64,
    /// Change of the dry-matter dielectric constant per GHz.
    pub starch_slope_per_ghz: f64,
    /// Water volume fraction is `1 - fraction_slope * (SG - 1)`.
    pub fraction_slope: f64,
}

impl Default for MixtureParams {
    fn default() -> Self {
        Self {
            water: DebyeWater {
                eps_static: 78.4,
                eps_inf: 5.2,
                tau_ps: 8.27,
            },
            sigma_ion: 0.05,
            starch_eps_ref: 6.5,
            starch_ref_ghz: 0.3,
            starch_slope_per_ghz: -0.3,
            fraction_slope: 4.0,
        }
    }
}

impl MixtureParams {
    pub fn validate(&self) -> Result<()> {
        let w = &self.water;
        let ok = w.eps_inf > 1.0
            && w.eps_static > w.eps_inf
            && w.tau_ps > 0.0
            && self.sigma_ion >= 0.0
            && self.fraction_slope > 0.0
            && [
                w.eps_static,
                w.eps_inf,
                w.tau_ps,
                self.sigma_ion,
                self.starch_eps_ref,
                self.starch_ref_ghz,
                self.starch_slope_per_ghz,
                self.fraction_slope,
            ]
            .iter()
            .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "invalid mixture parameters {self:?}"
            )))
        }
    }

    /// Water permittivity as `ε′ − jε″` (imaginary part stored negative).
    pub fn water_permittivity(&self, f_ghz: f64) -> Complex64 {
        let w = &self.water;
        let omega = 2.0 * std::f64::consts::PI * f_ghz * 1e9;
        let relax = Complex64::new(1.0, omega * w.tau_ps * 1e-12);
        let debye = Complex64::from(w.eps_inf) + (w.eps_static - w.eps_inf) / relax;
        debye - Complex64::new(0.0, self.sigma_ion / (omega * VACUUM_PERMITTIVITY))
    }

    pub fn starch_permittivity(&self, f_ghz: f64) -> f64 {
        self.starch_eps_ref + self.starch_slope_per_ghz * (f_ghz - self.starch_ref_ghz)
    }

    pub fn water_fraction(&self, sg: f64) -> f64 {
        1.0 - self.fraction_slope * (sg - 1.0)
    }

    /// Complex refractive index mixing: `√ε = v √ε_water + (1 − v) √ε_dry`.
    pub fn mixture_permittivity(&self, f_ghz: f64, water_fraction: f64) -> Complex64 {
        let n = water_fraction * self.water_permittivity(f_ghz).sqrt()
            + (1.0 - water_fraction) * Complex64::from(self.starch_permittivity(f_ghz)).sqrt();
        n * n
    }
}

/// Dataset with complex spectra from the mixture model. The dielectric
/// constant gets replicate noise; the loss factor is noise-free.
pub fn gen_mixture(cfg: &SynthConfig, p: &MixtureParams, grid: &FrequencyGrid) -> Result<Dataset> {
    cfg.validate()?;
    p.validate()?;
    if let Some(f) = grid
        .points()
        .iter()
        .find(|&&f| p.starch_permittivity(f) <= 1.0)
    {
        return Err(Error::InvalidConfig(format!(
            "dry-matter permittivity <= 1 at {f} GHz"
        )));
    }
    let (bio, noise) = (normal(cfg.bio_resid_std), normal(cfg.noise_eps_std));
    let samples = cfg
        .for_each_sample()
        .map(|(k, j, ptype, range)| {
            let mut rng = stream_rng(cfg.seed, k);
            let draw = draw_scalars(&mut rng, range, &bio);
            let v = p.water_fraction(draw.sg + draw.bio_offset);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!(
                    "water fraction {v} outside [0, 1] for SG {}",
                    draw.sg + draw.bio_offset
                )));
            }
            let eps: Vec<Complex64> = grid
                .points()
                .iter()
                .map(|&f| p.mixture_permittivity(f, v))
                .collect();
            let real: Vec<f64> = eps.iter().map(|e| e.re).collect();
            let imag: Vec<f64> = eps.iter().map(|e| (-e.im).max(0.0)).collect();
            build_sample(
                sample_id(ptype, j),
                ptype,
                &draw,
                grid,
                &real,
                Some(&imag),
                cfg.replicates,
                &noise,
                &mut rng,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(grid.clone(), samples)
}

/// Seeded per-type split into disjoint training and testing sets with
/// exact per-type counts. Both outputs keep the original sample order.
pub fn stratified_split(
    ds: &Dataset,
    train_per_type: usize,
    test_per_type: usize,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    let mut groups: BTreeMap<&PotatoType, Vec<usize>> = BTreeMap::new();
    for (i, s) in ds.samples().iter().enumerate() {
        groups.entry(s.ptype()).or_default().push(i);
    }
    let requested = train_per_type + test_per_type;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (t, (ptype, mut idx)) in groups.into_iter().enumerate() {
        if idx.len() < requested {
            return Err(Error::InsufficientSamplesForType {
                ptype: ptype.clone(),
                available: idx.len(),
                requested,
            });
        }
        let mut rng = stream_rng(seed, SPLIT_STREAM_BASE + t as u64);
        idx.shuffle(&mut rng);
        train.extend_from_slice(&idx[..train_per_type]);
        test.extend_from_slice(&idx[train_per_type..requested]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(&train)?, ds.subset(&test)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::published_model;

    fn small_cfg(n: usize) -> SynthConfig {
        SynthConfig {
            n_per_type: n,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn default_config_is_valid() {
        SynthConfig::default().validate().unwrap();
        MixtureParams::default().validate().unwrap();
    }

    #[test]
    fn config_validation() {
        let bad = [
            SynthConfig {
                noise_eps_std: -1.0,
                ..SynthConfig::default()
            },
            SynthConfig {
                sg_ranges: vec![(PotatoType::Red, (0.99, 1.05))],
                ..SynthConfig::default()
            },
            SynthConfig {
                replicates: 0,
                ..SynthConfig::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn inverse_zero_noise_value() {
        let grid = FrequencyGrid::new(vec![0.3, 1.0]).unwrap();
        let cfg = SynthConfig {
            n_per_type: 1,
            sg_ranges: vec![(PotatoType::Yellow, (1.08, 1.08))],
            ..SynthConfig::noise_free()
        };
        let ds = gen_inverse_model(&cfg, &published_model(), &grid).unwrap();
        let s = &ds.samples()[0];
        assert_eq!(s.sg(), 1.08);
        let eps = s.averaged().eps_real()[0];
        // (1.08 - 1.3987886) / -4.6649528e-3
        assert!((eps - 68.336_940_086_510_63).abs() < 1e-9);
    }

    #[test]
    fn same_seed_same_dataset() {
        let grid = FrequencyGrid::uniform(0.3, 3.0, 20).unwrap();
        let a = gen_inverse_model(&small_cfg(4).with_seed(9), &published_model(), &grid).unwrap();
        let b = gen_inverse_model(&small_cfg(4).with_seed(9), &published_model(), &grid).unwrap();
        let c = gen_inverse_model(&small_cfg(4).with_seed(10), &published_model(), &grid).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ids_types_and_ranges() {
        let grid = FrequencyGrid::uniform(0.3, 3.0, 10).unwrap();
        let ds = gen_inverse_model(&small_cfg(7), &published_model(), &grid).unwrap();
        assert_eq!(ds.len(), 35);
        assert_eq!(ds.samples()[0].id(), "red-001");
        assert_eq!(ds.samples()[34].id(), "chipper-007");
        for s in ds.samples() {
            let (_, (lo, hi)) = default_sg_ranges()
                .into_iter()
                .find(|(t, _)| t == s.ptype())
                .unwrap();
            assert!(s.sg() >= lo && s.sg() <= hi);
            assert_eq!(s.replicates().len(), 3);
            let w = s.weighing().unwrap();
            assert!((w.w_air_g / w.f_float_g - s.sg()).abs() < 1e-12);
            assert!((80.0..=400.0).contains(&w.w_air_g));
        }
    }

    #[test]
    fn pure_water_at_low_frequency() {
        let p = MixtureParams::default();
        let e = p.mixture_permittivity(0.3, 1.0);
        assert!((e.re - 78.4).abs() / 78.4 < 0.02);
        // 40-digit reference: 78.38221643511278 - 4.136657633936247j
        assert!((e.re - 78.382_216_435_112_78).abs() < 1e-9);
        assert!((e.im + 4.136_657_633_936_247).abs() < 1e-9);
    }

    #[test]
    fn mixture_monotone_in_sg_and_frequency() {
        let p = MixtureParams::default();
        let grid = FrequencyGrid::default_band();
        for &f in grid.points() {
            let mut prev = f64::INFINITY;
            for i in 0..=100 {
                let sg = 1.03 + 0.001 * i as f64;
                let e = p.mixture_permittivity(f, p.water_fraction(sg)).re;
                assert!(e < prev, "f={f} sg={sg}");
                prev = e;
            }
        }
        for i in 0..=100 {
            let v = p.water_fraction(1.03 + 0.001 * i as f64);
            let series: Vec<f64> = grid
                .points()
                .iter()
                .map(|&f| p.mixture_permittivity(f, v).re)
                .collect();
            assert!(series.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn mixture_dataset_has_loss_channel() {
        let grid = FrequencyGrid::uniform(0.3, 3.0, 30).unwrap();
        let ds = gen_mixture(&small_cfg(3), &MixtureParams::default(), &grid).unwrap();
        for s in ds.samples() {
            let avg = s.averaged();
            assert!(avg.eps_imag().unwrap().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn split_counts_and_determinism() {
        let grid = FrequencyGrid::uniform(0.3, 3.0, 5).unwrap();
        let ds = gen_inverse_model(&small_cfg(50), &published_model(), &grid).unwrap();
        let (train, test) = stratified_split(&ds, 40, 10, 3).unwrap();
        assert_eq!((train.len(), test.len()), (200, 50));
        for t in PotatoType::STANDARD {
            assert_eq!(
                train.samples().iter().filter(|s| *s.ptype() == t).count(),
                40
            );
            assert_eq!(
                test.samples().iter().filter(|s| *s.ptype() == t).count(),
                10
            );
        }
        let ids: std::collections::HashSet<_> = train.samples().iter().map(|s| s.id()).collect();
        assert!(test.samples().iter().all(|s| !ids.contains(s.id())));
        let (train2, test2) = stratified_split(&ds, 40, 10, 3).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
        let (train3, _) = stratified_split(&ds, 40, 10, 4).unwrap();
        assert_ne!(train, train3);
    }

    #[test]
    fn split_insufficient() {
        let grid = FrequencyGrid::uniform(0.3, 3.0, 5).unwrap();
        let ds = gen_inverse_model(&small_cfg(30), &published_model(), &grid).unwrap();
        assert!(matches!(
            stratified_split(&ds, 40, 10, 0),
            Err(Error::InsufficientSamplesForType {
                available: 30,
                requested: 50,
                ..
            })
        ));
    }
}
