//! Calibration and estimation of potato tuber specific gravity (SG) from
//! the dielectric constant measured between 0.3 and 3.0 GHz.
//!
//! The pipeline:
//!
//! 1. [`gravimetry`] turns flotation weighings into SG.
//! 2. [`types`] holds replicate spectra; [`types::average_replicates`]
//!    reduces them to one spectrum per tuber.
//! 3. [`regression::fit_all_frequencies`] fits `SG = C1 ε′ + C2` at every
//!    grid frequency.
//! 4. [`poly::fit_poly4`] models `C1(f)` and `C2(f)` as quartics in GHz,
//!    giving an [`SgModel`].
//! 5. [`estimator`] applies a model; [`metrics`] scores it.
//!
//! [`synth`] produces seeded synthetic datasets and [`io`] reads and writes
//! the on-disk formats.

pub mod error;
pub mod estimator;
pub mod gravimetry;
pub mod io;
pub mod metrics;
pub mod model_file;
mod numeric;
pub mod poly;
pub mod regression;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use estimator::{estimate_batch, estimate_sg, sensitivity, Estimate, FrequencySelection};
pub use gravimetry::{sg_buoyancy, sg_traditional, validate_sg, Verdict};
pub use metrics::{mae, mape, per_type_report, EvaluationReport};
pub use model_file::{load_model, save_model};
pub use poly::{fit_poly4, published_model, Poly4, Provenance, SgModel};
pub use regression::{fit_all_frequencies, fit_linear_at_frequency, PerFrequencyCoefficients};
pub use synth::{gen_inverse_model, gen_mixture, stratified_split, MixtureParams, SynthConfig};
pub use types::{
    average_replicates, replicate_std, Dataset, DielectricSpectrum, FrequencyGrid, PotatoType,
    ReplicateSet, TuberSample, Weighing,
};

/// Per-frequency fits followed by quartic fits of both coefficient series.
pub fn fit_model(
    ds: &Dataset,
    provenance: Provenance,
) -> Result<(SgModel, PerFrequencyCoefficients)> {
    let coeffs = fit_all_frequencies(ds)?;
    let c1 = fit_poly4(&coeffs.grid, &coeffs.c1)?;
    let c2 = fit_poly4(&coeffs.grid, &coeffs.c2)?;
    let model = SgModel::new(c1, c2, provenance)?;
    Ok((model, coeffs))
}
