use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tubersg_core::types::{BAND_HI_GHZ, BAND_LO_GHZ};
use tubersg_core::FrequencyGrid;

#[derive(Debug, Parser)]
#[command(
    name = "tubersg",
    version,
    about = "Tuber specific gravity from dielectric spectra"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for synthetic data and splits.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Frequency grid for generated data: `N` points over the band, or `LO:HI:N`.
    #[arg(long, global = true, value_parser = parse_grid, default_value = "283")]
    pub grid: FrequencyGrid,

    /// Only log errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Specific gravity from flotation weights.
    Sg {
        /// CSV with columns id,w_air_g and one of w_uww_g or f_float_g.
        #[arg(long)]
        input: PathBuf,
        /// Result CSV; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit a calibration model to a dataset.
    Fit {
        #[arg(long)]
        dataset: PathBuf,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
        /// Per-frequency coefficient CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Free-text source recorded in the model; defaults to the dataset name.
        #[arg(long)]
        source: Option<String>,
        /// Timestamp recorded in the model, copied verbatim.
        #[arg(long)]
        created_utc: Option<String>,
    },
    /// Estimate SG from one dielectric-constant reading.
    Estimate {
        /// Model file; the published calibration when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long)]
        freq_ghz: f64,
    },
    /// Evaluate a model on a labelled dataset.
    Validate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Stratified train/test split of a dataset.
    Split {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
        #[arg(long)]
        train_per_type: usize,
        #[arg(long)]
        test_per_type: usize,
    },
    /// SG uncertainty caused by a dielectric-constant uncertainty.
    Sensitivity {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        delta_eps: f64,
        #[arg(long, conflicts_with = "band")]
        freq_ghz: Option<f64>,
        /// `LO:HI` in GHz; the whole band when neither this nor --freq-ghz is given.
        #[arg(long, value_parser = parse_range)]
        band: Option<(f64, f64)>,
        /// Per-frequency profile CSV (band mode only).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Spectra from an SG model plus noise.
    Inverse,
    /// Spectra from a water/starch dielectric mixture.
    Mixture,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output dataset directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Generator::Inverse)]
    pub generator: Generator,
    #[arg(long, default_value_t = 50)]
    pub n_per_type: usize,
    /// Comma-separated potato types; all five when omitted.
    #[arg(long, value_delimiter = ',')]
    pub types: Vec<String>,
    /// `LO:HI` SG range applied to every type.
    #[arg(long, value_parser = parse_range)]
    pub sg_range: Option<(f64, f64)>,
    #[arg(long)]
    pub noise_eps_std: Option<f64>,
    #[arg(long)]
    pub bio_resid_std: Option<f64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Generating model for the inverse generator; the published calibration when omitted.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{s:?} is not a finite number"))
}

pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if lo > hi {
        return Err(format!("{lo} > {hi}"));
    }
    Ok((lo, hi))
}

pub fn parse_grid(s: &str) -> Result<FrequencyGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let (lo, hi, n) = match parts.as_slice() {
        [n] => (BAND_LO_GHZ, BAND_HI_GHZ, *n),
        [lo, hi, n] => (parse_f64(lo)?, parse_f64(hi)?, *n),
        _ => return Err("expected N or LO:HI:N".into()),
    };
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| format!("{n:?} is not a point count"))?;
    FrequencyGrid::uniform(lo, hi, n).map_err(|e| e.to_string())
}
