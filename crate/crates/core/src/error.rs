use std::io;
use std::path::PathBuf;

use crate::types::PotatoType;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("frequency grids do not match")]
    GridMismatch,

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("need at least 2 replicates, got {got}")]
    InsufficientReplicates { got: usize },

    #[error("invalid potato type label {0:?}")]
    InvalidPotatoType(String),

    #[error("invalid sample {id:?}: {reason}")]
    InvalidSample { id: String, reason: String },

    #[error("duplicate sample id {0:?}")]
    DuplicateSampleId(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("non-positive buoyancy: w_air ({w_air}) - w_uww ({w_uww}) must be > 0")]
    NonPositiveBuoyancy { w_air: f64, w_uww: f64 },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate design: regressor has zero variance")]
    DegenerateDesign,

    #[error("at frequency index {index} ({f_ghz} GHz): {source}")]
    AtFrequency {
        index: usize,
        f_ghz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("imaginary permittivity channel missing")]
    MissingChannel,

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("frequency {f_ghz} GHz outside valid range [{lo}, {hi}] GHz")]
    FrequencyOutOfRange { f_ghz: f64, lo: f64, hi: f64 },

    #[error("rank deficient: need 5 distinct frequencies, got {distinct}")]
    RankDeficient { distinct: usize },

    #[error("invalid permittivity {0}: dielectric constant must be finite and > 1")]
    InvalidPermittivity(f64),

    #[error("sample {id:?}: {source}")]
    ForSample {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed model file{}: {reason}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    MalformedModelFile { line: Option<usize>, reason: String },

    #[error("unsupported model format version {0:?}")]
    UnsupportedVersion(String),

    #[error("length mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("truth value at index {index} is zero")]
    DivisionByZeroTruth { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("type {ptype}: {available} samples available, {requested} requested")]
    InsufficientSamplesForType {
        ptype: PotatoType,
        available: usize,
        requested: usize,
    },

    #[error("{}: line {line}, column {column:?}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        column: String,
        reason: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn at_frequency(index: usize, f_ghz: f64, source: Error) -> Self {
        Error::AtFrequency {
            index,
            f_ghz,
            source: Box::new(source),
        }
    }

    pub(crate) fn for_sample(id: &str, source: Error) -> Self {
        Error::ForSample {
            id: id.to_owned(),
            source: Box::new(source),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the failure originated in the filesystem rather than in the data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::AtFrequency { source, .. } | Error::ForSample { source, .. } => source.is_io(),
            _ => false,
        }
    }

    /// Innermost error, skipping frequency/sample annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtFrequency { source, .. } | Error::ForSample { source, .. } => source.root(),
            other => other,
        }
    }
}
