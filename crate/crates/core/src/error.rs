use thiserror::Error;

/// Errors raised by the grid pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid axis: {0}")]
    InvalidAxis(String),
    #[error("axis index {index} out of range for a {dims}-dimensional grid")]
    AxisOutOfRange { index: usize, dims: usize },
    #[error("axis {index} has {count} points, at least {required} are needed")]
    AxisTooShort { index: usize, count: usize, required: usize },
    #[error("axis index {0} listed more than once")]
    RepeatedAxis(usize),
    #[error("grid shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("point {0:?} lies outside the grid hull")]
    OutsideHull(Vec<f64>),
    #[error("invalid oscillator parameters: {0}")]
    InvalidParams(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("Fock level {0} exceeds the supported maximum of {max}", max = crate::states::MAX_FOCK)]
    FockTooHigh(u32),
    #[error("imaginary residue {residue:.3e} exceeds {threshold:.1e}: {context}")]
    ImaginaryResidue {
        residue: f64,
        threshold: f64,
        context: String,
    },
    #[error("tomogram undefined at μ=ν=0 grid point")]
    DegenerateDirection,
    #[error("phase {0} lies outside [0, π]")]
    PhaseOutOfRange(f64),
    #[error("state is not Gaussian: {0}")]
    NotGaussian(String),
    #[error("normalization drift {drift:.3e} exceeds {limit:.1e}: {context}")]
    Normalization {
        drift: f64,
        limit: f64,
        context: String,
    },
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("prior underflow on grid (value {0:.3e})")]
    PriorUnderflow(f64),
    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
