use std::path::PathBuf;

use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed raster file: {0}")]
    Format(String),
    #[error("payload holds {found} values but the header declares {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("pixel {index} has non-positive power {value}; log is undefined")]
    NonPositivePixel { index: usize, value: f64 },
    #[error("value {0} lies outside the model support")]
    OutOfSupport(f64),
    #[error("numeric routine did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("input is empty")]
    EmptyInput,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("pfa must be in (0,1), got {0}")]
    InvalidPfa(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid stencil: {0}")]
    InvalidStencil(String),
    #[error("no tabulated k value for {0}")]
    NotTabulated(String),
    #[error("background estimate {0} is not positive")]
    NonPositiveBackground(f64),
    #[error("background spread is zero")]
    ZeroSigma,
    #[error("model cdf is exactly 0 or 1 at sample {0}")]
    DegenerateCdf(f64),
    #[error("kernel {kernel_rows}x{kernel_cols} does not fit image {rows}x{cols}")]
    KernelTooLarge {
        kernel_rows: usize,
        kernel_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("image domain {found} does not match the {law} detector law (expects {expected})")]
    DomainMismatch {
        law: &'static str,
        expected: &'static str,
        found: &'static str,
    },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Stream(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_pfa(pfa: f64) -> Result<()> {
    if pfa > 0.0 && pfa < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidPfa(pfa))
    }
}
