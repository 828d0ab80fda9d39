//! Sliding-window CFAR detection for single-channel SAR rasters.
//!
//! The crate is organised the way a detection chain runs:
//!
//! * [`raster`] holds images in complex, magnitude, power or log-power form
//!   and reads/writes the `F32R` file format.
//! * [`stencil`] describes the PUT block, guard ring and boundary ring and
//!   turns them into convolution kernels.
//! * [`models`] provides clutter distributions, parameter fitting, threshold
//!   scaling factors and goodness-of-fit model selection.
//! * [`detector`] holds the per-pixel CA/SOCA/GOCA/OS and two-parameter
//!   decision rules, plus the quadratic-discriminant view of CFAR.
//! * [`engine`] runs a detector over a whole image, in the spatial or the
//!   frequency domain, and extracts regions of interest.
//! * [`loss`] is CFAR-loss bookkeeping.
//! * [`simulator`] draws ground-truthed multiplicative clutter scenes.
//! * [`gofbench`] drives calibration and ROC experiments.
//! * [`cli`] is the command-line front end used by the `cfarkit` binary.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod detector;
pub mod engine;
pub mod error;
pub mod gofbench;
pub mod loss;
pub mod models;
pub mod numeric;
pub mod raster;
pub mod rng;
pub mod simulator;
pub mod stencil;

pub use error::{Error, Result};

/// Row-major real-valued grid; `grid[[row, col]]`.
pub type Grid = ndarray::Array2<f64>;
