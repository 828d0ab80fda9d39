//! Whole-image CFAR execution.
//!
//! Mean-type statistics are neighbourhood filters: the PUT average is the
//! image convolved with `f_T`, the background mean is the image convolved
//! with `f_B`, and the background variance follows from `f_B ⊛ I²`. The
//! filters can run in the spatial domain or through the FFT; both give the
//! same maps to round-off. OS detection has no filter form and runs as a
//! direct sliding rank.
//!
//! Only pixels whose whole stencil lies inside the image are evaluated;
//! elsewhere the statistic and threshold are NaN and the mask is 0, unless
//! reflective padding is requested.

mod convolve;
mod fft;
mod io;
mod roi;

pub use convolve::{convolve_spatial, flip, valid_region, ValidRegion};
pub use fft::{convolve_fft, FftConvolver};
pub use io::{load_mask, read_mask, store_mask, write_mask, write_roi_csv, ROI_CSV_HEADER};
pub use roi::{extract_rois, Roi, RoiFilter};

use ndarray::{Array2, Axis, Zip};
use rayon::prelude::*;

use crate::detector::{os_rank, DetectorConfig, Law, LogEstimator, Parameterization, Strategy};
use crate::raster::SarImage;
use crate::stencil::{KernelSet, StencilSpec};
use crate::{Error, Grid, Result};

/// Stencil area above which `Auto` switches to the FFT engine.
pub const DEFAULT_CROSSOVER: usize = 225;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineChoice {
    Spatial,
    Fft,
    #[default]
    Auto,
}

impl EngineChoice {
    /// Resolves `Auto` for a stencil of `area` pixels.
    pub fn resolve(self, area: usize, crossover: usize) -> EngineChoice {
        match self {
            EngineChoice::Auto if area > crossover => EngineChoice::Fft,
            EngineChoice::Auto => EngineChoice::Spatial,
            e => e,
        }
    }
}

impl std::str::FromStr for EngineChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spatial" => Ok(EngineChoice::Spatial),
            "fft" => Ok(EngineChoice::Fft),
            "auto" => Ok(EngineChoice::Auto),
            other => Err(Error::InvalidParameter(format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// Border pixels are not evaluated.
    #[default]
    None,
    /// Mirror the image (without repeating the edge) so every pixel is
    /// evaluated.
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions {
    pub choice: EngineChoice,
    pub crossover: usize,
    /// Worker threads; `None` uses rayon's global pool.
    pub threads: Option<usize>,
    pub padding: Padding,
    pub rois: RoiFilter,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            choice: EngineChoice::Auto,
            crossover: DEFAULT_CROSSOVER,
            threads: None,
            padding: Padding::None,
            rois: RoiFilter::default(),
        }
    }
}

impl From<EngineChoice> for EngineOptions {
    fn from(choice: EngineChoice) -> Self {
        EngineOptions {
            choice,
            ..EngineOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// The engine actually used (never `Auto`).
    pub engine: EngineChoice,
    pub alpha: f64,
    /// Pixels whose variance came out negative or at round-off level and
    /// was set to zero.
    pub clamped_variance: usize,
    /// Valid pixels left undecided because the background level was not
    /// positive or the spread was zero.
    pub degenerate: usize,
}

#[derive(Debug, Clone)]
pub struct DetectionMap {
    pub statistic: Grid,
    /// α at every evaluated pixel, NaN elsewhere.
    pub threshold: Grid,
    pub mask: Array2<bool>,
    pub valid_region: ValidRegion,
    pub rois: Vec<Roi>,
    pub diagnostics: Diagnostics,
}

impl DetectionMap {
    pub fn detections(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }
}

/// Convolution backend over one image. Kernels are given in stencil layout
/// and flipped here, so every output is a windowed weighted sum.
enum Filter<'a> {
    Spatial(&'a Grid),
    Fft(&'a Grid, FftConvolver),
}

impl<'a> Filter<'a> {
    fn new(image: &'a Grid, kernel_dim: (usize, usize), engine: EngineChoice) -> Result<Self> {
        Ok(match engine {
            EngineChoice::Fft => Filter::Fft(image, FftConvolver::new(image, kernel_dim)?),
            _ => {
                valid_region(image.dim(), kernel_dim)?;
                Filter::Spatial(image)
            }
        })
    }

    fn window(&self, stencil_kernel: &Grid) -> Result<Grid> {
        let k = flip(stencil_kernel);
        match self {
            Filter::Spatial(img) => convolve_spatial(img, &k),
            // A single tap is a scaled shift; doing it directly keeps small
            // pixels exact instead of inheriting the transform's round-off.
            Filter::Fft(img, _) if k.iter().filter(|w| **w != 0.0).count() == 1 => convolve_spatial(img, &k),
            Filter::Fft(_, c) => c.convolve(&k),
        }
    }
}

/// Relative level below which a computed variance is treated as round-off.
const VARIANCE_FLOOR: f64 = 1e-12;

/// Boundary-ring mean and spread maps.
#[derive(Debug, Clone)]
pub struct LocalStats {
    pub mean: Grid,
    pub sigma: Grid,
    pub clamped: usize,
}

/// `μ = f_B ⊛ I` and `σ = √(f_B ⊛ I² − μ²)`, with negative or round-off
/// variances set to zero and counted.
pub fn local_stats(image: &Grid, kernels: &KernelSet, engine: EngineChoice) -> Result<LocalStats> {
    let engine = engine.resolve(kernels.whole.len(), DEFAULT_CROSSOVER);
    let dim = kernels.boundary.dim();
    let mean = Filter::new(image, dim, engine)?.window(&kernels.boundary)?;
    let squared = image.mapv(|x| x * x);
    let second = Filter::new(&squared, dim, engine)?.window(&kernels.boundary)?;
    let (sigma, clamped) = spread(&mean, &second);
    Ok(LocalStats { mean, sigma, clamped })
}

fn spread(mean: &Grid, second: &Grid) -> (Grid, usize) {
    let mut clamped = 0;
    let sigma = Zip::from(mean).and(second).map_collect(|&m, &s| {
        let var = s - m * m;
        if var.is_nan() {
            f64::NAN
        } else if var <= VARIANCE_FLOOR * s.abs() {
            clamped += 1;
            0.0
        } else {
            var.sqrt()
        }
    });
    (sigma, clamped)
}

/// Runs `config` over `image` with default options and the given engine.
pub fn run_detection(
    image: &SarImage,
    stencil: &StencilSpec,
    config: &DetectorConfig,
    engine: EngineChoice,
) -> Result<DetectionMap> {
    run_detection_with(image, stencil, config, &EngineOptions::from(engine))
}

pub fn run_detection_with(
    image: &SarImage,
    stencil: &StencilSpec,
    config: &DetectorConfig,
    options: &EngineOptions,
) -> Result<DetectionMap> {
    config.validate()?;
    let expected = config.law.domain();
    let grid = match image.real() {
        Some(g) if image.domain() == expected => g,
        _ => {
            return Err(Error::DomainMismatch {
                law: config.law.name(),
                expected: expected.tag(),
                found: image.domain().tag(),
            })
        }
    };
    match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(|| detect_grid(grid, stencil, config, options)),
        None => detect_grid(grid, stencil, config, options),
    }
}

fn detect_grid(
    grid: &Grid,
    stencil: &StencilSpec,
    config: &DetectorConfig,
    options: &EngineOptions,
) -> Result<DetectionMap> {
    let (rows, cols) = grid.dim();
    let (hr, hc) = stencil.half();
    let alpha = config.solve_alpha(stencil)?;
    let engine = options.choice.resolve(stencil.area(), options.crossover);

    let (statistic, valid, clamped, degenerate) = match options.padding {
        Padding::None => {
            let (s, cl, dg) = statistic_map(grid, stencil, config, engine)?;
            (s, valid_region((rows, cols), (stencil.rows(), stencil.cols()))?, cl, dg)
        }
        Padding::Reflect => {
            let padded = reflect_pad(grid, hr, hc)?;
            let (s, cl, dg) = statistic_map(&padded, stencil, config, engine)?;
            let s = s.slice(ndarray::s![hr..hr + rows, hc..hc + cols]).to_owned();
            let v = ValidRegion {
                row_start: 0,
                row_end: rows,
                col_start: 0,
                col_end: cols,
            };
            (s, v, cl, dg)
        }
    };

    let threshold = Array2::from_shape_fn((rows, cols), |(r, c)| {
        if valid.contains(r, c) {
            alpha
        } else {
            f64::NAN
        }
    });
    let mask = statistic.mapv(|s| s > alpha);
    let rois = extract_rois(&mask, &statistic, &options.rois);
    Ok(DetectionMap {
        statistic,
        threshold,
        mask,
        valid_region: valid,
        rois,
        diagnostics: Diagnostics {
            engine,
            alpha,
            clamped_variance: clamped,
            degenerate,
        },
    })
}

/// Mirror padding without edge repetition (`x[-1] = x[1]`).
fn reflect_pad(grid: &Grid, pr: usize, pc: usize) -> Result<Grid> {
    let (rows, cols) = grid.dim();
    if pr >= rows || pc >= cols {
        return Err(Error::KernelTooLarge {
            kernel_rows: 2 * pr + 1,
            kernel_cols: 2 * pc + 1,
            rows,
            cols,
        });
    }
    let mirror = |i: isize, n: usize| -> usize {
        let n = n as isize;
        let j = if i < 0 { -i } else if i >= n { 2 * (n - 1) - i } else { i };
        j as usize
    };
    Ok(Array2::from_shape_fn((rows + 2 * pr, cols + 2 * pc), |(r, c)| {
        grid[[
            mirror(r as isize - pr as isize, rows),
            mirror(c as isize - pc as isize, cols),
        ]]
    }))
}

/// Statistic map plus (clamped-variance, degenerate) counts.
fn statistic_map(
    grid: &Grid,
    stencil: &StencilSpec,
    config: &DetectorConfig,
    engine: EngineChoice,
) -> Result<(Grid, usize, usize)> {
    let kernels = stencil.build_kernels();
    let dim = kernels.whole.dim();

    if config.parameterization == Parameterization::Two {
        let f = Filter::new(grid, dim, engine)?;
        let x = f.window(&kernels.put)?;
        let mu = f.window(&kernels.boundary)?;
        drop(f);
        let squared = grid.mapv(|v| v * v);
        let second = Filter::new(&squared, dim, engine)?.window(&kernels.boundary)?;
        let (sigma, clamped) = spread(&mu, &second);
        let root_m = (stencil.put_count() as f64).sqrt();
        let mut degenerate = 0;
        let stat = Zip::from(&x).and(&mu).and(&sigma).map_collect(|&x, &m, &s| {
            if s > 0.0 {
                (x - m) / (s / root_m)
            } else {
                if !s.is_nan() {
                    degenerate += 1;
                }
                f64::NAN
            }
        });
        return Ok((stat, clamped, degenerate));
    }

    let log_of_mean = config.law == Law::Log && config.log_estimator == LogEstimator::LogOfMean;
    let exp_grid;
    let base = if log_of_mean {
        exp_grid = grid.mapv(f64::exp);
        &exp_grid
    } else {
        grid
    };
    let f = Filter::new(base, dim, engine)?;
    let to_law = |m: Grid| if log_of_mean { m.mapv(f64::ln) } else { m };
    let x = to_law(f.window(&kernels.put)?);
    let background = match config.strategy {
        Strategy::Ca => to_law(f.window(&kernels.boundary)?),
        Strategy::Soca | Strategy::Goca => {
            let split = stencil.split_windows();
            let maps = split
                .all()
                .iter()
                .map(|w| f.window(&stencil.window_kernel(w)).map(&to_law))
                .collect::<Result<Vec<_>>>()?;
            let pick: fn(f64, f64) -> f64 = if config.strategy == Strategy::Soca { f64::min } else { f64::max };
            let mut out = maps[0].clone();
            for m in &maps[1..] {
                Zip::from(&mut out).and(m).for_each(|o, &v| *o = if o.is_nan() || v.is_nan() { f64::NAN } else { pick(*o, v) });
            }
            out
        }
        Strategy::Os { q } => sliding_rank(grid, stencil, q)?,
    };

    let mut degenerate = 0;
    let stat = Zip::from(&x).and(&background).map_collect(|&x, &b| {
        if b.is_nan() || x.is_nan() {
            f64::NAN
        } else if config.law == Law::Log {
            x - b
        } else if b > 0.0 {
            x / b
        } else {
            degenerate += 1;
            f64::NAN
        }
    });
    Ok((stat, 0, degenerate))
}

/// The `⌈q·N⌉`-th smallest boundary pixel at every valid position.
fn sliding_rank(grid: &Grid, stencil: &StencilSpec, q: f64) -> Result<Grid> {
    let (rows, cols) = grid.dim();
    let valid = valid_region((rows, cols), (stencil.rows(), stencil.cols()))?;
    let offsets = stencil.boundary_offsets();
    let k = os_rank(offsets.len(), q) - 1;
    let mut out = Array2::from_elem((rows, cols), f64::NAN);
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .filter(|(r, _)| (valid.row_start..valid.row_end).contains(r))
        .for_each(|(r, mut row)| {
            let mut buf = vec![0.0; offsets.len()];
            for c in valid.col_start..valid.col_end {
                for (b, &(dr, dc)) in buf.iter_mut().zip(&offsets) {
                    *b = grid[[(r as isize + dr) as usize, (c as isize + dc) as usize]];
                }
                let (_, v, _) = buf.select_nth_unstable_by(k, f64::total_cmp);
                row[c] = *v;
            }
        });
    Ok(out)
}
