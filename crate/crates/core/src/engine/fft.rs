//! Frequency-domain 2-D convolution.
//!
//! The image is zero-padded to the full linear-convolution size, so the
//! circular product of spectra equals the linear convolution and no
//! wrap-around reaches the valid region.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::convolve::valid_region;
use crate::{Grid, Result};

/// Row-major complex buffer with 2-D forward/inverse transforms.
struct Plan2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Plan2 {
    fn new(rows: usize, cols: usize) -> Self {
        let mut p = FftPlanner::new();
        Plan2 {
            rows,
            cols,
            row_fwd: p.plan_fft_forward(cols),
            row_inv: p.plan_fft_inverse(cols),
            col_fwd: p.plan_fft_forward(rows),
            col_inv: p.plan_fft_inverse(rows),
        }
    }

    fn run(&self, data: &mut Vec<Complex64>, inverse: bool) {
        let (rf, cf) = if inverse {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };
        data.par_chunks_mut(self.cols).for_each(|row| rf.process(row));
        let mut t = transpose(data, self.rows, self.cols);
        t.par_chunks_mut(self.rows).for_each(|col| cf.process(col));
        *data = transpose(&t, self.cols, self.rows);
    }
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(c, dst)| {
        for (r, d) in dst.iter_mut().enumerate() {
            *d = data[r * cols + c];
        }
    });
    out
}

/// Convolves one image with many kernels of the same shape, reusing the
/// image spectrum.
pub struct FftConvolver {
    plan: Plan2,
    spectrum: Vec<Complex64>,
    image_dim: (usize, usize),
    kernel_dim: (usize, usize),
}

impl FftConvolver {
    pub fn new(image: &Grid, kernel_dim: (usize, usize)) -> Result<Self> {
        valid_region(image.dim(), kernel_dim)?;
        let (rows, cols) = image.dim();
        let (pr, pc) = (rows + kernel_dim.0 - 1, cols + kernel_dim.1 - 1);
        let plan = Plan2::new(pr, pc);
        let mut spectrum = vec![Complex64::default(); pr * pc];
        for ((r, c), &v) in image.indexed_iter() {
            spectrum[r * pc + c] = Complex64::new(v, 0.0);
        }
        plan.run(&mut spectrum, false);
        Ok(FftConvolver {
            plan,
            spectrum,
            image_dim: (rows, cols),
            kernel_dim,
        })
    }

    /// Same contract as [`super::convolve_spatial`].
    pub fn convolve(&self, kernel: &Grid) -> Result<Grid> {
        assert_eq!(kernel.dim(), self.kernel_dim, "kernel shape differs from the plan");
        let (rows, cols) = self.image_dim;
        let valid = valid_region((rows, cols), kernel.dim())?;
        let (pr, pc) = (self.plan.rows, self.plan.cols);
        let mut buf = vec![Complex64::default(); pr * pc];
        for ((r, c), &v) in kernel.indexed_iter() {
            buf[r * pc + c] = Complex64::new(v, 0.0);
        }
        self.plan.run(&mut buf, false);
        buf.par_iter_mut().zip(self.spectrum.par_iter()).for_each(|(k, s)| *k *= s);
        self.plan.run(&mut buf, true);
        let scale = 1.0 / (pr * pc) as f64;
        let (hr, hc) = (kernel.dim().0 / 2, kernel.dim().1 / 2);
        let mut out = Array2::from_elem((rows, cols), f64::NAN);
        for r in valid.row_start..valid.row_end {
            for c in valid.col_start..valid.col_end {
                out[[r, c]] = buf[(r + hr) * pc + c + hc].re * scale;
            }
        }
        Ok(out)
    }

    /// Spectrum of `kernel` on this plan's padded grid.
    pub fn kernel_spectrum(&self, kernel: &Grid) -> Vec<Complex64> {
        let pc = self.plan.cols;
        let mut buf = vec![Complex64::default(); self.plan.rows * pc];
        for ((r, c), &v) in kernel.indexed_iter() {
            buf[r * pc + c] = Complex64::new(v, 0.0);
        }
        self.plan.run(&mut buf, false);
        buf
    }
}

/// One-shot frequency-domain convolution; NaN outside the valid region.
pub fn convolve_fft(image: &Grid, kernel: &Grid) -> Result<Grid> {
    FftConvolver::new(image, kernel.dim())?.convolve(kernel)
}
