//! Spatial-domain 2-D convolution.

use ndarray::{s, Array2, Axis};
use rayon::prelude::*;

use crate::{Error, Grid, Result};

/// Half-open row and column ranges of output pixels whose kernel support
/// lies entirely inside the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidRegion {
    pub row_start: usize,
    pub row_end: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl ValidRegion {
    pub fn contains(&self, r: usize, c: usize) -> bool {
        (self.row_start..self.row_end).contains(&r) && (self.col_start..self.col_end).contains(&c)
    }

    pub fn rows(&self) -> usize {
        self.row_end - self.row_start
    }

    pub fn cols(&self) -> usize {
        self.col_end - self.col_start
    }

    pub fn count(&self) -> usize {
        self.rows() * self.cols()
    }
}

/// Valid region for a `kernel`-shaped window centred at `(k_rows/2, k_cols/2)`.
pub fn valid_region(image: (usize, usize), kernel: (usize, usize)) -> Result<ValidRegion> {
    let ((rows, cols), (kr, kc)) = (image, kernel);
    if kr == 0 || kc == 0 || kr > rows || kc > cols {
        return Err(Error::KernelTooLarge {
            kernel_rows: kr,
            kernel_cols: kc,
            rows,
            cols,
        });
    }
    let (hr, hc) = (kr / 2, kc / 2);
    Ok(ValidRegion {
        row_start: kr - 1 - hr,
        row_end: rows - hr,
        col_start: kc - 1 - hc,
        col_end: cols - hc,
    })
}

/// Kernel rotated by 180°, turning convolution into correlation and back.
pub fn flip(kernel: &Grid) -> Grid {
    kernel.slice(s![..;-1, ..;-1]).to_owned()
}

/// `out(r, c) = Σ k(i, j) · I(r + hr - i, c + hc - j)` on the valid
/// region, NaN elsewhere. Zero taps are skipped and the remaining taps are
/// accumulated in a fixed order, so the result does not depend on how rows
/// are scheduled across threads.
pub fn convolve_spatial(image: &Grid, kernel: &Grid) -> Result<Grid> {
    let (rows, cols) = image.dim();
    let valid = valid_region((rows, cols), kernel.dim())?;
    let (kr, kc) = kernel.dim();
    let (hr, hc) = (kr / 2, kc / 2);
    // Correlation taps: out(r, c) += w · I(r + dr, c + dc).
    let mut taps = Vec::new();
    for i in 0..kr {
        for j in 0..kc {
            let w = kernel[[i, j]];
            if w != 0.0 {
                taps.push((hr as isize - i as isize, hc as isize - j as isize, w));
            }
        }
    }
    taps.sort_by_key(|&(dr, dc, _)| (dr, dc));
    let mut out = Array2::from_elem((rows, cols), f64::NAN);
    let (c0, c1) = (valid.col_start, valid.col_end);
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .filter(|(r, _)| valid.contains(*r, c0))
        .for_each(|(r, mut row)| {
            let mut acc = vec![0.0; c1 - c0];
            for &(dr, dc, w) in &taps {
                let src = image.row((r as isize + dr) as usize);
                let start = (c0 as isize + dc) as usize;
                for (a, &x) in acc.iter_mut().zip(src.slice(s![start..start + (c1 - c0)]).iter()) {
                    *a += w * x;
                }
            }
            row.slice_mut(s![c0..c1]).assign(&ndarray::ArrayView1::from(&acc));
        });
    Ok(out)
}
