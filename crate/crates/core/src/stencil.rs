//! CFAR stencil geometry.
//!
//! A stencil is a PUT block surrounded by a guard ring and then a boundary
//! ring. The boundary ring supplies the `N` reference pixels; the `M` PUT
//! pixels are averaged into the test statistic. Offsets are `(row, col)`
//! relative to the stencil center, rows growing downward.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::{Error, Grid, Result};

/// Ring a stencil cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Put,
    Guard,
    Boundary,
}

/// PUT block, guard ring and boundary ring sizes, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StencilSpec {
    put_rows: usize,
    put_cols: usize,
    guard: usize,
    boundary: usize,
}

impl StencilSpec {
    /// PUT dimensions must be odd so the stencil has a single center pixel.
    pub fn new(put_rows: usize, put_cols: usize, guard: usize, boundary: usize) -> Result<Self> {
        if put_rows == 0 || put_cols == 0 || put_rows.is_multiple_of(2) || put_cols.is_multiple_of(2) {
            return Err(Error::InvalidStencil(format!(
                "PUT block {put_rows}x{put_cols} must have odd positive sides"
            )));
        }
        if boundary == 0 {
            return Err(Error::InvalidStencil("boundary ring must be at least 1 pixel".into()));
        }
        Ok(StencilSpec {
            put_rows,
            put_cols,
            guard,
            boundary,
        })
    }

    pub fn put_rows(&self) -> usize {
        self.put_rows
    }

    pub fn put_cols(&self) -> usize {
        self.put_cols
    }

    pub fn guard_width(&self) -> usize {
        self.guard
    }

    pub fn boundary_width(&self) -> usize {
        self.boundary
    }

    /// Total stencil height.
    pub fn rows(&self) -> usize {
        self.put_rows + 2 * (self.guard + self.boundary)
    }

    pub fn cols(&self) -> usize {
        self.put_cols + 2 * (self.guard + self.boundary)
    }

    pub fn area(&self) -> usize {
        self.rows() * self.cols()
    }

    /// Half extents: the stencil covers `center ± half` on each axis.
    pub fn half(&self) -> (usize, usize) {
        (self.rows() / 2, self.cols() / 2)
    }

    /// Number of PUT pixels `M`.
    pub fn put_count(&self) -> usize {
        self.put_rows * self.put_cols
    }

    /// Number of boundary pixels `N`: stencil area minus the PUT+guard block.
    pub fn boundary_count(&self) -> usize {
        let inner_r = self.put_rows + 2 * self.guard;
        let inner_c = self.put_cols + 2 * self.guard;
        self.area() - inner_r * inner_c
    }

    /// Classifies stencil cell `(r, c)` given in stencil coordinates
    /// (`0..rows`, `0..cols`).
    pub fn cell(&self, r: usize, c: usize) -> Cell {
        let (hr, hc) = self.half();
        let dr = r.abs_diff(hr);
        let dc = c.abs_diff(hc);
        let (pr, pc) = (self.put_rows / 2, self.put_cols / 2);
        if dr <= pr && dc <= pc {
            Cell::Put
        } else if dr <= pr + self.guard && dc <= pc + self.guard {
            Cell::Guard
        } else {
            Cell::Boundary
        }
    }

    fn offsets_of(&self, kind: Cell) -> Vec<(isize, isize)> {
        let (hr, hc) = self.half();
        let mut out = Vec::new();
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                if self.cell(r, c) == kind {
                    out.push((r as isize - hr as isize, c as isize - hc as isize));
                }
            }
        }
        out
    }

    /// Offsets of the PUT pixels, row-major.
    pub fn put_offsets(&self) -> Vec<(isize, isize)> {
        self.offsets_of(Cell::Put)
    }

    /// Offsets of the boundary-ring pixels, row-major.
    pub fn boundary_offsets(&self) -> Vec<(isize, isize)> {
        self.offsets_of(Cell::Boundary)
    }

    pub fn guard_offsets(&self) -> Vec<(isize, isize)> {
        self.offsets_of(Cell::Guard)
    }

    /// Builds `f_T`, `f_B` and the two low-pass kernels `f_B` decomposes into.
    pub fn build_kernels(&self) -> KernelSet {
        let (rows, cols) = (self.rows(), self.cols());
        let m = self.put_count() as f64;
        let n = self.boundary_count() as f64;
        let mut put = Array2::zeros((rows, cols));
        let mut boundary = Array2::zeros((rows, cols));
        let mut put_guard = Array2::zeros((rows, cols));
        for r in 0..rows {
            for c in 0..cols {
                match self.cell(r, c) {
                    Cell::Put => {
                        put[[r, c]] = 1.0 / m;
                        put_guard[[r, c]] = 1.0;
                    }
                    Cell::Guard => put_guard[[r, c]] = 1.0,
                    Cell::Boundary => boundary[[r, c]] = 1.0 / n,
                }
            }
        }
        KernelSet {
            put,
            boundary,
            whole: Array2::ones((rows, cols)),
            put_guard,
            boundary_count: self.boundary_count(),
        }
    }

    /// Splits the boundary ring into top, left, bottom and right windows.
    ///
    /// Top and bottom own the full-width bands, corners included; left and
    /// right own the side strips between them.
    pub fn split_windows(&self) -> SplitWindows {
        let (rows, cols) = (self.rows(), self.cols());
        let b = self.boundary;
        let (hr, hc) = self.half();
        let at = |r: usize, c: usize| (r as isize - hr as isize, c as isize - hc as isize);
        let mut w = SplitWindows::default();
        for r in 0..rows {
            for c in 0..cols {
                if self.cell(r, c) != Cell::Boundary {
                    continue;
                }
                if r < b {
                    w.top.push(at(r, c));
                } else if r >= rows - b {
                    w.bottom.push(at(r, c));
                } else if c < b {
                    w.left.push(at(r, c));
                } else if c >= cols - b {
                    w.right.push(at(r, c));
                }
            }
        }
        w
    }

    /// Averaging kernel over `offsets`, laid out like the stencil.
    pub fn window_kernel(&self, offsets: &[(isize, isize)]) -> Grid {
        let (hr, hc) = self.half();
        let mut k = Array2::zeros((self.rows(), self.cols()));
        let w = 1.0 / offsets.len() as f64;
        for &(dr, dc) in offsets {
            k[[(hr as isize + dr) as usize, (hc as isize + dc) as usize]] = w;
        }
        k
    }
}

impl fmt::Display for StencilSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "put {}x{} guard {} boundary {}",
            self.put_rows, self.put_cols, self.guard, self.boundary
        )
    }
}

/// Parses a PUT block given as `RxC`, e.g. `3x3`.
pub fn parse_block(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidStencil(format!("expected RxC, got {s:?}"));
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        r.trim().parse().map_err(|_| bad())?,
        c.trim().parse().map_err(|_| bad())?,
    ))
}

/// Stencil kernels, all with the stencil's dimensions and laid out as the
/// stencil appears on the image.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    /// `f_T`: 1/M on the PUT block.
    pub put: Grid,
    /// `f_B`: 1/N on the boundary ring.
    pub boundary: Grid,
    /// Ones over the whole stencil.
    pub whole: Grid,
    /// Ones over the PUT+guard block.
    pub put_guard: Grid,
    pub boundary_count: usize,
}

/// The four boundary windows used by SOCA/GOCA, as stencil offsets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitWindows {
    pub top: Vec<(isize, isize)>,
    pub left: Vec<(isize, isize)>,
    pub bottom: Vec<(isize, isize)>,
    pub right: Vec<(isize, isize)>,
}

impl SplitWindows {
    /// Windows in the order top, left, bottom, right.
    pub fn all(&self) -> [&[(isize, isize)]; 4] {
        [&self.top, &self.left, &self.bottom, &self.right]
    }

    pub fn counts(&self) -> [usize; 4] {
        self.all().map(|w| w.len())
    }

    pub fn equal_sizes(&self) -> bool {
        let c = self.counts();
        c.iter().all(|&x| x == c[0])
    }
}

impl FromStr for StencilSpec {
    type Err = Error;

    /// `RxC/guard/boundary`, e.g. `1x1/2/2`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('/').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidStencil(format!(
                "expected RxC/guard/boundary, got {s:?}"
            )));
        }
        let (r, c) = parse_block(parts[0])?;
        let num = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidStencil(format!("bad ring width {p:?}")))
        };
        StencilSpec::new(r, c, num(parts[1])?, num(parts[2])?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn spec(p: usize, g: usize, b: usize) -> StencilSpec {
        StencilSpec::new(p, p, g, b).unwrap()
    }

    #[test]
    fn boundary_counts() {
        assert_eq!(spec(3, 1, 2).boundary_count(), 56);
        assert_eq!(spec(1, 2, 2).boundary_count(), 56);
        assert_eq!(spec(1, 1, 1).boundary_count(), 16);
        assert_eq!(spec(1, 0, 1).boundary_count(), 8);
        assert_eq!(spec(3, 1, 2).rows(), 9);
    }

    #[test]
    fn rejects_even_or_empty() {
        assert!(StencilSpec::new(2, 1, 1, 1).is_err());
        assert!(StencilSpec::new(1, 1, 1, 0).is_err());
        assert!(StencilSpec::new(0, 1, 1, 1).is_err());
    }

    #[test]
    fn boundary_kernel_matches_five_by_five_example() {
        let k = spec(1, 1, 1).build_kernels();
        let s = 1.0 / 16.0;
        let expected = ndarray::array![
            [s, s, s, s, s],
            [s, 0., 0., 0., s],
            [s, 0., 0., 0., s],
            [s, 0., 0., 0., s],
            [s, s, s, s, s],
        ];
        assert_eq!(k.boundary, expected);
    }

    #[test]
    fn three_by_three_ring() {
        let k = spec(1, 0, 1).build_kernels();
        for ((r, c), v) in k.boundary.indexed_iter() {
            let want = if (r, c) == (1, 1) { 0.0 } else { 0.125 };
            assert_eq!(*v, want);
        }
    }

    #[test]
    fn kernels_normalised_and_decomposed() {
        for s in [spec(1, 0, 1), spec(3, 1, 2), StencilSpec::new(3, 5, 2, 3).unwrap()] {
            let k = s.build_kernels();
            assert!((k.put.sum() - 1.0).abs() < 1e-12);
            assert!((k.boundary.sum() - 1.0).abs() < 1e-12);
            let n = s.boundary_count() as f64;
            let diff = (&k.whole - &k.put_guard) / n;
            assert_eq!(diff, k.boundary);
            assert_eq!(k.boundary.iter().filter(|v| **v != 0.0).count(), s.boundary_count());
            for (p, b) in k.put.iter().zip(k.boundary.iter()) {
                assert!(*p == 0.0 || *b == 0.0);
            }
        }
    }

    #[test]
    fn split_windows_three_by_three() {
        let w = spec(1, 0, 1).split_windows();
        assert_eq!(w.counts(), [3, 1, 3, 1]);
    }

    #[test]
    fn split_windows_nine_by_nine() {
        // Enumerated by hand: 2 full rows of 9 on top/bottom, 5 rows x 2 cols per side.
        let w = spec(3, 1, 2).split_windows();
        assert_eq!(w.counts(), [18, 10, 18, 10]);
        let ring: HashSet<_> = spec(3, 1, 2).boundary_offsets().into_iter().collect();
        let mut seen = HashSet::new();
        for win in w.all() {
            for o in win {
                assert!(ring.contains(o));
                assert!(seen.insert(*o), "overlap at {o:?}");
            }
        }
        assert_eq!(seen.len(), 56);
    }

    #[test]
    fn parses_specs() {
        assert_eq!(parse_block("3x5").unwrap(), (3, 5));
        assert!(parse_block("3by5").is_err());
        let s: StencilSpec = "1x1/2/2".parse().unwrap();
        assert_eq!(s.boundary_count(), 56);
    }
}
