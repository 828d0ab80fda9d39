//! Region-of-interest extraction from detection masks.

use ndarray::Array2;

use crate::Grid;

/// One connected detection (or a merger of nearby ones).
#[derive(Debug, Clone, PartialEq)]
pub struct Roi {
    pub id: usize,
    /// Mean row and column of the member pixels.
    pub centroid: (f64, f64),
    pub pixel_count: usize,
    /// Inclusive `(row_min, col_min, row_max, col_max)`.
    pub bbox: (usize, usize, usize, usize),
    pub peak: f64,
    pub mean: f64,
}

/// Size and separation constraints applied to connected components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoiFilter {
    pub min_size: usize,
    pub max_size: usize,
    pub min_separation: f64,
}

impl Default for RoiFilter {
    fn default() -> Self {
        RoiFilter {
            min_size: 1,
            max_size: usize::MAX,
            min_separation: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
struct Blob {
    count: usize,
    row_sum: f64,
    col_sum: f64,
    bbox: (usize, usize, usize, usize),
    peak: f64,
    stat_sum: f64,
}

impl Blob {
    fn centroid(&self) -> (f64, f64) {
        (self.row_sum / self.count as f64, self.col_sum / self.count as f64)
    }

    fn absorb(&mut self, o: &Blob) {
        self.count += o.count;
        self.row_sum += o.row_sum;
        self.col_sum += o.col_sum;
        self.bbox = (
            self.bbox.0.min(o.bbox.0),
            self.bbox.1.min(o.bbox.1),
            self.bbox.2.max(o.bbox.2),
            self.bbox.3.max(o.bbox.3),
        );
        self.peak = self.peak.max(o.peak);
        self.stat_sum += o.stat_sum;
    }
}

/// 8-connected components of `mask`, size-filtered, then merged while any
/// two centroids are closer than `min_separation`. Peak and mean are taken
/// from `statistic` over member pixels. ROIs are numbered from 1 in raster
/// order of their first pixel.
pub fn extract_rois(mask: &Array2<bool>, statistic: &Grid, filter: &RoiFilter) -> Vec<Roi> {
    let (rows, cols) = mask.dim();
    let mut label = Array2::<usize>::zeros((rows, cols));
    let mut blobs = Vec::new();
    let mut stack = Vec::new();
    for r0 in 0..rows {
        for c0 in 0..cols {
            if !mask[[r0, c0]] || label[[r0, c0]] != 0 {
                continue;
            }
            let id = blobs.len() + 1;
            label[[r0, c0]] = id;
            stack.push((r0, c0));
            let mut b = Blob {
                count: 0,
                row_sum: 0.0,
                col_sum: 0.0,
                bbox: (r0, c0, r0, c0),
                peak: f64::NEG_INFINITY,
                stat_sum: 0.0,
            };
            while let Some((r, c)) = stack.pop() {
                let s = statistic[[r, c]];
                b.count += 1;
                b.row_sum += r as f64;
                b.col_sum += c as f64;
                b.bbox = (b.bbox.0.min(r), b.bbox.1.min(c), b.bbox.2.max(r), b.bbox.3.max(c));
                b.peak = b.peak.max(s);
                b.stat_sum += s;
                for dr in -1isize..=1 {
                    for dc in -1isize..=1 {
                        let (nr, nc) = (r as isize + dr, c as isize + dc);
                        if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                            continue;
                        }
                        let (nr, nc) = (nr as usize, nc as usize);
                        if mask[[nr, nc]] && label[[nr, nc]] == 0 {
                            label[[nr, nc]] = id;
                            stack.push((nr, nc));
                        }
                    }
                }
            }
            blobs.push(b);
        }
    }
    blobs.retain(|b| b.count >= filter.min_size && b.count <= filter.max_size);

    // Merge until every pair of centroids is at least min_separation apart.
    'outer: loop {
        for i in 0..blobs.len() {
            for j in i + 1..blobs.len() {
                let (a, b) = (blobs[i].centroid(), blobs[j].centroid());
                if (a.0 - b.0).hypot(a.1 - b.1) < filter.min_separation {
                    let other = blobs.remove(j);
                    blobs[i].absorb(&other);
                    continue 'outer;
                }
            }
        }
        break;
    }

    blobs
        .into_iter()
        .enumerate()
        .map(|(i, b)| Roi {
            id: i + 1,
            centroid: b.centroid(),
            pixel_count: b.count,
            bbox: b.bbox,
            peak: b.peak,
            mean: b.stat_sum / b.count as f64,
        })
        .collect()
}
