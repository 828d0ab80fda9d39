//! MASK and ROI CSV formats.
//!
//! A MASK file is `MASK\n<width> <height>\n` followed by `width·height`
//! row-major bytes, each 0 or 1.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use super::Roi;
use crate::{Error, Result};

pub fn write_mask<W: Write>(mask: &Array2<bool>, mut out: W) -> Result<()> {
    let (h, w) = mask.dim();
    write!(out, "MASK\n{w} {h}\n")?;
    let bytes: Vec<u8> = mask.iter().map(|&b| b as u8).collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

pub fn read_mask<R: BufRead>(mut input: R) -> Result<Array2<bool>> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    if line.trim_end() != "MASK" {
        return Err(Error::Format(format!("expected MASK magic, got {:?}", line.trim_end())));
    }
    line.clear();
    input.read_line(&mut line)?;
    let dims: Vec<usize> = line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Format(format!("bad MASK dimensions {line:?}"))))
        .collect::<Result<_>>()?;
    let [w, h] = dims[..] else {
        return Err(Error::Format(format!("bad MASK dimensions {line:?}")));
    };
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != w * h {
        return Err(Error::SizeMismatch {
            expected: w * h,
            found: bytes.len(),
        });
    }
    if let Some(b) = bytes.iter().find(|b| **b > 1) {
        return Err(Error::Format(format!("mask byte {b} is neither 0 nor 1")));
    }
    Ok(Array2::from_shape_vec((h, w), bytes.into_iter().map(|b| b == 1).collect())
        .expect("length checked"))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn store_mask(mask: &Array2<bool>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_mask(mask, BufWriter::new(File::create(path).map_err(io_err(path))?))
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<Array2<bool>> {
    let path = path.as_ref();
    read_mask(BufReader::new(File::open(path).map_err(io_err(path))?))
}

pub const ROI_CSV_HEADER: &str = "id,row,col,pixel_count,peak,mean";

pub fn write_roi_csv<W: Write>(rois: &[Roi], mut out: W) -> Result<()> {
    writeln!(out, "{ROI_CSV_HEADER}")?;
    for r in rois {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.id, r.centroid.0, r.centroid.1, r.pixel_count, r.peak, r.mean
        )?;
    }
    out.flush()?;
    Ok(())
}
