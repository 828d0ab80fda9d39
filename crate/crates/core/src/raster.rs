//! SAR rasters in the four pixel domains and the `F32R` file format.
//!
//! Internally the log-power domain is the natural log of power,
//! `L = ln P`. Decibels are only produced for display, see
//! [`SarImage::to_db`].

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;

use crate::{Error, Grid, Result};

/// Pixel domain of a raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Interleaved (I, Q) pairs.
    ComplexIq,
    /// Envelope `A = sqrt(I² + Q²)`.
    Magnitude,
    /// Intensity `P = A²`.
    Power,
    /// `L = ln P`.
    LogPower,
}

impl Domain {
    /// Tag used in the `F32R` header.
    pub fn tag(self) -> &'static str {
        match self {
            Domain::ComplexIq => "ciq",
            Domain::Magnitude => "mag",
            Domain::Power => "pow",
            Domain::LogPower => "logpow",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ciq" => Ok(Domain::ComplexIq),
            "mag" => Ok(Domain::Magnitude),
            "pow" => Ok(Domain::Power),
            "logpow" => Ok(Domain::LogPower),
            other => Err(Error::Format(format!("unknown domain tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Pixels {
    Complex(Array2<Complex64>),
    Real(Grid),
}

/// A single-channel SAR image. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SarImage {
    looks: u32,
    domain: Domain,
    pixels: Pixels,
}

impl SarImage {
    /// Builds a real-valued image. Magnitude and power pixels must be
    /// non-negative; all pixels must be finite.
    pub fn from_real(domain: Domain, looks: u32, pixels: Grid) -> Result<Self> {
        if domain == Domain::ComplexIq {
            return Err(Error::InvalidParameter(
                "complex images are built with from_complex".into(),
            ));
        }
        check_dims(pixels.nrows(), pixels.ncols(), looks)?;
        if let Some(v) = pixels.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite pixel {v}")));
        }
        if matches!(domain, Domain::Magnitude | Domain::Power) {
            if let Some(v) = pixels.iter().find(|v| **v < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{domain} pixel {v} is negative"
                )));
            }
        }
        Ok(SarImage {
            looks,
            domain,
            pixels: Pixels::Real(pixels),
        })
    }

    pub fn from_complex(looks: u32, pixels: Array2<Complex64>) -> Result<Self> {
        check_dims(pixels.nrows(), pixels.ncols(), looks)?;
        if pixels.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite complex pixel".into()));
        }
        Ok(SarImage {
            looks,
            domain: Domain::ComplexIq,
            pixels: Pixels::Complex(pixels),
        })
    }

    pub fn width(&self) -> usize {
        match &self.pixels {
            Pixels::Complex(p) => p.ncols(),
            Pixels::Real(p) => p.ncols(),
        }
    }

    pub fn height(&self) -> usize {
        match &self.pixels {
            Pixels::Complex(p) => p.nrows(),
            Pixels::Real(p) => p.nrows(),
        }
    }

    pub fn looks(&self) -> u32 {
        self.looks
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Real pixel grid, `None` for complex images.
    pub fn real(&self) -> Option<&Grid> {
        match &self.pixels {
            Pixels::Real(p) => Some(p),
            Pixels::Complex(_) => None,
        }
    }

    pub fn complex(&self) -> Option<&Array2<Complex64>> {
        match &self.pixels {
            Pixels::Complex(p) => Some(p),
            Pixels::Real(_) => None,
        }
    }

    /// Consumes the image and returns its real grid.
    pub fn into_real(self) -> Option<Grid> {
        match self.pixels {
            Pixels::Real(p) => Some(p),
            Pixels::Complex(_) => None,
        }
    }

    fn with_real(&self, domain: Domain, pixels: Grid) -> SarImage {
        SarImage {
            looks: self.looks,
            domain,
            pixels: Pixels::Real(pixels),
        }
    }

    /// Envelope image: `sqrt(I²+Q²)`, `sqrt(P)` or `sqrt(exp(L))`.
    pub fn to_magnitude(&self) -> SarImage {
        let grid = match (&self.pixels, self.domain) {
            (Pixels::Complex(c), _) => c.mapv(|z| z.re.hypot(z.im)),
            (Pixels::Real(p), Domain::Magnitude) => p.clone(),
            (Pixels::Real(p), Domain::Power) => p.mapv(f64::sqrt),
            (Pixels::Real(p), _) => p.mapv(|l| (0.5 * l).exp()),
        };
        self.with_real(Domain::Magnitude, grid)
    }

    /// Intensity image: `I²+Q²`, `A²` or `exp(L)`.
    pub fn to_power(&self) -> SarImage {
        let grid = match (&self.pixels, self.domain) {
            (Pixels::Complex(c), _) => c.mapv(|z| z.norm_sqr()),
            (Pixels::Real(p), Domain::Magnitude) => p.mapv(|a| a * a),
            (Pixels::Real(p), Domain::Power) => p.clone(),
            (Pixels::Real(p), _) => p.mapv(f64::exp),
        };
        self.with_real(Domain::Power, grid)
    }

    /// Natural-log power image. Fails on any zero power pixel rather than
    /// clamping it.
    pub fn to_log_power(&self) -> Result<SarImage> {
        if self.domain == Domain::LogPower {
            return Ok(self.clone());
        }
        let power = self.to_power();
        let grid = power.real().expect("power is real");
        if let Some((index, &value)) = grid.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositivePixel { index, value });
        }
        Ok(self.with_real(Domain::LogPower, grid.mapv(f64::ln)))
    }

    /// `10·log10(P)` for display. Not a domain of its own.
    pub fn to_db(&self) -> Result<Grid> {
        let log = self.to_log_power()?;
        let scale = 10.0 / std::f64::consts::LN_10;
        Ok(log.real().expect("log-power is real").mapv(|l| scale * l))
    }

    /// Converts to `domain`. Converting a real image to complex fails.
    pub fn convert(&self, domain: Domain) -> Result<SarImage> {
        match domain {
            Domain::Magnitude => Ok(self.to_magnitude()),
            Domain::Power => Ok(self.to_power()),
            Domain::LogPower => self.to_log_power(),
            Domain::ComplexIq if self.domain == Domain::ComplexIq => Ok(self.clone()),
            Domain::ComplexIq => Err(Error::InvalidParameter(
                "phase is not recoverable from a real image".into(),
            )),
        }
    }
}

fn check_dims(rows: usize, cols: usize, looks: u32) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("image must be nonempty".into()));
    }
    if looks == 0 {
        return Err(Error::InvalidParameter("looks must be >= 1".into()));
    }
    Ok(())
}

const MAGIC: &str = "F32R";

/// Writes `img` as `F32R`. Pixels are narrowed to 32-bit floats.
pub fn write_raster<W: Write>(img: &SarImage, mut out: W) -> Result<()> {
    write!(
        out,
        "{MAGIC}\n{} {} {} {}\n",
        img.width(),
        img.height(),
        img.looks,
        img.domain.tag()
    )?;
    let mut buf = Vec::with_capacity(img.width() * img.height() * 8);
    match &img.pixels {
        Pixels::Complex(c) => {
            for z in c.iter() {
                buf.extend_from_slice(&(z.re as f32).to_le_bytes());
                buf.extend_from_slice(&(z.im as f32).to_le_bytes());
            }
        }
        Pixels::Real(p) => {
            for v in p.iter() {
                buf.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

/// Reads an `F32R` stream.
pub fn read_raster<R: BufRead>(mut input: R) -> Result<SarImage> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    if line.trim_end_matches(['\n', '\r']) != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", line.trim_end())));
    }
    line.clear();
    input.read_line(&mut line)?;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::Format(format!("bad header line {:?}", line.trim_end())));
    }
    let parse = |s: &str, what: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Format(format!("bad {what} {s:?}")))
    };
    let width = parse(fields[0], "width")?;
    let height = parse(fields[1], "height")?;
    let looks = parse(fields[2], "looks")? as u32;
    let domain: Domain = fields[3].parse()?;
    if width == 0 || height == 0 || looks == 0 {
        return Err(Error::Format("width, height and looks must be positive".into()));
    }
    let per_pixel = if domain == Domain::ComplexIq { 2 } else { 1 };
    let expected = width * height * per_pixel;
    let mut payload = Vec::new();
    input.read_to_end(&mut payload)?;
    if payload.len() != expected * 4 {
        return Err(Error::SizeMismatch {
            expected,
            found: payload.len() / 4,
        });
    }
    let values: Vec<f64> = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
        .collect();
    let bad = |e: Error| Error::Format(e.to_string());
    if domain == Domain::ComplexIq {
        let pairs: Vec<Complex64> = values
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let grid = Array2::from_shape_vec((height, width), pairs).expect("shape checked");
        SarImage::from_complex(looks, grid).map_err(bad)
    } else {
        let grid = Array2::from_shape_vec((height, width), values).expect("shape checked");
        SarImage::from_real(domain, looks, grid).map_err(bad)
    }
}

pub fn store_raster(img: &SarImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_raster(img, BufWriter::new(file))
}

pub fn load_raster(path: impl AsRef<Path>) -> Result<SarImage> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_raster(BufReader::new(file))
}

/// Writes a real map (statistic, threshold) as an `F32R` power raster.
/// Non-finite entries (unevaluated border pixels) are written as NaN.
pub fn write_map<W: Write>(map: &Grid, mut out: W) -> Result<()> {
    write!(out, "{MAGIC}\n{} {} 1 pow\n", map.ncols(), map.nrows())?;
    let mut buf = Vec::with_capacity(map.len() * 4);
    for v in map.iter() {
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn real(domain: Domain, g: Grid) -> SarImage {
        SarImage::from_real(domain, 1, g).unwrap()
    }

    #[test]
    fn complex_to_magnitude_is_hypot() {
        let img = SarImage::from_complex(1, array![[Complex64::new(3.0, 4.0)]]).unwrap();
        assert_eq!(img.to_magnitude().real().unwrap()[[0, 0]], 5.0);
        let img = SarImage::from_complex(1, array![[Complex64::new(1.0, 1.0)]]).unwrap();
        assert!((img.to_power().real().unwrap()[[0, 0]] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn power_and_log_conversions() {
        assert_eq!(real(Domain::Power, array![[9.0]]).to_magnitude().real().unwrap()[[0, 0]], 3.0);
        assert_eq!(real(Domain::LogPower, array![[0.0]]).to_magnitude().real().unwrap()[[0, 0]], 1.0);
        assert_eq!(real(Domain::Magnitude, array![[3.0]]).to_power().real().unwrap()[[0, 0]], 9.0);
        let p = real(Domain::LogPower, array![[4f64.ln()]]).to_power();
        assert!((p.real().unwrap()[[0, 0]] - 4.0).abs() < 1e-14);
        let l = real(Domain::Power, array![[1.0, std::f64::consts::E]]).to_log_power().unwrap();
        assert_eq!(l.real().unwrap()[[0, 0]], 0.0);
        assert!((l.real().unwrap()[[0, 1]] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_power_has_no_log() {
        let err = real(Domain::Power, array![[1.0, 0.0]]).to_log_power().unwrap_err();
        assert!(matches!(err, Error::NonPositivePixel { index: 1, .. }));
    }

    #[test]
    fn db_display_is_ten_log10() {
        let db = real(Domain::Power, array![[100.0]]).to_db().unwrap();
        assert!((db[[0, 0]] - 20.0).abs() < 1e-12);
    }

    #[test]
    fn negative_power_rejected() {
        assert!(SarImage::from_real(Domain::Power, 1, array![[-1.0]]).is_err());
        assert!(SarImage::from_real(Domain::LogPower, 1, array![[-1.0]]).is_ok());
    }

    #[test]
    fn f32r_round_trip() {
        let img = real(Domain::Power, array![[1.0, 2.5], [0.125, 3.0]]);
        let mut bytes = Vec::new();
        write_raster(&img, &mut bytes).unwrap();
        assert!(bytes.starts_with(b"F32R\n2 2 1 pow\n"));
        assert_eq!(read_raster(&bytes[..]).unwrap(), img);
    }

    #[test]
    fn f32r_size_mismatch() {
        let mut bytes = b"F32R\n4 4 1 pow\n".to_vec();
        bytes.extend(std::iter::repeat_n(0u8, 12 * 4));
        assert!(matches!(
            read_raster(&bytes[..]),
            Err(Error::SizeMismatch { expected: 16, found: 12 })
        ));
    }

    #[test]
    fn f32r_bad_magic() {
        let bytes = b"F64R\n1 1 1 pow\n\0\0\0\0".to_vec();
        assert!(matches!(read_raster(&bytes[..]), Err(Error::Format(_))));
        let bytes = b"F32R\n1 1 1 dB\n\0\0\0\0".to_vec();
        assert!(matches!(read_raster(&bytes[..]), Err(Error::Format(_))));
    }
}
