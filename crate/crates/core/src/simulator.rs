//! Ground-truthed scenes from the multiplicative clutter model.
//!
//! Every pixel is `Z = X · Y`. `Y` is unit-mean `n`-look speckle,
//! `Γ(n, rate n)`, and `X` is the backscatter:
//!
//! * homogeneous: the constant mean power `C`;
//! * heterogeneous: `Γ(shape, rate)`, giving K-distributed pixels;
//! * extremely heterogeneous: `gamma / W` with `W ~ Γ(shape, 1)`, giving
//!   G⁰ pixels (β′ at one look).
//!
//! Targets multiply the backscatter of their footprint, so they still carry
//! speckle. Row `r` draws from its own speckle and backscatter streams, so
//! a scene is the same for any thread count.

use ndarray::{Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::config::KeyValues;
use crate::engine::ValidRegion;
use crate::models::ClutterModel;
use crate::raster::{Domain, SarImage};
use crate::rng::{substream, Purpose};
use crate::{Error, Grid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Background {
    Homogeneous { c: f64 },
    Heterogeneous { shape: f64, rate: f64 },
    ExtremelyHeterogeneous { shape: f64, gamma: f64 },
}

impl Background {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Background::Homogeneous { c } => c > 0.0 && c.is_finite(),
            Background::Heterogeneous { shape, rate } => shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite(),
            Background::ExtremelyHeterogeneous { shape, gamma } => shape > 0.0 && gamma > 0.0 && shape.is_finite() && gamma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid background {self:?}")))
        }
    }

    /// Distribution of a background pixel at `looks` looks.
    pub fn pixel_model(&self, looks: u32) -> Result<ClutterModel> {
        let n = looks as f64;
        match *self {
            Background::Homogeneous { c } if looks == 1 => ClutterModel::exponential(c),
            Background::Homogeneous { c } => ClutterModel::gamma(n, n / c),
            Background::Heterogeneous { shape, rate } => ClutterModel::k_compound(shape, rate, looks),
            Background::ExtremelyHeterogeneous { shape, gamma } => ClutterModel::g0_compound(shape, gamma, looks),
        }
    }

    fn sampler(&self) -> Result<Backscatter> {
        self.validate()?;
        let bad = |e: rand_distr::GammaError| Error::InvalidParameter(e.to_string());
        Ok(match *self {
            Background::Homogeneous { c } => Backscatter::Constant(c),
            Background::Heterogeneous { shape, rate } => Backscatter::Gamma(Gamma::new(shape, 1.0 / rate).map_err(bad)?),
            Background::ExtremelyHeterogeneous { shape, gamma } => {
                Backscatter::Reciprocal(gamma, Gamma::new(shape, 1.0).map_err(bad)?)
            }
        })
    }
}

enum Backscatter {
    Constant(f64),
    Gamma(Gamma<f64>),
    Reciprocal(f64, Gamma<f64>),
}

impl Backscatter {
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Backscatter::Constant(c) => *c,
            Backscatter::Gamma(g) => g.sample(rng),
            Backscatter::Reciprocal(scale, w) => scale / w.sample(rng),
        }
    }
}

/// A rectangular target; `(row, col)` is its top-left pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub row: usize,
    pub col: usize,
    pub rows: usize,
    pub cols: usize,
    /// Backscatter multiplier, > 1.
    pub multiplier: f64,
}

impl std::str::FromStr for Target {
    type Err = Error;

    /// `row,col,rows,cols,multiplier`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("target must be row,col,rows,cols,multiplier, got {s:?}"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [r, c, h, w, m] = parts[..] else {
            return Err(bad());
        };
        let u = |v: &str| v.parse::<usize>().map_err(|_| bad());
        Ok(Target {
            row: u(r)?,
            col: u(c)?,
            rows: u(h)?,
            cols: u(w)?,
            multiplier: m.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub looks: u32,
    pub background: Background,
    pub targets: Vec<Target>,
    pub seed: u64,
}

/// Keys accepted by [`SceneSpec::from_config`].
pub const SCENE_KEYS: &[&str] = &["width", "height", "looks", "background", "c", "shape", "rate", "gamma", "target", "seed"];

impl SceneSpec {
    /// Homogeneous single-look scene of mean power 1 with no targets.
    pub fn homogeneous(width: usize, height: usize, seed: u64) -> Self {
        SceneSpec {
            width,
            height,
            looks: 1,
            background: Background::Homogeneous { c: 1.0 },
            targets: Vec::new(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidParameter("scene dimensions must be positive".into()));
        }
        if self.looks == 0 {
            return Err(Error::InvalidParameter("looks must be >= 1".into()));
        }
        self.background.validate()?;
        for t in &self.targets {
            if t.rows == 0 || t.cols == 0 || t.row + t.rows > self.height || t.col + t.cols > self.width {
                return Err(Error::InvalidParameter(format!("target {t:?} is outside the image")));
            }
            if !(t.multiplier > 1.0 && t.multiplier.is_finite()) {
                return Err(Error::InvalidParameter(format!("target multiplier must exceed 1, got {}", t.multiplier)));
            }
        }
        Ok(())
    }

    /// Reads a scene from `key = value` pairs. `background` is one of
    /// `homogeneous` (key `c`, default 1), `heterogeneous` (`shape`, `rate`)
    /// or `extreme` (`shape`, `gamma`). `target` may repeat.
    pub fn from_config(kv: &KeyValues) -> Result<Self> {
        let need = |k: &str| -> Result<f64> {
            kv.parse(k)?
                .ok_or_else(|| Error::InvalidParameter(format!("scene config is missing '{k}'")))
        };
        let background = match kv.get("background")?.unwrap_or("homogeneous") {
            "homogeneous" => Background::Homogeneous {
                c: kv.parse("c")?.unwrap_or(1.0),
            },
            "heterogeneous" | "k" => Background::Heterogeneous {
                shape: need("shape")?,
                rate: need("rate")?,
            },
            "extreme" | "extremely_heterogeneous" | "g0" => Background::ExtremelyHeterogeneous {
                shape: need("shape")?,
                gamma: need("gamma")?,
            },
            other => return Err(Error::InvalidParameter(format!("unknown background '{other}'"))),
        };
        let spec = SceneSpec {
            width: need("width")? as usize,
            height: need("height")? as usize,
            looks: kv.parse("looks")?.unwrap_or(1),
            background,
            targets: kv.all("target").into_iter().map(str::parse).collect::<Result<_>>()?,
            seed: kv
                .parse("seed")?
                .ok_or_else(|| Error::InvalidParameter("scene config is missing 'seed'".into()))?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Target footprint mask.
pub type TruthMask = Array2<bool>;

fn speckle_dist(looks: u32) -> Result<Gamma<f64>> {
    if looks == 0 {
        return Err(Error::InvalidParameter("looks must be >= 1".into()));
    }
    let n = looks as f64;
    Gamma::new(n, 1.0 / n).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Unit-mean `looks`-look speckle, `(rows, cols)` in the power domain.
pub fn gen_speckle(looks: u32, dims: (usize, usize), seed: u64) -> Result<Grid> {
    let g = speckle_dist(looks)?;
    let mut out = Array2::zeros(dims);
    out.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(r, mut row)| {
        let mut rng = substream(seed, Purpose::Speckle, r as u64);
        row.iter_mut().for_each(|v| *v = g.sample(&mut rng));
    });
    Ok(out)
}

/// Power-domain scene and its truth mask.
pub fn gen_scene(spec: &SceneSpec) -> Result<(SarImage, TruthMask)> {
    spec.validate()?;
    let dims = (spec.height, spec.width);
    let backscatter = spec.background.sampler()?;
    let mut gain = Array2::from_elem(dims, 1.0);
    let mut truth = Array2::from_elem(dims, false);
    for t in &spec.targets {
        for r in t.row..t.row + t.rows {
            for c in t.col..t.col + t.cols {
                gain[[r, c]] *= t.multiplier;
                truth[[r, c]] = true;
            }
        }
    }
    let mut pixels = gen_speckle(spec.looks, dims, spec.seed)?;
    pixels
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(gain.axis_iter(Axis(0)))
        .enumerate()
        .for_each(|(r, (mut row, g))| {
            let mut rng = substream(spec.seed, Purpose::Backscatter, r as u64);
            for (z, g) in row.iter_mut().zip(g) {
                *z *= backscatter.draw(&mut rng) * g;
            }
        });
    Ok((SarImage::from_real(Domain::Power, spec.looks, pixels)?, truth))
}

/// Empirical rates of a detection mask against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    /// False alarms over clutter pixels; 0 when there are none.
    pub pfa: f64,
    /// Detected over truth pixels; `None` without targets.
    pub pd: Option<f64>,
    pub false_alarms: usize,
    pub clutter_pixels: usize,
    pub detected: usize,
    pub target_pixels: usize,
}

impl Rates {
    /// Binomial standard error of the false-alarm rate at true rate `p`.
    pub fn pfa_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.clutter_pixels.max(1) as f64).sqrt()
    }
}

/// PD over truth pixels; PFA over pixels inside `valid` (the whole image
/// if `None`) that are farther than `guard_dilation` pixels (Chebyshev
/// distance) from any target.
pub fn measure_rates(
    mask: &Array2<bool>,
    truth: &TruthMask,
    guard_dilation: usize,
    valid: Option<&ValidRegion>,
) -> Result<Rates> {
    if mask.dim() != truth.dim() {
        return Err(Error::DimMismatch(format!(
            "mask is {:?} but truth is {:?}",
            mask.dim(),
            truth.dim()
        )));
    }
    let (rows, cols) = mask.dim();
    let d = guard_dilation;
    let mut near = truth.clone();
    if d > 0 {
        for ((r, c), _) in truth.indexed_iter().filter(|(_, t)| **t) {
            for rr in r.saturating_sub(d)..(r + d + 1).min(rows) {
                for cc in c.saturating_sub(d)..(c + d + 1).min(cols) {
                    near[[rr, cc]] = true;
                }
            }
        }
    }
    let (mut fa, mut clutter, mut hit, mut targets) = (0, 0, 0, 0);
    for ((r, c), &m) in mask.indexed_iter() {
        if truth[[r, c]] {
            targets += 1;
            hit += m as usize;
        } else if !near[[r, c]] && valid.is_none_or(|v| v.contains(r, c)) {
            clutter += 1;
            fa += m as usize;
        }
    }
    Ok(Rates {
        pfa: if clutter == 0 { 0.0 } else { fa as f64 / clutter as f64 },
        pd: (targets > 0).then(|| hit as f64 / targets as f64),
        false_alarms: fa,
        clutter_pixels: clutter,
        detected: hit,
        target_pixels: targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
    }

    #[test]
    fn speckle_moments() {
        let one = gen_speckle(1, (1000, 1000), 1).unwrap();
        let (m, v) = moments(one.as_slice().unwrap());
        assert!((m - 1.0).abs() < 0.01 && (v - 1.0).abs() < 0.02, "{m} {v}");
        let four = gen_speckle(4, (1000, 1000), 2).unwrap();
        let (m, v) = moments(four.as_slice().unwrap());
        assert!((m - 1.0).abs() < 0.01 && (v - 0.25).abs() < 0.01, "{m} {v}");
        assert_eq!(one, gen_speckle(1, (1000, 1000), 1).unwrap());
    }

    #[test]
    fn scene_is_thread_count_independent() {
        let mut spec = SceneSpec::homogeneous(40, 30, 9);
        spec.background = Background::Heterogeneous { shape: 2.0, rate: 2.0 };
        let a = gen_scene(&spec).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| gen_scene(&spec).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn targets_scale_backscatter() {
        let mut spec = SceneSpec::homogeneous(20, 20, 3);
        spec.targets.push(Target {
            row: 5,
            col: 6,
            rows: 2,
            cols: 3,
            multiplier: 10.0,
        });
        let (img, truth) = gen_scene(&spec).unwrap();
        let speckle = gen_speckle(1, (20, 20), 3).unwrap();
        assert_eq!(truth.iter().filter(|t| **t).count(), 6);
        for ((r, c), &t) in truth.indexed_iter() {
            let want = speckle[[r, c]] * if t { 10.0 } else { 1.0 };
            assert!((img.real().unwrap()[[r, c]] - want).abs() < 1e-12 * want);
        }
        spec.targets[0].col = 19;
        assert!(gen_scene(&spec).is_err());
        spec.targets[0].col = 0;
        spec.targets[0].multiplier = 1.0;
        assert!(gen_scene(&spec).is_err());
    }

    #[test]
    fn rate_examples() {
        let mut truth = Array2::from_elem((10, 10), false);
        truth[[4, 4]] = true;
        truth[[4, 5]] = true;
        let r = measure_rates(&truth, &truth, 1, None).unwrap();
        assert_eq!((r.pd, r.pfa), (Some(1.0), 0.0));
        let empty = Array2::from_elem((10, 10), false);
        let r = measure_rates(&empty, &truth, 0, None).unwrap();
        assert_eq!((r.pd, r.pfa), (Some(0.0), 0.0));
        // Guard dilation of 1 removes the 4x5 block around the targets.
        assert_eq!(measure_rates(&empty, &truth, 1, None).unwrap().clutter_pixels, 100 - 12);
        let v = ValidRegion {
            row_start: 2,
            row_end: 8,
            col_start: 2,
            col_end: 8,
        };
        let r = measure_rates(&Array2::from_elem((10, 10), true), &empty, 0, Some(&v)).unwrap();
        assert_eq!((r.pd, r.pfa, r.clutter_pixels), (None, 1.0, 36));
        assert!(matches!(
            measure_rates(&empty, &Array2::from_elem((3, 3), false), 0, None),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn scene_from_config() {
        let kv: KeyValues = "width=16\nheight=8\nlooks=4\nbackground=extreme\nshape=3\ngamma=2\ntarget=1,1,2,2,5\nseed=11"
            .parse()
            .unwrap();
        kv.check_known(SCENE_KEYS).unwrap();
        let s = SceneSpec::from_config(&kv).unwrap();
        assert_eq!((s.width, s.height, s.looks, s.seed), (16, 8, 4, 11));
        assert_eq!(s.background, Background::ExtremelyHeterogeneous { shape: 3.0, gamma: 2.0 });
        assert_eq!(s.targets.len(), 1);
        let kv: KeyValues = "width=16\nheight=8".parse().unwrap();
        assert!(SceneSpec::from_config(&kv).is_err());
    }
}
