//! Multiplicative clutter `Z = X · Y`.
//!
//! `Y` is unit-mean `n`-look speckle, `Y ~ Γ(n, rate n)`, so the scene
//! power lives entirely in the backscatter `X`:
//!
//! * K: `X ~ Γ(shape, rate)`.
//! * G⁰: `X = gamma / W` with `W ~ Γ(shape, 1)` (reciprocal gamma).
//!
//! Densities and distribution functions are integrals over `t = ln X`:
//! `F(z) = ∫ h(t) F_Y(z e^{-t}) dt`, `f(z) = ∫ h(t) f_Y(z e^{-t}) e^{-t} dt`,
//! where `h` is the density of `ln X`. Quantiles invert those integrals;
//! if the inversion fails, a cached Monte-Carlo empirical quantile is used.

use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::numeric::{integrate, invert_monotone};
use crate::rng::{substream, Purpose};
use crate::{Error, Result};

const FALLBACK_DRAWS: usize = 1_000_000;
const PANELS: usize = 48;
const ABS_TOL: f64 = 1e-14;
const REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompoundKind {
    K,
    G0,
}

/// A K or G⁰ model. `scale_param` is the rate for K and `gamma` for G⁰.
#[derive(Debug, Clone)]
pub struct Compound {
    kind: CompoundKind,
    shape: f64,
    scale_param: f64,
    looks: u32,
    t_range: (f64, f64),
    fallback: Arc<OnceLock<Vec<f64>>>,
}

/// Bounds on `ln W`, `W ~ Γ(a, 1)`, outside which the mass is below ~1e-17.
fn log_gamma_bounds(a: f64) -> (f64, f64) {
    // P(W < w) <= w^a / Γ(a+1).
    let lo = ((1e-17f64).ln() + ln_gamma(a + 1.0)) / a;
    // Chernoff: P(W > w) <= exp(-(w - a - a ln(w/a))) for w > a.
    let mut w = 2.0 * a + 50.0;
    for _ in 0..100 {
        w = a + 40.0 + a * (w / a).ln();
    }
    (lo.min(a.ln() - 1.0), w.ln())
}

impl Compound {
    pub fn new(kind: CompoundKind, shape: f64, scale_param: f64, looks: u32) -> Result<Self> {
        for (name, v) in [("shape", shape), ("scale parameter", scale_param)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if looks == 0 {
            return Err(Error::InvalidParameter("looks must be >= 1".into()));
        }
        let (ulo, uhi) = log_gamma_bounds(shape);
        let t_range = match kind {
            CompoundKind::K => (ulo - scale_param.ln(), uhi - scale_param.ln()),
            CompoundKind::G0 => (scale_param.ln() - uhi, scale_param.ln() - ulo),
        };
        Ok(Compound {
            kind,
            shape,
            scale_param,
            looks,
            t_range,
            fallback: Arc::new(OnceLock::new()),
        })
    }

    pub fn kind(&self) -> CompoundKind {
        self.kind
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// Gamma rate for K, `gamma` for G⁰.
    pub fn scale_param(&self) -> f64 {
        self.scale_param
    }

    pub fn looks(&self) -> u32 {
        self.looks
    }

    /// Log-density of `t = ln X`.
    fn log_h(&self, t: f64) -> f64 {
        let (a, b) = (self.shape, self.scale_param);
        match self.kind {
            CompoundKind::K => a * b.ln() + a * t - b * t.exp() - ln_gamma(a),
            CompoundKind::G0 => a * b.ln() - a * t - b * (-t).exp() - ln_gamma(a),
        }
    }

    fn speckle_log_pdf(&self, y: f64) -> f64 {
        let n = self.looks as f64;
        n * n.ln() + (n - 1.0) * y.ln() - n * y - ln_gamma(n)
    }

    fn integral<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let (lo, hi) = self.t_range;
        integrate(f, lo, hi, PANELS, ABS_TOL, REL_TOL)
    }

    pub fn pdf(&self, z: f64) -> Result<f64> {
        if z == 0.0 {
            return if self.looks == 1 {
                // f_Y(0) = 1, so f(0) = E[1/X].
                self.integral(|t| (self.log_h(t) - t).exp())
            } else {
                Ok(0.0)
            };
        }
        self.integral(|t| (self.log_h(t) + self.speckle_log_pdf(z * (-t).exp()) - t).exp())
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        if z == 0.0 {
            return Ok(0.0);
        }
        let n = self.looks as f64;
        let v = self.integral(|t| self.log_h(t).exp() * gamma_lr(n, n * z * (-t).exp()))?;
        Ok(v.clamp(0.0, 1.0))
    }

    pub fn sf(&self, z: f64) -> Result<f64> {
        if z == 0.0 {
            return Ok(1.0);
        }
        let n = self.looks as f64;
        let v = self.integral(|t| self.log_h(t).exp() * gamma_ur(n, n * z * (-t).exp()))?;
        Ok(v.clamp(0.0, 1.0))
    }

    pub fn mean(&self) -> f64 {
        match self.kind {
            CompoundKind::K => self.shape / self.scale_param,
            CompoundKind::G0 if self.shape > 1.0 => self.scale_param / (self.shape - 1.0),
            CompoundKind::G0 => f64::INFINITY,
        }
    }

    /// Median of the backscatter, used as the bracketing scale.
    fn typical(&self) -> f64 {
        let (lo, hi) = self.t_range;
        let m = self.mean();
        if m.is_finite() {
            m
        } else {
            (0.5 * (lo + hi)).exp()
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        let hint = self.typical();
        let solved = if p <= 0.5 {
            invert_monotone(|z| self.cdf(z), p, 0.0, hint)
        } else {
            invert_monotone(|z| self.sf(z).map(|s| -s), -(1.0 - p), 0.0, hint)
        };
        match solved {
            Ok(z) => Ok(z),
            Err(Error::ConvergenceFailure(_)) => Ok(self.empirical_quantile(p)),
            Err(e) => Err(e),
        }
    }

    /// Empirical quantile from a cached, fixed-seed sample.
    pub fn empirical_quantile(&self, p: f64) -> f64 {
        let sorted = self.fallback.get_or_init(|| {
            let mut rng = substream(0x6b_67_30, Purpose::Fallback, 0);
            let mut xs = self.sample_n(&mut rng, FALLBACK_DRAWS);
            xs.sort_by(f64::total_cmp);
            xs
        });
        let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
        sorted[idx]
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let n = self.looks as f64;
        let speckle = Gamma::new(n, 1.0 / n).expect("validated");
        match self.kind {
            CompoundKind::K => {
                let back = Gamma::new(self.shape, 1.0 / self.scale_param).expect("validated");
                (0..count)
                    .map(|_| back.sample(rng) * speckle.sample(rng))
                    .collect()
            }
            CompoundKind::G0 => {
                let w = Gamma::new(self.shape, 1.0).expect("validated");
                (0..count)
                    .map(|_| self.scale_param / w.sample(rng) * speckle.sample(rng))
                    .collect()
            }
        }
    }
}
