//! Clutter and target models.
//!
//! [`ClutterModel`] is a tagged family of distributions over pixel values.
//! Closed-form families are evaluated directly; the multiplicative K and G⁰
//! models are evaluated by integrating over the backscatter variable (see
//! [`compound`]). Parameter fitting lives in [`fit`], threshold scaling
//! factors in [`alpha`], goodness of fit in [`gof`] and model ranking in
//! [`select`].

pub mod alpha;
pub mod compound;
pub mod fit;
pub mod gof;
pub mod kde;
pub mod select;
pub mod spec;

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, LogNormal, Weibull};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::numeric::{invert_monotone, normal_cdf, normal_pdf, normal_quantile, normal_sf};
use crate::{Error, Result};

pub use alpha::{
    alpha_ca_exponential, alpha_ca_exponential_block, alpha_numeric, np_likelihood_ratio,
    pd_for_target, NpConfig, NpDecision,
};
pub use compound::{Compound, CompoundKind};
pub use fit::{fit_mean, fit_mean_std, Family, FamilySpec};
pub use gof::{ad_ksample, anderson_darling, cvm_distance};
pub use kde::{kde_fit, silverman_bandwidth, Bandwidth, Kde};
pub use select::{select_model, GofStatistic, Ranked, Selection};
pub use spec::{parse_candidates, ModelSpec};

/// A pixel-value distribution.
///
/// Power-domain families: `Exponential`, `Gamma`, `KCompound`,
/// `G0Compound`, `BetaPrime`. Magnitude-domain families: `Rayleigh`,
/// `SqrtGamma`. `Weibull`, `LogNormal` and `Kde` are used in either.
#[derive(Debug, Clone)]
pub enum ClutterModel {
    Exponential { mean: f64 },
    Rayleigh { scale: f64 },
    /// Shape/rate parameterisation, mean `shape / rate`.
    Gamma { shape: f64, rate: f64 },
    /// Square root of a `Gamma { shape, rate }` variable.
    SqrtGamma { shape: f64, rate: f64 },
    Weibull { shape: f64, scale: f64 },
    LogNormal { mu: f64, sigma: f64 },
    KCompound(Compound),
    G0Compound(Compound),
    /// `Z / gamma` follows β′(1, shape): the single-look limit of G⁰.
    BetaPrime { shape: f64, gamma: f64 },
    Kde(Kde),
}

/// Specification-string form, e.g. `weibull:shape=2,scale=1`; parses back
/// into the same model (KDE prints its bandwidth only).
impl std::fmt::Display for ClutterModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClutterModel::Exponential { mean } => write!(f, "exp:mean={mean}"),
            ClutterModel::Rayleigh { scale } => write!(f, "rayleigh:scale={scale}"),
            ClutterModel::Gamma { shape, rate } => write!(f, "gamma:shape={shape},rate={rate}"),
            ClutterModel::SqrtGamma { shape, rate } => write!(f, "sqrtgamma:shape={shape},rate={rate}"),
            ClutterModel::Weibull { shape, scale } => write!(f, "weibull:shape={shape},scale={scale}"),
            ClutterModel::LogNormal { mu, sigma } => write!(f, "lognormal:mu={mu},sigma={sigma}"),
            ClutterModel::KCompound(c) => write!(f, "k:shape={},rate={},n={}", c.shape(), c.scale_param(), c.looks()),
            ClutterModel::G0Compound(c) => write!(f, "g0:shape={},gamma={},n={}", c.shape(), c.scale_param(), c.looks()),
            ClutterModel::BetaPrime { shape, gamma } => write!(f, "betaprime:shape={shape},gamma={gamma}"),
            ClutterModel::Kde(k) => write!(f, "kde:bandwidth={}", k.bandwidth()),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("probability must be in (0,1), got {p}")))
    }
}

impl ClutterModel {
    pub fn exponential(mean: f64) -> Result<Self> {
        positive("mean", mean)?;
        Ok(ClutterModel::Exponential { mean })
    }

    pub fn rayleigh(scale: f64) -> Result<Self> {
        positive("scale", scale)?;
        Ok(ClutterModel::Rayleigh { scale })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("rate", rate)?;
        Ok(ClutterModel::Gamma { shape, rate })
    }

    pub fn sqrt_gamma(shape: f64, rate: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("rate", rate)?;
        Ok(ClutterModel::SqrtGamma { shape, rate })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("scale", scale)?;
        Ok(ClutterModel::Weibull { shape, scale })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be finite, got {mu}")));
        }
        positive("sigma", sigma)?;
        Ok(ClutterModel::LogNormal { mu, sigma })
    }

    /// K model: gamma backscatter with the given shape and rate times
    /// unit-mean `looks`-look speckle.
    pub fn k_compound(shape: f64, rate: f64, looks: u32) -> Result<Self> {
        Ok(ClutterModel::KCompound(Compound::new(CompoundKind::K, shape, rate, looks)?))
    }

    /// G⁰ model: reciprocal-gamma backscatter `gamma / W`, `W ~ Γ(shape, 1)`,
    /// times unit-mean `looks`-look speckle.
    pub fn g0_compound(shape: f64, gamma: f64, looks: u32) -> Result<Self> {
        Ok(ClutterModel::G0Compound(Compound::new(CompoundKind::G0, shape, gamma, looks)?))
    }

    pub fn beta_prime(shape: f64, gamma: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("gamma", gamma)?;
        Ok(ClutterModel::BetaPrime { shape, gamma })
    }

    /// Short family name, as used in model specification strings.
    pub fn name(&self) -> &'static str {
        match self {
            ClutterModel::Exponential { .. } => "exp",
            ClutterModel::Rayleigh { .. } => "rayleigh",
            ClutterModel::Gamma { .. } => "gamma",
            ClutterModel::SqrtGamma { .. } => "sqrtgamma",
            ClutterModel::Weibull { .. } => "weibull",
            ClutterModel::LogNormal { .. } => "lognormal",
            ClutterModel::KCompound(_) => "k",
            ClutterModel::G0Compound(_) => "g0",
            ClutterModel::BetaPrime { .. } => "betaprime",
            ClutterModel::Kde(_) => "kde",
        }
    }

    /// Lower end of the support.
    pub fn support_min(&self) -> f64 {
        match self {
            ClutterModel::Kde(_) => f64::NEG_INFINITY,
            _ => 0.0,
        }
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if x.is_nan() || x < self.support_min() {
            Err(Error::OutOfSupport(x))
        } else {
            Ok(())
        }
    }

    /// Probability density at `x`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(match self {
            ClutterModel::Exponential { mean } => (-x / mean).exp() / mean,
            ClutterModel::Rayleigh { scale } => {
                let s2 = scale * scale;
                x / s2 * (-x * x / (2.0 * s2)).exp()
            }
            ClutterModel::Gamma { shape, rate } => gamma_pdf(*shape, *rate, x),
            ClutterModel::SqrtGamma { shape, rate } => 2.0 * x * gamma_pdf(*shape, *rate, x * x),
            ClutterModel::Weibull { shape, scale } => {
                if x == 0.0 {
                    match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / scale,
                        _ => 0.0,
                    }
                } else {
                    let z = x / scale;
                    shape / scale * z.powf(shape - 1.0) * (-z.powf(*shape)).exp()
                }
            }
            ClutterModel::LogNormal { mu, sigma } => {
                if x == 0.0 {
                    0.0
                } else {
                    normal_pdf((x.ln() - mu) / sigma) / (x * sigma)
                }
            }
            ClutterModel::KCompound(c) | ClutterModel::G0Compound(c) => c.pdf(x)?,
            ClutterModel::BetaPrime { shape, gamma } => {
                shape / gamma * (1.0 + x / gamma).powf(-shape - 1.0)
            }
            ClutterModel::Kde(k) => k.pdf(x),
        })
    }

    /// Cumulative distribution at `x`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(match self {
            ClutterModel::Exponential { mean } => -(-x / mean).exp_m1(),
            ClutterModel::Rayleigh { scale } => -(-x * x / (2.0 * scale * scale)).exp_m1(),
            ClutterModel::Gamma { shape, rate } => gamma_lr(*shape, rate * x),
            ClutterModel::SqrtGamma { shape, rate } => gamma_lr(*shape, rate * x * x),
            ClutterModel::Weibull { shape, scale } => -(-(x / scale).powf(*shape)).exp_m1(),
            ClutterModel::LogNormal { mu, sigma } => {
                if x == 0.0 {
                    0.0
                } else {
                    normal_cdf((x.ln() - mu) / sigma)
                }
            }
            ClutterModel::KCompound(c) | ClutterModel::G0Compound(c) => c.cdf(x)?,
            ClutterModel::BetaPrime { shape, gamma } => -(-shape * (x / gamma).ln_1p()).exp_m1(),
            ClutterModel::Kde(k) => k.cdf(x),
        })
    }

    /// Upper tail `P(X > x)`, computed without cancellation where possible.
    pub fn sf(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(match self {
            ClutterModel::Exponential { mean } => (-x / mean).exp(),
            ClutterModel::Rayleigh { scale } => (-x * x / (2.0 * scale * scale)).exp(),
            ClutterModel::Gamma { shape, rate } => gamma_ur(*shape, rate * x),
            ClutterModel::SqrtGamma { shape, rate } => gamma_ur(*shape, rate * x * x),
            ClutterModel::Weibull { shape, scale } => (-(x / scale).powf(*shape)).exp(),
            ClutterModel::LogNormal { mu, sigma } => {
                if x == 0.0 {
                    1.0
                } else {
                    normal_sf((x.ln() - mu) / sigma)
                }
            }
            ClutterModel::KCompound(c) | ClutterModel::G0Compound(c) => c.sf(x)?,
            ClutterModel::BetaPrime { shape, gamma } => (-shape * (x / gamma).ln_1p()).exp(),
            ClutterModel::Kde(k) => k.sf(x),
        })
    }

    /// Inverse cdf. Closed forms where they exist, otherwise a bracketed
    /// inversion of the cdf (or of the tail for `p > 1/2`).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        match self {
            ClutterModel::Exponential { mean } => Ok(-mean * (-p).ln_1p()),
            ClutterModel::Rayleigh { scale } => Ok(scale * (-2.0 * (-p).ln_1p()).sqrt()),
            ClutterModel::Weibull { shape, scale } => Ok(scale * (-(-p).ln_1p()).powf(1.0 / shape)),
            ClutterModel::LogNormal { mu, sigma } => Ok((mu + sigma * normal_quantile(p)).exp()),
            ClutterModel::BetaPrime { shape, gamma } => {
                Ok(gamma * ((-(-p).ln_1p() / shape).exp_m1()))
            }
            ClutterModel::KCompound(c) | ClutterModel::G0Compound(c) => c.quantile(p),
            ClutterModel::Gamma { shape, rate } => self.invert(p, shape / rate),
            ClutterModel::SqrtGamma { shape, rate } => {
                let power = ClutterModel::Gamma { shape: *shape, rate: *rate };
                Ok(power.invert(p, shape / rate)?.sqrt())
            }
            ClutterModel::Kde(k) => k.quantile(p),
        }
    }

    /// Numeric inverse of the cdf, bracketing upward from the support
    /// minimum (or from `hint` below it for unbounded supports).
    pub(crate) fn invert(&self, p: f64, hint: f64) -> Result<f64> {
        let hint = if hint.is_finite() && hint > 0.0 { hint } else { 1.0 };
        if p <= 0.5 {
            let lo = if self.support_min().is_finite() {
                self.support_min()
            } else {
                self.lower_bracket(p, hint)?
            };
            invert_monotone(|x| self.cdf(x), p, lo, lo + hint)
        } else {
            let lo = if self.support_min().is_finite() {
                self.support_min()
            } else {
                self.lower_bracket(p, hint)?
            };
            invert_monotone(|x| self.sf(x).map(|s| -s), -(1.0 - p), lo, lo + hint)
        }
    }

    fn lower_bracket(&self, p: f64, hint: f64) -> Result<f64> {
        let mut lo = -hint;
        for _ in 0..200 {
            if self.cdf(lo)? < p {
                return Ok(lo);
            }
            lo *= 2.0;
        }
        Err(Error::ConvergenceFailure(format!("no lower bracket for p={p}")))
    }

    /// Distribution mean; infinite when it does not exist.
    pub fn mean(&self) -> f64 {
        match self {
            ClutterModel::Exponential { mean } => *mean,
            ClutterModel::Rayleigh { scale } => scale * (std::f64::consts::PI / 2.0).sqrt(),
            ClutterModel::Gamma { shape, rate } => shape / rate,
            ClutterModel::SqrtGamma { shape, rate } => {
                (ln_gamma(shape + 0.5) - ln_gamma(*shape)).exp() / rate.sqrt()
            }
            ClutterModel::Weibull { shape, scale } => {
                scale * statrs::function::gamma::gamma(1.0 + 1.0 / shape)
            }
            ClutterModel::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            ClutterModel::KCompound(c) | ClutterModel::G0Compound(c) => c.mean(),
            ClutterModel::BetaPrime { shape, gamma } => {
                if *shape > 1.0 {
                    gamma / (shape - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            ClutterModel::Kde(k) => k.mean(),
        }
    }

    /// Draws one value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_n(rng, 1)[0]
    }

    /// Draws `n` independent values.
    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        match self {
            ClutterModel::Exponential { mean } => {
                let d = Exp::new(1.0 / mean).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            ClutterModel::Rayleigh { scale } => (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    scale * (-2.0 * (-u).ln_1p()).sqrt()
                })
                .collect(),
            ClutterModel::Gamma { shape, rate } => {
                let d = Gamma::new(*shape, 1.0 / rate).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            ClutterModel::SqrtGamma { shape, rate } => {
                let d = Gamma::new(*shape, 1.0 / rate).expect("validated");
                (0..n).map(|_| d.sample(rng).sqrt()).collect()
            }
            ClutterModel::Weibull { shape, scale } => {
                let d = Weibull::new(*scale, *shape).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            ClutterModel::LogNormal { mu, sigma } => {
                let d = LogNormal::new(*mu, *sigma).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            ClutterModel::KCompound(c) | ClutterModel::G0Compound(c) => c.sample_n(rng, n),
            ClutterModel::BetaPrime { shape, gamma } => (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    gamma * ((-(-u).ln_1p() / shape).exp_m1())
                })
                .collect(),
            ClutterModel::Kde(k) => k.sample_n(rng, n),
        }
    }
}

pub(crate) fn gamma_pdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x == 0.0 {
        return match shape.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => rate,
            _ => 0.0,
        };
    }
    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)).exp()
}
