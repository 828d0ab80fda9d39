//! Parameter estimation.

use std::fmt;

use super::kde::{kde_fit, Bandwidth};
use super::ClutterModel;
use crate::numeric::invert_monotone;
use crate::{Error, Result};
use statrs::function::gamma::digamma;

/// ML estimate of an exponential mean: the arithmetic mean.
pub fn fit_mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// ML mean and standard deviation, with the biased `1/N` normalisation.
pub fn fit_mean_std(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// A model family to be fitted to data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Exponential,
    Rayleigh,
    Gamma,
    SqrtGamma,
    Weibull,
    LogNormal,
    K,
    G0,
    BetaPrime,
    Kde,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exp",
            Family::Rayleigh => "rayleigh",
            Family::Gamma => "gamma",
            Family::SqrtGamma => "sqrtgamma",
            Family::Weibull => "weibull",
            Family::LogNormal => "lognormal",
            Family::K => "k",
            Family::G0 => "g0",
            Family::BetaPrime => "betaprime",
            Family::Kde => "kde",
        }
    }
}

/// A family plus whatever the caller pins: a fixed shape, the number of
/// looks for compound models, and the KDE bandwidth rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub fixed_shape: Option<f64>,
    pub looks: u32,
    pub bandwidth: Bandwidth,
}

impl FamilySpec {
    pub fn new(family: Family) -> Self {
        FamilySpec {
            family,
            fixed_shape: None,
            looks: 1,
            bandwidth: Bandwidth::Silverman,
        }
    }

    pub fn with_shape(mut self, shape: f64) -> Self {
        self.fixed_shape = Some(shape);
        self
    }

    pub fn with_looks(mut self, looks: u32) -> Self {
        self.looks = looks;
        self
    }

    /// Fits the family by ML where it is cheap and by moments otherwise.
    pub fn fit(&self, samples: &[f64]) -> Result<ClutterModel> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if self.family != Family::Kde {
            if let Some(x) = samples.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
                return Err(Error::OutOfSupport(*x));
            }
        }
        let n = samples.len() as f64;
        let m1 = fit_mean(samples)?;
        let m2 = samples.iter().map(|x| x * x).sum::<f64>() / n;
        match self.family {
            Family::Exponential => ClutterModel::exponential(m1),
            Family::Rayleigh => ClutterModel::rayleigh((m2 / 2.0).sqrt()),
            Family::Gamma => {
                let (shape, rate) = match self.fixed_shape {
                    None if samples.iter().all(|x| *x > 0.0) => {
                        let shape = gamma_ml_shape(samples, m1)?;
                        (shape, shape / m1)
                    }
                    fixed => gamma_moments(m1, m2 - m1 * m1, fixed)?,
                };
                ClutterModel::gamma(shape, rate)
            }
            Family::SqrtGamma => {
                let m4 = samples.iter().map(|x| x.powi(4)).sum::<f64>() / n;
                let (shape, rate) = gamma_moments(m2, m4 - m2 * m2, self.fixed_shape)?;
                ClutterModel::sqrt_gamma(shape, rate)
            }
            Family::Weibull => {
                let shape = match self.fixed_shape {
                    Some(k) => k,
                    None => weibull_ml_shape(samples)?,
                };
                let mk = samples.iter().map(|x| x.powf(shape)).sum::<f64>() / n;
                ClutterModel::weibull(shape, mk.powf(1.0 / shape))
            }
            Family::LogNormal => {
                if let Some(x) = samples.iter().find(|x| **x <= 0.0) {
                    return Err(Error::OutOfSupport(*x));
                }
                let logs: Vec<f64> = samples.iter().map(|x| x.ln()).collect();
                let (mu, sigma) = fit_mean_std(&logs)?;
                ClutterModel::log_normal(mu, sigma)
            }
            Family::K => {
                let speckle = 1.0 + 1.0 / self.looks as f64;
                let shape = match self.fixed_shape {
                    Some(a) => a,
                    None => {
                        // E[Z²]/E[Z]² = (1 + 1/a)(1 + 1/n).
                        let excess = m2 / (m1 * m1) / speckle - 1.0;
                        if excess <= 0.0 {
                            return Err(Error::InvalidParameter(
                                "data are lighter-tailed than any K model".into(),
                            ));
                        }
                        1.0 / excess
                    }
                };
                ClutterModel::k_compound(shape, shape / m1, self.looks)
            }
            Family::G0 | Family::BetaPrime => {
                let looks = if self.family == Family::BetaPrime { 1 } else { self.looks };
                let speckle = 1.0 + 1.0 / looks as f64;
                let shape = match self.fixed_shape {
                    Some(s) => s,
                    None => {
                        // E[Z²]/E[Z]² = (s-1)/(s-2)·(1 + 1/n), needs s > 2.
                        let r = m2 / (m1 * m1) / speckle;
                        if r <= 1.0 {
                            return Err(Error::InvalidParameter(
                                "data are lighter-tailed than any G0 model".into(),
                            ));
                        }
                        (2.0 * r - 1.0) / (r - 1.0)
                    }
                };
                if shape <= 1.0 {
                    return Err(Error::InvalidParameter(
                        "moment fit needs shape > 1 (finite mean)".into(),
                    ));
                }
                let gamma = m1 * (shape - 1.0);
                if self.family == Family::BetaPrime {
                    ClutterModel::beta_prime(shape, gamma)
                } else {
                    ClutterModel::g0_compound(shape, gamma, looks)
                }
            }
            Family::Kde => kde_fit(samples, self.bandwidth),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.name())?;
        if let Some(s) = self.fixed_shape {
            write!(f, "(shape={s})")?;
        }
        Ok(())
    }
}

fn gamma_moments(mean: f64, var: f64, fixed_shape: Option<f64>) -> Result<(f64, f64)> {
    match fixed_shape {
        Some(shape) => Ok((shape, shape / mean)),
        None if var > 0.0 => Ok((mean * mean / var, mean / var)),
        None => Err(Error::ZeroSigma),
    }
}

/// ML gamma shape for positive samples: the root of
/// `ψ(a) - ln a = mean(ln x) - ln mean(x)`, whose left side increases in `a`.
fn gamma_ml_shape(samples: &[f64], mean: f64) -> Result<f64> {
    let mean_log = samples.iter().map(|x| x.ln()).sum::<f64>() / samples.len() as f64;
    let gap = mean.ln() - mean_log;
    // Below this the samples are constant up to round-off.
    if !(gap > 1e-12) {
        return Err(Error::ZeroSigma);
    }
    invert_monotone(|a| Ok(digamma(a) - a.ln()), -gap, 1e-8, 1.0)
}

/// ML Weibull shape: root of `Σx^k ln x / Σx^k - 1/k - mean(ln x)`, which
/// is increasing in `k`.
fn weibull_ml_shape(samples: &[f64]) -> Result<f64> {
    let pos: Vec<f64> = samples.iter().copied().filter(|x| *x > 0.0).collect();
    if pos.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: pos.len(),
        });
    }
    let mean_log = pos.iter().map(|x| x.ln()).sum::<f64>() / pos.len() as f64;
    // Rescale to avoid overflow in x^k.
    let top = pos.iter().copied().fold(0.0, f64::max);
    let score = |k: f64| -> Result<f64> {
        let (mut a, mut b) = (0.0, 0.0);
        for &x in &pos {
            let w = (x / top).powf(k);
            a += w * x.ln();
            b += w;
        }
        Ok(a / b - 1.0 / k - mean_log)
    };
    let (mut lo, mut hi) = (1e-3, 1.0);
    while score(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::ConvergenceFailure("weibull shape".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Purpose};

    #[test]
    fn mean_examples() {
        assert_eq!(fit_mean(&[2.0, 4.0, 6.0]).unwrap(), 4.0);
        assert_eq!(fit_mean(&[5.0]).unwrap(), 5.0);
        assert!(matches!(fit_mean(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn mean_of_exponential_draws() {
        let m = ClutterModel::exponential(3.0).unwrap();
        let xs = m.sample_n(&mut substream(1, Purpose::Calibration, 9), 1_000_000);
        assert!((fit_mean(&xs).unwrap() - 3.0).abs() < 0.01);
    }

    #[test]
    fn mean_std_examples() {
        assert_eq!(fit_mean_std(&[1.0, 1.0, 1.0]).unwrap(), (1.0, 0.0));
        assert_eq!(fit_mean_std(&[0.0, 2.0]).unwrap(), (1.0, 1.0));
        let (m, s) = fit_mean_std(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m, 2.5);
        assert!((s - 1.25f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            fit_mean_std(&[1.0]),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn recovers_parameters() {
        let mut rng = substream(2, Purpose::Calibration, 0);
        let cases = [
            (ClutterModel::weibull(1.7, 2.0).unwrap(), FamilySpec::new(Family::Weibull)),
            (ClutterModel::gamma(3.0, 1.5).unwrap(), FamilySpec::new(Family::Gamma)),
            (ClutterModel::log_normal(0.2, 0.7).unwrap(), FamilySpec::new(Family::LogNormal)),
            (ClutterModel::k_compound(4.0, 4.0, 1).unwrap(), FamilySpec::new(Family::K)),
            (ClutterModel::g0_compound(6.0, 5.0, 1).unwrap(), FamilySpec::new(Family::G0)),
        ];
        for (truth, spec) in cases {
            let xs = truth.sample_n(&mut rng, 400_000);
            let fitted = spec.fit(&xs).unwrap();
            for p in [0.1, 0.5, 0.9] {
                let (a, b) = (truth.quantile(p).unwrap(), fitted.quantile(p).unwrap());
                assert!((a / b - 1.0).abs() < 0.05, "{} p={p}: {a} vs {b}", truth.name());
            }
        }
    }

    #[test]
    fn fixed_shape_weibull_scale() {
        // Weibull(2, s): E[x²] = s².
        let fitted = FamilySpec::new(Family::Weibull)
            .with_shape(2.0)
            .fit(&[1.0, 2.0, 3.0])
            .unwrap();
        match fitted {
            ClutterModel::Weibull { shape, scale } => {
                assert_eq!(shape, 2.0);
                assert!((scale - (14.0f64 / 3.0).sqrt()).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn rejects_negative_samples() {
        assert!(FamilySpec::new(Family::Exponential).fit(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn gamma_shape_survives_a_few_bright_pixels() {
        let mut rng = substream(4, Purpose::Experiment, 0);
        let mut xs = ClutterModel::exponential(1.0).unwrap().sample_n(&mut rng, 50_000);
        for x in xs.iter_mut().take(10) {
            *x = 40.0;
        }
        match FamilySpec::new(Family::Gamma).fit(&xs).unwrap() {
            ClutterModel::Gamma { shape, .. } => assert!((shape - 1.0).abs() < 0.03, "{shape}"),
            other => panic!("{other:?}"),
        }
    }
}
