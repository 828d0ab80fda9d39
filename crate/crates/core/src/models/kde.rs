//! Gaussian kernel density estimate of the background.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{fit_mean_std, ClutterModel};
use crate::numeric::{normal_cdf, normal_pdf, normal_sf};
use crate::{Error, Result};

// Kernel mass beyond this many bandwidths is below 1e-17.
const REACH: f64 = 8.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Silverman's rule, `1.06 σ̂ n^(-1/5)`.
    Silverman,
    Fixed(f64),
}

/// Gaussian mixture centred on the (sorted) samples.
#[derive(Debug, Clone)]
pub struct Kde {
    samples: Arc<Vec<f64>>,
    bandwidth: f64,
}

/// Silverman's rule of thumb, with σ̂ the 1/N standard deviation.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    let (_, sd) = fit_mean_std(samples)?;
    Ok(1.06 * sd * (samples.len() as f64).powf(-0.2))
}

/// Builds a KDE model from at least two samples.
pub fn kde_fit(samples: &[f64], bandwidth: Bandwidth) -> Result<ClutterModel> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let h = match bandwidth {
        Bandwidth::Silverman => silverman_bandwidth(samples)?,
        Bandwidth::Fixed(h) => h,
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {h}")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ClutterModel::Kde(Kde {
        samples: Arc::new(sorted),
        bandwidth: h,
    }))
}

impl Kde {
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn window(&self, x: f64) -> (usize, usize) {
        let reach = REACH * self.bandwidth;
        let lo = self.samples.partition_point(|&s| s < x - reach);
        let hi = self.samples.partition_point(|&s| s <= x + reach);
        (lo, hi)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let h = self.bandwidth;
        let s: f64 = self.samples[lo..hi]
            .iter()
            .map(|&xi| normal_pdf((x - xi) / h))
            .sum();
        s / (h * self.samples.len() as f64)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let h = self.bandwidth;
        let partial: f64 = self.samples[lo..hi]
            .iter()
            .map(|&xi| normal_cdf((x - xi) / h))
            .sum();
        (lo as f64 + partial) / self.samples.len() as f64
    }

    pub fn sf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let h = self.bandwidth;
        let partial: f64 = self.samples[lo..hi]
            .iter()
            .map(|&xi| normal_sf((x - xi) / h))
            .sum();
        ((self.samples.len() - hi) as f64 + partial) / self.samples.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        let lo = self.samples[0] - REACH * self.bandwidth;
        let hi = self.samples[self.samples.len() - 1] + REACH * self.bandwidth;
        crate::numeric::invert_monotone(|x| Ok(self.cdf(x)), p, lo, hi)
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let i = rng.random_range(0..self.samples.len());
                let z: f64 = StandardNormal.sample(rng);
                self.samples[i] + self.bandwidth * z
            })
            .collect()
    }
}
