//! Threshold scaling factors, detection probability and the two-model
//! Neyman-Pearson / likelihood-ratio detector.

use statrs::function::beta::beta_reg;

use super::ClutterModel;
use crate::detector::Label;
use crate::error::check_pfa;
use crate::numeric::invert_monotone;
use crate::{Error, Result};

/// CA-CFAR scaling factor for one PUT pixel against `n` iid exponential
/// reference pixels: `α = n (pfa^(-1/n) - 1)`.
///
/// This makes `P(X / μ̂ > α) = (1 + α/n)^(-n)` equal `pfa` exactly.
pub fn alpha_ca_exponential(n: usize, pfa: f64) -> Result<f64> {
    check_pfa(pfa)?;
    if n == 0 {
        return Err(Error::InvalidParameter("boundary count must be >= 1".into()));
    }
    let n = n as f64;
    Ok(n * (-pfa.ln() / n).exp_m1())
}

/// CA-CFAR scaling factor for an `m`-pixel PUT average against `n`
/// reference pixels, all iid exponential. The statistic `X̄ / μ̂` is
/// F(2m, 2n) distributed; `m = 1` reduces to [`alpha_ca_exponential`].
pub fn alpha_ca_exponential_block(m: usize, n: usize, pfa: f64) -> Result<f64> {
    check_pfa(pfa)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("PUT and boundary counts must be >= 1".into()));
    }
    if m == 1 {
        return alpha_ca_exponential(n, pfa);
    }
    let (a, b) = (m as f64, n as f64);
    // P(F > x) = I_{n/(n + m x)}(n, m).
    let sf = |x: f64| beta_reg(b, a, b / (b + a * x));
    invert_monotone(|x| Ok(-sf(x)), -pfa, 0.0, 1.0)
}

/// Threshold with `P(X > α) = pfa` under `model`, i.e. its `1 - pfa`
/// quantile. For normalised test statistics pass the statistic's own
/// distribution rather than the pixel distribution.
pub fn alpha_numeric(model: &ClutterModel, pfa: f64) -> Result<f64> {
    check_pfa(pfa)?;
    model.quantile(1.0 - pfa)
}

/// `P(X > alpha)` under the target model.
pub fn pd_for_target(target: &ClutterModel, alpha: f64) -> Result<f64> {
    if alpha.is_nan() {
        return Err(Error::OutOfSupport(alpha));
    }
    if alpha < target.support_min() {
        return Ok(1.0);
    }
    target.sf(alpha)
}

/// Background and target likelihoods with their priors.
#[derive(Debug, Clone)]
pub struct NpConfig {
    pub background: ClutterModel,
    pub target: ClutterModel,
    pub prior_background: f64,
    pub prior_target: f64,
}

impl NpConfig {
    pub fn new(
        background: ClutterModel,
        target: ClutterModel,
        prior_background: f64,
        prior_target: f64,
    ) -> Result<Self> {
        let ok = |p: f64| p > 0.0 && p < 1.0;
        if !ok(prior_background) || !ok(prior_target) || (prior_background + prior_target - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidParameter(format!(
                "priors must lie in (0,1) and sum to 1, got {prior_background} and {prior_target}"
            )));
        }
        Ok(NpConfig {
            background,
            target,
            prior_background,
            prior_target,
        })
    }

    /// Threshold on the likelihood ratio: `P(ω_B) / P(ω_T)`.
    pub fn ratio_threshold(&self) -> f64 {
        self.prior_background / self.prior_target
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpDecision {
    pub ratio: f64,
    pub threshold: f64,
    pub label: Label,
}

/// Likelihood ratio `p(x|ω_T) / p(x|ω_B)`; target iff it exceeds the prior
/// ratio. Ties go to background.
pub fn np_likelihood_ratio(cfg: &NpConfig, x: f64) -> Result<NpDecision> {
    let pt = cfg.target.pdf(x)?;
    let pb = cfg.background.pdf(x)?;
    let ratio = if pb == 0.0 && pt == 0.0 {
        0.0
    } else {
        pt / pb
    };
    let threshold = cfg.ratio_threshold();
    Ok(NpDecision {
        ratio,
        threshold,
        label: Label::from_exceeds(ratio > threshold),
    })
}
