//! Per-pixel CFAR decision rules.
//!
//! Every rule compares a test statistic against a threshold scaling factor
//! α and labels the pixel under test a target only when the statistic is
//! strictly greater; ties go to background.
//!
//! One-parameter rules under the linear and square laws divide the PUT
//! average by a background level (the boundary mean for CA, the smallest
//! or greatest of four window means for SOCA/GOCA, an order statistic for
//! OS). Under the log law the same rules subtract instead of divide, so a
//! log-law detector with `ln α` reproduces the square-law detector with α.
//! Two-parameter rules normalise by the boundary spread.
//!
//! [`DetectorConfig::solve_alpha`] turns a requested false-alarm rate into
//! α: exactly where a closed form exists, by seeded Monte Carlo otherwise.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::check_pfa;
use crate::models::{alpha_ca_exponential_block, ClutterModel};
use crate::numeric::{invert_monotone, normal_quantile};
use crate::raster::Domain;
use crate::rng::{substream, Purpose};
use crate::stencil::StencilSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Target,
    Background,
}

impl Label {
    pub fn from_exceeds(exceeds: bool) -> Self {
        if exceeds {
            Label::Target
        } else {
            Label::Background
        }
    }

    pub fn is_target(self) -> bool {
        self == Label::Target
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub statistic: f64,
    pub threshold: f64,
    pub label: Label,
}

impl Decision {
    /// Target iff `statistic > threshold`. A NaN statistic is background.
    pub fn new(statistic: f64, threshold: f64) -> Self {
        Decision {
            statistic,
            threshold,
            label: Label::from_exceeds(statistic > threshold),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    Ca,
    Soca,
    Goca,
    /// Order statistic at fraction `q` of the boundary ring.
    Os { q: f64 },
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Ca => "ca",
            Strategy::Soca => "soca",
            Strategy::Goca => "goca",
            Strategy::Os { .. } => "os",
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// `ca`, `soca`, `goca`, `os` (q = 3/4) or `os:<q>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (head, q) = s.split_once(':').unwrap_or((&s, ""));
        match head {
            "ca" => Ok(Strategy::Ca),
            "soca" => Ok(Strategy::Soca),
            "goca" => Ok(Strategy::Goca),
            "os" => {
                let q = if q.is_empty() {
                    0.75
                } else {
                    q.parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad OS fraction '{q}'")))?
                };
                Ok(Strategy::Os { q })
            }
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Os { q } => write!(f, "os:{q}"),
            s => f.write_str(s.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterization {
    One,
    Two,
}

impl FromStr for Parameterization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "one" => Ok(Parameterization::One),
            "2" | "two" => Ok(Parameterization::Two),
            other => Err(Error::InvalidParameter(format!("unknown parameterization '{other}'"))),
        }
    }
}

/// Which pixel domain the detector consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    /// Magnitude (envelope) pixels.
    Linear,
    /// Power pixels.
    Square,
    /// Log-power pixels.
    Log,
}

impl Law {
    pub fn name(self) -> &'static str {
        match self {
            Law::Linear => "linear",
            Law::Square => "square",
            Law::Log => "log",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            Law::Linear => Domain::Magnitude,
            Law::Square => Domain::Power,
            Law::Log => Domain::LogPower,
        }
    }

    /// Maps a power value into this law's domain.
    pub fn from_power(self, p: f64) -> f64 {
        match self {
            Law::Linear => p.sqrt(),
            Law::Square => p,
            Law::Log => p.ln(),
        }
    }
}

impl FromStr for Law {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Law::Linear),
            "square" | "sq" => Ok(Law::Square),
            "log" => Ok(Law::Log),
            other => Err(Error::InvalidParameter(format!("unknown law '{other}'"))),
        }
    }
}

/// How one-parameter log-law rules form averages of log pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogEstimator {
    /// `ln(mean(exp L))`: the log of the power-domain average. Keeps the
    /// log-law mask identical to the square-law mask.
    #[default]
    LogOfMean,
    /// Plain average of the log pixels.
    MeanOfLog,
}

impl FromStr for LogEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "log-of-mean" | "logofmean" => Ok(LogEstimator::LogOfMean),
            "mean-of-log" | "meanoflog" => Ok(LogEstimator::MeanOfLog),
            other => Err(Error::InvalidParameter(format!("unknown log estimator '{other}'"))),
        }
    }
}

/// Arithmetic mean of the PUT block.
pub fn put_statistic(put: &[f64]) -> Result<f64> {
    if put.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(put.iter().sum::<f64>() / put.len() as f64)
}

fn one_parameter(x_put: f64, background: f64, alpha: f64, law: Law) -> Result<Decision> {
    match law {
        Law::Log => Ok(Decision::new(x_put - background, alpha)),
        _ if background > 0.0 => Ok(Decision::new(x_put / background, alpha)),
        _ => Err(Error::NonPositiveBackground(background)),
    }
}

/// `x / μ̂ > α`, or `x - μ̂ > α` under the log law.
pub fn decide_ca(x_put: f64, mu_hat: f64, alpha: f64, law: Law) -> Result<Decision> {
    one_parameter(x_put, mu_hat, alpha, law)
}

fn check_windows(means: &[f64; 4], law: Law) -> Result<()> {
    match means.iter().find(|m| law != Law::Log && **m <= 0.0 || m.is_nan()) {
        Some(m) => Err(Error::NonPositiveBackground(*m)),
        None => Ok(()),
    }
}

/// Smallest-of: the background is the least of the four window means.
pub fn decide_soca(x_put: f64, means: [f64; 4], alpha: f64, law: Law) -> Result<Decision> {
    check_windows(&means, law)?;
    one_parameter(x_put, means.iter().copied().fold(f64::INFINITY, f64::min), alpha, law)
}

/// Greatest-of: the background is the largest of the four window means.
pub fn decide_goca(x_put: f64, means: [f64; 4], alpha: f64, law: Law) -> Result<Decision> {
    check_windows(&means, law)?;
    one_parameter(x_put, means.iter().copied().fold(f64::NEG_INFINITY, f64::max), alpha, law)
}

/// 1-based rank `⌈q·n⌉` of the OS background level, clamped to `[1, n]`.
pub fn os_rank(n: usize, q: f64) -> usize {
    // Guard against q·n landing a hair above an integer.
    let r = (q * n as f64 - 1e-9).ceil() as usize;
    r.clamp(1, n.max(1))
}

/// The `⌈q·n⌉`-th smallest boundary pixel.
pub fn order_statistic(boundary: &[f64], q: f64) -> Result<f64> {
    if boundary.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_fraction(q)?;
    let mut v = boundary.to_vec();
    let k = os_rank(v.len(), q) - 1;
    let (_, x, _) = v.select_nth_unstable_by(k, f64::total_cmp);
    Ok(*x)
}

pub fn decide_os(x_put: f64, boundary: &[f64], q: f64, alpha: f64, law: Law) -> Result<Decision> {
    one_parameter(x_put, order_statistic(boundary, q)?, alpha, law)
}

/// `(x - μ̂) / (σ̂/√M) > α`. Serves the log law (log inputs) and the linear
/// laws alike.
pub fn decide_two_param(x_put: f64, mu_hat: f64, sigma_hat: f64, alpha: f64, m: usize) -> Result<Decision> {
    if !(sigma_hat > 0.0) {
        return Err(Error::ZeroSigma);
    }
    let sigma_eff = sigma_hat / (m.max(1) as f64).sqrt();
    Ok(Decision::new((x_put - mu_hat) / sigma_eff, alpha))
}

/// Negated Gaussian background discriminant:
/// `½(x-μ)²/σ² + ½ ln σ⁻² - ln P(ω_B)`. Large scores mean "not background".
pub fn qdf_background_discriminant(x_put: f64, mu: f64, sigma: f64, prior_background: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::ZeroSigma);
    }
    if !(prior_background > 0.0 && prior_background <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "background prior must be in (0,1], got {prior_background}"
        )));
    }
    let z = (x_put - mu) / sigma;
    Ok(0.5 * z * z + 0.5 * (sigma * sigma).recip().ln() - prior_background.ln())
}

pub fn qdf_decide(score: f64, alpha_qdf: f64) -> Decision {
    Decision::new(score, alpha_qdf)
}

/// QDF threshold equivalent to a (squared) CFAR factor α:
/// `α_QDF = α²/2 - ln P(ω_B)`.
pub fn qdf_threshold_for(alpha: f64, prior_background: f64) -> f64 {
    0.5 * alpha * alpha - prior_background.ln()
}

/// Inverse of [`qdf_threshold_for`]: `α = √(2 α_QDF + 2 ln P(ω_B))`.
pub fn cfar_alpha_for(alpha_qdf: f64, prior_background: f64) -> f64 {
    (2.0 * alpha_qdf + 2.0 * prior_background.ln()).sqrt()
}

fn check_fraction(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("OS fraction must be in (0,1], got {q}")))
    }
}

/// Pixels gathered from one stencil placement.
#[derive(Debug, Clone, Default)]
pub struct Neighborhood {
    pub put: Vec<f64>,
    pub boundary: Vec<f64>,
    /// Top, left, bottom and right boundary windows.
    pub windows: [Vec<f64>; 4],
}

impl Neighborhood {
    /// Collects pixels with `value(dr, dc)` at every stencil offset.
    pub fn gather(stencil: &StencilSpec, value: impl Fn(isize, isize) -> f64) -> Self {
        let at = |o: &[(isize, isize)]| o.iter().map(|&(r, c)| value(r, c)).collect::<Vec<_>>();
        let split = stencil.split_windows();
        let [t, l, b, r] = split.all();
        Neighborhood {
            put: at(&stencil.put_offsets()),
            boundary: at(&stencil.boundary_offsets()),
            windows: [at(t), at(l), at(b), at(r)],
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Detector settings. The background model describes power-domain pixels
/// and is only consulted when α has to be solved from the false-alarm rate.
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    pub strategy: Strategy,
    pub parameterization: Parameterization,
    pub law: Law,
    pub pfa: f64,
    pub alpha_override: Option<f64>,
    pub background: ClutterModel,
    pub log_estimator: LogEstimator,
    /// Monte Carlo trials for α calibration; `None` picks `2000/pfa`,
    /// capped at [`MAX_CALIBRATION_TRIALS`].
    pub calibration_trials: Option<usize>,
    pub calibration_seed: u64,
}

pub const MAX_CALIBRATION_TRIALS: usize = 4_000_000;
const MIN_CALIBRATION_TRIALS: usize = 200_000;
const CALIBRATION_CHUNK: usize = 8192;

impl DetectorConfig {
    /// CA, one-parameter, exponential background.
    pub fn new(strategy: Strategy, law: Law, pfa: f64) -> Result<Self> {
        let cfg = DetectorConfig {
            strategy,
            parameterization: Parameterization::One,
            law,
            pfa,
            alpha_override: None,
            background: ClutterModel::exponential(1.0)?,
            log_estimator: LogEstimator::default(),
            calibration_trials: None,
            calibration_seed: 0x5eed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn two_parameter(mut self) -> Result<Self> {
        self.parameterization = Parameterization::Two;
        self.validate()?;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha_override = Some(alpha);
        self.validate()?;
        Ok(self)
    }

    pub fn with_background(mut self, model: ClutterModel) -> Self {
        self.background = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_pfa(self.pfa)?;
        if let Strategy::Os { q } = self.strategy {
            check_fraction(q)?;
        }
        if let Some(a) = self.alpha_override {
            // The log law works with ln α, which may be any real.
            if !(a.is_finite() && (a > 0.0 || self.law == Law::Log || self.parameterization == Parameterization::Two)) {
                return Err(Error::InvalidParameter(format!("alpha must be positive, got {a}")));
            }
        }
        if self.parameterization == Parameterization::Two && self.strategy != Strategy::Ca {
            return Err(Error::InvalidParameter(
                "two-parameter detection is defined for CA only".into(),
            ));
        }
        Ok(())
    }

    /// The statistic the rule compares against α.
    pub fn statistic(&self, nb: &Neighborhood) -> Result<f64> {
        // The two-parameter rule is a Gaussian test on the samples as given,
        // so the log-of-mean estimator only applies to one-parameter rules.
        let log_of_mean = self.law == Law::Log
            && self.log_estimator == LogEstimator::LogOfMean
            && self.parameterization == Parameterization::One;
        let avg = |xs: &[f64]| -> f64 {
            if log_of_mean {
                mean(&xs.iter().map(|x| x.exp()).collect::<Vec<_>>()).ln()
            } else {
                mean(xs)
            }
        };
        if nb.put.is_empty() || nb.boundary.is_empty() {
            return Err(Error::EmptyInput);
        }
        let x = if log_of_mean { avg(&nb.put) } else { put_statistic(&nb.put)? };
        let d = match (self.parameterization, self.strategy) {
            (Parameterization::Two, _) => {
                let mu = mean(&nb.boundary);
                let var = nb.boundary.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / nb.boundary.len() as f64;
                decide_two_param(x, mu, var.sqrt(), 0.0, nb.put.len())?
            }
            (_, Strategy::Ca) => decide_ca(x, avg(&nb.boundary), 0.0, self.law)?,
            (_, Strategy::Soca) => decide_soca(x, nb.windows.each_ref().map(|w| avg(w)), 0.0, self.law)?,
            (_, Strategy::Goca) => decide_goca(x, nb.windows.each_ref().map(|w| avg(w)), 0.0, self.law)?,
            (_, Strategy::Os { q }) => decide_os(x, &nb.boundary, q, 0.0, self.law)?,
        };
        Ok(d.statistic)
    }

    /// Decision at one stencil placement.
    pub fn evaluate(&self, nb: &Neighborhood, alpha: f64) -> Result<Decision> {
        Ok(Decision::new(self.statistic(nb)?, alpha))
    }

    /// α for this detector on `stencil`.
    ///
    /// Closed forms are used for exponential clutter where they exist (CA
    /// and single-pixel OS); two-parameter rules use the standard-normal
    /// quantile; everything else is calibrated by Monte Carlo with the
    /// configured seed, so repeated calls agree exactly.
    pub fn solve_alpha(&self, stencil: &StencilSpec) -> Result<f64> {
        match self.exact_alpha(stencil)? {
            Some(a) => Ok(a),
            None => self.calibrate(stencil),
        }
    }

    /// α without simulation: the override, the normal quantile for
    /// two-parameter rules, or a closed form for exponential clutter.
    /// `None` means [`Self::solve_alpha`] would calibrate by Monte Carlo.
    pub fn exact_alpha(&self, stencil: &StencilSpec) -> Result<Option<f64>> {
        self.validate()?;
        if let Some(a) = self.alpha_override {
            return Ok(Some(a));
        }
        if self.parameterization == Parameterization::Two {
            return Ok(Some(normal_quantile(1.0 - self.pfa)));
        }
        let exponential = matches!(self.background, ClutterModel::Exponential { .. });
        let log_ok = self.law != Law::Log || self.log_estimator == LogEstimator::LogOfMean;
        let (m, n) = (stencil.put_count(), stencil.boundary_count());
        // Square-law α for the exact cases; other laws map from it.
        let square = match self.strategy {
            Strategy::Ca if exponential && log_ok && self.law != Law::Linear => {
                Some(alpha_ca_exponential_block(m, n, self.pfa)?)
            }
            Strategy::Os { q } if exponential && log_ok && m == 1 => {
                Some(alpha_os_exponential(n, os_rank(n, q), self.pfa)?)
            }
            _ => None,
        };
        Ok(square.map(|a| match self.law {
            Law::Square => a,
            Law::Linear => a.sqrt(),
            Law::Log => a.ln(),
        }))
    }

    fn calibration_trials(&self) -> Result<usize> {
        let trials = match self.calibration_trials {
            Some(t) => t,
            None => ((2000.0 / self.pfa).ceil() as usize).clamp(MIN_CALIBRATION_TRIALS, MAX_CALIBRATION_TRIALS),
        };
        if (trials as f64) * self.pfa < 10.0 {
            return Err(Error::ConvergenceFailure(format!(
                "{trials} calibration trials cannot resolve pfa {}; supply alpha directly",
                self.pfa
            )));
        }
        Ok(trials)
    }

    /// Empirical `1 - pfa` quantile of the statistic on simulated stencils
    /// of iid background pixels.
    pub fn calibrate(&self, stencil: &StencilSpec) -> Result<f64> {
        let trials = self.calibration_trials()?;
        let (rows, cols) = (stencil.rows(), stencil.cols());
        let (hr, hc) = stencil.half();
        let chunks = trials.div_ceil(CALIBRATION_CHUNK);
        let per_chunk: Vec<Result<Vec<f64>>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = substream(self.calibration_seed, Purpose::Calibration, c as u64);
                let count = CALIBRATION_CHUNK.min(trials - c * CALIBRATION_CHUNK);
                let mut out = Vec::with_capacity(count);
                for _ in 0..count {
                    let patch: Vec<f64> = self
                        .background
                        .sample_n(&mut rng, rows * cols)
                        .into_iter()
                        .map(|p| self.law.from_power(p))
                        .collect();
                    let nb = Neighborhood::gather(stencil, |dr, dc| {
                        patch[(hr as isize + dr) as usize * cols + (hc as isize + dc) as usize]
                    });
                    out.push(self.statistic(&nb)?);
                }
                Ok(out)
            })
            .collect();
        let mut stats = Vec::with_capacity(trials);
        for chunk in per_chunk {
            stats.extend(chunk?);
        }
        stats.sort_by(f64::total_cmp);
        let exceed = (self.pfa * trials as f64).round() as usize;
        Ok(stats[trials - 1 - exceed.min(trials - 1)])
    }
}

/// Square-law OS α for one PUT pixel against `n` iid exponential reference
/// pixels ranked at `k`: solves `Π_{i<k} (n-i)/(n-i+α) = pfa`.
pub fn alpha_os_exponential(n: usize, k: usize, pfa: f64) -> Result<f64> {
    check_pfa(pfa)?;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("rank {k} outside 1..={n}")));
    }
    let log_pfa = |a: f64| -> f64 {
        (0..k)
            .map(|i| {
                let r = (n - i) as f64;
                (r / (r + a)).ln()
            })
            .sum()
    };
    invert_monotone(|a| Ok(-log_pfa(a)), -pfa.ln(), 0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::Strategy;
    use proptest::prelude::*;

    #[test]
    fn put_statistic_examples() {
        assert_eq!(put_statistic(&[7.0]).unwrap(), 7.0);
        assert_eq!(put_statistic(&[1.0, 3.0]).unwrap(), 2.0);
        assert_eq!(put_statistic(&[2.5; 4]).unwrap(), 2.5);
        assert!(matches!(put_statistic(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn ca_examples() {
        assert!(decide_ca(10.0, 1.0, 7.3516, Law::Square).unwrap().label.is_target());
        assert_eq!(decide_ca(3.0, 3.0, 1.0, Law::Square).unwrap().label, Label::Background);
        assert!(matches!(
            decide_ca(1.0, 0.0, 1.0, Law::Linear),
            Err(Error::NonPositiveBackground(_))
        ));
        // Log law: ln x - ln μ against ln α.
        for x in [0.5, 3.0, 7.0, 7.5, 40.0] {
            let lin = decide_ca(x, 1.0, 7.3516, Law::Linear).unwrap().label;
            let log = decide_ca(x.ln(), 1f64.ln(), 7.3516f64.ln(), Law::Log).unwrap().label;
            assert_eq!(lin, log);
        }
    }

    #[test]
    fn soca_goca_examples() {
        let m = [1.0, 2.0, 3.0, 4.0];
        assert!(decide_soca(10.0, m, 4.0, Law::Square).unwrap().label.is_target());
        let g = decide_goca(10.0, m, 4.0, Law::Square).unwrap();
        assert_eq!((g.statistic, g.label), (2.5, Label::Background));
        let eq = [2.0; 4];
        let ca = decide_ca(9.0, 2.0, 4.0, Law::Square).unwrap();
        assert_eq!(decide_soca(9.0, eq, 4.0, Law::Square).unwrap(), ca);
        assert_eq!(decide_goca(9.0, eq, 4.0, Law::Square).unwrap(), ca);
        assert!(decide_soca(1.0, [1.0, 0.0, 1.0, 1.0], 1.0, Law::Square).is_err());
    }

    #[test]
    fn os_examples() {
        let b: Vec<f64> = (1..=56).rev().map(f64::from).collect();
        assert_eq!(order_statistic(&b, 0.75).unwrap(), 42.0);
        assert_eq!(order_statistic(&b, 1.0).unwrap(), 56.0);
        assert_eq!(os_rank(4, 0.5), 2);
        let c = [3.0; 20];
        for q in [0.1, 0.5, 0.75, 1.0] {
            assert_eq!(
                decide_os(8.0, &c, q, 2.0, Law::Square).unwrap(),
                decide_ca(8.0, 3.0, 2.0, Law::Square).unwrap()
            );
        }
        assert!(order_statistic(&c, 0.0).is_err());
        assert!(matches!(order_statistic(&[], 0.5), Err(Error::EmptyInput)));
    }

    #[test]
    fn two_param_examples() {
        let d = decide_two_param(12.0, 5.0, 2.0, 3.0, 1).unwrap();
        assert_eq!((d.statistic, d.label), (3.5, Label::Target));
        let d = decide_two_param(8.0, 5.0, 2.0, 3.0, 4).unwrap();
        assert_eq!((d.statistic, d.label), (3.0, Label::Background));
        assert!(decide_two_param(5.0 + 3.0 * 2.0 + 1e-9, 5.0, 2.0, 3.0, 1).unwrap().label.is_target());
        assert!(matches!(decide_two_param(1.0, 1.0, 0.0, 1.0, 1), Err(Error::ZeroSigma)));
    }

    #[test]
    fn qdf_examples() {
        let s = qdf_background_discriminant(4.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(s, 4.5);
        let vertex = qdf_background_discriminant(2.0, 2.0, 0.5, 0.3).unwrap();
        assert!((vertex - (0.5 * 4f64.ln() - 0.3f64.ln())).abs() < 1e-15);
        for x in [1.9, 2.1, 5.0] {
            assert!(qdf_background_discriminant(x, 2.0, 0.5, 0.3).unwrap() > vertex);
        }
        assert!(matches!(qdf_background_discriminant(1.0, 0.0, 0.0, 0.5), Err(Error::ZeroSigma)));
        assert!((cfar_alpha_for(qdf_threshold_for(3.0, 0.2), 0.2) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn os_alpha_matches_monte_carlo() {
        let stencil = StencilSpec::new(1, 1, 1, 3).unwrap();
        let cfg = DetectorConfig::new(Strategy::Os { q: 0.75 }, Law::Square, 1e-2).unwrap();
        let exact = cfg.solve_alpha(&stencil).unwrap();
        let mc = cfg.calibrate(&stencil).unwrap();
        assert!((exact / mc - 1.0).abs() < 0.03, "{exact} vs {mc}");
        // With k = n the product telescopes only numerically; sanity-check
        // rank 1: pfa = n/(n+α).
        let a = alpha_os_exponential(10, 1, 0.5).unwrap();
        assert!((a - 10.0).abs() < 1e-9);
    }

    #[test]
    fn ca_alpha_routes_to_closed_form() {
        let st = StencilSpec::new(1, 1, 2, 2).unwrap();
        let sq = DetectorConfig::new(Strategy::Ca, Law::Square, 1e-3).unwrap();
        let a = sq.solve_alpha(&st).unwrap();
        assert!((a - 7.351_872_451_393_128).abs() < 1e-9);
        let lg = DetectorConfig::new(Strategy::Ca, Law::Log, 1e-3).unwrap();
        assert_eq!(lg.solve_alpha(&st).unwrap(), a.ln());
        let two = sq.clone().two_parameter().unwrap();
        assert!((two.solve_alpha(&st).unwrap() - 3.090_232_306_167_813).abs() < 1e-9);
        assert_eq!(sq.with_alpha(4.0).unwrap().solve_alpha(&st).unwrap(), 4.0);
    }

    #[test]
    fn calibration_is_seeded_and_deterministic() {
        let st = StencilSpec::new(1, 1, 1, 1).unwrap();
        let mut cfg = DetectorConfig::new(Strategy::Goca, Law::Linear, 1e-2).unwrap();
        cfg.calibration_trials = Some(50_000);
        assert_eq!(cfg.calibrate(&st).unwrap(), cfg.calibrate(&st).unwrap());
        cfg.calibration_trials = Some(10);
        assert!(matches!(cfg.calibrate(&st), Err(Error::ConvergenceFailure(_))));
    }

    #[test]
    fn config_validation() {
        assert!(DetectorConfig::new(Strategy::Ca, Law::Square, 2.0).is_err());
        assert!(DetectorConfig::new(Strategy::Os { q: 0.0 }, Law::Square, 0.1).is_err());
        assert!(DetectorConfig::new(Strategy::Os { q: 1.5 }, Law::Square, 0.1).is_err());
        let c = DetectorConfig::new(Strategy::Ca, Law::Square, 0.1).unwrap();
        assert!(c.clone().with_alpha(-1.0).is_err());
        assert!(DetectorConfig::new(Strategy::Soca, Law::Square, 0.1).unwrap().two_parameter().is_err());
        assert_eq!("os:0.5".parse::<Strategy>().unwrap(), Strategy::Os { q: 0.5 });
        assert_eq!("os".parse::<Strategy>().unwrap(), Strategy::Os { q: 0.75 });
    }

    proptest! {
        #[test]
        fn raising_alpha_never_adds_targets(
            x in 0.0f64..100.0,
            means in proptest::array::uniform4(0.01f64..10.0),
            a in 0.0f64..20.0,
            da in 0.0f64..5.0,
        ) {
            let pairs = [
                (decide_ca(x, means[0], a, Law::Square).unwrap(), decide_ca(x, means[0], a + da, Law::Square).unwrap()),
                (decide_soca(x, means, a, Law::Square).unwrap(), decide_soca(x, means, a + da, Law::Square).unwrap()),
                (decide_goca(x, means, a, Law::Square).unwrap(), decide_goca(x, means, a + da, Law::Square).unwrap()),
                (decide_os(x, &means, 0.75, a, Law::Square).unwrap(), decide_os(x, &means, 0.75, a + da, Law::Square).unwrap()),
            ];
            for (lo, hi) in pairs {
                prop_assert!(!(hi.label.is_target() && !lo.label.is_target()));
            }
        }

        #[test]
        fn soca_dominates_goca(x in 0.0f64..100.0, means in proptest::array::uniform4(0.01f64..10.0)) {
            let s = decide_soca(x, means, 1.0, Law::Square).unwrap();
            let g = decide_goca(x, means, 1.0, Law::Square).unwrap();
            prop_assert!(s.statistic >= g.statistic);
        }

        #[test]
        fn ratio_rules_are_scale_invariant(
            x in 0.01f64..100.0,
            b in proptest::collection::vec(0.01f64..10.0, 8),
            c in 0.001f64..1000.0,
        ) {
            let cfg = DetectorConfig::new(Strategy::Ca, Law::Square, 0.01).unwrap();
            let nb = |k: f64| Neighborhood {
                put: vec![x * k],
                boundary: b.iter().map(|v| v * k).collect(),
                windows: [vec![b[0] * k, b[1] * k], vec![b[2] * k, b[3] * k], vec![b[4] * k, b[5] * k], vec![b[6] * k, b[7] * k]],
            };
            for strategy in [Strategy::Ca, Strategy::Soca, Strategy::Goca, Strategy::Os { q: 0.75 }] {
                let cfg = DetectorConfig { strategy, ..cfg.clone() };
                let (s1, s2) = (cfg.statistic(&nb(1.0)).unwrap(), cfg.statistic(&nb(c)).unwrap());
                prop_assert!((s1 - s2).abs() <= 1e-9 * s1.abs().max(1.0));
            }
        }

        #[test]
        fn os_is_monotone_in_q(b in proptest::collection::vec(0.01f64..10.0, 1..60), q1 in 0.01f64..1.0, q2 in 0.01f64..1.0) {
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            prop_assert!(order_statistic(&b, lo).unwrap() <= order_statistic(&b, hi).unwrap());
        }
    }
}
