//! CFAR-loss bookkeeping.
//!
//! χ measures how demanding the false-alarm rate is, `m_eff` discounts the
//! boundary-ring size for detectors that waste reference pixels, and the
//! CFAR ratio χ/m_eff is the abscissa of the universal loss curve.

use crate::detector::{Law, Strategy};
use crate::error::check_pfa;
use crate::{Error, Result};

/// `χ = -log10(pfa)`.
pub fn chi(pfa: f64) -> Result<f64> {
    check_pfa(pfa)?;
    Ok(-pfa.log10())
}

/// Tabulated `k` for a detector and law. Only CA and GOCA are tabulated.
pub fn k_lookup(strategy: Strategy, law: Law) -> Result<f64> {
    match (strategy, law) {
        (Strategy::Ca, Law::Square) => Ok(0.0),
        (Strategy::Ca, Law::Linear) => Ok(0.09),
        (Strategy::Ca, Law::Log) => Ok(0.65),
        (Strategy::Goca, Law::Square) => Ok(0.37),
        (Strategy::Goca, Law::Linear) => Ok(0.5),
        (Strategy::Goca, Law::Log) => Ok(1.26),
        (s, l) => Err(Error::NotTabulated(format!("{} with the {} law", s.name(), l.name()))),
    }
}

/// Effective reference count `(m + k) / (1 + k)`.
pub fn m_eff(m: usize, k: f64) -> Result<f64> {
    if m == 0 || !(k >= 0.0) {
        return Err(Error::InvalidParameter(format!("need m >= 1 and k >= 0, got m={m} k={k}")));
    }
    Ok((m as f64 + k) / (1.0 + k))
}

/// `χ / m_eff`.
pub fn cfar_ratio(chi: f64, m_eff: f64) -> Result<f64> {
    if !(m_eff > 0.0) {
        return Err(Error::InvalidParameter(format!("m_eff must be positive, got {m_eff}")));
    }
    Ok(chi / m_eff)
}

/// Boundary size a log detector needs to match a linear one with `n`
/// reference pixels: `⌈1.65 n - 0.65⌉`.
pub fn n_log(n_linear: usize) -> Result<usize> {
    if n_linear == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    // Integer form of ceil((165 n - 65) / 100), free of rounding error.
    Ok((165 * n_linear - 65).div_ceil(100))
}

/// Everything the `loss` report prints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub chi: f64,
    pub k: f64,
    pub m_eff: f64,
    pub ratio: f64,
    pub n_log: usize,
}

pub fn loss_report(strategy: Strategy, law: Law, pfa: f64, m: usize) -> Result<LossReport> {
    let chi = chi(pfa)?;
    let k = k_lookup(strategy, law)?;
    let m_eff = m_eff(m, k)?;
    Ok(LossReport {
        chi,
        k,
        m_eff,
        ratio: cfar_ratio(chi, m_eff)?,
        n_log: n_log(m)?,
    })
}
