//! EDF goodness-of-fit statistics.

use super::ClutterModel;
use crate::{Error, Result};

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// One-sample Cramér–von Mises statistic
/// `W² = 1/(12n) + Σ (F(x₍ᵢ₎) - (2i-1)/(2n))²`.
pub fn cvm_distance(samples: &[f64], model: &ClutterModel) -> Result<f64> {
    let xs = sorted(samples)?;
    let n = xs.len() as f64;
    let mut w2 = 1.0 / (12.0 * n);
    for (i, &x) in xs.iter().enumerate() {
        let d = model.cdf(x)? - (2.0 * i as f64 + 1.0) / (2.0 * n);
        w2 += d * d;
    }
    Ok(w2)
}

/// One-sample Anderson–Darling statistic
/// `A² = -n - (1/n) Σ (2i-1) [ln u₍ᵢ₎ + ln(1 - u₍ₙ₊₁₋ᵢ₎)]`.
///
/// The upper tail is taken from the model's survival function so that
/// far-tail samples keep their weight.
pub fn anderson_darling(samples: &[f64], model: &ClutterModel) -> Result<f64> {
    let xs = sorted(samples)?;
    let n = xs.len();
    let mut log_cdf = Vec::with_capacity(n);
    let mut log_sf = Vec::with_capacity(n);
    for &x in &xs {
        let (u, s) = (model.cdf(x)?, model.sf(x)?);
        if u <= 0.0 || s <= 0.0 {
            return Err(Error::DegenerateCdf(x));
        }
        log_cdf.push(u.ln());
        log_sf.push(s.ln());
    }
    let total: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (log_cdf[i] + log_sf[n - 1 - i]))
        .sum();
    Ok(-(n as f64) - total / n as f64)
}

/// k-sample Anderson–Darling statistic in the midrank form that allows
/// ties (Scholz and Stephens' `A²_akN`). Unnormalised.
pub fn ad_ksample(groups: &[&[f64]]) -> Result<f64> {
    if groups.len() < 2 {
        return Err(Error::InvalidParameter("need at least two groups".into()));
    }
    let mut sorted_groups = Vec::with_capacity(groups.len());
    for g in groups {
        sorted_groups.push(sorted(g)?);
    }
    let mut pooled: Vec<f64> = sorted_groups.iter().flatten().copied().collect();
    pooled.sort_by(f64::total_cmp);
    let n_total = pooled.len() as f64;

    // Distinct values with multiplicities and midrank cumulative counts.
    let mut distinct = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let v = pooled[i];
        let j = pooled.partition_point(|&x| x <= v);
        let l = (j - i) as f64;
        distinct.push((v, l, i as f64 + l / 2.0));
        i = j;
    }

    let mut a2 = 0.0;
    for g in &sorted_groups {
        let ni = g.len() as f64;
        let mut inner = 0.0;
        for &(z, l, b) in &distinct {
            let left = g.partition_point(|&x| x < z) as f64;
            let right = g.partition_point(|&x| x <= z) as f64;
            let m = right - (right - left) / 2.0;
            let denom = b * (n_total - b) - n_total * l / 4.0;
            if denom > 0.0 {
                inner += l / n_total * (n_total * m - ni * b).powi(2) / denom;
            }
        }
        a2 += inner / ni;
    }
    Ok(a2 * (n_total - 1.0) / n_total)
}
