//! Minimum-distance model selection.

use super::{anderson_darling, cvm_distance, ClutterModel, FamilySpec};
use crate::{Error, Result};

const MIN_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GofStatistic {
    #[default]
    Cvm,
    Ad,
}

impl GofStatistic {
    pub fn score(self, samples: &[f64], model: &ClutterModel) -> Result<f64> {
        match self {
            GofStatistic::Cvm => cvm_distance(samples, model),
            GofStatistic::Ad => anderson_darling(samples, model),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ranked {
    pub spec: FamilySpec,
    pub model: ClutterModel,
    pub score: f64,
}

/// Candidates in ascending score order, plus those whose fit or score
/// failed together with the reason.
#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub ranked: Vec<Ranked>,
    pub skipped: Vec<(FamilySpec, String)>,
}

impl Selection {
    pub fn best(&self) -> Option<&Ranked> {
        self.ranked.first()
    }
}

/// Fits every candidate family and ranks them by goodness of fit, smallest
/// distance first. A candidate that cannot be fitted or scored is skipped
/// and reported rather than aborting the whole selection.
pub fn select_model(
    samples: &[f64],
    candidates: &[FamilySpec],
    statistic: GofStatistic,
) -> Result<Selection> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let mut out = Selection::default();
    for spec in candidates {
        match spec
            .fit(samples)
            .and_then(|m| statistic.score(samples, &m).map(|s| (m, s)))
        {
            Ok((model, score)) => out.ranked.push(Ranked {
                spec: *spec,
                model,
                score,
            }),
            Err(e) => out.skipped.push((*spec, e.to_string())),
        }
    }
    out.ranked.sort_by(|a, b| a.score.total_cmp(&b.score));
    Ok(out)
}
