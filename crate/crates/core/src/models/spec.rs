//! Textual model specifications: `family[:key=value,...]`.
//!
//! A fully parameterised string (`"weibull:shape=2,scale=1"`) yields a
//! concrete model; a bare or partial one (`"weibull"`, `"weibull:shape=2"`,
//! `"kde:bandwidth=auto"`) yields a family to be fitted to data.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::{Bandwidth, ClutterModel, Family, FamilySpec};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum ModelSpec {
    Model(ClutterModel),
    Family(FamilySpec),
}

impl ModelSpec {
    pub fn family(&self) -> Option<FamilySpec> {
        match self {
            ModelSpec::Family(f) => Some(*f),
            ModelSpec::Model(_) => None,
        }
    }

    /// The concrete model, fitting to `samples` when only a family was given.
    pub fn resolve(&self, samples: Option<&[f64]>) -> Result<ClutterModel> {
        match (self, samples) {
            (ModelSpec::Model(m), _) => Ok(m.clone()),
            (ModelSpec::Family(f), Some(xs)) => f.fit(xs),
            (ModelSpec::Family(f), None) => Err(Error::InvalidParameter(format!(
                "model '{f}' has free parameters and no data to fit them"
            ))),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "exp" | "exponential" => Family::Exponential,
            "rayleigh" => Family::Rayleigh,
            "gamma" => Family::Gamma,
            "sqrtgamma" => Family::SqrtGamma,
            "weibull" => Family::Weibull,
            "lognormal" => Family::LogNormal,
            "k" => Family::K,
            "g0" => Family::G0,
            "betaprime" => Family::BetaPrime,
            "kde" => Family::Kde,
            other => return Err(Error::InvalidParameter(format!("unknown model family '{other}'"))),
        })
    }
}

struct Params {
    family: &'static str,
    values: BTreeMap<String, String>,
}

impl Params {
    fn take(&mut self, key: &str) -> Result<Option<f64>> {
        self.values
            .remove(key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    Error::InvalidParameter(format!("{}: '{key}={v}' is not a number", self.family))
                })
            })
            .transpose()
    }

    fn looks(&mut self) -> Result<u32> {
        match self.take("n")? {
            None => Ok(1),
            Some(n) if n >= 1.0 && n.fract() == 0.0 && n <= u32::MAX as f64 => Ok(n as u32),
            Some(n) => Err(Error::InvalidParameter(format!("looks must be a positive integer, got {n}"))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::InvalidParameter(format!("{}: unknown key '{k}'", self.family))),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s.split_once(':').unwrap_or((s, ""));
        let family: Family = head.parse()?;
        let mut values = BTreeMap::new();
        for pair in tail.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{pair}'")))?;
            values.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let mut p = Params {
            family: family.name(),
            values,
        };
        let fam = FamilySpec::new(family);
        let spec = match family {
            Family::Exponential => match p.take("mean")? {
                Some(m) => ModelSpec::Model(ClutterModel::exponential(m)?),
                None => ModelSpec::Family(fam),
            },
            Family::Rayleigh => match p.take("scale")? {
                Some(s) => ModelSpec::Model(ClutterModel::rayleigh(s)?),
                None => ModelSpec::Family(fam),
            },
            Family::Gamma | Family::SqrtGamma | Family::Weibull | Family::K => {
                let second = if family == Family::Weibull { "scale" } else { "rate" };
                let looks = if family == Family::K { p.looks()? } else { 1 };
                match (p.take("shape")?, p.take(second)?) {
                    (Some(a), Some(b)) => ModelSpec::Model(match family {
                        Family::Gamma => ClutterModel::gamma(a, b)?,
                        Family::SqrtGamma => ClutterModel::sqrt_gamma(a, b)?,
                        Family::Weibull => ClutterModel::weibull(a, b)?,
                        _ => ClutterModel::k_compound(a, b, looks)?,
                    }),
                    (shape, None) => {
                        let f = fam.with_looks(looks);
                        ModelSpec::Family(match shape {
                            Some(a) => f.with_shape(a),
                            None => f,
                        })
                    }
                    (None, Some(_)) => {
                        return Err(Error::InvalidParameter(format!(
                            "{}: '{second}' without 'shape' cannot be fitted",
                            family.name()
                        )))
                    }
                }
            }
            Family::LogNormal => match (p.take("mu")?, p.take("sigma")?) {
                (Some(mu), Some(sigma)) => ModelSpec::Model(ClutterModel::log_normal(mu, sigma)?),
                (None, None) => ModelSpec::Family(fam),
                _ => {
                    return Err(Error::InvalidParameter(
                        "lognormal needs both mu and sigma, or neither".into(),
                    ))
                }
            },
            Family::G0 | Family::BetaPrime => {
                let looks = if family == Family::G0 { p.looks()? } else { 1 };
                match (p.take("shape")?, p.take("gamma")?) {
                    (Some(a), Some(g)) if family == Family::G0 => {
                        ModelSpec::Model(ClutterModel::g0_compound(a, g, looks)?)
                    }
                    (Some(a), Some(g)) => ModelSpec::Model(ClutterModel::beta_prime(a, g)?),
                    (Some(a), None) => ModelSpec::Family(fam.with_looks(looks).with_shape(a)),
                    (None, None) => ModelSpec::Family(fam.with_looks(looks)),
                    (None, Some(_)) => {
                        return Err(Error::InvalidParameter(format!(
                            "{}: 'gamma' without 'shape' cannot be fitted",
                            family.name()
                        )))
                    }
                }
            }
            Family::Kde => {
                let bw = match p.values.remove("bandwidth").as_deref() {
                    None | Some("auto") | Some("silverman") => Bandwidth::Silverman,
                    Some(v) => Bandwidth::Fixed(v.parse().map_err(|_| {
                        Error::InvalidParameter(format!("kde: bad bandwidth '{v}'"))
                    })?),
                };
                ModelSpec::Family(FamilySpec { bandwidth: bw, ..fam })
            }
        };
        p.finish()?;
        Ok(spec)
    }
}

/// Parses a comma-separated candidate list such as
/// `"exp,weibull:shape=2,lognormal"`. Commas inside a parameter list are
/// recognised because every candidate starts with a family name.
pub fn parse_candidates(s: &str) -> Result<Vec<FamilySpec>> {
    let mut groups: Vec<String> = Vec::new();
    for piece in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match groups.last_mut() {
            Some(last) if piece.contains('=') && !piece.contains(':') => {
                last.push(',');
                last.push_str(piece);
            }
            _ => groups.push(piece.to_string()),
        }
    }
    groups
        .iter()
        .map(|g| match g.parse::<ModelSpec>()? {
            ModelSpec::Family(f) => Ok(f),
            ModelSpec::Model(m) => Err(Error::InvalidParameter(format!(
                "candidate '{g}' fixes every parameter of {}; nothing to fit",
                m.name()
            ))),
        })
        .collect()
}
