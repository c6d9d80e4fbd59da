use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::tls::TLocationScaleParams;
use crate::error::{Error, Result};
use crate::special::normal_cdf;

/// Anything with a cumulative distribution function.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    TLocationScale,
    Normal,
    Logistic,
    LogNormal,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::TLocationScale, Family::Normal, Family::Logistic, Family::LogNormal];

    pub fn name(self) -> &'static str {
        match self {
            Family::TLocationScale => "t-location-scale",
            Family::Normal => "normal",
            Family::Logistic => "logistic",
            Family::LogNormal => "log-normal",
        }
    }

    /// Number of free parameters.
    pub fn arity(self) -> usize {
        match self {
            Family::TLocationScale => 3,
            _ => 2,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::TLocationScale => &["mu", "sigma", "nu"],
            Family::Normal => &["mu", "sigma"],
            Family::Logistic => &["mu", "s"],
            Family::LogNormal => &["mu_log", "sigma_log"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t-location-scale" | "tlocationscale" | "tls" | "student-t" => Ok(Family::TLocationScale),
            "normal" | "gaussian" => Ok(Family::Normal),
            "logistic" => Ok(Family::Logistic),
            "log-normal" | "lognormal" => Ok(Family::LogNormal),
            other => Err(Error::Argument(format!("unknown distribution family '{other}'"))),
        }
    }
}

/// A fully parameterized member of one of the supported families.
///
/// Location and scale parameters are in seconds, except for the log-normal,
/// whose parameters describe `ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", try_from = "RawSpec")]
pub enum DistributionSpec {
    TLocationScale(TLocationScaleParams),
    Normal { mu: f64, sigma: f64 },
    Logistic { mu: f64, s: f64 },
    LogNormal { mu_log: f64, sigma_log: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
enum RawSpec {
    TLocationScale(TLocationScaleParams),
    Normal { mu: f64, sigma: f64 },
    Logistic { mu: f64, s: f64 },
    LogNormal { mu_log: f64, sigma_log: f64 },
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        match r {
            RawSpec::TLocationScale(p) => Ok(DistributionSpec::TLocationScale(p)),
            RawSpec::Normal { mu, sigma } => DistributionSpec::new(Family::Normal, &[mu, sigma]),
            RawSpec::Logistic { mu, s } => DistributionSpec::new(Family::Logistic, &[mu, s]),
            RawSpec::LogNormal { mu_log, sigma_log } => DistributionSpec::new(Family::LogNormal, &[mu_log, sigma_log]),
        }
    }
}

impl DistributionSpec {
    /// Build from a family id and a flat parameter vector, checking arity and
    /// domain constraints.
    pub fn new(family: Family, params: &[f64]) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::ParameterDomain(format!(
                "{family} takes {} parameters, got {}",
                family.arity(),
                params.len()
            )));
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain(format!("{family} parameters must be finite")));
        }
        let positive = |v: f64, what: &str| {
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::ParameterDomain(format!("{family} {what} must be > 0, got {v}")))
            }
        };
        Ok(match family {
            Family::TLocationScale => DistributionSpec::TLocationScale(TLocationScaleParams::new(params[0], params[1], params[2])?),
            Family::Normal => DistributionSpec::Normal {
                mu: params[0],
                sigma: positive(params[1], "sigma")?,
            },
            Family::Logistic => DistributionSpec::Logistic {
                mu: params[0],
                s: positive(params[1], "scale")?,
            },
            Family::LogNormal => DistributionSpec::LogNormal {
                mu_log: params[0],
                sigma_log: positive(params[1], "sigma_log")?,
            },
        })
    }

    pub fn family(&self) -> Family {
        match self {
            DistributionSpec::TLocationScale(_) => Family::TLocationScale,
            DistributionSpec::Normal { .. } => Family::Normal,
            DistributionSpec::Logistic { .. } => Family::Logistic,
            DistributionSpec::LogNormal { .. } => Family::LogNormal,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            DistributionSpec::TLocationScale(p) => vec![p.mu(), p.sigma(), p.nu()],
            DistributionSpec::Normal { mu, sigma } => vec![mu, sigma],
            DistributionSpec::Logistic { mu, s } => vec![mu, s],
            DistributionSpec::LogNormal { mu_log, sigma_log } => vec![mu_log, sigma_log],
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::TLocationScale(p) => p.ln_pdf(x),
            DistributionSpec::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * PI).ln()
            }
            DistributionSpec::Logistic { mu, s } => {
                let a = ((x - mu) / s).abs();
                -a - s.ln() - 2.0 * (-a).exp().ln_1p()
            }
            DistributionSpec::LogNormal { mu_log, sigma_log } => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let lx = x.ln();
                let z = (lx - mu_log) / sigma_log;
                -0.5 * z * z - sigma_log.ln() - lx - 0.5 * (2.0 * PI).ln()
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::TLocationScale(p) => p.cdf(x),
            DistributionSpec::Normal { mu, sigma } => normal_cdf((x - mu) / sigma),
            DistributionSpec::Logistic { mu, s } => {
                let z = (x - mu) / s;
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
            DistributionSpec::LogNormal { mu_log, sigma_log } => {
                if x <= 0.0 {
                    0.0
                } else {
                    normal_cdf((x.ln() - mu_log) / sigma_log)
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::TLocationScale(p) => p.sample(rng),
            DistributionSpec::Normal { mu, sigma } => Normal::new(mu, sigma).expect("valid normal").sample(rng),
            DistributionSpec::Logistic { mu, s } => {
                // inverse CDF on the open interval (0, 1)
                let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                mu + s * (u / (1.0 - u)).ln()
            }
            DistributionSpec::LogNormal { mu_log, sigma_log } => LogNormal::new(mu_log, sigma_log).expect("valid log-normal").sample(rng),
        }
    }
}

impl From<TLocationScaleParams> for DistributionSpec {
    fn from(p: TLocationScaleParams) -> Self {
        DistributionSpec::TLocationScale(p)
    }
}

impl Cdf for DistributionSpec {
    fn cdf(&self, x: f64) -> f64 {
        DistributionSpec::cdf(self, x)
    }
}

impl Cdf for TLocationScaleParams {
    fn cdf(&self, x: f64) -> f64 {
        TLocationScaleParams::cdf(self, x)
    }
}
