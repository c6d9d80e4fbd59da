//! Student-t location-scale distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StudentT};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{beta_reg, ln_gamma};

/// Location `mu` and scale `sigma` are in seconds; `nu` is the shape
/// (degrees of freedom).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct TLocationScaleParams {
    mu: f64,
    sigma: f64,
    nu: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    mu: f64,
    sigma: f64,
    nu: f64,
}

impl TryFrom<RawParams> for TLocationScaleParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        Self::new(r.mu, r.sigma, r.nu)
    }
}

impl From<TLocationScaleParams> for RawParams {
    fn from(p: TLocationScaleParams) -> Self {
        RawParams {
            mu: p.mu,
            sigma: p.sigma,
            nu: p.nu,
        }
    }
}

impl TLocationScaleParams {
    pub fn new(mu: f64, sigma: f64, nu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::ParameterDomain(format!("location must be finite, got {mu}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::ParameterDomain(format!("scale must be finite and > 0, got {sigma}")));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::ParameterDomain(format!("shape must be finite and > 0, got {nu}")));
        }
        Ok(Self { mu, sigma, nu })
    }

    /// 5G-segment fit: μ = 8.8 ms, σ = 0.743 ms, ν = 1.09.
    pub fn five_g_segment() -> Self {
        Self {
            mu: 0.0088,
            sigma: 7.43e-4,
            nu: 1.09,
        }
    }

    /// End-to-end (5G + VLC) fit: μ = 11.9 ms, σ = 1 ms, ν = 1.253.
    pub fn overall_system() -> Self {
        Self {
            mu: 0.0119,
            sigma: 0.001,
            nu: 1.253,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Log of the normalizing constant `Γ((ν+1)/2) / (σ √(νπ) Γ(ν/2))`.
    fn ln_norm(&self) -> f64 {
        let nu = self.nu;
        ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - self.sigma.ln() - 0.5 * (nu * PI).ln()
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        self.ln_norm() - 0.5 * (self.nu + 1.0) * (z * z / self.nu).ln_1p()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// CDF through the regularized incomplete beta function.
    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        let t = (x - self.mu) / self.sigma;
        if t == 0.0 {
            return 0.5;
        }
        let t2 = t * t;
        // P(|T| > |t|) = I_{ν/(ν+t²)}(ν/2, 1/2)
        let (xb, yb) = if t2 > self.nu {
            let r = self.nu / t2;
            (r / (1.0 + r), 1.0 / (1.0 + r))
        } else {
            (self.nu / (self.nu + t2), t2 / (self.nu + t2))
        };
        let tail = 0.5 * beta_reg(0.5 * self.nu, 0.5, xb, yb);
        if t < 0.0 {
            tail
        } else {
            1.0 - tail
        }
    }

    /// One draw `μ + σ·T` with `T ~ Student-t(ν)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // ν > 0 is guaranteed by construction
        let t = StudentT::new(self.nu).expect("valid shape");
        self.mu + self.sigma * t.sample(rng)
    }
}

pub fn tls_pdf(x: f64, p: &TLocationScaleParams) -> f64 {
    p.pdf(x)
}

pub fn tls_cdf(x: f64, p: &TLocationScaleParams) -> f64 {
    p.cdf(x)
}

/// `n` draws from a ChaCha8 stream seeded with `seed`.
pub fn tls_sample(p: &TLocationScaleParams, seed: u64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Argument("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = StudentT::new(p.nu).map_err(|e| Error::ParameterDomain(e.to_string()))?;
    Ok((0..n).map(|_| p.mu + p.sigma * t.sample(&mut rng)).collect())
}
