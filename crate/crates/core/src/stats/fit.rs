//! Maximum-likelihood fitting and BIC model selection.

use serde::{Deserialize, Serialize};

use super::family::{DistributionSpec, Family};
use super::sample::EmpiricalSample;
use super::simplex::{minimize, SimplexOptions};
use super::tls::TLocationScaleParams;
use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// IQR of the standard normal.
const NORMAL_IQR: f64 = 1.348_979_500_392_163_5;

pub const SIGMA_BOUNDS: (f64, f64) = (1e-9, 1e3);
pub const NU_BOUNDS: (f64, f64) = (0.5, 1e3);
pub const NU_START: f64 = 5.0;
pub const PARAM_TOL: f64 = 1e-8;
pub const MAX_ITER: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub spec: DistributionSpec,
    pub log_likelihood: f64,
    pub bic: f64,
    pub converged: bool,
    pub n: usize,
}

impl FitResult {
    pub fn family(&self) -> Family {
        self.spec.family()
    }

    /// Flat `key=value` record: family, parameters, logL, BIC, converged.
    pub fn to_record(&self) -> Vec<(String, String)> {
        let fam = self.family();
        let mut out = vec![("family".to_string(), fam.name().to_string())];
        for (name, v) in fam.param_names().iter().zip(self.spec.params()) {
            out.push((name.to_string(), format!("{v:e}")));
        }
        out.push(("log_likelihood".into(), format!("{}", self.log_likelihood)));
        out.push(("bic".into(), format!("{}", self.bic)));
        out.push(("converged".into(), self.converged.to_string()));
        out
    }
}

/// `k·ln(n) − 2·lnL`.
pub fn bic_score(log_likelihood: f64, k: usize, n: usize) -> f64 {
    debug_assert!(k >= 1 && n >= 1);
    k as f64 * (n as f64).ln() - 2.0 * log_likelihood
}

pub fn log_likelihood(spec: &DistributionSpec, data: &[f64]) -> f64 {
    data.iter().map(|&x| spec.ln_pdf(x)).sum()
}

/// Robust centre and spread used to start the optimizer and to
/// standardize the data it works on.
fn robust_scale(data: &EmpiricalSample) -> Result<(f64, f64)> {
    if data.min() == data.max() {
        return Err(Error::InsufficientVariation);
    }
    let center = data.median();
    let iqr = data.quantile(0.75) - data.quantile(0.25);
    let scale = if iqr > 0.0 {
        iqr / NORMAL_IQR
    } else {
        let m = data.mean();
        (data.values().iter().map(|v| (v - m).powi(2)).sum::<f64>() / data.len() as f64).sqrt()
    };
    Ok((center, scale))
}

fn finish(spec: DistributionSpec, data: &EmpiricalSample, converged: bool) -> FitResult {
    let ll = log_likelihood(&spec, data.values());
    let n = data.len();
    FitResult {
        spec,
        log_likelihood: ll,
        bic: bic_score(ll, spec.family().arity(), n),
        converged,
        n,
    }
}

pub fn fit_mle(data: &EmpiricalSample, family: Family) -> Result<FitResult> {
    let needed = family.arity() + 1;
    if data.len() < needed {
        return Err(Error::InsufficientData { needed, got: data.len() });
    }
    if data.min() == data.max() {
        return Err(Error::InsufficientVariation);
    }
    match family {
        Family::Normal => fit_normal(data),
        Family::LogNormal => fit_log_normal(data),
        Family::Logistic => fit_logistic(data),
        Family::TLocationScale => fit_tls(data),
    }
}

fn fit_normal(data: &EmpiricalSample) -> Result<FitResult> {
    let mu = data.mean();
    let var = data.values().iter().map(|v| (v - mu).powi(2)).sum::<f64>() / data.len() as f64;
    if var <= 0.0 {
        return Err(Error::InsufficientVariation);
    }
    let spec = DistributionSpec::new(Family::Normal, &[mu, var.sqrt()])?;
    Ok(finish(spec, data, true))
}

fn fit_log_normal(data: &EmpiricalSample) -> Result<FitResult> {
    if data.min() <= 0.0 {
        return Err(Error::Argument("log-normal fit requires strictly positive observations".into()));
    }
    let logs: Vec<f64> = data.values().iter().map(|v| v.ln()).collect();
    let n = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::InsufficientVariation);
    }
    let spec = DistributionSpec::new(Family::LogNormal, &[mu, var.sqrt()])?;
    Ok(finish(spec, data, true))
}

fn fit_logistic(data: &EmpiricalSample) -> Result<FitResult> {
    let (center, scale) = robust_scale(data)?;
    let z: Vec<f64> = data.values().iter().map(|v| (v - center) / scale).collect();
    let s0 = NORMAL_IQR / (2.0 * 3f64.ln());
    let (ls_lo, ls_hi) = ((SIGMA_BOUNDS.0 / scale).ln(), (SIGMA_BOUNDS.1 / scale).ln());
    let opts = SimplexOptions {
        xtol: PARAM_TOL,
        max_iter: MAX_ITER,
        step: vec![0.25, 0.25],
        lower: vec![f64::NEG_INFINITY, ls_lo],
        upper: vec![f64::INFINITY, ls_hi],
    };
    let nll = |th: &[f64]| {
        let (m, ls) = (th[0], th[1]);
        let s = ls.exp();
        let mut acc = 0.0;
        for &x in &z {
            let a = ((x - m) / s).abs();
            acc += -a - 2.0 * (-a).exp().ln_1p();
        }
        -(acc - z.len() as f64 * ls)
    };
    let r = minimize(nll, &[0.0, s0.ln()], &opts);
    let spec = DistributionSpec::new(Family::Logistic, &[center + scale * r.x[0], scale * r.x[1].exp()])?;
    Ok(finish(spec, data, r.converged))
}

fn fit_tls(data: &EmpiricalSample) -> Result<FitResult> {
    let (center, scale) = robust_scale(data)?;
    let z: Vec<f64> = data.values().iter().map(|v| (v - center) / scale).collect();
    let n = z.len() as f64;
    let (ls_lo, ls_hi) = ((SIGMA_BOUNDS.0 / scale).ln(), (SIGMA_BOUNDS.1 / scale).ln());
    let opts = SimplexOptions {
        xtol: PARAM_TOL,
        max_iter: MAX_ITER,
        step: vec![0.25, 0.25, 0.5],
        lower: vec![f64::NEG_INFINITY, ls_lo, NU_BOUNDS.0.ln()],
        upper: vec![f64::INFINITY, ls_hi, NU_BOUNDS.1.ln()],
    };
    let nll = |th: &[f64]| {
        let (m, ls, lnu) = (th[0], th[1], th[2]);
        let s = ls.exp();
        let nu = lnu.exp();
        let norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln() - ls;
        let mut acc = 0.0;
        for &x in &z {
            let t = (x - m) / s;
            acc += (t * t / nu).ln_1p();
        }
        -(n * norm - 0.5 * (nu + 1.0) * acc)
    };
    let r = minimize(nll, &[0.0, 0.0, NU_START.ln()], &opts);
    let p = TLocationScaleParams::new(center + scale * r.x[0], scale * r.x[1].exp(), r.x[2].exp())?;
    Ok(finish(p.into(), data, r.converged))
}

/// Every successful fit, ranked best first, plus the families that failed.
#[derive(Debug, Clone)]
pub struct ModelSelection {
    pub ranked: Vec<FitResult>,
    pub failures: Vec<(Family, String)>,
}

impl ModelSelection {
    pub fn best(&self) -> &FitResult {
        &self.ranked[0]
    }
}

/// Ascending BIC, then fewer parameters, then family name.
pub fn rank_fits(fits: &mut [FitResult]) {
    fits.sort_by(|a, b| {
        a.bic
            .total_cmp(&b.bic)
            .then(a.family().arity().cmp(&b.family().arity()))
            .then(a.family().name().cmp(b.family().name()))
    });
}

pub fn select_best_model(data: &EmpiricalSample, families: &[Family]) -> Result<ModelSelection> {
    if families.is_empty() {
        return Err(Error::Argument("no candidate families given".into()));
    }
    let mut ranked = Vec::new();
    let mut failures = Vec::new();
    for &fam in families {
        match fit_mle(data, fam) {
            Ok(fit) if fit.bic.is_finite() => ranked.push(fit),
            Ok(fit) => failures.push((fam, format!("non-finite BIC ({})", fit.bic))),
            Err(e) => failures.push((fam, e.to_string())),
        }
    }
    if ranked.is_empty() {
        return Err(Error::NoModel(failures.iter().map(|(f, e)| format!("{f}: {e}")).collect()));
    }
    rank_fits(&mut ranked);
    Ok(ModelSelection { ranked, failures })
}
