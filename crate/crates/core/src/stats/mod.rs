//! Latency distributions, maximum-likelihood fitting and BIC selection.

mod analysis;
mod family;
mod fit;
mod sample;
pub mod simplex;
mod tls;

pub use analysis::{cdf_error_curve, histogram_pdf_estimate, linear_grid, sample_grid, CdfErrorCurve, Histogram};
pub use family::{Cdf, DistributionSpec, Family};
pub use fit::{
    bic_score, fit_mle, log_likelihood, rank_fits, select_best_model, FitResult, ModelSelection, MAX_ITER, NU_BOUNDS, NU_START, PARAM_TOL,
    SIGMA_BOUNDS,
};
pub use sample::EmpiricalSample;
pub use tls::{tls_cdf, tls_pdf, tls_sample, TLocationScaleParams};
