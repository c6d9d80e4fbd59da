use serde::{Deserialize, Serialize};

use super::family::Cdf;
use super::sample::EmpiricalSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfErrorCurve {
    /// `(x, |F_empirical(x) − F_model(x)|)`
    pub points: Vec<(f64, f64)>,
    pub sup_norm: f64,
}

/// Pointwise distance between the empirical step CDF of `data` and `model`.
pub fn cdf_error_curve<M: Cdf + ?Sized>(data: &EmpiricalSample, model: &M, grid: &[f64]) -> Result<CdfErrorCurve> {
    if grid.is_empty() {
        return Err(Error::Argument("CDF error grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Argument("CDF error grid must be sorted ascending".into()));
    }
    let points: Vec<(f64, f64)> = grid.iter().map(|&x| (x, (data.cdf(x) - model.cdf(x)).abs())).collect();
    let sup_norm = points.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(CdfErrorCurve { points, sup_norm })
}

/// Grid that hits every distinct observation; the sup-norm over it is the
/// Kolmogorov distance up to the left-limit side of each jump.
pub fn sample_grid(data: &EmpiricalSample) -> Vec<f64> {
    let mut g = data.sorted().to_vec();
    g.dedup();
    g
}

/// `n` evenly spaced points over `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// `(bin centre, density)`; bins are `[k·w, (k+1)·w)`.
    pub bins: Vec<(f64, f64)>,
    pub modal_center: f64,
}

/// Density histogram on bins aligned to multiples of `bin_width`.
pub fn histogram_pdf_estimate(data: &EmpiricalSample, bin_width: f64) -> Result<Histogram> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::Argument(format!("bin width must be > 0, got {bin_width}")));
    }
    let first = (data.min() / bin_width).floor() as i64;
    let last = (data.max() / bin_width).floor() as i64;
    let nbins = (last - first + 1) as usize;
    let mut counts = vec![0usize; nbins];
    for &v in data.values() {
        let k = ((v / bin_width).floor() as i64 - first).clamp(0, nbins as i64 - 1) as usize;
        counts[k] += 1;
    }
    let norm = 1.0 / (data.len() as f64 * bin_width);
    let bins: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (((first + i as i64) as f64 + 0.5) * bin_width, c as f64 * norm))
        .collect();
    // first maximum wins on ties
    let modal = counts
        .iter()
        .enumerate()
        .fold(0, |best, (i, &c)| if c > counts[best] { i } else { best });
    Ok(Histogram {
        bin_width,
        modal_center: bins[modal].0,
        bins,
    })
}
