//! Reference implementations used as test oracles. None of these share code
//! with the crate under test.
#![allow(dead_code)]

use statrs::distribution::{ContinuousCDF, StudentsT};

/// ln Γ(x) for x > 0: shift up past 20, then the Stirling series.
pub fn stirling_ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut z = x;
    let mut shift = 0.0;
    while z < 20.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2) - 1.0 / (1680.0 * z * z2 * z2 * z2)
        + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// The density exactly as printed: gamma ratio over σ√(νπ), times the
/// bracket raised to −(ν+1)/2.
pub fn reference_tls_pdf(x: f64, mu: f64, sigma: f64, nu: f64) -> f64 {
    let ratio = (stirling_ln_gamma((nu + 1.0) / 2.0) - stirling_ln_gamma(nu / 2.0)).exp();
    let coef = ratio / (sigma * (nu * std::f64::consts::PI).sqrt());
    let z = (x - mu) / sigma;
    let bracket = (nu + z * z) / nu;
    coef * bracket.powf(-(nu + 1.0) / 2.0)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = K15_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let s = f(c - h * GK_NODES[i]) + f(c + h * GK_NODES[i]);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(&f, a, b, tol, 40)
}

/// ∫ pdf over (μ + Tσ, ∞) for a density with t-like tails.
///
/// With x = μ + σ·v^(−1/ν) the integrand is bounded on v ∈ (0, T^(−ν)],
/// tending to a constant at 0, so plain quadrature handles even ν < 1.
pub fn upper_tail<F: Fn(f64) -> f64>(pdf: F, mu: f64, sigma: f64, nu: f64, t: f64) -> f64 {
    let vmax = t.powf(-nu);
    let g = |v: f64| {
        let x = mu + sigma * v.powf(-1.0 / nu);
        pdf(x) * sigma / nu * v.powf(-1.0 / nu - 1.0)
    };
    // the piece below vmin is at most ~g(vmin)·vmin, far under 1e-12
    let vmin = vmax * 1e-13;
    integrate(g, vmin, vmax, 1e-13)
}

/// Total mass of a t-like density: quadrature on μ ± Tσ plus both tails.
pub fn total_mass<F: Fn(f64) -> f64>(pdf: F, mu: f64, sigma: f64, nu: f64) -> f64 {
    let t = 20.0;
    let centre = integrate(&pdf, mu - t * sigma, mu + t * sigma, 1e-12);
    let upper = upper_tail(&pdf, mu, sigma, nu, t);
    let lower = upper_tail(|x| pdf(2.0 * mu - x), mu, sigma, nu, t);
    centre + upper + lower
}

/// Independent location-scale t CDF.
pub fn statrs_tls_cdf(x: f64, mu: f64, sigma: f64, nu: f64) -> f64 {
    StudentsT::new(mu, sigma, nu).unwrap().cdf(x)
}

/// Median of the t distribution truncated to `[lo, hi]`, by bisection on
/// the independent CDF.
pub fn truncated_median(mu: f64, sigma: f64, nu: f64, lo: f64, hi: f64) -> f64 {
    let (flo, fhi) = (statrs_tls_cdf(lo, mu, sigma, nu), statrs_tls_cdf(hi, mu, sigma, nu));
    let target = 0.5 * (flo + fhi);
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if statrs_tls_cdf(m, mu, sigma, nu) < target {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Gaussian Q-function from statrs' erfc.
pub fn q_oracle(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// 1 − (1 − ber)^bits without cancellation.
pub fn per_oracle(ber: f64, bits: usize) -> f64 {
    -(bits as f64 * (-ber).ln_1p()).exp_m1()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Order-statistic indices `(lo, hi)` bracketing the population median of
/// `n` i.i.d. draws with roughly `1 − α` coverage, `z` the normal quantile.
pub fn median_ci_indices(n: usize, z: f64) -> (usize, usize) {
    let half = 0.5 * z * (n as f64).sqrt();
    let mid = 0.5 * n as f64;
    (((mid - half).floor().max(0.0)) as usize, ((mid + half).ceil() as usize).min(n - 1))
}

pub fn ln_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
