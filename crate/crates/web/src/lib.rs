//! Browser bindings for the latency model. Each export takes plain numbers
//! and returns a flat `Float64Array`; see `www/index.html` for the page.
//!
//! The `*_values` functions hold the logic and run natively, so they can be
//! tested without a JS engine.

use wasm_bindgen::prelude::*;

use i2v_latency::channel::{link_budget, LinkGeometry, NoiseModel, ReceiverOptics, SnrForm, TransmitterParams};
use i2v_latency::scenario::load_scenario;
use i2v_latency::sim::run;
use i2v_latency::stats::{histogram_pdf_estimate, linear_grid, EmpiricalSample, TLocationScaleParams};

/// Most points any curve export will produce.
pub const MAX_POINTS: usize = 10_000;

fn check_points(n: usize) -> Result<(), String> {
    if (2..=MAX_POINTS).contains(&n) {
        Ok(())
    } else {
        Err(format!("points must be in 2..={MAX_POINTS}, got {n}"))
    }
}

/// `[x_ms, pdf_per_ms, cdf]` triples over `[lo_ms, hi_ms]`.
pub fn tls_curve_values(mu_ms: f64, sigma_ms: f64, nu: f64, lo_ms: f64, hi_ms: f64, n: usize) -> Result<Vec<f64>, String> {
    check_points(n)?;
    if !(lo_ms.is_finite() && hi_ms.is_finite() && lo_ms < hi_ms) {
        return Err(format!("need lo < hi, got [{lo_ms}, {hi_ms}]"));
    }
    let p = TLocationScaleParams::new(mu_ms / 1e3, sigma_ms / 1e3, nu).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * n);
    for x in linear_grid(lo_ms, hi_ms, n) {
        out.extend([x, p.pdf(x / 1e3) / 1e3, p.cdf(x / 1e3)]);
    }
    Ok(out)
}

/// `[d_m, gamma, ber, per]` rows for an on-axis link from 0.5 m to `d_max_m`,
/// default optics otherwise.
pub fn link_sweep_values(power_w: f64, half_angle_deg: f64, fov_deg: f64, d_max_m: f64, n: usize) -> Result<Vec<f64>, String> {
    check_points(n)?;
    let tx = TransmitterParams {
        power: power_w,
        half_power_semiangle: half_angle_deg.to_radians(),
    };
    let rx = ReceiverOptics {
        fov: fov_deg.to_radians(),
        ..ReceiverOptics::default()
    };
    let mut bad = Vec::new();
    for r in [tx.validate(), rx.validate()] {
        if let Err(e) = r {
            bad.push(e.to_string());
        }
    }
    if !(d_max_m.is_finite() && d_max_m > 0.5) {
        bad.push(format!("maximum distance must be > 0.5 m, got {d_max_m}"));
    }
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    let noise = NoiseModel::default();
    let mut out = Vec::with_capacity(4 * n);
    for d in linear_grid(0.5, d_max_m, n) {
        let b = link_budget(&LinkGeometry::on_axis(d), &tx, &rx, &noise, 240, SnrForm::Linear);
        out.extend([d, b.snr, b.ber, b.per]);
    }
    Ok(out)
}

/// Simulate a bundled scenario and return `[bin_centre_ms, density_per_ms]`
/// pairs of delivered end-to-end latency.
/// `scenario` is 0 for the composed pipeline, 1 for the single overall fit.
pub fn latency_histogram_values(scenario: u32, seed: u64, duration_s: f64, bin_ms: f64) -> Result<Vec<f64>, String> {
    let name = match scenario {
        0 => "paper-default",
        1 => "paper-overall",
        other => return Err(format!("unknown scenario index {other}")),
    };
    if !(duration_s.is_finite() && (1.0..=1e5).contains(&duration_s)) {
        return Err(format!("duration must be in [1, 1e5] s, got {duration_s}"));
    }
    let s = load_scenario(name).map_err(|e| e.to_string())?;
    let out = run(&s, seed, duration_s).map_err(|e| e.to_string())?;
    let totals: Vec<f64> = out.records.iter().filter(|r| r.delivered).filter_map(|r| r.total).collect();
    let data = EmpiricalSample::new(totals).map_err(|e| e.to_string())?;
    let h = histogram_pdf_estimate(&data, bin_ms / 1e3).map_err(|e| e.to_string())?;
    Ok(h.bins.iter().flat_map(|&(c, d)| [c * 1e3, d / 1e3]).collect())
}

#[wasm_bindgen]
pub fn tls_curves(mu_ms: f64, sigma_ms: f64, nu: f64, lo_ms: f64, hi_ms: f64, n: usize) -> Result<Vec<f64>, JsError> {
    tls_curve_values(mu_ms, sigma_ms, nu, lo_ms, hi_ms, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn link_sweep(power_w: f64, half_angle_deg: f64, fov_deg: f64, d_max_m: f64, n: usize) -> Result<Vec<f64>, JsError> {
    link_sweep_values(power_w, half_angle_deg, fov_deg, d_max_m, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn latency_histogram(scenario: u32, seed: u64, duration_s: f64, bin_ms: f64) -> Result<Vec<f64>, JsError> {
    latency_histogram_values(scenario, seed, duration_s, bin_ms).map_err(|e| JsError::new(&e))
}
