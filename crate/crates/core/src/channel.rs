//! Optical link budget for a line-of-sight traffic-light to vehicle link.
//!
//! Channel gain follows the generalized Lambertian emitter with an ideal
//! non-imaging concentrator at the receiver:
//!
//! ```text
//! H = (m+1)·A / (2π·d²) · cos^m(φ) · T_s · g(ψ) · cos(ψ),   ψ ≤ Ψ_c
//! g(ψ) = n² / sin²(Ψ_c)
//! ```
//!
//! and the SNR is `γ = R_PD·H·P_s / ξ`.
//!
//! Default parameter values in this module are illustrative, not measured.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::special::q_function;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitterParams {
    /// Optical transmit power `P_s` in watts.
    pub power: f64,
    /// Half-power semi-angle `Φ_1/2` in radians.
    pub half_power_semiangle: f64,
}

impl Default for TransmitterParams {
    fn default() -> Self {
        Self {
            power: 1.0,
            half_power_semiangle: 60f64.to_radians(),
        }
    }
}

impl TransmitterParams {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.power.is_finite() && self.power > 0.0) {
            bad.push(format!("transmit power must be > 0 W, got {}", self.power));
        }
        if !(self.half_power_semiangle > 0.0 && self.half_power_semiangle < FRAC_PI_2) {
            bad.push(format!(
                "half-power semi-angle must be in (0, 90) deg, got {}",
                self.half_power_semiangle.to_degrees()
            ));
        }
        collect(bad)
    }

    pub fn lambertian_order(&self) -> f64 {
        lambertian_order(self.half_power_semiangle).expect("validated semi-angle")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverOptics {
    /// Photodetector area in m².
    pub area: f64,
    /// Optical filter transmission `T_s`.
    pub filter_transmission: f64,
    /// Concentrator refractive index `n`.
    pub concentrator_index: f64,
    /// Field of view `Ψ_c` in radians.
    pub fov: f64,
    /// Photodiode responsivity `R_PD` in A/W.
    pub responsivity: f64,
}

impl Default for ReceiverOptics {
    fn default() -> Self {
        Self {
            area: 1e-4,
            filter_transmission: 1.0,
            concentrator_index: 1.5,
            fov: 30f64.to_radians(),
            responsivity: 0.4,
        }
    }
}

impl ReceiverOptics {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.area.is_finite() && self.area > 0.0) {
            bad.push(format!("detector area must be > 0 m^2, got {}", self.area));
        }
        if !(self.filter_transmission > 0.0 && self.filter_transmission <= 1.0) {
            bad.push(format!("filter transmission must be in (0, 1], got {}", self.filter_transmission));
        }
        if !(self.concentrator_index.is_finite() && self.concentrator_index >= 1.0) {
            bad.push(format!("concentrator index must be >= 1, got {}", self.concentrator_index));
        }
        if !(self.fov > 0.0 && self.fov <= FRAC_PI_2) {
            bad.push(format!("field of view must be in (0, 90] deg, got {}", self.fov.to_degrees()));
        }
        if !(self.responsivity.is_finite() && self.responsivity > 0.0) {
            bad.push(format!("responsivity must be > 0 A/W, got {}", self.responsivity));
        }
        collect(bad)
    }

    /// Ideal non-imaging concentrator gain `n² / sin²(Ψ_c)`.
    pub fn concentrator_gain(&self) -> f64 {
        let s = self.fov.sin();
        self.concentrator_index * self.concentrator_index / (s * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Metres.
    pub distance: f64,
    /// Angle off the emitter axis `φ`, radians.
    pub irradiance_angle: f64,
    /// Angle off the detector normal `ψ`, radians.
    pub incidence_angle: f64,
}

impl LinkGeometry {
    pub fn on_axis(distance: f64) -> Self {
        Self {
            distance,
            irradiance_angle: 0.0,
            incidence_angle: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.distance.is_finite() && self.distance > 0.0) {
            bad.push(format!("distance must be > 0 m, got {}", self.distance));
        }
        for (name, a) in [("irradiance", self.irradiance_angle), ("incidence", self.incidence_angle)] {
            if !(0.0..=FRAC_PI_2).contains(&a) {
                bad.push(format!("{name} angle must be in [0, 90] deg, got {}", a.to_degrees()));
            }
        }
        collect(bad)
    }
}

/// Cumulative noise power `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub noise_power: f64,
}

impl Default for NoiseModel {
    /// Puts the on-axis range of the default optics at ≈ 40 m for
    /// [`DEFAULT_SNR_MIN`].
    fn default() -> Self {
        Self { noise_power: 3.17e-9 }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if self.noise_power.is_finite() && self.noise_power > 0.0 {
            Ok(())
        } else {
            Err(Error::Validation(vec![format!(
                "noise power must be > 0, got {}",
                self.noise_power
            )]))
        }
    }
}

/// SNR for a 1e-6 OOK bit error rate: `Q⁻¹(1e-6)²`.
pub const DEFAULT_SNR_MIN: f64 = 22.6;

/// How received optical power maps to SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrForm {
    /// `R·H·P / ξ`
    #[default]
    Linear,
    /// `(R·H·P)² / ξ`, the electrical-power form.
    Squared,
}

fn collect(bad: Vec<String>) -> Result<()> {
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(bad))
    }
}

pub fn lambertian_order(half_power_semiangle: f64) -> Result<f64> {
    if !(half_power_semiangle > 0.0 && half_power_semiangle < FRAC_PI_2) {
        return Err(Error::Argument(format!(
            "half-power semi-angle must be in (0, 90) deg, got {}",
            half_power_semiangle.to_degrees()
        )));
    }
    let m = -std::f64::consts::LN_2 / half_power_semiangle.cos().ln();
    // cos(π/3) and cos(π/4) are not exact in binary, which leaves the
    // integer orders of 60° and 45° an ulp or two off
    let r = m.round();
    Ok(if (m - r).abs() <= 8.0 * f64::EPSILON * r.max(1.0) { r } else { m })
}

pub fn los_channel_gain(geom: &LinkGeometry, tx: &TransmitterParams, rx: &ReceiverOptics) -> f64 {
    let (phi, psi, d) = (geom.irradiance_angle, geom.incidence_angle, geom.distance);
    if psi > rx.fov || phi >= FRAC_PI_2 || psi >= FRAC_PI_2 || d <= 0.0 {
        return 0.0;
    }
    let m = tx.lambertian_order();
    (m + 1.0) * rx.area / (2.0 * PI * d * d) * phi.cos().powf(m) * rx.filter_transmission * rx.concentrator_gain() * psi.cos()
}

pub fn snr(h: f64, tx: &TransmitterParams, rx: &ReceiverOptics, noise: &NoiseModel, form: SnrForm) -> f64 {
    let current = rx.responsivity * h * tx.power;
    match form {
        SnrForm::Linear => current / noise.noise_power,
        SnrForm::Squared => current * current / noise.noise_power,
    }
}

/// OOK bit error probability `Q(√γ)`.
pub fn ook_ber(gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::Argument(format!("SNR must be >= 0, got {gamma}")));
    }
    Ok(q_function(gamma.sqrt()))
}

/// Probability that at least one of `frame_bits` bits is wrong.
pub fn frame_error_rate(ber: f64, frame_bits: usize) -> f64 {
    -(frame_bits as f64 * (-ber).ln_1p()).exp_m1()
}

/// Range resolution of [`max_range`].
pub const RANGE_RESOLUTION: f64 = 1e-3;

/// Largest on-axis distance whose SNR still meets `snr_min`.
pub fn max_range(tx: &TransmitterParams, rx: &ReceiverOptics, noise: &NoiseModel, snr_min: f64, form: SnrForm) -> Result<f64> {
    if !(snr_min.is_finite() && snr_min > 0.0) {
        return Err(Error::Argument(format!("SNR threshold must be > 0, got {snr_min}")));
    }
    let ok = |d: f64| snr(los_channel_gain(&LinkGeometry::on_axis(d), tx, rx), tx, rx, noise, form) >= snr_min;
    let mut lo = RANGE_RESOLUTION;
    if !ok(lo) {
        return Err(Error::InfeasibleLink(snr_min));
    }
    let mut hi = 2.0 * lo;
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Argument("link budget does not close at any finite range".into()));
        }
    }
    while hi - lo > RANGE_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub gain: f64,
    pub snr: f64,
    pub ber: f64,
    pub per: f64,
}

pub fn link_budget(
    geom: &LinkGeometry,
    tx: &TransmitterParams,
    rx: &ReceiverOptics,
    noise: &NoiseModel,
    frame_bits: usize,
    form: SnrForm,
) -> LinkBudget {
    let gain = los_channel_gain(geom, tx, rx);
    let gamma = snr(gain, tx, rx, noise, form);
    let ber = ook_ber(gamma).expect("non-negative SNR");
    LinkBudget {
        gain,
        snr: gamma,
        ber,
        per: frame_error_rate(ber, frame_bits),
    }
}
