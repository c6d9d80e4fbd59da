mod common;

use common::{per_oracle, q_oracle};
use i2v_latency::channel::*;
use proptest::prelude::*;

fn deg(d: f64) -> f64 {
    d.to_radians()
}

#[test]
fn lambertian_orders_are_exact() {
    assert_eq!(lambertian_order(deg(60.0)).unwrap(), 1.0);
    assert_eq!(lambertian_order(deg(45.0)).unwrap(), 2.0);
}

#[test]
fn reference_gain_at_ten_metres() {
    let h = los_channel_gain(
        &LinkGeometry::on_axis(10.0),
        &TransmitterParams::default(),
        &ReceiverOptics::default(),
    );
    assert!((h - 2.864_788_975_654_117e-6).abs() < 1e-20);
}

#[test]
fn ber_at_unit_argument() {
    assert!((ook_ber(1.0).unwrap() - 0.158_655_253_931_457_07).abs() < 1e-15);
    assert_eq!(ook_ber(0.0).unwrap(), 0.5);
    assert!(ook_ber(-1.0).is_err());
}

#[test]
fn ber_against_reference_table() {
    // 0.5·erfc(√(γ/2)) from CPython's math.erfc
    let table = [
        (0.0, 0.5),
        (0.25, 0.3085375387259869),
        (1.0, 0.15865525393145707),
        (2.0, 0.07864960352514257),
        (4.029636773864831, 0.022353782734280188),
        (9.0, 0.0013498980316300957),
        (22.6, 9.97423031488614e-07),
        (50.0, 7.687298972140176e-13),
        (100.0, 7.619853024160593e-24),
        (361.4875679058823, 6.67793461111085e-81),
    ];
    for (gamma, want) in table {
        let got = ook_ber(gamma).unwrap();
        // exp(−x²) turns an ulp of x² ≈ 180 into ~4e-14 relative
        assert!((got - want).abs() <= 1e-13 * want, "gamma {gamma}: {got} vs {want}");
    }
}

#[test]
fn per_keeps_precision_for_tiny_ber() {
    assert!((frame_error_rate(1e-9, 240) - 2.399_999_713_200_023e-7).abs() < 1e-22);
    assert_eq!(frame_error_rate(0.0, 240), 0.0);
    assert_eq!(frame_error_rate(0.5, 1), 0.5);
}

#[test]
fn default_range_near_forty_metres() {
    let r = max_range(
        &TransmitterParams::default(),
        &ReceiverOptics::default(),
        &NoiseModel::default(),
        DEFAULT_SNR_MIN,
        SnrForm::Linear,
    )
    .unwrap();
    assert!((r - 40.0).abs() < 0.5, "{r}");
}

proptest! {
    #[test]
    fn inverse_square(d in 0.1..500.0f64, phi in 0.0..80.0f64, psi in 0.0..29.0f64, half in 5.0..85.0f64) {
        let tx = TransmitterParams { power: 1.0, half_power_semiangle: deg(half) };
        let rx = ReceiverOptics::default();
        let g = |d| los_channel_gain(&LinkGeometry { distance: d, irradiance_angle: deg(phi), incidence_angle: deg(psi) }, &tx, &rx);
        prop_assert!((g(2.0 * d) / g(d) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn nothing_outside_fov(d in 0.1..100.0f64, fov in 1.0..89.0f64, extra in 1e-6..60.0f64) {
        let rx = ReceiverOptics { fov: deg(fov), ..ReceiverOptics::default() };
        let psi = (fov + extra).min(179.0);
        let g = LinkGeometry { distance: d, irradiance_angle: 0.0, incidence_angle: deg(psi) };
        let h = los_channel_gain(&g, &TransmitterParams::default(), &rx);
        prop_assert_eq!(h, 0.0);
        let b = link_budget(&g, &TransmitterParams::default(), &rx, &NoiseModel::default(), 240, SnrForm::Linear);
        prop_assert_eq!(b.ber, 0.5);
        prop_assert_eq!(b.per, 1.0);
    }

    #[test]
    fn nothing_behind_emitter(d in 0.1..100.0f64, phi in 90.0..180.0f64) {
        let g = LinkGeometry { distance: d, irradiance_angle: deg(phi), incidence_angle: 0.0 };
        prop_assert_eq!(los_channel_gain(&g, &TransmitterParams::default(), &ReceiverOptics::default()), 0.0);
    }

    #[test]
    fn snr_is_linear(h in 1e-9..1e-3f64, p in 0.01..100.0f64, k in 0i32..6) {
        let s = 2f64.powi(k);
        let tx = TransmitterParams { power: p, ..TransmitterParams::default() };
        let tx2 = TransmitterParams { power: p * s, ..tx };
        let rx = ReceiverOptics::default();
        let rx2 = ReceiverOptics { responsivity: rx.responsivity * s, ..rx };
        let n = NoiseModel::default();
        let n2 = NoiseModel { noise_power: n.noise_power * s };
        let g = snr(h, &tx, &rx, &n, SnrForm::Linear);
        prop_assert_eq!(snr(h, &tx2, &rx, &n, SnrForm::Linear) / g, s);
        prop_assert_eq!(snr(h, &tx, &rx2, &n, SnrForm::Linear) / g, s);
        prop_assert_eq!(g / snr(h, &tx, &rx, &n2, SnrForm::Linear), s);
        prop_assert_eq!(snr(h, &tx2, &rx, &n, SnrForm::Squared) / snr(h, &tx, &rx, &n, SnrForm::Squared), s * s);
    }

    // statrs' erfc is itself only good to ~5e-10 relative in places; the
    // table below pins tighter values
    #[test]
    fn ber_matches_erfc(gamma in 0.0..200.0f64) {
        let want = q_oracle(gamma.sqrt());
        let got = ook_ber(gamma).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want, "{} vs {}", got, want);
    }

    #[test]
    fn per_matches_log1p_form(lb in -15.0..-0.31f64, bits in 1usize..5000) {
        let ber = 10f64.powf(lb);
        let got = frame_error_rate(ber, bits);
        let want = per_oracle(ber, bits);
        prop_assert!((got - want).abs() <= 1e-14 * want);
        prop_assert!(got <= 1.0 && got >= ber);
    }

    #[test]
    fn snr_falls_with_distance(a in 0.1..100.0f64, b in 0.1..100.0f64) {
        let (tx, rx, n) = (TransmitterParams::default(), ReceiverOptics::default(), NoiseModel::default());
        let s = |d| snr(los_channel_gain(&LinkGeometry::on_axis(d), &tx, &rx), &tx, &rx, &n, SnrForm::Linear);
        prop_assert_eq!(a < b, s(a) > s(b));
    }

    #[test]
    fn range_scales_with_root_power(p in 0.2..5.0f64) {
        let (rx, n) = (ReceiverOptics::default(), NoiseModel::default());
        let tx = TransmitterParams { power: p, ..TransmitterParams::default() };
        let tx4 = TransmitterParams { power: 4.0 * p, ..tx };
        let r = max_range(&tx, &rx, &n, DEFAULT_SNR_MIN, SnrForm::Linear).unwrap();
        let r4 = max_range(&tx4, &rx, &n, DEFAULT_SNR_MIN, SnrForm::Linear).unwrap();
        // both are within RANGE_RESOLUTION of the true threshold
        prop_assert!((r4 - 2.0 * r).abs() <= 3.0 * RANGE_RESOLUTION, "{} {}", r, r4);
        let r_more = max_range(&TransmitterParams { power: 1.5 * p, ..tx }, &rx, &n, DEFAULT_SNR_MIN, SnrForm::Linear).unwrap();
        prop_assert!(r_more >= r);
    }
}

#[test]
fn unreachable_threshold_is_infeasible() {
    let tx = TransmitterParams {
        power: 1e-12,
        ..TransmitterParams::default()
    };
    let r = max_range(
        &tx,
        &ReceiverOptics::default(),
        &NoiseModel::default(),
        DEFAULT_SNR_MIN,
        SnrForm::Linear,
    );
    assert!(matches!(r, Err(i2v_latency::Error::InfeasibleLink(_))));
}
