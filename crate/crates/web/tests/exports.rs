use i2v_web::{latency_histogram_values, link_sweep_values, tls_curve_values};

#[test]
fn tls_curve_shape() {
    let v = tls_curve_values(8.8, 0.743, 1.09, 0.0, 30.0, 301).unwrap();
    assert_eq!(v.len(), 3 * 301);
    let rows: Vec<&[f64]> = v.chunks(3).collect();
    assert!(rows.windows(2).all(|w| w[1][2] >= w[0][2]));
    let peak = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert!((peak[0] - 8.8).abs() < 0.05);
    // trapezoid area over 0..30 ms is the cdf difference
    let area: f64 = rows.windows(2).map(|w| 0.5 * (w[0][1] + w[1][1]) * (w[1][0] - w[0][0])).sum();
    assert!((area - (rows[300][2] - rows[0][2])).abs() < 2e-3, "{area}");
}

#[test]
fn bad_arguments_are_errors() {
    assert!(tls_curve_values(8.8, -1.0, 1.0, 0.0, 30.0, 10).is_err());
    assert!(tls_curve_values(8.8, 1.0, 1.0, 5.0, 5.0, 10).is_err());
    assert!(tls_curve_values(8.8, 1.0, 1.0, 0.0, 30.0, 1).is_err());
    assert!(link_sweep_values(-1.0, 60.0, 30.0, 50.0, 10).is_err());
    assert!(latency_histogram_values(7, 1, 10.0, 1.0).is_err());
}

#[test]
fn sweep_degrades_with_distance() {
    let v = link_sweep_values(1.0, 60.0, 30.0, 80.0, 100).unwrap();
    let rows: Vec<&[f64]> = v.chunks(4).collect();
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1] && w[1][2] >= w[0][2]));
}

#[test]
fn histogram_is_a_density() {
    let v = latency_histogram_values(0, 3, 300.0, 1.0).unwrap();
    let mass: f64 = v.chunks(2).map(|p| p[1]).sum::<f64>() * 1.0;
    assert!((mass - 1.0).abs() < 1e-9);
    assert_eq!(v, latency_histogram_values(0, 3, 300.0, 1.0).unwrap());
}
