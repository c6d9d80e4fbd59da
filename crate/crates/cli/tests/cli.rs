use std::path::Path;
use std::process::{Command, Output};

fn i2vsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_i2vsim"))
        .args(args)
        .output()
        .expect("spawn i2vsim")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text
        .lines()
        .find(|l| l.starts_with(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"));
    line[key.len() + 3..].parse().unwrap()
}

#[test]
fn link_budget_defaults() {
    let o = i2vsim(&["link-budget"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("H = 2.86479e-6"), "{s}");
    assert!(value(&s, "gamma") > 22.6);
}

#[test]
fn link_budget_outside_fov() {
    let o = i2vsim(&["link-budget", "--psi", "31", "--fov", "30"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(value(&s, "H"), 0.0);
    assert_eq!(value(&s, "BER"), 0.5);
    assert_eq!(value(&s, "PER"), 1.0);
}

#[test]
fn link_budget_rejects_bad_optics_all_at_once() {
    let o = i2vsim(&["link-budget", "--power=-1", "--fov", "120"]);
    assert!(!o.status.success());
    let e = stderr(&o);
    assert!(e.contains("power") && e.contains("field of view"), "{e}");
}

#[test]
fn validate_bundled_and_broken() {
    for name in ["paper-default", "paper-overall", "city-grid"] {
        let o = i2vsim(&["validate", name]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        r#"
name = "bad"
duration_s = 10.0
default_pipeline = "p"

[[pipelines.p.segments]]
name = "fixed"
kind = "deterministic"
value_ms = 1.0

[[vehicles]]
id = 3
position_m = [0.0, 0.0]
heading_deg = 0.0
speed_mps = -2.0

[[vehicles]]
id = 3
position_m = [1.0, 0.0]
heading_deg = 0.0

[[sources]]
id = 1
label = "smoke"
kind = "periodic"
interval_s = 0.0
payload = "x"
"#,
    )
    .unwrap();
    let o = i2vsim(&["validate", path.to_str().unwrap()]);
    assert!(!o.status.success());
    let e = stderr(&o);
    for needle in ["duplicate vehicle id 3", "speed", "unknown sensor label 'smoke'", "interval"] {
        assert!(e.contains(needle), "missing '{needle}' in {e}");
    }
}

#[test]
fn unknown_scenario_fails() {
    let o = i2vsim(&["run", "nowhere-city"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("bundled"));
}

fn run_to(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "paper-default", "--out", dir.to_str().unwrap(), "--duration", "200"];
    args.extend_from_slice(extra);
    i2vsim(&args)
}

#[test]
fn run_is_deterministic_and_fit_reads_its_trace() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_to(a.path(), &["--seed", "9"]).status.success());
    assert!(run_to(b.path(), &["--seed", "9"]).status.success());
    let ta = std::fs::read(a.path().join("trace.csv")).unwrap();
    assert_eq!(ta, std::fs::read(b.path().join("trace.csv")).unwrap());
    assert_eq!(std::str::from_utf8(&ta).unwrap().lines().count(), 201);

    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(a.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 9);
    assert_eq!(summary["delivered"], 200);

    let rep = a.path().join("report");
    let o = i2vsim(&[
        "fit",
        a.path().join("trace.csv").to_str().unwrap(),
        "--families",
        "normal,t-location-scale",
        "--bins-ms",
        "0.5",
        "--out",
        rep.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("1 family=t-location-scale"), "{}", stdout(&o));
    for f in ["report.json", "pdf.csv", "cdf.csv", "cdf_error.csv", "histogram.csv"] {
        assert!(rep.join(f).exists(), "{f}");
    }
}

#[test]
fn replications_get_their_own_seeds() {
    let d = tempfile::tempdir().unwrap();
    let o = run_to(d.path(), &["--seed", "100", "--replications", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let traces: Vec<Vec<u8>> = (100..103)
        .map(|s| std::fs::read(d.path().join(format!("seed-{s}/trace.csv"))).unwrap())
        .collect();
    assert_ne!(traces[0], traces[1]);
    assert_ne!(traces[1], traces[2]);

    // replication k equals a single run with seed base+k
    let single = tempfile::tempdir().unwrap();
    assert!(run_to(single.path(), &["--seed", "101"]).status.success());
    assert_eq!(std::fs::read(single.path().join("trace.csv")).unwrap(), traces[1]);
}

#[test]
fn fit_needs_ten_values_and_reports_bad_rows() {
    let d = tempfile::tempdir().unwrap();
    let few = d.path().join("few.csv");
    std::fs::write(&few, "latency_ms\n1\n2\n3\n4\n5\n6\n7\n8\n9\n").unwrap();
    let o = i2vsim(&["fit", few.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("need at least 10"), "{}", stderr(&o));

    let bad = d.path().join("bad.csv");
    std::fs::write(&bad, "latency_ms\n1\nx\n3\n-4\n").unwrap();
    let o = i2vsim(&["fit", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("3, 5"), "{}", stderr(&o));

    let o = i2vsim(&["fit", few.to_str().unwrap(), "--families", "gamma"]);
    assert!(!o.status.success());
}

#[test]
fn fit_rejects_a_missing_column() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("x.csv");
    std::fs::write(&p, format!("latency_ms\n{}", "5\n".repeat(20))).unwrap();
    let o = i2vsim(&["fit", p.to_str().unwrap(), "--column", "jitter_ms"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("jitter_ms"), "{}", stderr(&o));
}

#[test]
fn link_budget_defaults_match_formula() {
    // H = (m+1) A / (2π d²) · n²/sin²(FOV) with m = 1, A = 1e-4, n = 1.5, FOV = 30°, d = 10
    let h = 2.0 * 1e-4 / (2.0 * std::f64::consts::PI * 100.0) * 2.25 / 0.25;
    let gamma = 0.4 * h * 1.0 / 3.17e-9;
    let s = stdout(&i2vsim(&["link-budget"]));
    assert!((value(&s, "H") / h - 1.0).abs() < 5e-6, "{s}");
    assert!((value(&s, "gamma") / gamma - 1.0).abs() < 5e-6, "{s}");

    let s2 = stdout(&i2vsim(&["link-budget", "--power", "2"]));
    assert!((value(&s2, "gamma") / value(&s, "gamma") - 2.0).abs() < 1e-5, "{s2}");
}

#[test]
fn duplicate_light_ids_are_both_named() {
    let d = tempfile::tempdir().unwrap();
    let text = i2v_latency::scenario::bundled("paper-default").unwrap();
    let light = &text[text.find("[[lights]]").unwrap()..];
    let light = &light[..light[1..].find("[[").map_or(light.len(), |i| i + 1)];
    let path = d.path().join("dup.toml");
    std::fs::write(&path, format!("{text}\n{light}")).unwrap();
    let o = i2vsim(&["validate", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("duplicate light id 1: lights[0] and lights[1]"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn full_default_run_fits_near_twelve_ms() {
    let d = tempfile::tempdir().unwrap();
    let o = i2vsim(&["run", "paper-default", "--out", d.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = d.path().join("trace.csv");
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 2251);
    let o = i2vsim(&["fit", trace.to_str().unwrap()]);
    let s = stdout(&o);
    let winner = s.lines().find(|l| l.starts_with("1 ")).unwrap();
    let mu: f64 = winner
        .split_whitespace()
        .find_map(|w| w.strip_prefix("mu="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((10.5..=13.5).contains(&(mu * 1e3)), "{winner}");
}
