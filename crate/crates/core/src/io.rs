//! Trace CSV, summary JSON and fit report files.
//!
//! Numbers are written with Rust's shortest round-trip formatting, which
//! never depends on locale, so a given run always produces the same bytes.

use serde::Serialize;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::{SimOutput, Summary};
use crate::stats::{
    cdf_error_curve, histogram_pdf_estimate, linear_grid, sample_grid, select_best_model, Cdf, EmpiricalSample, Family, ModelSelection,
};

/// Number of points on the pdf and cdf grids of a report.
pub const REPORT_GRID_POINTS: usize = 512;

/// Fewest observations `fit` accepts.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Shortest round-trip form, switching to an exponent outside
/// `[1e-4, 1e15)` so tiny error rates stay readable.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// Trace header for the given segment columns.
pub fn trace_header(segment_names: &[String]) -> Vec<String> {
    let mut h: Vec<String> = ["msg_id", "source", "emit_time_s", "light_id", "vehicle_id"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(segment_names.iter().map(|n| format!("seg_{n}_ms")));
    h.extend(["total_ms", "delivered", "d_m", "H", "gamma", "ber"].iter().map(|s| s.to_string()));
    h
}

/// One row per (message, vehicle). Segment latencies a record did not pass
/// through, and everything of undelivered-for-coverage rows, are left empty.
pub fn write_trace<W: Write>(out: W, sim: &SimOutput) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(&sim.segment_names))?;
    for r in &sim.records {
        let mut row = vec![
            r.msg_id.to_string(),
            r.source_label.clone(),
            fmt_num(r.emit_time),
            r.light_id.map(|i| i.to_string()).unwrap_or_default(),
            r.vehicle_id.to_string(),
        ];
        for name in &sim.segment_names {
            row.push(opt(r.per_segment.iter().find(|(n, _)| n == name).map(|(_, v)| v * 1e3)));
        }
        row.push(opt(r.total.map(|t| t * 1e3)));
        row.push(r.delivered.to_string());
        row.push(opt(r.link.map(|l| l.distance)));
        row.push(opt(r.link.map(|l| l.gain)));
        row.push(opt(r.link.map(|l| l.snr)));
        row.push(opt(r.link.map(|l| l.ber)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read latencies, in milliseconds, from a CSV.
///
/// A file with `delivered` and `total_ms` columns is taken to be a trace:
/// only delivered rows count and `column` defaults to `total_ms`. Anything
/// else is read as a plain column of numbers.
pub fn read_latency_csv<R: Read>(mut reader: R, column: Option<&str>) -> Result<EmpiricalSample> {
    let mut raw = Vec::new();
    reader.read_to_end(&mut raw)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(raw.as_slice());
    let header = rdr.headers().cloned().unwrap_or_default();
    let pos = |name: &str| header.iter().position(|h| h == name);
    let (Some(delivered), Some(_)) = (pos("delivered"), pos("total_ms")) else {
        return EmpiricalSample::read_csv_millis(raw.as_slice(), column);
    };
    let name = column.unwrap_or("total_ms");
    let col = pos(name).ok_or_else(|| Error::Argument(format!("missing column '{name}'")))?;

    let mut values = Vec::new();
    let mut bad = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.get(delivered) != Some("true") {
            continue;
        }
        match rec.get(col).map(str::parse::<f64>) {
            Some(Ok(v)) if v.is_finite() && v >= 0.0 => values.push(v / 1e3),
            _ => bad.push(i + 2),
        }
    }
    if !bad.is_empty() {
        return Err(Error::UnparseableRows(bad));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput("trace has no delivered rows".into()));
    }
    EmpiricalSample::new(values)
}

#[derive(Debug, Clone, Serialize)]
struct SummaryFile<'a> {
    scenario: &'a str,
    seed: u64,
    duration_s: f64,
    #[serde(flatten)]
    summary: &'a Summary,
}

pub fn write_summary_json<W: Write>(out: W, scenario: &str, seed: u64, duration: f64, summary: &Summary) -> Result<()> {
    let mut out = out;
    let file = SummaryFile {
        scenario,
        seed,
        duration_s: duration,
        summary,
    };
    serde_json::to_writer_pretty(&mut out, &file).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// One ranked candidate in a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub rank: usize,
    /// Flat `key=value` fields: family, parameters (seconds), logL, BIC.
    pub record: Vec<(String, String)>,
    /// Largest CDF error over the distinct observations.
    pub sup_norm: f64,
}

/// Everything `fit` writes, with abscissae in milliseconds and densities
/// per millisecond.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub n: usize,
    pub families: Vec<String>,
    pub fits: Vec<FitSummary>,
    pub failures: Vec<(String, String)>,
    pub bin_width_ms: f64,
    /// `(bin centre, density)`
    pub histogram: Vec<(f64, f64)>,
    /// `x` then one pdf column per ranked family.
    pub pdf: Vec<Vec<f64>>,
    /// `x`, empirical CDF, then one column per ranked family.
    pub cdf: Vec<Vec<f64>>,
    /// `x` then `|F_emp − F_model|` per ranked family, on the observations.
    pub cdf_error: Vec<Vec<f64>>,
}

impl ReportBundle {
    pub fn build(data: &EmpiricalSample, families: &[Family], bin_width: f64) -> Result<Self> {
        if data.len() < MIN_FIT_SAMPLES {
            return Err(Error::InsufficientData {
                needed: MIN_FIT_SAMPLES,
                got: data.len(),
            });
        }
        let sel: ModelSelection = select_best_model(data, families)?;
        let hist = histogram_pdf_estimate(data, bin_width)?;

        let obs = sample_grid(data);
        let mut fits = Vec::new();
        let mut err_cols = Vec::new();
        for (i, f) in sel.ranked.iter().enumerate() {
            let curve = cdf_error_curve(data, &f.spec, &obs)?;
            fits.push(FitSummary {
                rank: i + 1,
                record: f.to_record(),
                sup_norm: curve.sup_norm,
            });
            err_cols.push(curve.points.into_iter().map(|p| p.1).collect::<Vec<_>>());
        }

        let grid = linear_grid(data.min(), data.max(), REPORT_GRID_POINTS);
        let pdf = grid
            .iter()
            .map(|&x| {
                let mut row = vec![x * 1e3];
                row.extend(sel.ranked.iter().map(|f| f.spec.pdf(x) / 1e3));
                row
            })
            .collect();
        let cdf = grid
            .iter()
            .map(|&x| {
                let mut row = vec![x * 1e3, data.cdf(x)];
                row.extend(sel.ranked.iter().map(|f| f.spec.cdf(x)));
                row
            })
            .collect();
        let cdf_error = obs
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let mut row = vec![x * 1e3];
                row.extend(err_cols.iter().map(|c| c[j]));
                row
            })
            .collect();

        let bundle = ReportBundle {
            n: data.len(),
            families: sel.ranked.iter().map(|f| f.family().name().to_string()).collect(),
            fits,
            failures: sel.failures.iter().map(|(f, e)| (f.name().to_string(), e.clone())).collect(),
            bin_width_ms: bin_width * 1e3,
            histogram: hist.bins.iter().map(|&(c, d)| (c * 1e3, d / 1e3)).collect(),
            pdf,
            cdf,
            cdf_error,
        };
        bundle.check_finite()?;
        Ok(bundle)
    }

    fn check_finite(&self) -> Result<()> {
        let grids = [("pdf", &self.pdf), ("cdf", &self.cdf), ("cdf_error", &self.cdf_error)];
        let mut bad = Vec::new();
        for (name, g) in grids {
            if let Some(i) = g.iter().position(|row| row.iter().any(|v| !v.is_finite())) {
                bad.push(format!("{name} grid has a non-finite value in row {i}"));
            }
        }
        if self.histogram.iter().any(|(c, d)| !c.is_finite() || !d.is_finite()) {
            bad.push("histogram has a non-finite value".into());
        }
        if self.fits.iter().any(|f| !f.sup_norm.is_finite()) {
            bad.push("non-finite CDF error".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Human-readable ranking, one line per family.
    pub fn ranking_text(&self) -> String {
        let mut s = format!("n = {}\n", self.n);
        for f in &self.fits {
            let fields: Vec<String> = f.record.iter().map(|(k, v)| format!("{k}={v}")).collect();
            s.push_str(&format!("{} {} sup_cdf_err={:.6}\n", f.rank, fields.join(" "), f.sup_norm));
        }
        for (fam, e) in &self.failures {
            s.push_str(&format!("- {fam} failed: {e}\n"));
        }
        s
    }

    /// Write `report.json`, `fits.txt`, `histogram.csv`, `pdf.csv`,
    /// `cdf.csv` and `cdf_error.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut json = serde_json::to_vec_pretty(self).map_err(std::io::Error::from)?;
        json.push(b'\n');
        std::fs::write(dir.join("report.json"), json)?;
        std::fs::write(dir.join("fits.txt"), self.ranking_text())?;

        let fam_cols = |suffix: &str| self.families.iter().map(|f| format!("{f}_{suffix}")).collect::<Vec<_>>();
        let mut h = vec!["bin_center_ms".to_string(), "density_per_ms".to_string()];
        write_grid(&dir.join("histogram.csv"), &h, self.histogram.iter().map(|&(c, d)| vec![c, d]))?;

        h = vec!["x_ms".into()];
        h.extend(fam_cols("pdf_per_ms"));
        write_grid(&dir.join("pdf.csv"), &h, self.pdf.iter().cloned())?;

        h = vec!["x_ms".into(), "empirical".into()];
        h.extend(fam_cols("cdf"));
        write_grid(&dir.join("cdf.csv"), &h, self.cdf.iter().cloned())?;

        h = vec!["x_ms".into()];
        h.extend(fam_cols("abs_err"));
        write_grid(&dir.join("cdf_error.csv"), &h, self.cdf_error.iter().cloned())?;
        Ok(())
    }
}

fn write_grid(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_num(v)))?;
    }
    w.flush()?;
    Ok(())
}
