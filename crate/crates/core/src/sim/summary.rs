use serde::{Deserialize, Serialize};

use super::engine::TraceRecord;
use crate::error::{Error, Result};
use crate::stats::{histogram_pdf_estimate, EmpiricalSample};

/// Order statistics of one latency column, in milliseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub count: usize,
    pub min_ms: f64,
    pub max_ms: f64,
    pub median_ms: f64,
    pub modal_bin_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub delivered: usize,
    pub dropped: usize,
    pub delivery_ratio: f64,
    pub bin_width_ms: f64,
    /// `(segment name, stats)` in column order.
    pub segments: Vec<(String, LatencyStats)>,
    /// Absent when nothing was delivered.
    pub total: Option<LatencyStats>,
}

fn stats_of(values: Vec<f64>, bin_width: f64) -> Result<LatencyStats> {
    let s = EmpiricalSample::new(values)?;
    let h = histogram_pdf_estimate(&s, bin_width)?;
    Ok(LatencyStats {
        count: s.len(),
        min_ms: s.min() * 1e3,
        max_ms: s.max() * 1e3,
        median_ms: s.median() * 1e3,
        modal_bin_ms: h.modal_center * 1e3,
    })
}

/// Statistics over delivered records; `bin_width` in seconds.
pub fn summarize(records: &[TraceRecord], segment_names: &[String], bin_width: f64) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::EmptyInput("trace has no records".into()));
    }
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::Argument(format!("bin width must be > 0, got {bin_width}")));
    }
    let delivered: Vec<&TraceRecord> = records.iter().filter(|r| r.delivered).collect();
    let mut segments = Vec::new();
    for name in segment_names {
        let vals: Vec<f64> = delivered
            .iter()
            .filter_map(|r| r.per_segment.iter().find(|(n, _)| n == name).map(|(_, v)| *v))
            .collect();
        if !vals.is_empty() {
            segments.push((name.clone(), stats_of(vals, bin_width)?));
        }
    }
    let totals: Vec<f64> = delivered.iter().filter_map(|r| r.total).collect();
    let total = if totals.is_empty() {
        None
    } else {
        Some(stats_of(totals, bin_width)?)
    };
    Ok(Summary {
        records: records.len(),
        delivered: delivered.len(),
        dropped: records.len() - delivered.len(),
        delivery_ratio: delivered.len() as f64 / records.len() as f64,
        bin_width_ms: bin_width * 1e3,
        segments,
        total,
    })
}
