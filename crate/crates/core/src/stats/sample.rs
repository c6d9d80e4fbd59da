use std::io::Read;

use super::family::Cdf;
use crate::error::{Error, Result};

/// Latency observations in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Argument(format!(
                "observation {i} is {v}; latencies must be finite and >= 0"
            )));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { values, sorted })
    }

    /// Observations given in milliseconds.
    pub fn from_millis(ms: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(ms.into_iter().map(|v| v * 1e-3).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }

    /// Linear-interpolated quantile (type 7).
    pub fn quantile(&self, q: f64) -> f64 {
        quantile_sorted(&self.sorted, q)
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Read one column of a CSV file holding latencies in milliseconds.
    ///
    /// If the first row does not parse as a number it is taken as a header
    /// and `column` may name a field; otherwise `column` must be an index
    /// (or absent, meaning the first column).
    pub fn read_csv_millis<R: Read>(mut reader: R, column: Option<&str>) -> Result<Self> {
        let mut raw = Vec::new();
        reader.read_to_end(&mut raw)?;
        // physical line of a byte offset, blank lines included
        let line_of = |byte: u64| {
            // a record's start offset can sit on the blank lines the reader skipped
            let mut at = byte as usize;
            while at < raw.len() && (raw[at] == b'\n' || raw[at] == b'\r') {
                at += 1;
            }
            1 + raw[..at].iter().filter(|&&b| b == b'\n').count()
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(raw.as_slice());
        let mut rows = rdr.records();
        let first = match rows.next() {
            Some(r) => r?,
            None => return Err(Error::EmptyInput("CSV has no rows".into())),
        };

        let has_header = first.iter().any(|f| f.parse::<f64>().is_err());
        let col = match column {
            None => 0,
            Some(c) => match c.parse::<usize>() {
                Ok(i) if !has_header || !first.iter().any(|h| h == c) => i,
                _ => {
                    if !has_header {
                        return Err(Error::Argument(format!("column '{c}' requested but the CSV has no header")));
                    }
                    first
                        .iter()
                        .position(|h| h == c)
                        .ok_or_else(|| Error::Argument(format!("missing column '{c}'")))?
                }
            },
        };
        if col >= first.len() {
            return Err(Error::Argument(format!("missing column {col}: file has {} columns", first.len())));
        }

        let mut values = Vec::new();
        let mut bad = Vec::new();
        let mut push = |row_no: usize, rec: &csv::StringRecord| match rec.get(col).map(str::parse::<f64>) {
            Some(Ok(v)) if v.is_finite() && v >= 0.0 => values.push(v * 1e-3),
            _ => bad.push(row_no),
        };
        if !has_header {
            push(line_of(first.position().map_or(0, |p| p.byte())), &first);
        }
        for rec in rows {
            let rec = rec?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            let line = line_of(rec.position().map_or(0, |p| p.byte()));
            push(line, &rec);
        }
        if !bad.is_empty() {
            return Err(Error::UnparseableRows(bad));
        }
        if values.is_empty() {
            return Err(Error::EmptyInput("no observations in CSV".into()));
        }
        Self::new(values)
    }
}

/// Right-continuous empirical step CDF.
impl Cdf for EmpiricalSample {
    fn cdf(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }
}

pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_negative() {
        assert!(EmpiricalSample::new(vec![]).is_err());
        assert!(EmpiricalSample::new(vec![1.0, -0.1]).is_err());
        assert!(EmpiricalSample::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn quantiles() {
        let s = EmpiricalSample::new(vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.median(), 2.5);
        assert_eq!(s.min(), 1.0);
        assert_eq!(s.max(), 4.0);
        assert_eq!(s.values()[0], 4.0);
        assert_eq!(s.cdf(2.0), 0.5);
        assert_eq!(s.cdf(0.5), 0.0);
        assert_eq!(s.cdf(4.0), 1.0);
    }

    #[test]
    fn csv_headerless_single_column() {
        let s = EmpiricalSample::read_csv_millis("9.5\n10\n12.25\n".as_bytes(), None).unwrap();
        for (got, want) in s.values().iter().zip([0.0095, 0.010, 0.01225]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_named_column() {
        let data = "msg_id,total_ms\n0,11.5\n1,12.0\n";
        let s = EmpiricalSample::read_csv_millis(data.as_bytes(), Some("total_ms")).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.values()[1] - 0.012).abs() < 1e-15);
        let err = EmpiricalSample::read_csv_millis(data.as_bytes(), Some("nope")).unwrap_err();
        assert!(matches!(err, Error::Argument(_)), "{err}");
    }

    #[test]
    fn csv_reports_bad_rows() {
        let data = "v\n1.0\nabc\n2.0\n\n-3\n";
        match EmpiricalSample::read_csv_millis(data.as_bytes(), Some("v")) {
            Err(Error::UnparseableRows(rows)) => assert_eq!(rows, vec![3, 6]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
