//! End-to-end latency as a chain of segment models.

use rand::Rng;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::phy::{frame_airtime, Frame, PhyConfig};
use crate::stats::{DistributionSpec, TLocationScaleParams};

/// Smallest truncation acceptance mass the rejection sampler will take on.
pub const MIN_ACCEPTANCE_MASS: f64 = 1e-9;

/// Where an airtime segment gets its frame length from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameBits {
    Fixed(usize),
    /// Serialized length of the message's own frame.
    FromFrame,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentModel {
    /// Draws truncated to `[lo, hi]` seconds by rejection.
    Stochastic {
        spec: DistributionSpec,
        truncation: (f64, f64),
    },
    Deterministic {
        value: f64,
    },
    Airtime {
        phy: PhyConfig,
        bits: FrameBits,
        decode_delay: f64,
    },
}

impl SegmentModel {
    /// 5G backhaul: fitted t-location-scale truncated to [2.4, 29] ms.
    pub fn five_g() -> Self {
        SegmentModel::Stochastic {
            spec: TLocationScaleParams::five_g_segment().into(),
            truncation: (2.4e-3, 29e-3),
        }
    }

    /// Gateway processing, 300 µs.
    pub fn gateway() -> Self {
        SegmentModel::Deterministic { value: 3e-4 }
    }

    /// 240-bit frame at 100 kbit/s.
    pub fn vlc_airtime() -> Self {
        SegmentModel::Airtime {
            phy: PhyConfig::default(),
            bits: FrameBits::Fixed(240),
            decode_delay: 0.0,
        }
    }

    /// Probability mass a stochastic segment keeps after truncation.
    pub fn acceptance_mass(&self) -> Option<f64> {
        match self {
            SegmentModel::Stochastic {
                spec,
                truncation: (lo, hi),
            } => Some(spec.cdf(*hi) - spec.cdf(*lo)),
            _ => None,
        }
    }

    fn problems(&self, at: &str) -> Vec<String> {
        let mut bad = Vec::new();
        match self {
            SegmentModel::Stochastic { truncation: (lo, hi), .. } => {
                if !(lo.is_finite() && hi.is_finite() && *lo >= 0.0 && lo < hi) {
                    bad.push(format!("{at}: truncation must satisfy 0 <= lo < hi, got [{lo}, {hi}] s"));
                } else {
                    let mass = self.acceptance_mass().unwrap_or(0.0);
                    if !(mass >= MIN_ACCEPTANCE_MASS) {
                        bad.push(format!("{at}: truncation [{lo}, {hi}] s keeps only {mass:e} of the distribution"));
                    }
                }
            }
            SegmentModel::Deterministic { value } => {
                if !(value.is_finite() && *value >= 0.0) {
                    bad.push(format!("{at}: deterministic latency must be >= 0, got {value}"));
                }
            }
            SegmentModel::Airtime { phy, bits, decode_delay } => {
                if let Err(Error::Validation(v)) = phy.validate() {
                    bad.extend(v.into_iter().map(|m| format!("{at}: {m}")));
                }
                if *bits == FrameBits::Fixed(0) {
                    bad.push(format!("{at}: frame_bits must be >= 1"));
                }
                if !(decode_delay.is_finite() && *decode_delay >= 0.0) {
                    bad.push(format!("{at}: decode delay must be >= 0, got {decode_delay}"));
                }
            }
        }
        bad
    }
}

fn draw<R: Rng + ?Sized>(model: &SegmentModel, rng: &mut R, frame: Option<&Frame>) -> Result<f64> {
    match model {
        SegmentModel::Stochastic {
            spec,
            truncation: (lo, hi),
        } => loop {
            let x = spec.sample(rng);
            if x >= *lo && x <= *hi {
                return Ok(x);
            }
        },
        SegmentModel::Deterministic { value } => Ok(*value),
        SegmentModel::Airtime { phy, bits, decode_delay } => {
            let n = match bits {
                FrameBits::Fixed(n) => *n,
                FrameBits::FromFrame => frame
                    .ok_or_else(|| Error::Configuration("airtime segment needs a frame".into()))?
                    .bit_len(phy),
            };
            Ok(frame_airtime(n, phy) + decode_delay)
        }
    }
}

/// One latency draw in seconds.
pub fn sample_segment<R: Rng + ?Sized>(model: &SegmentModel, rng: &mut R, frame: Option<&Frame>) -> Result<f64> {
    if let SegmentModel::Stochastic { truncation: (lo, hi), .. } = model {
        let mass = model.acceptance_mass().unwrap_or(0.0);
        if !(mass >= MIN_ACCEPTANCE_MASS) {
            return Err(Error::DegenerateTruncation { lo: *lo, hi: *hi, mass });
        }
    }
    draw(model, rng, frame)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub name: String,
    pub model: SegmentModel,
    /// Chance the message is lost in this segment (sensitivity studies).
    pub loss_probability: f64,
}

impl Segment {
    pub fn new(name: impl Into<String>, model: SegmentModel) -> Self {
        Self {
            name: name.into(),
            model,
            loss_probability: 0.0,
        }
    }
}

/// Ordered, validated chain of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    segments: Vec<Segment>,
}

impl PipelineConfig {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let mut bad = Vec::new();
        if segments.is_empty() {
            bad.push("pipeline needs at least one segment".to_string());
        }
        let mut seen = HashSet::new();
        for (i, s) in segments.iter().enumerate() {
            let at = format!("segment '{}'", s.name);
            if s.name.is_empty() {
                bad.push(format!("segment {i} has an empty name"));
            }
            if !seen.insert(s.name.as_str()) {
                bad.push(format!("duplicate segment name '{}'", s.name));
            }
            if !(0.0..=1.0).contains(&s.loss_probability) {
                bad.push(format!("{at}: loss probability must be in [0, 1], got {}", s.loss_probability));
            }
            bad.extend(s.model.problems(&at));
        }
        if bad.is_empty() {
            Ok(Self { segments })
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// 5G stochastic segment, 300 µs gateway, 240-bit VLC airtime.
    pub fn default_composed() -> Self {
        Self::new(vec![
            Segment::new("5g", SegmentModel::five_g()),
            Segment::new("gateway", SegmentModel::gateway()),
            Segment::new("vlc", SegmentModel::vlc_airtime()),
        ])
        .expect("valid default pipeline")
    }

    /// Single end-to-end segment from the overall-system fit, truncated to
    /// the sum of the per-segment bounds (5.1 to 32.4 ms).
    pub fn overall_fit() -> Self {
        Self::new(vec![Segment::new(
            "overall",
            SegmentModel::Stochastic {
                spec: TLocationScaleParams::overall_system().into(),
                truncation: (5.1e-3, 32.4e-3),
            },
        )])
        .expect("valid default pipeline")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn needs_frame(&self) -> bool {
        self.segments.iter().any(|s| {
            matches!(
                s.model,
                SegmentModel::Airtime {
                    bits: FrameBits::FromFrame,
                    ..
                }
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatencySample {
    /// Seconds per segment, in pipeline order.
    pub per_segment: Vec<(String, f64)>,
    pub total: f64,
    /// Name of the segment that lost the message, if any.
    pub lost_in: Option<String>,
}

/// Walk every segment once, in order.
pub fn end_to_end<R: Rng + ?Sized>(cfg: &PipelineConfig, rng: &mut R, frame: Option<&Frame>) -> Result<LatencySample> {
    let mut per_segment = Vec::with_capacity(cfg.segments.len());
    let mut total = 0.0;
    let mut lost_in = None;
    for seg in &cfg.segments {
        let v = draw(&seg.model, rng, frame)?;
        total += v;
        per_segment.push((seg.name.clone(), v));
        // only consume randomness when loss is modelled
        if seg.loss_probability > 0.0 && rng.random::<f64>() < seg.loss_probability && lost_in.is_none() {
            lost_in = Some(seg.name.clone());
        }
    }
    Ok(LatencySample {
        per_segment,
        total,
        lost_in,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::build_frame;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_segment() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(sample_segment(&SegmentModel::gateway(), &mut rng, None).unwrap(), 3e-4);
        }
    }

    #[test]
    fn airtime_needs_frame() {
        let m = SegmentModel::Airtime {
            phy: PhyConfig::default(),
            bits: FrameBits::FromFrame,
            decode_delay: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(sample_segment(&m, &mut rng, None), Err(Error::Configuration(_))));
        let f = build_frame(&[7u8; 30], &PhyConfig::default()).unwrap();
        assert!((sample_segment(&m, &mut rng, Some(&f)).unwrap() - 2.8e-3).abs() < 1e-15);
        let m = SegmentModel::Airtime {
            phy: PhyConfig::default(),
            bits: FrameBits::Fixed(240),
            decode_delay: 1e-4,
        };
        assert!((sample_segment(&m, &mut rng, None).unwrap() - 2.5e-3).abs() < 1e-15);
    }

    #[test]
    fn degenerate_truncation_is_rejected() {
        let m = SegmentModel::Stochastic {
            spec: DistributionSpec::Normal { mu: 0.0, sigma: 1e-3 },
            truncation: (1.0, 2.0),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_segment(&m, &mut rng, None),
            Err(Error::DegenerateTruncation { .. })
        ));
        assert!(PipelineConfig::new(vec![Segment::new("x", m)]).is_err());
    }

    #[test]
    fn truncated_draws_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let v = sample_segment(&SegmentModel::five_g(), &mut rng, None).unwrap();
            assert!((2.4e-3..=29e-3).contains(&v));
        }
    }

    #[test]
    fn pipeline_validation() {
        assert!(PipelineConfig::new(vec![]).is_err());
        let dup = PipelineConfig::new(vec![
            Segment::new("a", SegmentModel::gateway()),
            Segment::new("a", SegmentModel::gateway()),
        ]);
        assert!(matches!(dup, Err(Error::Validation(v)) if v[0].contains("duplicate")));
        let neg = PipelineConfig::new(vec![Segment::new("a", SegmentModel::Deterministic { value: -1.0 })]);
        assert!(neg.is_err());
    }

    #[test]
    fn identity_pipeline() {
        let p = PipelineConfig::new(vec![Segment::new("only", SegmentModel::Deterministic { value: 1e-3 })]).unwrap();
        let s = end_to_end(&p, &mut ChaCha8Rng::seed_from_u64(1), None).unwrap();
        assert_eq!(s.total, 1e-3);
        assert_eq!(s.per_segment, vec![("only".to_string(), 1e-3)]);
    }

    #[test]
    fn composed_total_is_sum_and_bounded() {
        let p = PipelineConfig::default_composed();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5000 {
            let s = end_to_end(&p, &mut rng, None).unwrap();
            let sum: f64 = s.per_segment.iter().map(|(_, v)| v).sum();
            assert_eq!(s.total, sum);
            assert!(s.total >= 5.1e-3 - 1e-15);
            assert!(s.lost_in.is_none());
        }
    }

    #[test]
    fn certain_loss_is_reported() {
        let mut seg = Segment::new("g", SegmentModel::gateway());
        seg.loss_probability = 1.0;
        let p = PipelineConfig::new(vec![seg]).unwrap();
        let s = end_to_end(&p, &mut ChaCha8Rng::seed_from_u64(1), None).unwrap();
        assert_eq!(s.lost_in.as_deref(), Some("g"));
    }
}
