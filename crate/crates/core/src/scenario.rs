//! Scenario files: a TOML schema with units in every key name, and its
//! conversion into a validated [`Scenario`].

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::channel::{NoiseModel, ReceiverOptics, SnrForm, TransmitterParams};
use crate::error::{Error, Result};
use crate::phy::PhyConfig;
use crate::pipeline::{FrameBits, PipelineConfig, Segment, SegmentModel};
use crate::sim::{MessageSource, Point, Scenario, SensorLabel, SourceKind, TrafficLight, Vehicle};
use crate::stats::{DistributionSpec, Family, TLocationScaleParams};

/// Scenarios shipped with the crate, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("paper-default", include_str!("../scenarios/paper-default.toml")),
    ("paper-overall", include_str!("../scenarios/paper-overall.toml")),
    ("city-grid", include_str!("../scenarios/city-grid.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub duration_s: f64,
    pub default_pipeline: String,
    #[serde(default)]
    pub snr_form: SnrForm,
    #[serde(default)]
    pub phy: PhyConfig,
    #[serde(default)]
    pub noise: NoiseFile,
    #[serde(default)]
    pub receiver: ReceiverFile,
    pub pipelines: BTreeMap<String, PipelineFile>,
    #[serde(default)]
    pub lights: Vec<LightFile>,
    #[serde(default)]
    pub vehicles: Vec<VehicleFile>,
    #[serde(default)]
    pub sources: Vec<SourceFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    pub noise_power_w: f64,
}

impl Default for NoiseFile {
    fn default() -> Self {
        Self {
            noise_power_w: NoiseModel::default().noise_power,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverFile {
    pub area_m2: f64,
    pub filter_transmission: f64,
    pub concentrator_index: f64,
    pub fov_deg: f64,
    pub responsivity_a_per_w: f64,
}

impl Default for ReceiverFile {
    fn default() -> Self {
        ReceiverFile::from(&ReceiverOptics::default())
    }
}

impl From<&ReceiverFile> for ReceiverOptics {
    fn from(r: &ReceiverFile) -> Self {
        ReceiverOptics {
            area: r.area_m2,
            filter_transmission: r.filter_transmission,
            concentrator_index: r.concentrator_index,
            fov: r.fov_deg.to_radians(),
            responsivity: r.responsivity_a_per_w,
        }
    }
}

impl From<&ReceiverOptics> for ReceiverFile {
    fn from(r: &ReceiverOptics) -> Self {
        ReceiverFile {
            area_m2: r.area,
            filter_transmission: r.filter_transmission,
            concentrator_index: r.concentrator_index,
            fov_deg: r.fov.to_degrees(),
            responsivity_a_per_w: r.responsivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineFile {
    pub segments: Vec<SegmentFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub loss_probability: f64,
    #[serde(flatten)]
    pub model: SegmentModelFile,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SegmentModelFile {
    Stochastic {
        distribution: DistributionFile,
        truncation_ms: [f64; 2],
    },
    Deterministic {
        value_ms: f64,
    },
    Airtime {
        frame_bits: FrameBitsFile,
        #[serde(default, skip_serializing_if = "is_zero")]
        decode_delay_ms: f64,
    },
}

/// A fixed bit count, or `"payload"` for the message's own frame length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameBitsFile {
    Fixed(usize),
    Keyword(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionFile {
    TLocationScale { mu_ms: f64, sigma_ms: f64, nu: f64 },
    Normal { mu_ms: f64, sigma_ms: f64 },
    Logistic { mu_ms: f64, scale_ms: f64 },
    LogNormal { median_ms: f64, sigma_log: f64 },
}

impl DistributionFile {
    pub fn to_spec(&self) -> Result<DistributionSpec> {
        match *self {
            DistributionFile::TLocationScale { mu_ms, sigma_ms, nu } => {
                Ok(TLocationScaleParams::new(mu_ms / 1e3, sigma_ms / 1e3, nu)?.into())
            }
            DistributionFile::Normal { mu_ms, sigma_ms } => DistributionSpec::new(Family::Normal, &[mu_ms / 1e3, sigma_ms / 1e3]),
            DistributionFile::Logistic { mu_ms, scale_ms } => DistributionSpec::new(Family::Logistic, &[mu_ms / 1e3, scale_ms / 1e3]),
            DistributionFile::LogNormal { median_ms, sigma_log } => {
                if !(median_ms > 0.0) {
                    return Err(Error::ParameterDomain(format!("log-normal median must be > 0, got {median_ms}")));
                }
                DistributionSpec::new(Family::LogNormal, &[(median_ms / 1e3).ln(), sigma_log])
            }
        }
    }

    pub fn from_spec(spec: &DistributionSpec) -> Self {
        match *spec {
            DistributionSpec::TLocationScale(p) => DistributionFile::TLocationScale {
                mu_ms: p.mu() * 1e3,
                sigma_ms: p.sigma() * 1e3,
                nu: p.nu(),
            },
            DistributionSpec::Normal { mu, sigma } => DistributionFile::Normal {
                mu_ms: mu * 1e3,
                sigma_ms: sigma * 1e3,
            },
            DistributionSpec::Logistic { mu, s } => DistributionFile::Logistic {
                mu_ms: mu * 1e3,
                scale_ms: s * 1e3,
            },
            DistributionSpec::LogNormal { mu_log, sigma_log } => DistributionFile::LogNormal {
                median_ms: mu_log.exp() * 1e3,
                sigma_log,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightFile {
    pub id: u32,
    pub position_m: [f64; 2],
    pub beam_azimuth_deg: f64,
    pub power_w: f64,
    pub half_power_semiangle_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleFile {
    pub id: u32,
    pub position_m: [f64; 2],
    pub heading_deg: f64,
    #[serde(default)]
    pub speed_mps: f64,
    /// Overrides the scenario-wide `[receiver]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<ReceiverFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceFile {
    pub id: u32,
    pub label: String,
    pub payload: String,
    #[serde(flatten)]
    pub kind: SourceKindFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceKindFile {
    Periodic {
        interval_s: f64,
        #[serde(default)]
        offset_s: f64,
    },
    Triggered {
        rate_per_s: f64,
    },
}

impl ScenarioFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario schema is always serializable")
    }

    /// Convert to a runtime scenario, collecting every violation.
    pub fn build(&self) -> Result<Scenario> {
        let mut bad = Vec::new();

        let placeholder = Arc::new(PipelineConfig::new(vec![Segment::new(
            "unused",
            SegmentModel::Deterministic { value: 0.0 },
        )])?);
        let mut pipelines = BTreeMap::new();
        for (name, p) in &self.pipelines {
            match build_pipeline(p, &self.phy) {
                Ok(cfg) => {
                    pipelines.insert(name.clone(), Arc::new(cfg));
                }
                Err(errs) => {
                    bad.extend(errs.into_iter().map(|e| format!("pipelines.{name}: {e}")));
                    pipelines.insert(name.clone(), placeholder.clone());
                }
            }
        }
        if !self.pipelines.contains_key(&self.default_pipeline) {
            bad.push(format!("default_pipeline '{}' is not defined", self.default_pipeline));
        }

        let lights = self
            .lights
            .iter()
            .map(|l| {
                let name = l.pipeline.clone().unwrap_or_else(|| self.default_pipeline.clone());
                TrafficLight {
                    id: l.id,
                    position: Point::new(l.position_m[0], l.position_m[1]),
                    tx: TransmitterParams {
                        power: l.power_w,
                        half_power_semiangle: l.half_power_semiangle_deg.to_radians(),
                    },
                    beam_azimuth: l.beam_azimuth_deg.to_radians(),
                    pipeline: pipelines.get(&name).cloned().unwrap_or_else(|| placeholder.clone()),
                    pipeline_name: name,
                }
            })
            .collect();

        let vehicles = self
            .vehicles
            .iter()
            .map(|v| Vehicle {
                id: v.id,
                position: Point::new(v.position_m[0], v.position_m[1]),
                heading: v.heading_deg.to_radians(),
                speed: v.speed_mps,
                rx: ReceiverOptics::from(v.receiver.as_ref().unwrap_or(&self.receiver)),
            })
            .collect();

        let mut sources = Vec::new();
        for (i, s) in self.sources.iter().enumerate() {
            let label = match s.label.parse::<SensorLabel>() {
                Ok(l) => l,
                Err(e) => {
                    bad.push(format!("sources[{i}] (id {}): {e}", s.id));
                    SensorLabel::Environment
                }
            };
            let kind = match s.kind {
                SourceKindFile::Periodic { interval_s, offset_s } => SourceKind::Periodic {
                    interval: interval_s,
                    offset: offset_s,
                },
                SourceKindFile::Triggered { rate_per_s } => SourceKind::Triggered { rate: rate_per_s },
            };
            sources.push(MessageSource {
                id: s.id,
                label,
                kind,
                payload_template: s.payload.clone(),
            });
        }

        let scenario = Scenario {
            name: self.name.clone(),
            lights,
            vehicles,
            sources,
            pipelines,
            phy: self.phy,
            noise: NoiseModel {
                noise_power: self.noise.noise_power_w,
            },
            snr_form: self.snr_form,
            seed: self.seed,
            duration: self.duration_s,
        };
        if let Err(Error::Validation(v)) = scenario.validate() {
            bad.extend(v);
        }
        if bad.is_empty() {
            Ok(scenario)
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Inverse of [`ScenarioFile::build`], up to degree/radian rounding.
    pub fn from_scenario(s: &Scenario) -> Self {
        let mut default_pipeline = s.lights.first().map(|l| l.pipeline_name.clone());
        if default_pipeline.is_none() {
            default_pipeline = s.pipelines.keys().next().cloned();
        }
        let default_pipeline = default_pipeline.unwrap_or_default();
        let receiver = s.vehicles.first().map(|v| ReceiverFile::from(&v.rx)).unwrap_or_default();
        ScenarioFile {
            name: s.name.clone(),
            seed: s.seed,
            duration_s: s.duration,
            default_pipeline: default_pipeline.clone(),
            snr_form: s.snr_form,
            phy: s.phy,
            noise: NoiseFile {
                noise_power_w: s.noise.noise_power,
            },
            receiver,
            pipelines: s.pipelines.iter().map(|(k, p)| (k.clone(), pipeline_to_file(p))).collect(),
            lights: s
                .lights
                .iter()
                .map(|l| LightFile {
                    id: l.id,
                    position_m: [l.position.x, l.position.y],
                    beam_azimuth_deg: l.beam_azimuth.to_degrees(),
                    power_w: l.tx.power,
                    half_power_semiangle_deg: l.tx.half_power_semiangle.to_degrees(),
                    pipeline: (l.pipeline_name != default_pipeline).then(|| l.pipeline_name.clone()),
                })
                .collect(),
            vehicles: s
                .vehicles
                .iter()
                .map(|v| {
                    let rx = ReceiverFile::from(&v.rx);
                    VehicleFile {
                        id: v.id,
                        position_m: [v.position.x, v.position.y],
                        heading_deg: v.heading.to_degrees(),
                        speed_mps: v.speed,
                        receiver: (rx != receiver).then_some(rx),
                    }
                })
                .collect(),
            sources: s
                .sources
                .iter()
                .map(|m| SourceFile {
                    id: m.id,
                    label: m.label.to_string(),
                    payload: m.payload_template.clone(),
                    kind: match m.kind {
                        SourceKind::Periodic { interval, offset } => SourceKindFile::Periodic {
                            interval_s: interval,
                            offset_s: offset,
                        },
                        SourceKind::Triggered { rate } => SourceKindFile::Triggered { rate_per_s: rate },
                    },
                })
                .collect(),
        }
    }
}

fn build_pipeline(p: &PipelineFile, phy: &PhyConfig) -> std::result::Result<PipelineConfig, Vec<String>> {
    let mut bad = Vec::new();
    let mut segments = Vec::new();
    for s in &p.segments {
        let model = match &s.model {
            SegmentModelFile::Stochastic {
                distribution,
                truncation_ms,
            } => match distribution.to_spec() {
                Ok(spec) => SegmentModel::Stochastic {
                    spec,
                    truncation: (truncation_ms[0] / 1e3, truncation_ms[1] / 1e3),
                },
                Err(e) => {
                    bad.push(format!("segment '{}': {e}", s.name));
                    continue;
                }
            },
            SegmentModelFile::Deterministic { value_ms } => SegmentModel::Deterministic { value: value_ms / 1e3 },
            SegmentModelFile::Airtime {
                frame_bits,
                decode_delay_ms,
            } => {
                let bits = match frame_bits {
                    FrameBitsFile::Fixed(n) => FrameBits::Fixed(*n),
                    FrameBitsFile::Keyword(k) if k == "payload" => FrameBits::FromFrame,
                    FrameBitsFile::Keyword(k) => {
                        bad.push(format!(
                            "segment '{}': frame_bits must be an integer or \"payload\", got \"{k}\"",
                            s.name
                        ));
                        continue;
                    }
                };
                SegmentModel::Airtime {
                    phy: *phy,
                    bits,
                    decode_delay: decode_delay_ms / 1e3,
                }
            }
        };
        segments.push(Segment {
            name: s.name.clone(),
            model,
            loss_probability: s.loss_probability,
        });
    }
    match PipelineConfig::new(segments) {
        Ok(cfg) if bad.is_empty() => Ok(cfg),
        Ok(_) => Err(bad),
        Err(Error::Validation(v)) => {
            bad.extend(v);
            Err(bad)
        }
        Err(e) => {
            bad.push(e.to_string());
            Err(bad)
        }
    }
}

fn pipeline_to_file(p: &PipelineConfig) -> PipelineFile {
    PipelineFile {
        segments: p
            .segments()
            .iter()
            .map(|s| SegmentFile {
                name: s.name.clone(),
                loss_probability: s.loss_probability,
                model: match &s.model {
                    SegmentModel::Stochastic {
                        spec,
                        truncation: (lo, hi),
                    } => SegmentModelFile::Stochastic {
                        distribution: DistributionFile::from_spec(spec),
                        truncation_ms: [lo * 1e3, hi * 1e3],
                    },
                    SegmentModel::Deterministic { value } => SegmentModelFile::Deterministic { value_ms: value * 1e3 },
                    SegmentModel::Airtime { bits, decode_delay, .. } => SegmentModelFile::Airtime {
                        frame_bits: match bits {
                            FrameBits::Fixed(n) => FrameBitsFile::Fixed(*n),
                            FrameBits::FromFrame => FrameBitsFile::Keyword("payload".into()),
                        },
                        decode_delay_ms: decode_delay * 1e3,
                    },
                },
            })
            .collect(),
    }
}

/// Load a scenario from a file path, or by bundled name if no such file
/// exists.
pub fn load_scenario(path_or_name: &str) -> Result<Scenario> {
    load_scenario_file(path_or_name)?.build()
}

pub fn load_scenario_file(path_or_name: &str) -> Result<ScenarioFile> {
    let path = Path::new(path_or_name);
    if path.exists() {
        ScenarioFile::from_toml(&std::fs::read_to_string(path)?)
    } else if let Some(text) = bundled(path_or_name) {
        ScenarioFile::from_toml(text)
    } else {
        Err(Error::Argument(format!(
            "no scenario file '{path_or_name}' (bundled: {})",
            BUNDLED.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        )))
    }
}
