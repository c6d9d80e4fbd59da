use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::channel::{LinkGeometry, NoiseModel, ReceiverOptics, SnrForm, TransmitterParams};
use crate::error::{Error, Result};
use crate::phy::PhyConfig;
use crate::pipeline::PipelineConfig;

/// Metres in the ground plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficLight {
    pub id: u32,
    pub position: Point,
    pub tx: TransmitterParams,
    /// Beam axis azimuth, radians from +x.
    pub beam_azimuth: f64,
    pub pipeline: Arc<PipelineConfig>,
    /// Name the pipeline was registered under.
    pub pipeline_name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: u32,
    pub position: Point,
    /// Direction of travel (and of the receiver normal), radians from +x.
    pub heading: f64,
    /// m/s
    pub speed: f64,
    pub rx: ReceiverOptics,
}

impl Vehicle {
    /// Straight-line, constant-speed position at time `t`.
    pub fn position_at(&self, t: f64) -> Point {
        Point::new(
            self.position.x + self.speed * t * self.heading.cos(),
            self.position.y + self.speed * t * self.heading.sin(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SensorLabel {
    Flame,
    Accelerometer,
    Environment,
}

impl SensorLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SensorLabel::Flame => "flame",
            SensorLabel::Accelerometer => "accelerometer",
            SensorLabel::Environment => "environment",
        }
    }
}

impl fmt::Display for SensorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SensorLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flame" => Ok(SensorLabel::Flame),
            "accelerometer" => Ok(SensorLabel::Accelerometer),
            "environment" => Ok(SensorLabel::Environment),
            other => Err(Error::Argument(format!("unknown sensor label '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// Fixed emission period in seconds, first emission at `offset`.
    Periodic { interval: f64, offset: f64 },
    /// Memoryless alarms at `rate` events per second.
    Triggered { rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MessageSource {
    pub id: u32,
    pub label: SensorLabel,
    pub kind: SourceKind,
    /// `{seq}` is replaced with the per-source message counter.
    pub payload_template: String,
}

impl MessageSource {
    pub fn payload(&self, seq: u64) -> Vec<u8> {
        self.payload_template.replace("{seq}", &seq.to_string()).into_bytes()
    }
}

/// A validated simulation scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub lights: Vec<TrafficLight>,
    pub vehicles: Vec<Vehicle>,
    pub sources: Vec<MessageSource>,
    pub pipelines: BTreeMap<String, Arc<PipelineConfig>>,
    pub phy: PhyConfig,
    pub noise: NoiseModel,
    pub snr_form: SnrForm,
    pub seed: u64,
    /// Seconds.
    pub duration: f64,
}

impl Scenario {
    /// Checks every cross-object invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let mut light_ids: HashMap<u32, usize> = HashMap::new();
        for (i, l) in self.lights.iter().enumerate() {
            if let Some(j) = light_ids.insert(l.id, i) {
                bad.push(format!("duplicate light id {}: lights[{j}] and lights[{i}]", l.id));
            }
            if let Err(Error::Validation(v)) = l.tx.validate() {
                bad.extend(v.into_iter().map(|m| format!("lights[{i}] (id {}): {m}", l.id)));
            }
            if !(l.position.x.is_finite() && l.position.y.is_finite() && l.beam_azimuth.is_finite()) {
                bad.push(format!("lights[{i}] (id {}): position and beam azimuth must be finite", l.id));
            }
            if !self.pipelines.contains_key(&l.pipeline_name) {
                bad.push(format!("lights[{i}] (id {}): unknown pipeline '{}'", l.id, l.pipeline_name));
            }
        }
        let mut vehicle_ids: HashMap<u32, usize> = HashMap::new();
        for (i, v) in self.vehicles.iter().enumerate() {
            if let Some(j) = vehicle_ids.insert(v.id, i) {
                bad.push(format!("duplicate vehicle id {}: vehicles[{j}] and vehicles[{i}]", v.id));
            }
            if !(v.speed.is_finite() && v.speed >= 0.0) {
                bad.push(format!("vehicles[{i}] (id {}): speed must be >= 0, got {}", v.id, v.speed));
            }
            if !(v.position.x.is_finite() && v.position.y.is_finite() && v.heading.is_finite()) {
                bad.push(format!("vehicles[{i}] (id {}): position and heading must be finite", v.id));
            }
            if let Err(Error::Validation(m)) = v.rx.validate() {
                bad.extend(m.into_iter().map(|m| format!("vehicles[{i}] (id {}): {m}", v.id)));
            }
        }
        let mut source_ids: HashMap<u32, usize> = HashMap::new();
        for (i, s) in self.sources.iter().enumerate() {
            if let Some(j) = source_ids.insert(s.id, i) {
                bad.push(format!("duplicate source id {}: sources[{j}] and sources[{i}]", s.id));
            }
            match s.kind {
                SourceKind::Periodic { interval, offset } => {
                    if !(interval.is_finite() && interval > 0.0) {
                        bad.push(format!("sources[{i}] (id {}): interval must be > 0, got {interval}", s.id));
                    }
                    if !(offset.is_finite() && offset >= 0.0) {
                        bad.push(format!("sources[{i}] (id {}): offset must be >= 0, got {offset}", s.id));
                    }
                }
                SourceKind::Triggered { rate } => {
                    if !(rate.is_finite() && rate > 0.0) {
                        bad.push(format!("sources[{i}] (id {}): rate must be > 0, got {rate}", s.id));
                    }
                }
            }
            let len = s.payload(0).len();
            if !(1..=crate::phy::MAX_PAYLOAD).contains(&len) {
                bad.push(format!("sources[{i}] (id {}): payload must be 1..=255 bytes, got {len}", s.id));
            }
        }
        if let Err(Error::Validation(v)) = self.phy.validate() {
            bad.extend(v);
        }
        if let Err(Error::Validation(v)) = self.noise.validate() {
            bad.extend(v);
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            bad.push(format!("duration must be >= 0 s, got {}", self.duration));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Segment names across all pipelines in use, in light-id order.
    pub fn segment_names(&self) -> Vec<String> {
        let mut lights: Vec<&TrafficLight> = self.lights.iter().collect();
        lights.sort_by_key(|l| l.id);
        let mut names: Vec<String> = Vec::new();
        for l in lights {
            for s in l.pipeline.segments() {
                if !names.contains(&s.name) {
                    names.push(s.name.clone());
                }
            }
        }
        names
    }
}

/// Link geometry from a light to a vehicle at `vehicle_pos`.
///
/// Angles are returned unclamped in `[0, π]`; anything past 90° is outside
/// the emitter's half-space or behind the detector.
pub fn geometry(light: &TrafficLight, vehicle: &Vehicle, vehicle_pos: Point) -> LinkGeometry {
    let (dx, dy) = (vehicle_pos.x - light.position.x, vehicle_pos.y - light.position.y);
    let d = dx.hypot(dy);
    if d == 0.0 {
        return LinkGeometry {
            distance: 0.0,
            irradiance_angle: 0.0,
            incidence_angle: 0.0,
        };
    }
    let (bx, by) = (light.beam_azimuth.cos(), light.beam_azimuth.sin());
    let (hx, hy) = (vehicle.heading.cos(), vehicle.heading.sin());
    let cos_phi = ((bx * dx + by * dy) / d).clamp(-1.0, 1.0);
    let cos_psi = (-(hx * dx + hy * dy) / d).clamp(-1.0, 1.0);
    LinkGeometry {
        distance: d,
        irradiance_angle: cos_phi.acos(),
        incidence_angle: cos_psi.acos(),
    }
}
