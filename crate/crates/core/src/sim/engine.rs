use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::scene::{geometry, MessageSource, Scenario, SourceKind, TrafficLight, Vehicle};
use crate::channel::{frame_error_rate, los_channel_gain, ook_ber, snr};
use crate::error::Result;
use crate::phy::build_frame;
use crate::pipeline::end_to_end;

/// Link state at the moment a frame reaches the vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub distance: f64,
    pub gain: f64,
    pub snr: f64,
    pub ber: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// No light had a positive-gain link at emission time.
    NoCoverage,
    /// A pipeline segment lost the message.
    SegmentLoss,
    /// The frame failed its error check at the receiver.
    FrameError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub msg_id: u64,
    pub source_id: u32,
    pub source_label: String,
    /// Seconds since simulation start.
    pub emit_time: f64,
    pub light_id: Option<u32>,
    pub vehicle_id: u32,
    /// Seconds per segment, in the light's pipeline order.
    pub per_segment: Vec<(String, f64)>,
    pub total: Option<f64>,
    pub delivered: bool,
    pub link: Option<LinkMetrics>,
    pub drop_reason: Option<DropReason>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub records: Vec<TraceRecord>,
    /// Column order for per-segment latencies.
    pub segment_names: Vec<String>,
    pub emitted: usize,
    pub delivered: usize,
    pub dropped: usize,
}

/// Best light for `vehicle` at time `t`: highest LOS gain among positive
/// links, lowest id on ties.
pub fn assign<'a>(vehicle: &Vehicle, lights: &'a [TrafficLight], t: f64) -> Option<&'a TrafficLight> {
    let pos = vehicle.position_at(t);
    let mut best: Option<(&TrafficLight, f64)> = None;
    for light in lights {
        let h = los_channel_gain(&geometry(light, vehicle, pos), &light.tx, &vehicle.rx);
        if h <= 0.0 {
            continue;
        }
        best = match best {
            Some((b, bh)) if bh > h || (bh == h && b.id < light.id) => Some((b, bh)),
            _ => Some((light, h)),
        };
    }
    best.map(|(l, _)| l)
}

/// Random stream of one (source, vehicle, message) delivery.
fn record_rng(seed: u64, source: u32, vehicle: u32, seq: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&1u64.to_le_bytes());
    key[16..24].copy_from_slice(&(((source as u64) << 32) | vehicle as u64).to_le_bytes());
    key[24..].copy_from_slice(&seq.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Random stream driving one source's emission times.
fn source_rng(seed: u64, source: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&2u64.to_le_bytes());
    key[16..24].copy_from_slice(&(source as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone, Copy)]
struct Emission {
    time: f64,
    source_id: u32,
    seq: u64,
    /// Index into the scenario's source list.
    source: usize,
}

impl PartialEq for Emission {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Emission {}

impl PartialOrd for Emission {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Emission {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.source_id.cmp(&other.source_id))
            .then(self.seq.cmp(&other.seq))
    }
}

struct SourceClock {
    rng: ChaCha8Rng,
    exp: Option<Exp<f64>>,
}

impl SourceClock {
    fn new(seed: u64, src: &MessageSource) -> Self {
        let exp = match src.kind {
            SourceKind::Triggered { rate } => Some(Exp::new(rate).expect("validated rate")),
            SourceKind::Periodic { .. } => None,
        };
        Self {
            rng: source_rng(seed, src.id),
            exp,
        }
    }

    /// Emission time of message `seq`, given the previous one.
    fn time_of(&mut self, src: &MessageSource, seq: u64, prev: f64) -> f64 {
        match src.kind {
            SourceKind::Periodic { interval, offset } => offset + seq as f64 * interval,
            SourceKind::Triggered { .. } => prev + self.exp.as_ref().expect("triggered").sample(&mut self.rng),
        }
    }
}

/// Run the scene for `duration` seconds; emissions at `t < duration` are
/// delivered to every vehicle.
pub fn run(scenario: &Scenario, seed: u64, duration: f64) -> Result<SimOutput> {
    scenario.validate()?;

    let mut vehicles: Vec<&Vehicle> = scenario.vehicles.iter().collect();
    vehicles.sort_by_key(|v| v.id);

    let mut clocks: Vec<SourceClock> = scenario.sources.iter().map(|s| SourceClock::new(seed, s)).collect();
    let mut queue = BinaryHeap::new();
    for (i, src) in scenario.sources.iter().enumerate() {
        let t = clocks[i].time_of(src, 0, 0.0);
        if t < duration {
            queue.push(Reverse(Emission {
                time: t,
                source_id: src.id,
                seq: 0,
                source: i,
            }));
        }
    }

    let mut records = Vec::new();
    let mut msg_id = 0u64;
    while let Some(Reverse(ev)) = queue.pop() {
        let src = &scenario.sources[ev.source];
        let payload = src.payload(ev.seq);
        for vehicle in &vehicles {
            records.push(deliver(scenario, seed, src, ev, msg_id, &payload, vehicle)?);
        }
        msg_id += 1;

        let next = clocks[ev.source].time_of(src, ev.seq + 1, ev.time);
        if next < duration {
            queue.push(Reverse(Emission {
                time: next,
                seq: ev.seq + 1,
                ..ev
            }));
        }
    }

    let delivered = records.iter().filter(|r| r.delivered).count();
    Ok(SimOutput {
        segment_names: scenario.segment_names(),
        emitted: records.len(),
        delivered,
        dropped: records.len() - delivered,
        records,
    })
}

fn deliver(
    scenario: &Scenario,
    seed: u64,
    src: &MessageSource,
    ev: Emission,
    msg_id: u64,
    payload: &[u8],
    vehicle: &Vehicle,
) -> Result<TraceRecord> {
    let mut rec = TraceRecord {
        msg_id,
        source_id: src.id,
        source_label: src.label.to_string(),
        emit_time: ev.time,
        light_id: None,
        vehicle_id: vehicle.id,
        per_segment: Vec::new(),
        total: None,
        delivered: false,
        link: None,
        drop_reason: None,
    };
    let Some(light) = assign(vehicle, &scenario.lights, ev.time) else {
        rec.drop_reason = Some(DropReason::NoCoverage);
        return Ok(rec);
    };
    rec.light_id = Some(light.id);

    let mut rng = record_rng(seed, src.id, vehicle.id, ev.seq);
    let frame = build_frame(payload, &scenario.phy)?;
    let lat = end_to_end(&light.pipeline, &mut rng, Some(&frame))?;
    rec.per_segment = lat.per_segment;
    rec.total = Some(lat.total);

    let arrival = ev.time + lat.total;
    let geom = geometry(light, vehicle, vehicle.position_at(arrival));
    let gain = los_channel_gain(&geom, &light.tx, &vehicle.rx);
    let gamma = snr(gain, &light.tx, &vehicle.rx, &scenario.noise, scenario.snr_form);
    let ber = ook_ber(gamma)?;
    rec.link = Some(LinkMetrics {
        distance: geom.distance,
        gain,
        snr: gamma,
        ber,
    });

    let per = frame_error_rate(ber, frame.bit_len(&scenario.phy));
    // always draw, so the stream does not depend on the outcome
    let u: f64 = rng.random();
    if lat.lost_in.is_some() {
        rec.drop_reason = Some(DropReason::SegmentLoss);
    } else if u < per {
        rec.drop_reason = Some(DropReason::FrameError);
    } else {
        rec.delivered = true;
    }
    Ok(rec)
}
