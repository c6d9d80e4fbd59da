//! Discrete-event simulation of traffic lights broadcasting sensor messages
//! to passing vehicles.
//!
//! Emissions are processed in `(time, source id, sequence)` order. Each
//! emission is routed, per vehicle, through the pipeline of the light with
//! the strongest link at emission time; link metrics are evaluated at the
//! vehicle's position when the frame arrives. Every (source, vehicle,
//! message) delivery draws from its own random stream, so adding or removing
//! a light never perturbs vehicles served by the others.

mod engine;
mod scene;
mod summary;

pub use engine::{assign, run, DropReason, LinkMetrics, SimOutput, TraceRecord};
pub use scene::{geometry, MessageSource, Point, Scenario, SensorLabel, SourceKind, TrafficLight, Vehicle};
pub use summary::{summarize, LatencyStats, Summary};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{NoiseModel, ReceiverOptics, SnrForm, TransmitterParams};
    use crate::phy::PhyConfig;
    use crate::pipeline::{PipelineConfig, Segment, SegmentModel};
    use std::collections::BTreeMap;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn light(id: u32, x: f64) -> TrafficLight {
        TrafficLight {
            id,
            position: Point::new(x, 0.0),
            tx: TransmitterParams::default(),
            beam_azimuth: PI,
            pipeline: Arc::new(PipelineConfig::default_composed()),
            pipeline_name: "composed".into(),
        }
    }

    fn vehicle(id: u32, x: f64) -> Vehicle {
        Vehicle {
            id,
            position: Point::new(x, 0.0),
            heading: 0.0,
            speed: 0.0,
            rx: ReceiverOptics::default(),
        }
    }

    fn periodic(id: u32, interval: f64) -> MessageSource {
        MessageSource {
            id,
            label: SensorLabel::Environment,
            kind: SourceKind::Periodic { interval, offset: 0.0 },
            payload_template: "env {seq}".into(),
        }
    }

    fn scene(lights: Vec<TrafficLight>, vehicles: Vec<Vehicle>, sources: Vec<MessageSource>) -> Scenario {
        let mut pipelines = BTreeMap::new();
        pipelines.insert("composed".to_string(), Arc::new(PipelineConfig::default_composed()));
        Scenario {
            name: "test".into(),
            lights,
            vehicles,
            sources,
            pipelines,
            phy: PhyConfig::default(),
            noise: NoiseModel::default(),
            snr_form: SnrForm::Linear,
            seed: 1,
            duration: 10.0,
        }
    }

    #[test]
    fn assign_prefers_nearer_light() {
        // lights at x = -10 and x = 0 shine towards -x; vehicle at -20 faces +x
        let lights = vec![light(1, -10.0), light(2, 0.0)];
        let v = vehicle(7, -20.0);
        assert_eq!(assign(&v, &lights, 0.0).map(|l| l.id), Some(1));
        assert_eq!(assign(&v, &lights[1..], 0.0).map(|l| l.id), Some(2));
    }

    #[test]
    fn assign_none_behind_beams() {
        let lights = vec![light(1, 0.0)];
        let v = vehicle(1, 10.0);
        assert!(assign(&v, &lights, 0.0).is_none());
    }

    #[test]
    fn assign_ties_go_to_lowest_id() {
        let mut a = light(5, 0.0);
        let mut b = light(3, 0.0);
        a.position = Point::new(0.0, 1.0);
        b.position = Point::new(0.0, -1.0);
        a.beam_azimuth = PI;
        b.beam_azimuth = PI;
        let v = Vehicle {
            heading: 0.0,
            ..vehicle(1, -10.0)
        };
        assert_eq!(assign(&v, &[a, b], 0.0).map(|l| l.id), Some(3));
    }

    #[test]
    fn empty_fleet_gives_empty_trace() {
        let s = scene(vec![light(1, 0.0)], vec![], vec![periodic(1, 1.0)]);
        let out = run(&s, 1, 100.0).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.emitted, 0);
    }

    #[test]
    fn periodic_count_and_order() {
        let s = scene(
            vec![light(1, 0.0)],
            vec![vehicle(1, -10.0)],
            vec![periodic(1, 1.0), periodic(2, 0.5)],
        );
        let out = run(&s, 3, 20.0).unwrap();
        assert_eq!(out.records.len(), 20 + 40);
        assert!(out.records.windows(2).all(|w| w[0].emit_time <= w[1].emit_time));
        // same timestamp: lower source id first
        assert_eq!(out.records[0].source_id, 1);
        assert_eq!(out.records[1].source_id, 2);
        assert_eq!(out.emitted, out.delivered + out.dropped);
        assert!(out.records.iter().all(|r| r.delivered));
    }

    #[test]
    fn out_of_coverage_is_dropped() {
        let s = scene(vec![light(1, 0.0)], vec![vehicle(1, 10.0)], vec![periodic(1, 1.0)]);
        let out = run(&s, 3, 5.0).unwrap();
        assert_eq!(out.dropped, 5);
        assert!(out
            .records
            .iter()
            .all(|r| r.drop_reason == Some(DropReason::NoCoverage) && r.light_id.is_none()));
    }

    #[test]
    fn moving_vehicle_leaves_fov() {
        // driving away from the light: receiver faces away, so nothing arrives
        let mut v = vehicle(1, -10.0);
        v.heading = PI;
        v.speed = 10.0;
        let s = scene(vec![light(1, 0.0)], vec![v], vec![periodic(1, 1.0)]);
        let out = run(&s, 3, 3.0).unwrap();
        assert_eq!(out.delivered, 0);
    }

    #[test]
    fn triggered_source_is_seeded() {
        let alarm = MessageSource {
            id: 9,
            label: SensorLabel::Flame,
            kind: SourceKind::Triggered { rate: 2.0 },
            payload_template: "FIRE".into(),
        };
        let s = scene(vec![light(1, 0.0)], vec![vehicle(1, -10.0)], vec![alarm]);
        let a = run(&s, 11, 500.0).unwrap();
        let b = run(&s, 11, 500.0).unwrap();
        assert_eq!(a, b);
        let n = a.records.len() as f64;
        // Poisson(1000): 5 sigma
        assert!((n - 1000.0).abs() < 160.0, "{n}");
    }

    #[test]
    fn validation_reports_all_duplicates() {
        let s = scene(
            vec![light(1, 0.0), light(1, 5.0)],
            vec![vehicle(2, -10.0), vehicle(2, -12.0)],
            vec![periodic(1, 0.0)],
        );
        match s.validate() {
            Err(crate::Error::Validation(v)) => {
                assert_eq!(v.len(), 3, "{v:?}");
                assert!(v[0].contains("lights[0]") && v[0].contains("lights[1]"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn summary_of_constant_trace() {
        let recs: Vec<TraceRecord> = (0..5)
            .map(|i| TraceRecord {
                msg_id: i,
                source_id: 1,
                source_label: "environment".into(),
                emit_time: i as f64,
                light_id: Some(1),
                vehicle_id: 1,
                per_segment: vec![("g".into(), 5e-3)],
                total: Some(5e-3),
                delivered: true,
                link: None,
                drop_reason: None,
            })
            .collect();
        let s = summarize(&recs, &["g".into()], 1e-3).unwrap();
        let t = s.total.unwrap();
        assert!((t.min_ms - 5.0).abs() < 1e-12);
        assert_eq!(t.min_ms, t.max_ms);
        assert_eq!(t.min_ms, t.median_ms);
        assert_eq!(s.delivery_ratio, 1.0);
        assert!(summarize(&[], &[], 1e-3).is_err());
    }

    #[test]
    fn custom_pipeline_segments_show_up() {
        let p = Arc::new(PipelineConfig::new(vec![Segment::new("fixed", SegmentModel::Deterministic { value: 1e-3 })]).unwrap());
        let mut l = light(1, 0.0);
        l.pipeline = p.clone();
        l.pipeline_name = "fixed".into();
        let mut s = scene(vec![l], vec![vehicle(1, -5.0)], vec![periodic(1, 1.0)]);
        s.pipelines.insert("fixed".into(), p);
        let out = run(&s, 1, 3.0).unwrap();
        assert_eq!(out.segment_names, vec!["fixed".to_string()]);
        assert!(out.records.iter().all(|r| r.total == Some(1e-3)));
    }
}
