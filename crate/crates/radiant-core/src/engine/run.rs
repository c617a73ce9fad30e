//! Replay orchestration: file ingestion, merging, detector fan-out.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::Serialize;

use crate::compile::DetectorSpec;
use crate::config::IoTSystem;

use super::detector::{ActivityDetection, Detector, PatternEvent};
use super::event::{ingest_file, SensorEvent};
use super::merge::{enforce_order, merge_streams, OrderPolicy};
use super::EngineError;

#[derive(Debug, Clone, Default)]
pub struct ReplayOptions {
    pub policy: OrderPolicy,
    /// Pace the replay by inter-event gaps divided by this factor;
    /// `None` replays as fast as possible.
    pub speed: Option<f64>,
    pub max_events: Option<u64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunSummary {
    pub mode: String,
    pub events: u64,
    pub detections: u64,
    pub per_activity: BTreeMap<String, u64>,
    pub skipped_payloads: u64,
    pub dropped_out_of_order: u64,
    pub warnings: Vec<String>,
}

impl RunSummary {
    pub fn new(mode: &str) -> Self {
        RunSummary {
            mode: mode.to_string(),
            events: 0,
            detections: 0,
            per_activity: BTreeMap::new(),
            skipped_payloads: 0,
            dropped_out_of_order: 0,
            warnings: Vec::new(),
        }
    }

    pub(crate) fn count(&mut self, d: &ActivityDetection) {
        self.detections += 1;
        *self.per_activity.entry(d.activity.clone()).or_insert(0) += 1;
    }
}

/// Receives every matched pattern stage, keyed by activity name.
pub type PatternSink<'a> = &'a mut dyn FnMut(&str, &PatternEvent) -> io::Result<()>;

/// Sinks invoked as the run progresses; failures abort the run.
pub struct EventHooks<'a> {
    pub on_pattern: Option<PatternSink<'a>>,
    pub on_detection: &'a mut dyn FnMut(&ActivityDetection) -> io::Result<()>,
}

impl EventHooks<'_> {
    pub(crate) fn pattern(&mut self, activity: &str, pe: &PatternEvent) -> Result<(), EngineError> {
        if let Some(f) = self.on_pattern.as_mut() {
            f(activity, pe).map_err(sink_error)?;
        }
        Ok(())
    }

    pub(crate) fn detection(&mut self, d: &ActivityDetection) -> Result<(), EngineError> {
        (self.on_detection)(d).map_err(sink_error)
    }
}

fn sink_error(e: io::Error) -> EngineError {
    EngineError::Sink {
        message: e.to_string(),
    }
}

/// Loads per-station trace files and merges them into one timeline.
/// Each `(station, path)` pair is one individually ordered stream.
pub fn load_inputs(
    system: &IoTSystem,
    inputs: &[(String, PathBuf)],
    policy: OrderPolicy,
) -> Result<(Vec<SensorEvent>, RunSummary), EngineError> {
    let mut summary = RunSummary::new("replay");
    let mut streams = Vec::new();
    for (station_id, path) in inputs {
        let station = system.station(station_id).ok_or_else(|| EngineError::Input {
            path: path.display().to_string(),
            message: format!("unknown station {station_id:?}"),
        })?;
        let source = system
            .source_of_station(station_id)
            .ok_or_else(|| EngineError::Input {
                path: path.display().to_string(),
                message: format!("station {station_id:?} has no configured source"),
            })?;
        let (events, warnings, skipped) = ingest_file(Path::new(path), source, vec![station])?;
        summary.skipped_payloads += skipped;
        summary.warnings.extend(warnings);
        let (ordered, dropped) = enforce_order(events, policy)?;
        if dropped > 0 {
            summary.warnings.push(format!(
                "station {station_id}: dropped {dropped} out-of-order events from {}",
                path.display()
            ));
        }
        summary.dropped_out_of_order += dropped;
        streams.push(ordered);
    }
    Ok((merge_streams(streams), summary))
}

/// Replays a merged timeline through the detectors.
pub fn replay(
    detectors: &mut [Detector],
    events: &[SensorEvent],
    opts: &ReplayOptions,
    hooks: &mut EventHooks,
    summary: &mut RunSummary,
) -> Result<Vec<ActivityDetection>, EngineError> {
    let mut detections = Vec::new();
    let mut prev_ts: Option<i64> = None;
    for event in events {
        if let Some(max) = opts.max_events {
            if summary.events >= max {
                break;
            }
        }
        if let (Some(speed), Some(prev)) = (opts.speed, prev_ts) {
            if speed > 0.0 && event.ts > prev {
                let gap = (event.ts - prev) as f64 / speed;
                thread::sleep(Duration::from_millis(gap as u64));
            }
        }
        prev_ts = Some(event.ts);
        summary.events += 1;
        for detector in detectors.iter_mut() {
            for pe in detector.step(event) {
                hooks.pattern(&detector.spec.activity, &pe)?;
                if let Some(d) = detector.advance(&pe) {
                    hooks.detection(&d)?;
                    summary.count(&d);
                    detections.push(d);
                }
            }
        }
    }
    Ok(detections)
}

/// File replay end to end: ingest, merge, detect.
pub fn run_replay(
    system: &IoTSystem,
    specs: &[DetectorSpec],
    inputs: &[(String, PathBuf)],
    opts: &ReplayOptions,
    hooks: &mut EventHooks,
) -> Result<(RunSummary, Vec<ActivityDetection>), EngineError> {
    let (events, mut summary) = load_inputs(system, inputs, opts.policy)?;
    let mut detectors: Vec<Detector> = specs.iter().cloned().map(Detector::new).collect();
    let detections = replay(&mut detectors, &events, opts, hooks, &mut summary)?;
    Ok((summary, detections))
}
