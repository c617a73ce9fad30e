//! The per-activity detector: pattern matching plus sequencing.
//!
//! `step` evaluates every pattern of the chain at one event and emits the
//! patterns that fire. `advance` drives the sequencing state machine: a
//! start pattern (re)anchors an in-flight match, intermediates must occur in
//! order, and the end pattern completes the detection.

use std::collections::HashMap;

use serde::Serialize;

use crate::compile::{DetectorSpec, PatternStage, Predicate};
use crate::time::format_ts;

use super::condition::{eval_condition, SensorTrack};
use super::event::SensorEvent;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternEvent {
    pub stage: PatternStage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    pub ts: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityDetection {
    pub process: String,
    pub activity: String,
    pub ts_start: i64,
    pub ts_end: i64,
}

impl ActivityDetection {
    /// The JSONL representation written to detection sinks.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            process: &'a str,
            activity: &'a str,
            ts_start: String,
            ts_end: String,
        }
        serde_json::to_string(&Line {
            process: &self.process,
            activity: &self.activity,
            ts_start: format_ts(self.ts_start),
            ts_end: format_ts(self.ts_end),
        })
        .expect("plain strings serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Idle,
    AwaitIntermediate(usize),
    AwaitEnd,
}

type SensorKey = (String, String);
type CondPath = (usize, usize, usize);

pub struct Detector {
    pub spec: DetectorSpec,
    n_intermediates: usize,
    tracks: HashMap<SensorKey, SensorTrack>,
    /// ts of the last reading satisfying each windowed changes_from's `from`.
    armings: HashMap<CondPath, i64>,
    /// Largest trend window per sensor; bounds history retention.
    horizons: HashMap<SensorKey, u64>,
    phase: Phase,
    pending_start: Option<i64>,
}

impl Detector {
    pub fn new(spec: DetectorSpec) -> Self {
        let mut horizons: HashMap<SensorKey, u64> = HashMap::new();
        for pattern in &spec.pattern_chain {
            for case in &pattern.cases {
                for cond in &case.conditions {
                    if let (
                        Predicate::IsIncreasing | Predicate::IsDecreasing,
                        Some(w),
                    ) = (&cond.predicate, cond.window_ms)
                    {
                        let key = (cond.station.clone(), cond.sensor.clone());
                        let h = horizons.entry(key).or_insert(0);
                        *h = (*h).max(w);
                    }
                }
            }
        }
        let n_intermediates = spec.intermediate_count();
        Detector {
            spec,
            n_intermediates,
            tracks: HashMap::new(),
            armings: HashMap::new(),
            horizons,
            phase: Phase::Idle,
            pending_start: None,
        }
    }

    /// Evaluates all patterns at one event, then folds the event's readings
    /// into the runtime state. Emitted pattern events are in chain order.
    pub fn step(&mut self, event: &SensorEvent) -> Vec<PatternEvent> {
        if !self.spec.subscribes_to(&event.station) {
            return Vec::new();
        }

        let empty = SensorTrack::default();
        let mut fired = Vec::new();
        for (pi, pattern) in self.spec.pattern_chain.iter().enumerate() {
            let satisfied = pattern.cases.iter().enumerate().any(|(ci, case)| {
                case.conditions.iter().enumerate().all(|(di, cond)| {
                    let reading = (cond.station == event.station)
                        .then(|| event.values.get(&cond.sensor).copied())
                        .flatten();
                    let track = self
                        .tracks
                        .get(&(cond.station.clone(), cond.sensor.clone()))
                        .unwrap_or(&empty);
                    let arming = self.armings.get(&(pi, ci, di)).copied();
                    eval_condition(cond, reading, track, arming, event.ts)
                })
            });
            if satisfied {
                fired.push(PatternEvent {
                    stage: pattern.kind,
                    index: pattern.index,
                    ts: event.ts,
                });
            }
        }

        self.absorb(event);
        fired
    }

    /// Updates sensor tracks and changes_from armings with this event.
    fn absorb(&mut self, event: &SensorEvent) {
        for (sensor, value) in &event.values {
            let key = (event.station.clone(), sensor.clone());
            let horizon = self.horizons.get(&key).copied();
            self.tracks
                .entry(key)
                .or_default()
                .observe(event.ts, *value, horizon);
        }
        for (pi, pattern) in self.spec.pattern_chain.iter().enumerate() {
            for (ci, case) in pattern.cases.iter().enumerate() {
                for (di, cond) in case.conditions.iter().enumerate() {
                    if cond.station != event.station || cond.window_ms.is_none() {
                        continue;
                    }
                    if let Predicate::ChangesFrom { from, .. } = &cond.predicate {
                        if let Some(v) = event.values.get(&cond.sensor) {
                            if from.satisfies(*v) {
                                self.armings.insert((pi, ci, di), event.ts);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Feeds one pattern event into the sequencing state machine.
    pub fn advance(&mut self, pe: &PatternEvent) -> Option<ActivityDetection> {
        match (pe.stage, self.phase) {
            (PatternStage::Start, _) => {
                self.pending_start = Some(pe.ts);
                self.phase = if self.n_intermediates == 0 {
                    Phase::AwaitEnd
                } else {
                    Phase::AwaitIntermediate(0)
                };
                None
            }
            (PatternStage::Intermediate, Phase::AwaitIntermediate(k))
                if pe.index == Some(k) =>
            {
                self.phase = if k + 1 == self.n_intermediates {
                    Phase::AwaitEnd
                } else {
                    Phase::AwaitIntermediate(k + 1)
                };
                None
            }
            (PatternStage::End, Phase::AwaitEnd) => {
                let ts_start = self.pending_start.take().expect("anchored by start");
                self.phase = Phase::Idle;
                Some(ActivityDetection {
                    process: self.spec.process.clone(),
                    activity: self.spec.activity.clone(),
                    ts_start,
                    ts_end: pe.ts,
                })
            }
            _ => None,
        }
    }

    /// Convenience wrapper: one event through matching and sequencing.
    pub fn feed(&mut self, event: &SensorEvent) -> (Vec<PatternEvent>, Vec<ActivityDetection>) {
        let fired = self.step(event);
        let detections = fired.iter().filter_map(|pe| self.advance(pe)).collect();
        (fired, detections)
    }
}
