//! Condition evaluation over per-sensor runtime state.
//!
//! Change conditions fire only on an event carrying a reading of their own
//! sensor; instantaneous conditions fall back to the sensor's last-known
//! value, so they can hold across stations.

use std::collections::VecDeque;

use crate::compile::{CompiledCondition, Predicate};

/// What the engine remembers about one sensor. Updated after each event is
/// evaluated, so during evaluation it describes strictly earlier readings.
#[derive(Debug, Clone, Default)]
pub struct SensorTrack {
    /// Value of the most recent reading.
    pub last: Option<f64>,
    /// When the value last differed from its predecessor.
    pub last_change_ts: Option<i64>,
    /// Recent readings, oldest first, kept only for windowed trend
    /// conditions and pruned to their largest window.
    pub history: VecDeque<(i64, f64)>,
}

impl SensorTrack {
    /// Records a reading. `horizon_ms` is the largest trend window any
    /// condition needs on this sensor; `None` disables history entirely.
    pub fn observe(&mut self, ts: i64, value: f64, horizon_ms: Option<u64>) {
        if let Some(prev) = self.last {
            if prev != value {
                self.last_change_ts = Some(ts);
            }
        }
        self.last = Some(value);
        if let Some(h) = horizon_ms {
            self.history.push_back((ts, value));
            let cutoff = ts - h as i64;
            while self.history.front().is_some_and(|(t, _)| *t < cutoff) {
                self.history.pop_front();
            }
        }
    }
}

/// Evaluates one condition at an event with timestamp `now`.
///
/// `reading` is the conditioned sensor's value in this event, if the event
/// carries one. `track` is the sensor's state before this event. `arming` is
/// the ts of the last reading that satisfied a windowed changes_from's
/// `from` value.
pub fn eval_condition(
    cond: &CompiledCondition,
    reading: Option<f64>,
    track: &SensorTrack,
    arming: Option<i64>,
    now: i64,
) -> bool {
    match &cond.predicate {
        Predicate::IsEqual { value } => snapshot(reading, track).is_some_and(|v| value.satisfies(v)),
        Predicate::InRange { lo, hi } => {
            snapshot(reading, track).is_some_and(|v| *lo <= v && v <= *hi)
        }
        Predicate::IsLower { value } => snapshot(reading, track).is_some_and(|v| v < *value),
        Predicate::IsLowerOrEqual { value } => {
            snapshot(reading, track).is_some_and(|v| v <= *value)
        }
        Predicate::IsHigher { value } => snapshot(reading, track).is_some_and(|v| v > *value),
        Predicate::IsHigherOrEqual { value } => {
            snapshot(reading, track).is_some_and(|v| v >= *value)
        }

        Predicate::ChangesFrom { from, to } => {
            let Some(cur) = reading else { return false };
            match cond.window_ms {
                None => to.satisfies(cur) && track.last.is_some_and(|prev| from.satisfies(prev)),
                // The from-value must have been seen at a strictly earlier
                // reading no older than the window.
                Some(w) => {
                    to.satisfies(cur)
                        && arming.is_some_and(|t| t < now && t >= now - w as i64)
                }
            }
        }
        Predicate::IsChanging => {
            let Some(cur) = reading else { return false };
            let changed_now = track.last.is_some_and(|prev| prev != cur);
            match cond.window_ms {
                None => changed_now,
                Some(w) => {
                    changed_now || track.last_change_ts.is_some_and(|t| t >= now - w as i64)
                }
            }
        }
        Predicate::IsIncreasing => trend(cond, reading, track, now, |cur, base| cur > base),
        Predicate::IsDecreasing => trend(cond, reading, track, now, |cur, base| cur < base),
    }
}

/// The value an instantaneous condition sees: this event's reading when the
/// event carries one, the last-known value otherwise.
fn snapshot(reading: Option<f64>, track: &SensorTrack) -> Option<f64> {
    reading.or(track.last)
}

/// Trend conditions compare the current reading against the previous one,
/// or, windowed, against the earliest prior reading inside the window.
fn trend(
    cond: &CompiledCondition,
    reading: Option<f64>,
    track: &SensorTrack,
    now: i64,
    cmp: impl Fn(f64, f64) -> bool,
) -> bool {
    let Some(cur) = reading else { return false };
    match cond.window_ms {
        None => track.last.is_some_and(|prev| cmp(cur, prev)),
        Some(w) => {
            let cutoff = now - w as i64;
            track
                .history
                .iter()
                .find(|(t, _)| *t >= cutoff)
                .map(|(_, base)| cmp(cur, *base))
                .unwrap_or(false)
        }
    }
}
