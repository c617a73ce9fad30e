//! Interval logs: the common shape of detection output and ground truth.

use serde::Deserialize;

use crate::time::parse_ts;

use super::EvalError;

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub activity: String,
    pub start: i64,
    pub end: i64,
}

impl Interval {
    /// Positive-length intersection; touching endpoints do not overlap.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start.max(other.start) < self.end.min(other.end)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalLog {
    pub entries: Vec<Interval>,
}

impl IntervalLog {
    /// Parses line-delimited JSON `{activity, ts_start, ts_end}` entries.
    /// Extra fields (such as `process` in detection logs) are ignored.
    pub fn parse(text: &str) -> Result<IntervalLog, EvalError> {
        #[derive(Deserialize)]
        struct Line {
            activity: String,
            ts_start: String,
            ts_end: String,
        }

        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let lineno = i + 1;
            let parsed: Line = serde_json::from_str(line).map_err(|e| EvalError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let start = parse_ts(&parsed.ts_start).map_err(|e| EvalError::Parse {
                line: lineno,
                message: format!("ts_start: {e}"),
            })?;
            let end = parse_ts(&parsed.ts_end).map_err(|e| EvalError::Parse {
                line: lineno,
                message: format!("ts_end: {e}"),
            })?;
            entries.push(Interval {
                activity: parsed.activity,
                start,
                end,
            });
        }
        IntervalLog::new(entries)
    }

    /// Validates ordering invariants: every interval has positive length and
    /// same-activity intervals do not overlap.
    pub fn new(entries: Vec<Interval>) -> Result<IntervalLog, EvalError> {
        for iv in &entries {
            if iv.start >= iv.end {
                return Err(EvalError::EmptyInterval {
                    activity: iv.activity.clone(),
                    start: iv.start,
                    end: iv.end,
                });
            }
        }
        let mut sorted: Vec<&Interval> = entries.iter().collect();
        sorted.sort_by_key(|iv| (iv.activity.clone(), iv.start, iv.end));
        for pair in sorted.windows(2) {
            if pair[0].activity == pair[1].activity && pair[0].overlaps(pair[1]) {
                return Err(EvalError::Overlap {
                    activity: pair[0].activity.clone(),
                    first: (pair[0].start, pair[0].end),
                    second: (pair[1].start, pair[1].end),
                });
            }
        }
        Ok(IntervalLog { entries })
    }

    /// Min start and max end across all entries; `None` when empty.
    pub fn extent(&self) -> Option<(i64, i64)> {
        let start = self.entries.iter().map(|iv| iv.start).min()?;
        let end = self.entries.iter().map(|iv| iv.end).max()?;
        Some((start, end))
    }

    /// Entries of one activity, sorted by start.
    pub fn of_activity(&self, activity: &str) -> Vec<&Interval> {
        let mut out: Vec<&Interval> = self
            .entries
            .iter()
            .filter(|iv| iv.activity == activity)
            .collect();
        out.sort_by_key(|iv| iv.start);
        out
    }

    /// Activity names present, sorted and deduplicated.
    pub fn activities(&self) -> Vec<String> {
        let mut names: Vec<String> = self.entries.iter().map(|iv| iv.activity.clone()).collect();
        names.sort();
        names.dedup();
        names
    }
}

/// The shared timeline for scoring: the union of both logs' extents.
pub fn timeline_bounds(gt: &IntervalLog, det: &IntervalLog) -> (i64, i64) {
    match (gt.extent(), det.extent()) {
        (Some((a0, a1)), Some((b0, b1))) => (a0.min(b0), a1.max(b1)),
        (Some(e), None) | (None, Some(e)) => e,
        (None, None) => (0, 0),
    }
}
