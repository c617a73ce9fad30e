//! Detection-quality metrics: duration-weighted frame scores with error
//! sub-categories, event analysis, cross-correlation, and sequence distance,
//! aggregated micro or macro across activities.

mod editdist;
mod events;
mod intervals;
mod report;
mod scores;
mod segments;
mod xcorr;

pub use editdist::{normalized_distance, osa_distance};
pub use events::{event_analysis, DetEventCounts, EventCounts, GtEventCounts};
pub use intervals::{timeline_bounds, Interval, IntervalLog};
pub use report::{
    evaluate, to_csv, ActivityMetrics, AggregateMetrics, AggregateMode, EvalOptions,
    MetricsReport, Timeline,
};
pub use scores::{EventScores, TwoSetScores};
pub use segments::{segment_and_count, FnSplit, FpSplit, FrameCounts};
pub use xcorr::{cross_correlation, rasterize};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("activity {activity:?}: interval with ts_start {start} not before ts_end {end}")]
    EmptyInterval {
        activity: String,
        start: i64,
        end: i64,
    },
    #[error(
        "activity {activity:?}: overlapping intervals [{}, {}) and [{}, {})",
        first.0, first.1, second.0, second.1
    )]
    Overlap {
        activity: String,
        first: (i64, i64),
        second: (i64, i64),
    },
}
