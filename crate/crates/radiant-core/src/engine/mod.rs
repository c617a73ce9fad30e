//! The detection runtime: ingestion, merging, pattern matching, sequencing,
//! and export of detected activities.

mod condition;
mod detector;
mod event;
mod merge;
mod mqtt;
mod run;
mod xes;

pub use condition::{eval_condition, SensorTrack};
pub use detector::{ActivityDetection, Detector, PatternEvent};
pub use event::{ingest_file, Decoder, SensorEvent};
pub use merge::{enforce_order, merge_streams, OrderPolicy};
pub use mqtt::{run_live, LiveOptions};
pub use run::{load_inputs, replay, run_replay, EventHooks, ReplayOptions, RunSummary};
pub use xes::export_xes;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{location}: {message}")]
    Timestamp { location: String, message: String },
    #[error("station {station}: event ts {ts} out of order (previous {previous})")]
    OutOfOrder { station: String, ts: i64, previous: i64 },
    #[error("mqtt: {0}")]
    Mqtt(String),
    #[error("sink write failed: {message}")]
    Sink { message: String },
    #[error("xml: {0}")]
    Xml(#[from] quick_xml::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
