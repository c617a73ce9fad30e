//! Core library of the Radiant activity-detection toolchain.
//!
//! The pipeline has four stages, each with its own module:
//!
//! * [`config`] — parse and resolve the IoT system configuration (stations,
//!   sensors, presets, discretizations, stream sources).
//! * [`lang`] — lex, parse, and validate Radiant programs into an AST.
//! * [`compile`] — lower a validated program into self-contained detector
//!   specifications, one per activity, and optionally emit reference query
//!   text in a streaming-SQL dialect.
//! * [`engine`] — replay or live-ingest sensor event streams, evaluate the
//!   compiled patterns, and emit activity detections, with optional XES
//!   export.
//! * [`eval`] — score a detection log against a ground-truth log with
//!   frame-based and event-based metrics.

pub mod compile;
pub mod config;
pub mod engine;
pub mod eval;
pub mod lang;
pub mod time;

pub use compile::{compile, emit_query_text, DetectorSpec};
pub use config::{parse_iot_config, parse_iot_config_with_env, IoTSystem};
pub use engine::{ActivityDetection, PatternEvent, SensorEvent};
pub use eval::{evaluate, EvalOptions, IntervalLog, MetricsReport};
pub use lang::{parse_radiant, pretty_print, validate, Diagnostic, ProcessDecl, Severity};
