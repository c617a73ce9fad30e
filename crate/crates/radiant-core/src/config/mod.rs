//! IoT system configuration: parsing, preset resolution, label and
//! discretization lookups.

mod model;
mod parse;

pub use model::{
    Discretization, Discretized, FieldType, IoTSystem, Preset, SensorDecl, SensorKind, SinkDecl,
    SinkKind, SourceDecl, SourceKind, Station, ValueSpec,
};
pub use parse::{parse_iot_config, parse_iot_config_with_env, resolve};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration is not valid YAML: {0}")]
    Yaml(#[from] serde_yaml::Error),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("unknown label {label:?} for sensor {sensor}; valid labels: {}", valid.join(", "))]
    UnknownLabel {
        sensor: String,
        label: String,
        valid: Vec<String>,
    },
    #[error("{path}: unresolved environment variable ${{{var}}}")]
    UnresolvedVar { path: String, var: String },
}
