//! Resolved IoT system model: stations, sensors, presets, sources, sinks.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::ConfigError;

/// A fully resolved IoT system configuration.
///
/// Immutable after parsing; safe to share read-only across concurrent
/// detector executions.
#[derive(Debug, Clone, PartialEq)]
pub struct IoTSystem {
    pub presets: Vec<Preset>,
    pub stations: Vec<Station>,
    pub sources: Vec<SourceDecl>,
    pub sinks: Vec<SinkDecl>,
    /// Non-fatal findings from parsing and resolution (label collisions,
    /// sensors without schema fields).
    pub warnings: Vec<String>,
}

impl IoTSystem {
    pub fn station(&self, id: &str) -> Option<&Station> {
        self.stations.iter().find(|s| s.id == id)
    }

    pub fn sensor(&self, station: &str, sensor: &str) -> Option<&SensorDecl> {
        self.station(station)?.sensor(sensor)
    }

    pub fn source(&self, id: &str) -> Option<&SourceDecl> {
        self.sources.iter().find(|s| s.id == id)
    }

    pub fn source_of_station(&self, station: &str) -> Option<&SourceDecl> {
        self.source(&self.station(station)?.source)
    }
}

/// A reusable sensor template: value bounds plus named states.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: String,
    pub min_value: f64,
    pub max_value: f64,
    pub states: IndexMap<String, f64>,
}

/// A station groups the sensors that arrive together on one source stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub id: String,
    pub name: String,
    pub source: String,
    pub sensors: Vec<SensorDecl>,
}

impl Station {
    pub fn sensor(&self, id: &str) -> Option<&SensorDecl> {
        self.sensors.iter().find(|s| s.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensorKind {
    Int,
    Float,
    Switch,
}

/// A sensor declaration after preset resolution: states and bounds are
/// populated from the preset (or switch defaults) when not set locally.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorDecl {
    pub id: String,
    pub kind: SensorKind,
    pub preset: Option<String>,
    pub states: IndexMap<String, f64>,
    pub discretization: Option<Discretization>,
    pub min_value: Option<f64>,
    pub max_value: Option<f64>,
}

impl SensorDecl {
    /// All labels a condition may reference for this sensor: state labels
    /// first, then discretization band labels.
    pub fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.states.keys().map(String::as_str).collect();
        if let Some(d) = &self.discretization {
            for l in d.labels() {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
        out
    }

    /// Resolves a label to a value: a state gives the exact state value, a
    /// discretization label gives the band's half-open interval. States take
    /// precedence on collision.
    pub fn resolve_label(&self, label: &str) -> Result<ValueSpec, ConfigError> {
        if let Some(v) = self.states.get(label) {
            return Ok(ValueSpec::Exact(*v));
        }
        if let Some(d) = &self.discretization {
            if let Some(band) = d.band(label) {
                return Ok(band);
            }
        }
        Err(ConfigError::UnknownLabel {
            sensor: self.id.clone(),
            label: label.to_string(),
            valid: self.labels().iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Maps a raw reading onto the discretization band containing it, or
    /// returns the reading unchanged when no discretization is configured.
    pub fn discretize(&self, raw: f64) -> Discretized<'_> {
        match &self.discretization {
            Some(d) => Discretized::Label(d.label_of(raw)),
            None => Discretized::Raw(raw),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discretized<'a> {
    Label(&'a str),
    Raw(f64),
}

/// A contiguous partition of the real line into labeled bands.
///
/// Bands are half-open `[lo, hi)`; the lower band is `(-inf, threshold)` and
/// the upper band is `[threshold, +inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub lower: (f64, String),
    pub intermediate: Vec<(f64, f64, String)>,
    pub upper: (f64, String),
}

impl Discretization {
    pub fn labels(&self) -> Vec<&str> {
        let mut out = vec![self.lower.1.as_str()];
        out.extend(self.intermediate.iter().map(|(_, _, l)| l.as_str()));
        out.push(self.upper.1.as_str());
        out
    }

    /// The band for a label, if the label names one.
    pub fn band(&self, label: &str) -> Option<ValueSpec> {
        if self.lower.1 == label {
            return Some(ValueSpec::Band {
                lo: f64::NEG_INFINITY,
                hi: self.lower.0,
            });
        }
        for (lo, hi, l) in &self.intermediate {
            if l == label {
                return Some(ValueSpec::Band { lo: *lo, hi: *hi });
            }
        }
        if self.upper.1 == label {
            return Some(ValueSpec::Band {
                lo: self.upper.0,
                hi: f64::INFINITY,
            });
        }
        None
    }

    /// The label of the band containing `raw`. Total: every real maps to
    /// exactly one band.
    pub fn label_of(&self, raw: f64) -> &str {
        if raw < self.lower.0 {
            return &self.lower.1;
        }
        for (lo, hi, l) in &self.intermediate {
            if *lo <= raw && raw < *hi {
                return l;
            }
        }
        &self.upper.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldType {
    String,
    Int,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    Mqtt { url: String, topic: String },
    File { path: String },
}

/// An event stream feeding one or more stations.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceDecl {
    pub id: String,
    pub kind: SourceKind,
    pub client_id: Option<String>,
    pub content_type: String,
    pub schema: IndexMap<String, FieldType>,
}

impl SourceDecl {
    /// The configured client id, or a deterministic default.
    pub fn effective_client_id(&self) -> String {
        self.client_id
            .clone()
            .unwrap_or_else(|| format!("radiant-{}", self.id))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SinkKind {
    Log,
    File { path: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinkDecl {
    pub id: String,
    pub kind: SinkKind,
}

/// The resolution of an operand: an exact value or a half-open band
/// `[lo, hi)` with infinity sentinels for the open-ended sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueSpec {
    Exact(f64),
    Band { lo: f64, hi: f64 },
}

impl ValueSpec {
    /// Whether a sensor value satisfies this spec: equality for `Exact`,
    /// `lo <= v < hi` membership for `Band`.
    pub fn satisfies(&self, v: f64) -> bool {
        match *self {
            ValueSpec::Exact(x) => v == x,
            ValueSpec::Band { lo, hi } => lo <= v && v < hi,
        }
    }

    pub fn as_exact(&self) -> Option<f64> {
        match *self {
            ValueSpec::Exact(x) => Some(x),
            ValueSpec::Band { .. } => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ValueSpecRepr {
    Exact(f64),
    Band { lo: Option<f64>, hi: Option<f64> },
}

impl Serialize for ValueSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = match *self {
            ValueSpec::Exact(x) => ValueSpecRepr::Exact(x),
            ValueSpec::Band { lo, hi } => ValueSpecRepr::Band {
                lo: lo.is_finite().then_some(lo),
                hi: hi.is_finite().then_some(hi),
            },
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ValueSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Ok(match ValueSpecRepr::deserialize(de)? {
            ValueSpecRepr::Exact(x) => ValueSpec::Exact(x),
            ValueSpecRepr::Band { lo, hi } => ValueSpec::Band {
                lo: lo.unwrap_or(f64::NEG_INFINITY),
                hi: hi.unwrap_or(f64::INFINITY),
            },
        })
    }
}
