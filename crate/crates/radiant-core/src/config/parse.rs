//! Parsing, preset resolution, and validation of the YAML configuration.

use indexmap::IndexMap;

use super::model::*;
use super::ConfigError;

/// Parses and resolves a configuration document, reading `${VAR}`
/// substitutions from the process environment.
pub fn parse_iot_config(text: &str) -> Result<IoTSystem, ConfigError> {
    parse_iot_config_with_env(text, &|var| std::env::var(var).ok())
}

/// Parses and resolves a configuration document with an injectable variable
/// lookup, so callers (and tests) control `${VAR}` substitution.
pub fn parse_iot_config_with_env(
    text: &str,
    lookup: &dyn Fn(&str) -> Option<String>,
) -> Result<IoTSystem, ConfigError> {
    let raw: RawSystem = serde_yaml::from_str(text)?;
    let mut system = lower(raw, lookup)?;
    let warnings = resolve(&mut system)?;
    system.warnings = warnings;
    Ok(system)
}

/// Applies presets and switch defaults to all sensors and checks every
/// structural invariant. Returns accumulated warnings.
///
/// Idempotent: resolving an already resolved system changes nothing.
pub fn resolve(system: &mut IoTSystem) -> Result<Vec<String>, ConfigError> {
    let mut warnings = Vec::new();

    if system.stations.is_empty() {
        return Err(invalid("stations", "at least one station required"));
    }

    check_unique("presets", system.presets.iter().map(|p| p.id.as_str()))?;
    check_unique("stations", system.stations.iter().map(|s| s.id.as_str()))?;
    check_unique("sources", system.sources.iter().map(|s| s.id.as_str()))?;
    check_unique("sinks", system.sinks.iter().map(|s| s.id.as_str()))?;

    for (pi, preset) in system.presets.iter().enumerate() {
        let path = format!("presets[{pi}]");
        if preset.min_value > preset.max_value {
            return Err(invalid(&path, "min_value must not exceed max_value"));
        }
        for (label, value) in &preset.states {
            if *value < preset.min_value || *value > preset.max_value {
                return Err(invalid(
                    &format!("{path}.states.{label}"),
                    &format!(
                        "state value {value} outside [{}, {}]",
                        preset.min_value, preset.max_value
                    ),
                ));
            }
        }
    }

    let presets = system.presets.clone();
    let sources = system.sources.clone();
    for (si, station) in system.stations.iter_mut().enumerate() {
        let path = format!("stations[{si}]");
        let source = sources
            .iter()
            .find(|s| s.id == station.source)
            .ok_or_else(|| invalid(&path, &format!("unknown source {:?}", station.source)))?;
        check_unique(
            &format!("{path}.sensors"),
            station.sensors.iter().map(|s| s.id.as_str()),
        )?;
        for (ni, sensor) in station.sensors.iter_mut().enumerate() {
            let path = format!("{path}.sensors[{ni}]");
            resolve_sensor(sensor, &presets, &path)?;
            validate_sensor(sensor, &path, &mut warnings)?;
            if !source.schema.contains_key(&sensor.id) {
                warnings.push(format!(
                    "{path}: sensor {:?} has no field in the schema of source {:?}; it will never produce readings",
                    sensor.id, source.id
                ));
            }
        }
    }

    for (si, source) in system.sources.iter().enumerate() {
        let path = format!("sources[{si}]");
        if source.content_type != "json" {
            return Err(invalid(
                &format!("{path}.content_type"),
                &format!("unsupported content type {:?} (only json)", source.content_type),
            ));
        }
        match source.schema.get("ts") {
            Some(FieldType::String) => {}
            Some(_) => {
                return Err(invalid(
                    &format!("{path}.schema.ts"),
                    "the ts field must have type string",
                ))
            }
            None => {
                return Err(invalid(
                    &format!("{path}.schema"),
                    "schema must contain a ts field of type string",
                ))
            }
        }
    }

    Ok(warnings)
}

fn resolve_sensor(
    sensor: &mut SensorDecl,
    presets: &[Preset],
    path: &str,
) -> Result<(), ConfigError> {
    if let Some(preset_id) = &sensor.preset {
        let preset = presets
            .iter()
            .find(|p| &p.id == preset_id)
            .ok_or_else(|| invalid(path, &format!("unknown preset {preset_id:?}")))?;
        if sensor.states.is_empty() {
            sensor.states = preset.states.clone();
        }
        if sensor.min_value.is_none() {
            sensor.min_value = Some(preset.min_value);
        }
        if sensor.max_value.is_none() {
            sensor.max_value = Some(preset.max_value);
        }
    }
    if sensor.kind == SensorKind::Switch {
        if sensor.states.is_empty() {
            sensor.states = IndexMap::from([("off".to_string(), 0.0), ("on".to_string(), 1.0)]);
        }
        if sensor.min_value.is_none() {
            sensor.min_value = Some(0.0);
        }
        if sensor.max_value.is_none() {
            sensor.max_value = Some(1.0);
        }
    }
    Ok(())
}

fn validate_sensor(
    sensor: &SensorDecl,
    path: &str,
    warnings: &mut Vec<String>,
) -> Result<(), ConfigError> {
    if let (Some(min), Some(max)) = (sensor.min_value, sensor.max_value) {
        if min > max {
            return Err(invalid(path, "min_value must not exceed max_value"));
        }
    }
    if let Some(d) = &sensor.discretization {
        validate_discretization(d, &format!("{path}.discretization"))?;
        for label in d.labels() {
            if sensor.states.contains_key(label) {
                warnings.push(format!(
                    "{path}: label {label:?} is both a state and a discretization band; the state value wins"
                ));
            }
        }
    }
    Ok(())
}

fn validate_discretization(d: &Discretization, path: &str) -> Result<(), ConfigError> {
    let mut seen = Vec::new();
    for label in d.labels() {
        if seen.contains(&label) {
            return Err(invalid(path, &format!("duplicate band label {label:?}")));
        }
        seen.push(label);
    }
    let mut prev = d.lower.0;
    for (i, (lo, hi, _)) in d.intermediate.iter().enumerate() {
        if *lo != prev {
            return Err(invalid(
                path,
                &format!("intermediate[{i}] starts at {lo}, expected {prev} (bands must be contiguous)"),
            ));
        }
        if lo >= hi {
            return Err(invalid(
                path,
                &format!("intermediate[{i}] bounds [{lo}, {hi}] are not increasing"),
            ));
        }
        prev = *hi;
    }
    if d.upper.0 != prev {
        return Err(invalid(
            path,
            &format!(
                "upper threshold {} does not continue the previous band at {prev} (bands must be contiguous)",
                d.upper.0
            ),
        ));
    }
    Ok(())
}

fn check_unique<'a>(path: &str, ids: impl Iterator<Item = &'a str>) -> Result<(), ConfigError> {
    let mut seen: Vec<&str> = Vec::new();
    for id in ids {
        if seen.contains(&id) {
            return Err(invalid(path, &format!("duplicate id {id:?}")));
        }
        seen.push(id);
    }
    Ok(())
}

fn invalid(path: &str, message: &str) -> ConfigError {
    ConfigError::Invalid {
        path: path.to_string(),
        message: message.to_string(),
    }
}

fn substitute_env(
    s: &str,
    lookup: &dyn Fn(&str) -> Option<String>,
    path: &str,
) -> Result<String, ConfigError> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after.find('}').ok_or_else(|| ConfigError::Invalid {
            path: path.to_string(),
            message: format!("unterminated ${{...}} in {s:?}"),
        })?;
        let var = &after[..end];
        match lookup(var) {
            Some(value) => out.push_str(&value),
            None => {
                return Err(ConfigError::UnresolvedVar {
                    path: path.to_string(),
                    var: var.to_string(),
                })
            }
        }
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

// Raw document shapes, mirroring the YAML layout one-to-one.

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(default)]
    presets: Vec<RawPreset>,
    #[serde(default)]
    stations: Vec<RawStation>,
    #[serde(default)]
    sources: Vec<RawSource>,
    #[serde(default)]
    sinks: Vec<RawSink>,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPreset {
    id: String,
    min_value: f64,
    max_value: f64,
    #[serde(default)]
    states: IndexMap<String, f64>,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStation {
    id: String,
    name: Option<String>,
    source: String,
    #[serde(default)]
    sensors: Vec<RawSensor>,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSensor {
    id: String,
    #[serde(rename = "type")]
    kind: Option<String>,
    preset: Option<String>,
    #[serde(default)]
    states: IndexMap<String, f64>,
    discretization: Option<RawDiscretization>,
    min_value: Option<f64>,
    max_value: Option<f64>,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiscretization {
    lower: (f64, String),
    intermediate: Option<RawIntermediate>,
    upper: (f64, String),
}

/// A single band may be written flat (`[lo, hi, label]`) as in typical
/// configs; multiple bands are a list of such triples.
#[derive(Debug, serde::Deserialize)]
#[serde(untagged)]
enum RawIntermediate {
    One(f64, f64, String),
    Many(Vec<(f64, f64, String)>),
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    id: String,
    #[serde(rename = "type")]
    kind: String,
    url: Option<String>,
    client_id: Option<String>,
    topic: Option<String>,
    path: Option<String>,
    content_type: Option<String>,
    schema: IndexMap<String, String>,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSink {
    id: String,
    #[serde(rename = "type")]
    kind: String,
    path: Option<String>,
}

fn lower(
    raw: RawSystem,
    lookup: &dyn Fn(&str) -> Option<String>,
) -> Result<IoTSystem, ConfigError> {
    let presets = raw
        .presets
        .into_iter()
        .map(|p| Preset {
            id: p.id,
            min_value: p.min_value,
            max_value: p.max_value,
            states: p.states,
        })
        .collect();

    let mut stations = Vec::new();
    for (si, s) in raw.stations.into_iter().enumerate() {
        let mut sensors = Vec::new();
        for (ni, r) in s.sensors.into_iter().enumerate() {
            let path = format!("stations[{si}].sensors[{ni}].type");
            let kind = match r.kind.as_deref() {
                None | Some("int") => SensorKind::Int,
                Some("float") => SensorKind::Float,
                Some("switch") => SensorKind::Switch,
                Some(other) => {
                    return Err(invalid(
                        &path,
                        &format!("unknown sensor type {other:?} (expected int, float, or switch)"),
                    ))
                }
            };
            sensors.push(SensorDecl {
                id: r.id,
                kind,
                preset: r.preset,
                states: r.states,
                discretization: r.discretization.map(|d| Discretization {
                    lower: d.lower,
                    intermediate: match d.intermediate {
                        None => Vec::new(),
                        Some(RawIntermediate::One(lo, hi, label)) => vec![(lo, hi, label)],
                        Some(RawIntermediate::Many(bands)) => bands,
                    },
                    upper: d.upper,
                }),
                min_value: r.min_value,
                max_value: r.max_value,
            });
        }
        stations.push(Station {
            name: s.name.unwrap_or_else(|| s.id.clone()),
            id: s.id,
            source: s.source,
            sensors,
        });
    }

    let mut sources = Vec::new();
    for (si, s) in raw.sources.into_iter().enumerate() {
        let path = format!("sources[{si}]");
        let kind = match s.kind.as_str() {
            "mqtt" => {
                let url = s
                    .url
                    .ok_or_else(|| invalid(&path, "mqtt source requires url"))?;
                let url = substitute_env(&url, lookup, &format!("{path}.url"))?;
                let topic = s
                    .topic
                    .ok_or_else(|| invalid(&path, "mqtt source requires topic"))?;
                SourceKind::Mqtt { url, topic }
            }
            "file" => SourceKind::File {
                path: s
                    .path
                    .ok_or_else(|| invalid(&path, "file source requires path"))?,
            },
            other => {
                return Err(invalid(
                    &format!("{path}.type"),
                    &format!("unknown source type {other:?} (expected mqtt or file)"),
                ))
            }
        };
        let mut schema = IndexMap::new();
        for (field, ty) in s.schema {
            let ty = match ty.as_str() {
                "string" => FieldType::String,
                "int" => FieldType::Int,
                "float" => FieldType::Float,
                other => {
                    return Err(invalid(
                        &format!("{path}.schema.{field}"),
                        &format!("unknown field type {other:?} (expected string, int, or float)"),
                    ))
                }
            };
            schema.insert(field, ty);
        }
        sources.push(SourceDecl {
            id: s.id,
            kind,
            client_id: s.client_id,
            content_type: s.content_type.unwrap_or_else(|| "json".to_string()),
            schema,
        });
    }

    let mut sinks = Vec::new();
    for (si, s) in raw.sinks.into_iter().enumerate() {
        let path = format!("sinks[{si}]");
        let kind = match s.kind.as_str() {
            "log" => SinkKind::Log,
            "file" => SinkKind::File {
                path: s
                    .path
                    .ok_or_else(|| invalid(&path, "file sink requires path"))?,
            },
            other => {
                return Err(invalid(
                    &format!("{path}.type"),
                    &format!("unknown sink type {other:?} (expected log or file)"),
                ))
            }
        };
        sinks.push(SinkDecl { id: s.id, kind });
    }

    Ok(IoTSystem {
        presets,
        stations,
        sources,
        sinks,
        warnings: Vec::new(),
    })
}
