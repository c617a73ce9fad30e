//! Semantic validation of a parsed program against a device configuration.
//!
//! Checks that every referenced station and sensor exists, that state labels
//! resolve, that literals respect declared value ranges, and that operand
//! shapes fit the condition type. Errors make a program non-executable;
//! warnings flag constructs that are legal but almost certainly mistakes.

use crate::config::{ConfigError, IoTSystem, SensorDecl, ValueSpec};

use super::ast::*;

pub fn validate(process: &ProcessDecl, system: &IoTSystem) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for activity in &process.activities {
        validate_pattern(&activity.start, system, &mut diags);
        for p in &activity.intermediates {
            validate_pattern(p, system, &mut diags);
        }
        validate_pattern(&activity.end, system, &mut diags);
    }
    diags
}

fn validate_pattern(pattern: &Pattern, system: &IoTSystem, diags: &mut Vec<Diagnostic>) {
    for case in &pattern.cases {
        for cond in &case.conditions {
            validate_condition(cond, system, diags);
        }
    }
}

fn validate_condition(cond: &Condition, system: &IoTSystem, diags: &mut Vec<Diagnostic>) {
    let Some(station) = system.station(&cond.station) else {
        let known: Vec<&str> = system.stations.iter().map(|s| s.id.as_str()).collect();
        diags.push(Diagnostic::error(
            format!(
                "unknown station {:?}; configured stations: {}",
                cond.station,
                known.join(", ")
            ),
            cond.span,
        ));
        return;
    };
    let Some(sensor) = station.sensor(&cond.sensor) else {
        let known: Vec<&str> = station.sensors.iter().map(|s| s.id.as_str()).collect();
        diags.push(Diagnostic::error(
            format!(
                "station {:?} has no sensor {:?}; configured sensors: {}",
                cond.station,
                cond.sensor,
                known.join(", ")
            ),
            cond.span,
        ));
        return;
    };

    match &cond.ctype {
        ConditionType::ChangesFrom { from, to } => {
            let from_spec = resolve(from, sensor, cond.span, diags);
            let to_spec = resolve(to, sensor, cond.span, diags);
            if let (Some(f), Some(t)) = (from_spec, to_spec) {
                if f == t {
                    diags.push(Diagnostic::warning(
                        format!(
                            "changes_from with identical from and to values never matches \
                             on sensor {:?}",
                            cond.sensor
                        ),
                        cond.span,
                    ));
                }
            }
        }
        ConditionType::InRange { lo, hi } => {
            let lo_spec = resolve_exact(lo, sensor, cond, "in_range", diags);
            let hi_spec = resolve_exact(hi, sensor, cond, "in_range", diags);
            if let (Some(l), Some(h)) = (lo_spec, hi_spec) {
                if l >= h {
                    diags.push(Diagnostic::error(
                        format!(
                            "in_range bounds must satisfy lower < upper, got {l} and {h}"
                        ),
                        cond.span,
                    ));
                }
            }
        }
        ConditionType::IsEqual(v) => {
            resolve(v, sensor, cond.span, diags);
        }
        ConditionType::IsLower(v)
        | ConditionType::IsLowerOrEqual(v)
        | ConditionType::IsHigher(v)
        | ConditionType::IsHigherOrEqual(v) => {
            resolve_exact(v, sensor, cond, cond.ctype.keyword(), diags);
        }
        ConditionType::IsChanging | ConditionType::IsIncreasing | ConditionType::IsDecreasing => {}
    }
}

/// Resolves an operand to the value it matches; reports unknown labels and
/// out-of-range literals.
fn resolve(
    op: &Operand,
    sensor: &SensorDecl,
    span: Span,
    diags: &mut Vec<Diagnostic>,
) -> Option<ValueSpec> {
    match op {
        Operand::Number(v) => {
            let mut ok = true;
            if let Some(min) = sensor.min_value {
                if *v < min {
                    ok = false;
                }
            }
            if let Some(max) = sensor.max_value {
                if *v > max {
                    ok = false;
                }
            }
            if !ok {
                let lo = sensor
                    .min_value
                    .map_or("-inf".to_string(), |m| m.to_string());
                let hi = sensor
                    .max_value
                    .map_or("inf".to_string(), |m| m.to_string());
                diags.push(Diagnostic::error(
                    format!(
                        "value {v} is outside the declared range [{lo}, {hi}] of sensor {:?}",
                        sensor.id
                    ),
                    span,
                ));
                return None;
            }
            Some(ValueSpec::Exact(*v))
        }
        Operand::Label(label) => match sensor.resolve_label(label) {
            Ok(spec) => Some(spec),
            Err(ConfigError::UnknownLabel { valid, .. }) => {
                let hint = if valid.is_empty() {
                    format!("sensor {:?} declares no states or value bands", sensor.id)
                } else {
                    format!("valid labels: {}", valid.join(", "))
                };
                diags.push(Diagnostic::error(
                    format!("unknown label {label:?} for sensor {:?}; {hint}", sensor.id),
                    span,
                ));
                None
            }
            Err(e) => {
                diags.push(Diagnostic::error(e.to_string(), span));
                None
            }
        },
    }
}

/// Like [`resolve`], but additionally requires a single comparable value:
/// band labels have no total order against a threshold.
fn resolve_exact(
    op: &Operand,
    sensor: &SensorDecl,
    cond: &Condition,
    ctx: &str,
    diags: &mut Vec<Diagnostic>,
) -> Option<f64> {
    let spec = resolve(op, sensor, cond.span, diags)?;
    match spec.as_exact() {
        Some(v) => Some(v),
        None => {
            let label = match op {
                Operand::Label(l) => l.as_str(),
                Operand::Number(_) => "?",
            };
            diags.push(Diagnostic::error(
                format!(
                    "label {label:?} names a value band of sensor {:?}; {ctx} requires \
                     a number or a state label",
                    sensor.id
                ),
                cond.span,
            ));
            None
        }
    }
}
