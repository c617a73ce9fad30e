//! Lowering from the AST to executable detector specifications.
//!
//! One detector is produced per activity. All labels are resolved against
//! the device configuration at this point, so the runtime never needs the
//! YAML file again. Serialization is deterministic: stations sorted by id,
//! patterns in chain order, fields in declaration order.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::config::{IoTSystem, ValueSpec};
use crate::lang::{
    validate, ActivityDecl, Condition, ConditionType, Diagnostic, Operand, Pattern, ProcessDecl,
    Severity,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub process: String,
    pub activity: String,
    pub subscribed_stations: Vec<StationBinding>,
    pub pattern_chain: Vec<CompiledPattern>,
}

impl DetectorSpec {
    /// Base name for files derived from this detector.
    pub fn file_stem(&self) -> String {
        format!("{}.{}", self.process, self.activity)
    }

    pub fn intermediate_count(&self) -> usize {
        self.pattern_chain
            .iter()
            .filter(|p| p.kind == PatternStage::Intermediate)
            .count()
    }

    pub fn subscribes_to(&self, station: &str) -> bool {
        self.subscribed_stations.iter().any(|b| b.station == station)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationBinding {
    pub station: String,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternStage {
    Start,
    Intermediate,
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledPattern {
    pub kind: PatternStage,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub index: Option<usize>,
    pub cases: Vec<CompiledCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledCase {
    pub conditions: Vec<CompiledCondition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledCondition {
    pub station: String,
    pub sensor: String,
    #[serde(flatten)]
    pub predicate: Predicate,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "predicate", rename_all = "snake_case")]
pub enum Predicate {
    ChangesFrom { from: ValueSpec, to: ValueSpec },
    IsChanging,
    InRange { lo: f64, hi: f64 },
    IsEqual { value: ValueSpec },
    IsLower { value: f64 },
    IsLowerOrEqual { value: f64 },
    IsHigher { value: f64 },
    IsHigherOrEqual { value: f64 },
    IsIncreasing,
    IsDecreasing,
}

/// Lowers every activity of a validated program. Fails with the full
/// diagnostic list when validation reports errors.
pub fn compile(
    process: &ProcessDecl,
    system: &IoTSystem,
) -> Result<Vec<DetectorSpec>, Vec<Diagnostic>> {
    let diags = validate(process, system);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(diags);
    }
    Ok(process
        .activities
        .iter()
        .map(|a| lower_activity(&process.name, a, system))
        .collect())
}

fn lower_activity(process: &str, activity: &ActivityDecl, system: &IoTSystem) -> DetectorSpec {
    let mut chain = Vec::new();
    chain.push(lower_pattern(&activity.start, PatternStage::Start, None, system));
    for (i, p) in activity.intermediates.iter().enumerate() {
        chain.push(lower_pattern(p, PatternStage::Intermediate, Some(i), system));
    }
    chain.push(lower_pattern(&activity.end, PatternStage::End, None, system));

    let stations: BTreeSet<&str> = chain
        .iter()
        .flat_map(|p| &p.cases)
        .flat_map(|c| &c.conditions)
        .map(|c| c.station.as_str())
        .collect();
    let subscribed_stations = stations
        .into_iter()
        .map(|id| StationBinding {
            station: id.to_string(),
            source: system
                .station(id)
                .expect("validated station")
                .source
                .clone(),
        })
        .collect();

    DetectorSpec {
        process: process.to_string(),
        activity: activity.name.clone(),
        subscribed_stations,
        pattern_chain: chain,
    }
}

fn lower_pattern(
    pattern: &Pattern,
    kind: PatternStage,
    index: Option<usize>,
    system: &IoTSystem,
) -> CompiledPattern {
    CompiledPattern {
        kind,
        index,
        cases: pattern
            .cases
            .iter()
            .map(|case| CompiledCase {
                conditions: case
                    .conditions
                    .iter()
                    .map(|c| lower_condition(c, system))
                    .collect(),
            })
            .collect(),
    }
}

fn lower_condition(cond: &Condition, system: &IoTSystem) -> CompiledCondition {
    let sensor = system
        .sensor(&cond.station, &cond.sensor)
        .expect("validated sensor");
    let spec = |op: &Operand| -> ValueSpec {
        match op {
            Operand::Number(v) => ValueSpec::Exact(*v),
            Operand::Label(l) => sensor.resolve_label(l).expect("validated label"),
        }
    };
    let exact = |op: &Operand| -> f64 { spec(op).as_exact().expect("validated exact operand") };

    let predicate = match &cond.ctype {
        ConditionType::ChangesFrom { from, to } => Predicate::ChangesFrom {
            from: spec(from),
            to: spec(to),
        },
        ConditionType::IsChanging => Predicate::IsChanging,
        ConditionType::InRange { lo, hi } => Predicate::InRange {
            lo: exact(lo),
            hi: exact(hi),
        },
        ConditionType::IsEqual(v) => Predicate::IsEqual { value: spec(v) },
        ConditionType::IsLower(v) => Predicate::IsLower { value: exact(v) },
        ConditionType::IsLowerOrEqual(v) => Predicate::IsLowerOrEqual { value: exact(v) },
        ConditionType::IsHigher(v) => Predicate::IsHigher { value: exact(v) },
        ConditionType::IsHigherOrEqual(v) => Predicate::IsHigherOrEqual { value: exact(v) },
        ConditionType::IsIncreasing => Predicate::IsIncreasing,
        ConditionType::IsDecreasing => Predicate::IsDecreasing,
    };

    CompiledCondition {
        station: cond.station.clone(),
        sensor: cond.sensor.clone(),
        predicate,
        window_ms: cond.time.as_ref().map(|t| t.to_millis()),
    }
}
