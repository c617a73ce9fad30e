//! Abstract syntax tree for Radiant programs.
//!
//! Nodes carry source spans for diagnostics; equality deliberately ignores
//! spans so that structural comparison (round-trip tests, deduplication)
//! is unaffected by formatting.

use serde::Serialize;

/// A half-open region of the source text.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Span {
    pub offset: usize,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }

    pub fn warning(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
            span,
        }
    }

    /// Renders as `file:line:col: severity: message`.
    pub fn render(&self, file: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        format!(
            "{file}:{}:{}: {sev}: {}",
            self.span.line, self.span.col, self.message
        )
    }
}

#[derive(Debug, Clone)]
pub struct ProcessDecl {
    pub name: String,
    pub activities: Vec<ActivityDecl>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct ActivityDecl {
    pub name: String,
    pub start: Pattern,
    pub intermediates: Vec<Pattern>,
    pub end: Pattern,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    Start,
    Intermediate,
    End,
}

impl PatternKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            PatternKind::Start => "Start",
            PatternKind::Intermediate => "Intermediate",
            PatternKind::End => "End",
        }
    }
}

/// A pattern is a disjunction of cases; a pattern written as bare conditions
/// is normalized to a single case.
#[derive(Debug, Clone)]
pub struct Pattern {
    pub kind: PatternKind,
    pub cases: Vec<Case>,
    pub span: Span,
}

/// A conjunction of conditions.
#[derive(Debug, Clone)]
pub struct Case {
    pub conditions: Vec<Condition>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Condition {
    pub station: String,
    pub sensor: String,
    pub ctype: ConditionType,
    pub time: Option<TimeConstraint>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionType {
    ChangesFrom { from: Operand, to: Operand },
    IsChanging,
    InRange { lo: Operand, hi: Operand },
    IsEqual(Operand),
    IsLower(Operand),
    IsLowerOrEqual(Operand),
    IsHigher(Operand),
    IsHigherOrEqual(Operand),
    IsIncreasing,
    IsDecreasing,
}

impl ConditionType {
    pub fn keyword(&self) -> &'static str {
        match self {
            ConditionType::ChangesFrom { .. } => "changes_from",
            ConditionType::IsChanging => "is_changing",
            ConditionType::InRange { .. } => "in_range",
            ConditionType::IsEqual(_) => "is_equal",
            ConditionType::IsLower(_) => "is_lower",
            ConditionType::IsLowerOrEqual(_) => "is_lower_or_equal",
            ConditionType::IsHigher(_) => "is_higher",
            ConditionType::IsHigherOrEqual(_) => "is_higher_or_equal",
            ConditionType::IsIncreasing => "is_increasing",
            ConditionType::IsDecreasing => "is_decreasing",
        }
    }

    /// Whether this type observes a value transition rather than a snapshot;
    /// only these may carry a time constraint.
    pub fn is_change_family(&self) -> bool {
        matches!(
            self,
            ConditionType::ChangesFrom { .. }
                | ConditionType::IsChanging
                | ConditionType::IsIncreasing
                | ConditionType::IsDecreasing
        )
    }

    pub fn operands(&self) -> Vec<&Operand> {
        match self {
            ConditionType::ChangesFrom { from, to } => vec![from, to],
            ConditionType::InRange { lo, hi } => vec![lo, hi],
            ConditionType::IsEqual(v)
            | ConditionType::IsLower(v)
            | ConditionType::IsLowerOrEqual(v)
            | ConditionType::IsHigher(v)
            | ConditionType::IsHigherOrEqual(v) => vec![v],
            ConditionType::IsChanging
            | ConditionType::IsIncreasing
            | ConditionType::IsDecreasing => vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Number(f64),
    Label(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeConstraint {
    pub amount: u64,
    pub unit: TimeUnit,
}

impl TimeConstraint {
    pub fn to_millis(&self) -> u64 {
        self.amount
            * match self.unit {
                TimeUnit::Milliseconds => 1,
                TimeUnit::Seconds => 1_000,
                TimeUnit::Minutes => 60_000,
                TimeUnit::Hours => 3_600_000,
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    Milliseconds,
    Seconds,
    Minutes,
    Hours,
}

impl TimeUnit {
    /// The canonical (plural) keyword.
    pub fn keyword(&self) -> &'static str {
        match self {
            TimeUnit::Milliseconds => "milliseconds",
            TimeUnit::Seconds => "seconds",
            TimeUnit::Minutes => "minutes",
            TimeUnit::Hours => "hours",
        }
    }
}

impl PartialEq for ProcessDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.activities == other.activities
    }
}

impl PartialEq for ActivityDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.start == other.start
            && self.intermediates == other.intermediates
            && self.end == other.end
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.cases == other.cases
    }
}

impl PartialEq for Case {
    fn eq(&self, other: &Self) -> bool {
        self.conditions == other.conditions
    }
}

impl PartialEq for Condition {
    fn eq(&self, other: &Self) -> bool {
        self.station == other.station
            && self.sensor == other.sensor
            && self.ctype == other.ctype
            && self.time == other.time
    }
}
