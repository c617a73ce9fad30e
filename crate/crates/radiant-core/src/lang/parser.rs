//! Recursive-descent parser.
//!
//! Keywords are contextual: the lexer produces plain identifiers and the
//! parser decides from position whether `sensor`, `to` or `within` is a
//! keyword. On errors the parser reports a diagnostic and resynchronizes at
//! the next structural keyword so that one mistake does not hide the rest.

use super::ast::*;
use super::lexer::{lex, Tok, Token};

/// Keywords that begin a new structural element; used as recovery points.
const STRUCTURAL: &[&str] = &[
    "Process",
    "Activity",
    "Start",
    "Intermediate",
    "End",
    "Case",
    "In",
];

pub fn parse_radiant(text: &str) -> (Option<ProcessDecl>, Vec<Diagnostic>) {
    let (tokens, mut diagnostics) = lex(text);
    let mut parser = Parser {
        tokens,
        pos: 0,
        diags: Vec::new(),
    };
    let process = parser.parse_process();
    diagnostics.append(&mut parser.diags);
    (process, diagnostics)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(w), .. }) if w == kw)
    }

    fn peek_structural(&self) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(w), .. }) if STRUCTURAL.contains(&w.as_str()))
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> Span {
        match self.peek() {
            Some(t) => t.span,
            None => self.tokens.last().map(|t| t.span).unwrap_or_default(),
        }
    }

    fn error_here(&mut self, message: impl Into<String>) {
        let span = self.here();
        self.diags.push(Diagnostic::error(message, span));
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(t) => match &t.tok {
                Tok::Ident(w) => format!("{w:?}"),
                Tok::Number(_) => format!("number {}", t.text),
                Tok::Colon => "\":\"".to_string(),
                Tok::Semicolon => "\";\"".to_string(),
            },
            None => "end of input".to_string(),
        }
    }

    fn expect_kw(&mut self, kw: &str) -> bool {
        if self.peek_kw(kw) {
            self.advance();
            true
        } else {
            let found = self.describe();
            self.error_here(format!("expected keyword {kw:?}, found {found}"));
            false
        }
    }

    fn expect_colon(&mut self, after: &str) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Colon, .. })) {
            self.advance();
            true
        } else {
            let found = self.describe();
            self.error_here(format!("expected \":\" after {after}, found {found}"));
            false
        }
    }

    fn expect_name(&mut self, what: &str) -> Option<(String, Span)> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(w), ..
            }) => {
                let name = w.clone();
                let span = self.here();
                self.advance();
                Some((name, span))
            }
            _ => {
                let found = self.describe();
                self.error_here(format!("expected {what} name, found {found}"));
                None
            }
        }
    }

    /// Skips tokens until the next structural keyword or end of input.
    fn sync_to_structural(&mut self) {
        while self.peek().is_some() && !self.peek_structural() {
            self.advance();
        }
    }

    /// Skips past the end of the current condition: consumes through the next
    /// `;`, but stops early at a structural keyword.
    fn sync_past_condition(&mut self) {
        loop {
            if self.peek().is_none() || self.peek_structural() {
                return;
            }
            if let Some(Token {
                tok: Tok::Semicolon,
                ..
            }) = self.peek()
            {
                self.advance();
                return;
            }
            self.advance();
        }
    }

    fn parse_process(&mut self) -> Option<ProcessDecl> {
        let header_span = self.here();
        if !self.expect_kw("Process") {
            return None;
        }
        let (name, _) = self.expect_name("process")?;
        self.expect_colon("the process name");

        let mut activities: Vec<ActivityDecl> = Vec::new();
        loop {
            if self.peek().is_none() {
                break;
            }
            if self.peek_kw("Activity") {
                if let Some(activity) = self.parse_activity() {
                    if activities.iter().any(|a| a.name == activity.name) {
                        self.diags.push(Diagnostic::error(
                            format!("duplicate activity name {:?}", activity.name),
                            activity.span,
                        ));
                    } else {
                        activities.push(activity);
                    }
                }
            } else if self.peek_kw("Process") {
                self.error_here("only one Process declaration is allowed per program");
                break;
            } else {
                let found = self.describe();
                self.error_here(format!("expected keyword \"Activity\", found {found}"));
                self.advance();
                self.sync_to_structural();
                if !self.peek_kw("Activity") {
                    break;
                }
            }
        }

        if activities.is_empty() {
            self.diags.push(Diagnostic::error(
                format!("process {name:?} requires at least one activity"),
                header_span,
            ));
        }

        Some(ProcessDecl {
            name,
            activities,
            span: header_span,
        })
    }

    fn parse_activity(&mut self) -> Option<ActivityDecl> {
        let header_span = self.here();
        self.expect_kw("Activity");
        let (name, _) = self.expect_name("activity")?;
        self.expect_colon("the activity name");

        let mut patterns: Vec<Pattern> = Vec::new();
        loop {
            let kind = if self.peek_kw("Start") {
                PatternKind::Start
            } else if self.peek_kw("Intermediate") {
                PatternKind::Intermediate
            } else if self.peek_kw("End") {
                PatternKind::End
            } else {
                break;
            };
            patterns.push(self.parse_pattern(kind));
        }

        self.assemble_activity(name, header_span, patterns)
    }

    fn assemble_activity(
        &mut self,
        name: String,
        span: Span,
        patterns: Vec<Pattern>,
    ) -> Option<ActivityDecl> {
        let mut ok = true;
        let starts = patterns
            .iter()
            .filter(|p| p.kind == PatternKind::Start)
            .count();
        let ends = patterns
            .iter()
            .filter(|p| p.kind == PatternKind::End)
            .count();
        if starts == 0 {
            self.diags.push(Diagnostic::error(
                format!("activity {name:?} is missing a Start: pattern"),
                span,
            ));
            ok = false;
        }
        if ends == 0 {
            self.diags.push(Diagnostic::error(
                format!("activity {name:?} is missing an End: pattern"),
                span,
            ));
            ok = false;
        }
        for (i, p) in patterns.iter().enumerate() {
            let misplaced = match p.kind {
                PatternKind::Start => i != 0,
                PatternKind::End => i != patterns.len() - 1,
                PatternKind::Intermediate => false,
            };
            if misplaced {
                self.diags.push(Diagnostic::error(
                    format!(
                        "{} pattern out of order; expected Start, then Intermediate patterns, then End",
                        p.kind.keyword()
                    ),
                    p.span,
                ));
                ok = false;
            }
        }
        if !ok {
            return None;
        }

        let mut iter = patterns.into_iter();
        let start = iter.next().unwrap();
        let mut intermediates: Vec<Pattern> = iter.collect();
        let end = intermediates.pop().unwrap();
        Some(ActivityDecl {
            name,
            start,
            intermediates,
            end,
            span,
        })
    }

    fn parse_pattern(&mut self, kind: PatternKind) -> Pattern {
        let span = self.here();
        self.advance();
        self.expect_colon(kind.keyword());

        let mut bare: Vec<Condition> = Vec::new();
        let mut cases: Vec<Case> = Vec::new();
        loop {
            if self.peek_kw("In") {
                if let Some(cond) = self.parse_condition() {
                    match cases.last_mut() {
                        Some(case) => case.conditions.push(cond),
                        None => bare.push(cond),
                    }
                }
            } else if self.peek_kw("Case") {
                let case_span = self.here();
                self.advance();
                self.expect_colon("Case");
                cases.push(Case {
                    conditions: Vec::new(),
                    span: case_span,
                });
            } else {
                break;
            }
        }

        if !bare.is_empty() && !cases.is_empty() {
            self.diags.push(Diagnostic::warning(
                "conditions before the first Case: are grouped into an implicit case",
                bare[0].span,
            ));
        }
        for case in &cases {
            if case.conditions.is_empty() {
                self.diags.push(Diagnostic::error(
                    "Case: requires at least one condition",
                    case.span,
                ));
            }
        }
        if !bare.is_empty() {
            cases.insert(
                0,
                Case {
                    span: bare[0].span,
                    conditions: bare,
                },
            );
        }
        if cases.is_empty() {
            self.diags.push(Diagnostic::error(
                format!("{}: pattern requires at least one condition", kind.keyword()),
                span,
            ));
        }

        Pattern { kind, cases, span }
    }

    fn parse_condition(&mut self) -> Option<Condition> {
        let span = self.here();
        self.advance();

        let Some((station, _)) = self.expect_name("station") else {
            self.sync_past_condition();
            return None;
        };
        if !self.expect_kw("sensor") {
            self.sync_past_condition();
            return None;
        }
        let Some((sensor, _)) = self.expect_name("sensor") else {
            self.sync_past_condition();
            return None;
        };

        let ctype_span = self.here();
        let Some((ctype_word, _)) = self.expect_name("condition type") else {
            self.sync_past_condition();
            return None;
        };

        let ctype = match ctype_word.as_str() {
            "changes_from" => {
                let from = self.parse_operand()?;
                if !self.expect_kw("to") {
                    self.sync_past_condition();
                    return None;
                }
                let to = self.parse_operand()?;
                ConditionType::ChangesFrom { from, to }
            }
            "is_changing" => ConditionType::IsChanging,
            "in_range" => {
                let lo = self.parse_operand()?;
                if !self.expect_kw("to") {
                    self.sync_past_condition();
                    return None;
                }
                let hi = self.parse_operand()?;
                ConditionType::InRange { lo, hi }
            }
            "is_equal" => ConditionType::IsEqual(self.parse_operand()?),
            "is_lower" => ConditionType::IsLower(self.parse_operand()?),
            "is_lower_or_equal" => ConditionType::IsLowerOrEqual(self.parse_operand()?),
            "is_higher" => ConditionType::IsHigher(self.parse_operand()?),
            "is_higher_or_equal" => ConditionType::IsHigherOrEqual(self.parse_operand()?),
            "is_increasing" => ConditionType::IsIncreasing,
            "is_decreasing" => ConditionType::IsDecreasing,
            other => {
                self.diags.push(Diagnostic::error(
                    format!(
                        "unknown condition type {other:?}; expected changes_from, is_changing, \
                         in_range, is_equal, is_lower, is_lower_or_equal, is_higher, \
                         is_higher_or_equal, is_increasing or is_decreasing"
                    ),
                    ctype_span,
                ));
                self.sync_past_condition();
                return None;
            }
        };

        let mut time = None;
        if self.peek_kw("within") {
            let within_span = self.here();
            let parsed = self.parse_time_constraint()?;
            if ctype.is_change_family() {
                time = Some(parsed);
            } else {
                self.diags.push(Diagnostic::error(
                    format!(
                        "a time constraint is not allowed on {}; only changes_from, is_changing, \
                         is_increasing and is_decreasing observe a window",
                        ctype.keyword()
                    ),
                    within_span,
                ));
            }
        }

        if matches!(self.peek(), Some(Token { tok: Tok::Semicolon, .. })) {
            self.advance();
        } else {
            let found = self.describe();
            self.error_here(format!("expected \";\" after condition, found {found}"));
            self.sync_past_condition();
        }

        Some(Condition {
            station,
            sensor,
            ctype,
            time,
            span,
        })
    }

    fn parse_operand(&mut self) -> Option<Operand> {
        match self.peek() {
            Some(Token {
                tok: Tok::Number(v),
                ..
            }) => {
                let v = *v;
                self.advance();
                Some(Operand::Number(v))
            }
            Some(Token {
                tok: Tok::Ident(w), ..
            }) if !STRUCTURAL.contains(&w.as_str()) => {
                let w = w.clone();
                self.advance();
                Some(Operand::Label(w))
            }
            _ => {
                let found = self.describe();
                self.error_here(format!("expected a number or state label, found {found}"));
                self.sync_past_condition();
                None
            }
        }
    }

    fn parse_time_constraint(&mut self) -> Option<TimeConstraint> {
        self.advance();
        let amount = match self.peek() {
            Some(Token {
                tok: Tok::Number(v),
                ..
            }) => {
                let v = *v;
                if v <= 0.0 || v.fract() != 0.0 {
                    self.error_here("time amount must be a positive integer");
                    self.sync_past_condition();
                    return None;
                }
                self.advance();
                v as u64
            }
            _ => {
                let found = self.describe();
                self.error_here(format!("expected a time amount after \"within\", found {found}"));
                self.sync_past_condition();
                return None;
            }
        };
        let unit = match self.peek() {
            Some(Token {
                tok: Tok::Ident(w), ..
            }) => match w.as_str() {
                "millisecond" | "milliseconds" => TimeUnit::Milliseconds,
                "second" | "seconds" => TimeUnit::Seconds,
                "minute" | "minutes" => TimeUnit::Minutes,
                "hour" | "hours" => TimeUnit::Hours,
                other => {
                    let msg = format!(
                        "unknown time unit {other:?}; expected milliseconds, seconds, minutes or hours"
                    );
                    self.error_here(msg);
                    self.sync_past_condition();
                    return None;
                }
            },
            _ => {
                let found = self.describe();
                self.error_here(format!("expected a time unit, found {found}"));
                self.sync_past_condition();
                return None;
            }
        };
        self.advance();
        Some(TimeConstraint { amount, unit })
    }
}
