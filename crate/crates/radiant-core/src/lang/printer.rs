//! Canonical formatter: prints an AST back to source text.
//!
//! Single-case patterns are printed as bare conditions, multi-case patterns
//! with explicit `Case:` blocks, so parsing the output yields a structurally
//! equal AST.

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(process: &ProcessDecl) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Process {}:", process.name);
    for activity in &process.activities {
        out.push('\n');
        let _ = writeln!(out, "  Activity {}:", activity.name);
        print_pattern(&mut out, &activity.start);
        for p in &activity.intermediates {
            print_pattern(&mut out, p);
        }
        print_pattern(&mut out, &activity.end);
    }
    out
}

fn print_pattern(out: &mut String, pattern: &Pattern) {
    let _ = writeln!(out, "    {}:", pattern.kind.keyword());
    if pattern.cases.len() == 1 {
        for cond in &pattern.cases[0].conditions {
            let _ = writeln!(out, "      {}", format_condition(cond));
        }
    } else {
        for case in &pattern.cases {
            let _ = writeln!(out, "      Case:");
            for cond in &case.conditions {
                let _ = writeln!(out, "        {}", format_condition(cond));
            }
        }
    }
}

fn format_condition(cond: &Condition) -> String {
    let mut s = format!("In {} sensor {} ", cond.station, cond.sensor);
    match &cond.ctype {
        ConditionType::ChangesFrom { from, to } => {
            let _ = write!(s, "changes_from {} to {}", operand(from), operand(to));
        }
        ConditionType::IsChanging => s.push_str("is_changing"),
        ConditionType::InRange { lo, hi } => {
            let _ = write!(s, "in_range {} to {}", operand(lo), operand(hi));
        }
        ConditionType::IsEqual(v) => {
            let _ = write!(s, "is_equal {}", operand(v));
        }
        ConditionType::IsLower(v) => {
            let _ = write!(s, "is_lower {}", operand(v));
        }
        ConditionType::IsLowerOrEqual(v) => {
            let _ = write!(s, "is_lower_or_equal {}", operand(v));
        }
        ConditionType::IsHigher(v) => {
            let _ = write!(s, "is_higher {}", operand(v));
        }
        ConditionType::IsHigherOrEqual(v) => {
            let _ = write!(s, "is_higher_or_equal {}", operand(v));
        }
        ConditionType::IsIncreasing => s.push_str("is_increasing"),
        ConditionType::IsDecreasing => s.push_str("is_decreasing"),
    }
    if let Some(t) = &cond.time {
        let _ = write!(s, " within {} {}", t.amount, t.unit.keyword());
    }
    s.push(';');
    s
}

fn operand(op: &Operand) -> String {
    match op {
        Operand::Number(v) => format_number(*v),
        Operand::Label(l) => l.clone(),
    }
}

/// Formats without a trailing `.0` for integral values; the literal syntax
/// has no exponent form, so values stay within a plain decimal notation.
pub(crate) fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}
