//! Random program generator for round-trip and fuzz tests.
//!
//! Generated identifiers start with a lowercase letter, so they can never
//! collide with the capitalized structural keywords; all other keywords are
//! contextual and safe to reuse as names.

use rand::Rng;

use super::ast::*;

pub fn random_process(rng: &mut impl Rng) -> ProcessDecl {
    let n_activities = rng.gen_range(1..=4);
    let activities = (0..n_activities)
        .map(|i| random_activity(rng, i))
        .collect();
    ProcessDecl {
        name: random_ident(rng),
        activities,
        span: Span::default(),
    }
}

fn random_activity(rng: &mut impl Rng, index: usize) -> ActivityDecl {
    let n_intermediates = rng.gen_range(0..=2);
    ActivityDecl {
        name: format!("{}_{index}", random_ident(rng)),
        start: random_pattern(rng, PatternKind::Start),
        intermediates: (0..n_intermediates)
            .map(|_| random_pattern(rng, PatternKind::Intermediate))
            .collect(),
        end: random_pattern(rng, PatternKind::End),
        span: Span::default(),
    }
}

fn random_pattern(rng: &mut impl Rng, kind: PatternKind) -> Pattern {
    let n_cases = rng.gen_range(1..=3);
    let cases = (0..n_cases)
        .map(|_| Case {
            conditions: (0..rng.gen_range(1..=3))
                .map(|_| random_condition(rng))
                .collect(),
            span: Span::default(),
        })
        .collect();
    Pattern {
        kind,
        cases,
        span: Span::default(),
    }
}

fn random_condition(rng: &mut impl Rng) -> Condition {
    let ctype = match rng.gen_range(0..10) {
        0 => ConditionType::ChangesFrom {
            from: random_operand(rng),
            to: random_operand(rng),
        },
        1 => ConditionType::IsChanging,
        2 => ConditionType::InRange {
            lo: random_operand(rng),
            hi: random_operand(rng),
        },
        3 => ConditionType::IsEqual(random_operand(rng)),
        4 => ConditionType::IsLower(random_operand(rng)),
        5 => ConditionType::IsLowerOrEqual(random_operand(rng)),
        6 => ConditionType::IsHigher(random_operand(rng)),
        7 => ConditionType::IsHigherOrEqual(random_operand(rng)),
        8 => ConditionType::IsIncreasing,
        _ => ConditionType::IsDecreasing,
    };
    let time = if ctype.is_change_family() && rng.gen_bool(0.5) {
        Some(TimeConstraint {
            amount: rng.gen_range(1..=600),
            unit: match rng.gen_range(0..4) {
                0 => TimeUnit::Milliseconds,
                1 => TimeUnit::Seconds,
                2 => TimeUnit::Minutes,
                _ => TimeUnit::Hours,
            },
        })
    } else {
        None
    };
    Condition {
        station: random_ident(rng),
        sensor: random_ident(rng),
        ctype,
        time,
        span: Span::default(),
    }
}

fn random_operand(rng: &mut impl Rng) -> Operand {
    if rng.gen_bool(0.5) {
        // Halves stay exact in binary and survive formatting round-trips.
        Operand::Number(rng.gen_range(-2000..=2000) as f64 / 2.0)
    } else {
        Operand::Label(random_ident(rng))
    }
}

fn random_ident(rng: &mut impl Rng) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_";
    let mut s = String::new();
    s.push(FIRST[rng.gen_range(0..FIRST.len())] as char);
    for _ in 0..rng.gen_range(0..8) {
        s.push(REST[rng.gen_range(0..REST.len())] as char);
    }
    s
}
