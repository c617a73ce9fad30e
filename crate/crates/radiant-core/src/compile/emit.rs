//! Renders a compiled detector as a CEP query script.
//!
//! The script is a human-auditable reference artifact mirroring what the
//! detector executes; the JSON specification remains the executable truth.
//! Every pattern is expressed over an adjacent pair of events `e1`, `e2` on
//! the station's stream: change conditions compare the two events,
//! instantaneous conditions test `e2`.

use std::fmt::Write;

use crate::config::{FieldType, IoTSystem, SinkKind, SourceDecl, SourceKind, ValueSpec};
use crate::lang::format_number;

use super::lower::{CompiledCondition, CompiledPattern, DetectorSpec, PatternStage, Predicate};

pub fn emit_query_text(spec: &DetectorSpec, system: &IoTSystem) -> String {
    let activity = display(&spec.activity);
    let mut out = String::new();

    let _ = writeln!(
        out,
        "@App:name('{}-{}')",
        display(&spec.process),
        activity
    );

    let sources: Vec<&SourceDecl> = {
        let mut seen = Vec::new();
        for b in &spec.subscribed_stations {
            if !seen.iter().any(|s: &&SourceDecl| s.id == b.source) {
                if let Some(s) = system.source(&b.source) {
                    seen.push(s);
                }
            }
        }
        seen
    };
    let merged = sources.len() > 1;

    for source in &sources {
        out.push('\n');
        emit_source(&mut out, source);
    }

    let stream = if merged {
        out.push('\n');
        let _ = writeln!(
            out,
            "/* {} spans stations on multiple sources; the runtime merges their events by ts */",
            activity
        );
        emit_merged_stream(&mut out, spec, system);
        "MergedStream"
    } else {
        sources[0].id.as_str()
    };

    out.push('\n');
    let _ = writeln!(
        out,
        "define stream DetectedPatterns(event string, activity string, ts string);"
    );

    out.push('\n');
    if system.sinks.is_empty() {
        let _ = writeln!(out, "@sink(type = 'log')");
    } else {
        for sink in &system.sinks {
            match &sink.kind {
                SinkKind::Log => {
                    let _ = writeln!(out, "@sink(type = 'log')");
                }
                SinkKind::File { path } => {
                    let _ = writeln!(
                        out,
                        "@sink(type = 'file', file.uri = 'file:{path}', @map(type = 'json'))"
                    );
                }
            }
        }
    }
    let _ = writeln!(
        out,
        "define stream DetectedActivities(activity string, ts_start string, ts_end string);"
    );

    let n_intermediates = spec.intermediate_count();
    for pattern in &spec.pattern_chain {
        out.push('\n');
        emit_pattern_query(&mut out, pattern, stream, &activity, merged, n_intermediates);
    }

    out.push('\n');
    emit_sequencing_query(&mut out, spec, &activity, n_intermediates);

    out
}

/// `Sort_product` is addressed as `Sort product` in generated apps.
fn display(ident: &str) -> String {
    ident.replace('_', " ")
}

fn field_type(t: FieldType) -> &'static str {
    match t {
        FieldType::String => "string",
        FieldType::Int => "int",
        FieldType::Float => "double",
    }
}

fn emit_source(out: &mut String, source: &SourceDecl) {
    match &source.kind {
        SourceKind::Mqtt { url, topic } => {
            let _ = writeln!(
                out,
                "@source(type = 'mqtt', url = '{url}', topic = '{topic}', client.id = '{}', @map(type = 'json'))",
                source.effective_client_id()
            );
        }
        SourceKind::File { path } => {
            let _ = writeln!(
                out,
                "@source(type = 'file', file.uri = 'file:{path}', @map(type = 'json'))"
            );
        }
    }
    let fields: Vec<String> = source
        .schema
        .iter()
        .map(|(name, t)| format!("{name} {}", field_type(*t)))
        .collect();
    let _ = writeln!(out, "define stream {}({});", source.id, fields.join(", "));
}

fn emit_merged_stream(out: &mut String, spec: &DetectorSpec, system: &IoTSystem) {
    let mut fields = vec!["ts string".to_string()];
    for binding in &spec.subscribed_stations {
        let Some(source) = system.source(&binding.source) else {
            continue;
        };
        for (name, t) in &source.schema {
            if name == "ts" {
                continue;
            }
            fields.push(format!("{}_{name} {}", binding.station, field_type(*t)));
        }
    }
    let _ = writeln!(out, "define stream MergedStream({});", fields.join(", "));
}

fn pattern_label(pattern: &CompiledPattern, n_intermediates: usize) -> String {
    match pattern.kind {
        PatternStage::Start => "StartPattern".to_string(),
        PatternStage::End => "EndPattern".to_string(),
        PatternStage::Intermediate => {
            if n_intermediates == 1 {
                "IntermediatePattern".to_string()
            } else {
                format!("IntermediatePattern{}", pattern.index.unwrap_or(0) + 1)
            }
        }
    }
}

fn emit_pattern_query(
    out: &mut String,
    pattern: &CompiledPattern,
    stream: &str,
    activity: &str,
    merged: bool,
    n_intermediates: usize,
) {
    let label = pattern_label(pattern, n_intermediates);

    let cases: Vec<String> = pattern
        .cases
        .iter()
        .map(|case| {
            case.conditions
                .iter()
                .map(|c| clause(c, merged))
                .collect::<Vec<_>>()
                .join(" and ")
        })
        .collect();
    let filter = if cases.len() == 1 {
        cases[0].clone()
    } else {
        cases
            .iter()
            .map(|c| format!("({c})"))
            .collect::<Vec<_>>()
            .join(" or ")
    };

    let windows: Vec<u64> = pattern
        .cases
        .iter()
        .flat_map(|c| &c.conditions)
        .filter_map(|c| c.window_ms)
        .collect();
    let mut within = String::new();
    if let Some(&first) = windows.first() {
        if windows.iter().all(|&w| w == first) {
            within = format!(" within {first} millisec");
        } else {
            let _ = writeln!(
                out,
                "/* conditions carry different time windows; the compiled detector enforces them individually */"
            );
        }
    }

    let ts_var = match pattern.kind {
        PatternStage::End => "e1",
        _ => "e2",
    };

    let _ = writeln!(out, "@info(name='{label}')");
    let _ = writeln!(
        out,
        "from every e1 = {stream}, e2 = {stream}[{filter}]{within}"
    );
    let _ = writeln!(
        out,
        "select '{label}' as event, '{activity}' as activity, {ts_var}.ts as ts"
    );
    let _ = writeln!(out, "insert into DetectedPatterns;");
}

fn emit_sequencing_query(
    out: &mut String,
    spec: &DetectorSpec,
    activity: &str,
    n_intermediates: usize,
) {
    let mut from = String::from("from every e1 = DetectedPatterns[event == 'StartPattern']");
    let mut var = 1;
    for pattern in &spec.pattern_chain {
        if pattern.kind == PatternStage::Start {
            continue;
        }
        var += 1;
        let _ = write!(
            from,
            " -> not DetectedPatterns[event == 'StartPattern'] and e{var} = DetectedPatterns[event == '{}']",
            pattern_label(pattern, n_intermediates)
        );
    }

    let _ = writeln!(out, "@info(name='Detect-Activity')");
    let _ = writeln!(out, "{from}");
    let _ = writeln!(
        out,
        "select '{activity}' as activity, e1.ts as ts_start, e{var}.ts as ts_end"
    );
    let _ = writeln!(out, "insert into DetectedActivities;");
}

/// One condition as a filter expression; `e1` is the previous event and `e2`
/// the current one.
fn clause(cond: &CompiledCondition, merged: bool) -> String {
    let var = |event: &str| -> String {
        if merged {
            format!("{event}.{}_{}", cond.station, cond.sensor)
        } else {
            format!("{event}.{}", cond.sensor)
        }
    };
    match &cond.predicate {
        Predicate::ChangesFrom { from, to } => {
            format!("({} and {})", member(&var("e1"), from), member(&var("e2"), to))
        }
        Predicate::IsChanging => format!("({}!={})", var("e2"), var("e1")),
        Predicate::InRange { lo, hi } => format!(
            "({}>={} and {}<={})",
            var("e2"),
            format_number(*lo),
            var("e2"),
            format_number(*hi)
        ),
        Predicate::IsEqual { value } => format!("({})", member(&var("e2"), value)),
        Predicate::IsLower { value } => format!("({}<{})", var("e2"), format_number(*value)),
        Predicate::IsLowerOrEqual { value } => {
            format!("({}<={})", var("e2"), format_number(*value))
        }
        Predicate::IsHigher { value } => format!("({}>{})", var("e2"), format_number(*value)),
        Predicate::IsHigherOrEqual { value } => {
            format!("({}>={})", var("e2"), format_number(*value))
        }
        Predicate::IsIncreasing => format!("({}>{})", var("e2"), var("e1")),
        Predicate::IsDecreasing => format!("({}<{})", var("e2"), var("e1")),
    }
}

/// Membership test for a resolved value: equality for exact values, boundary
/// comparisons for half-open bands.
fn member(var: &str, spec: &ValueSpec) -> String {
    match spec {
        ValueSpec::Exact(v) => format!("{var}=={}", format_number(*v)),
        ValueSpec::Band { lo, hi } => {
            let lo_term = lo.is_finite().then(|| format!("{var}>={}", format_number(*lo)));
            let hi_term = hi.is_finite().then(|| format!("{var}<{}", format_number(*hi)));
            match (lo_term, hi_term) {
                (Some(l), Some(h)) => format!("({l} and {h})"),
                (Some(l), None) => l,
                (None, Some(h)) => h,
                (None, None) => "true".to_string(),
            }
        }
    }
}
