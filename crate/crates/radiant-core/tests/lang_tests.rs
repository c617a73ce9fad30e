//! Parser, printer, and validator tests: fixture programs, structural
//! normalization, recovery, and the print/parse round-trip over generated
//! programs.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use radiant_core::config::parse_iot_config_with_env;
use radiant_core::lang::{
    gen, is_executable, parse_radiant, pretty_print, validate, ConditionType, Operand,
    ProcessDecl, Severity, TimeUnit,
};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn parse_clean(text: &str) -> ProcessDecl {
    let (process, diags) = parse_radiant(text);
    assert!(diags.is_empty(), "unexpected diagnostics: {diags:?}");
    process.expect("no process parsed")
}

fn errors(diags: &[radiant_core::lang::Diagnostic]) -> Vec<&str> {
    diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.message.as_str())
        .collect()
}

#[test]
fn production_fixture_structure() {
    let process = parse_clean(&fixture("production.rad"));
    assert_eq!(process.name, "Production");
    let names: Vec<&str> = process.activities.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["Mill_workpiece", "Sort_product"]);

    let sort = &process.activities[1];
    assert_eq!(sort.start.cases.len(), 1);
    assert_eq!(sort.start.cases[0].conditions.len(), 2);
    assert_eq!(sort.intermediates.len(), 1);
    assert_eq!(sort.end.cases.len(), 2);

    let c = &sort.start.cases[0].conditions[0];
    assert_eq!(c.station, "SM_1");
    assert_eq!(c.sensor, "m1_speed");
    assert_eq!(
        c.ctype,
        ConditionType::ChangesFrom {
            from: Operand::Number(0.0),
            to: Operand::Number(-512.0)
        }
    );

    let valve = &sort.end.cases[1].conditions[0];
    assert_eq!(valve.sensor, "o6_valve");
    assert_eq!(
        valve.ctype,
        ConditionType::ChangesFrom {
            from: Operand::Label("open".to_string()),
            to: Operand::Label("closed".to_string())
        }
    );
}

#[test]
fn sanitize_hands_carries_a_thirty_second_window() {
    let process = parse_clean(&fixture("blood_donation.rad"));
    assert_eq!(process.name, "Blood_donation");
    let activity = &process.activities[0];
    assert_eq!(activity.name, "Sanitize_hands");

    let time = activity.start.cases[0].conditions[0]
        .time
        .as_ref()
        .expect("start condition should carry a time constraint");
    assert_eq!(time.amount, 30);
    assert_eq!(time.unit, TimeUnit::Seconds);
    assert_eq!(time.to_millis(), 30_000);
}

#[test]
fn empty_process_is_rejected() {
    let (process, diags) = parse_radiant("Process P:");
    assert!(process.is_some());
    let errs = errors(&diags);
    assert_eq!(errs.len(), 1);
    assert!(
        errs[0].contains("requires at least one activity"),
        "{errs:?}"
    );
}

#[test]
fn bare_conditions_normalize_to_one_case() {
    let text = "
Process P:
  Activity a:
    Start:
      In S sensor x is_equal 1;
      In S sensor y is_equal 2;
      In S sensor z is_equal 3;
    End:
      Case: In S sensor x is_equal 0;
      Case: In S sensor y is_equal 0;
";
    let process = parse_clean(text);
    let a = &process.activities[0];
    assert_eq!(a.start.cases.len(), 1);
    assert_eq!(a.start.cases[0].conditions.len(), 3);
    assert_eq!(a.end.cases.len(), 2);
    assert_eq!(a.end.cases[0].conditions.len(), 1);
}

#[test]
fn mixed_bare_conditions_and_cases_warn_and_normalize() {
    let text = "
Process P:
  Activity a:
    Start:
      In S sensor x is_equal 1;
      Case: In S sensor y is_equal 2;
    End:
      In S sensor z is_equal 0;
";
    let (process, diags) = parse_radiant(text);
    let process = process.unwrap();
    assert!(errors(&diags).is_empty(), "{diags:?}");
    let warning = diags
        .iter()
        .find(|d| d.severity == Severity::Warning)
        .expect("expected a normalization warning");
    assert!(warning.message.contains("implicit case"), "{warning:?}");
    assert_eq!(process.activities[0].start.cases.len(), 2);
}

#[test]
fn whitespace_and_comments_are_insignificant() {
    let reference = parse_clean(&fixture("production.rad"));

    let squashed: String = fixture("production.rad")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    assert_eq!(parse_clean(&squashed), reference);

    let commented = fixture("production.rad").replace(
        "Activity Sort_product:",
        "// sorting by color\nActivity Sort_product: // two valves\n",
    );
    assert_eq!(parse_clean(&commented), reference);
}

#[test]
fn contextual_keywords_are_valid_identifiers() {
    let text = "
Process sensor:
  Activity within:
    Start:
      In to sensor from changes_from to to within_x within 5 seconds;
    End:
      In to sensor is_equal is_equal 1;
";
    let process = parse_clean(text);
    assert_eq!(process.name, "sensor");
    assert_eq!(process.activities[0].name, "within");
    let cond = &process.activities[0].start.cases[0].conditions[0];
    assert_eq!(cond.station, "to");
    assert_eq!(cond.sensor, "from");
    assert_eq!(
        cond.ctype,
        ConditionType::ChangesFrom {
            from: Operand::Label("to".to_string()),
            to: Operand::Label("within_x".to_string())
        }
    );
    assert_eq!(cond.time.as_ref().unwrap().amount, 5);
    assert_eq!(process.activities[0].end.cases[0].conditions[0].sensor, "is_equal");
}

#[test]
fn parser_recovers_and_reports_multiple_errors() {
    let text = "
Process P:
  Activity broken:
    Start:
      In S sensor x is_equal 1;
  Activity good:
    Start:
      In S sensor x is_equal 1;
    End:
      In S sensor x wobbles 1;
      In S sensor x is_equal 0;
";
    let (process, diags) = parse_radiant(text);
    let process = process.unwrap();
    let errs = errors(&diags);
    assert!(errs.len() >= 2, "{errs:?}");
    assert!(errs.iter().any(|m| m.contains("End")), "{errs:?}");
    assert!(errs.iter().any(|m| m.contains("wobbles")), "{errs:?}");
    assert_eq!(process.activities.len(), 1, "only the recoverable activity survives");
    assert_eq!(process.activities[0].name, "good");
}

#[test]
fn diagnostics_point_at_the_offending_token() {
    let text = "Process P:\n  Activity a:\n    Start:\n      In S sensor x wobbles 1;\n    End:\n      In S sensor x is_equal 0;\n";
    let (_, diags) = parse_radiant(text);
    let err = diags
        .iter()
        .find(|d| d.message.contains("wobbles"))
        .expect("expected unknown-condition diagnostic");
    assert_eq!(err.span.line, 4);
    assert_eq!(err.span.col, 21);
    let rendered = err.render("prog.rad");
    assert!(rendered.starts_with("prog.rad:4:21: error: "), "{rendered}");
}

#[test]
fn time_constraints_only_attach_to_change_conditions() {
    let text = "
Process P:
  Activity a:
    Start:
      In S sensor x is_equal 1 within 5 seconds;
    End:
      In S sensor x is_lower 0 within 2 minutes;
";
    let (process, diags) = parse_radiant(text);
    let errs = errors(&diags);
    assert_eq!(errs.len(), 2, "{errs:?}");
    assert!(errs[0].contains("is_equal"), "{errs:?}");
    assert!(errs[1].contains("is_lower"), "{errs:?}");
    let process = process.unwrap();
    for pattern in [&process.activities[0].start, &process.activities[0].end] {
        assert!(pattern.cases[0].conditions[0].time.is_none());
    }
}

#[test]
fn all_time_units_convert_to_milliseconds() {
    let text = "
Process P:
  Activity a:
    Start:
      In S sensor a is_changing within 250 milliseconds;
      In S sensor b is_changing within 1 millisecond;
      In S sensor c is_increasing within 2 seconds;
      In S sensor d is_decreasing within 3 minutes;
      In S sensor e is_changing within 1 hour;
    End:
      In S sensor f is_changing within 1 second;
";
    let process = parse_clean(text);
    let ms: Vec<u64> = process.activities[0].start.cases[0]
        .conditions
        .iter()
        .map(|c| c.time.as_ref().unwrap().to_millis())
        .collect();
    assert_eq!(ms, [250, 1, 2_000, 180_000, 3_600_000]);
}

#[test]
fn malformed_operand_arity_is_rejected() {
    let cases = [
        "Process P:\n  Activity a:\n    Start:\n      In S sensor x is_equal 1 2;\n    End:\n      In S sensor x is_equal 0;\n",
        "Process P:\n  Activity a:\n    Start:\n      In S sensor x changes_from 1;\n    End:\n      In S sensor x is_equal 0;\n",
        "Process P:\n  Activity a:\n    Start:\n      In S sensor x in_range 5 to;\n    End:\n      In S sensor x is_equal 0;\n",
        "Process P:\n  Activity a:\n    Start:\n      In S sensor x is_changing 3;\n    End:\n      In S sensor x is_equal 0;\n",
        "Process P:\n  Activity a:\n    Start:\n      In S sensor x is_lower;\n    End:\n      In S sensor x is_equal 0;\n",
    ];
    for text in cases {
        let (_, diags) = parse_radiant(text);
        assert!(!errors(&diags).is_empty(), "accepted: {text}");
    }
}

#[test]
fn duplicate_activity_names_are_rejected() {
    let text = "
Process P:
  Activity a:
    Start: In S sensor x is_equal 1;
    End: In S sensor x is_equal 0;
  Activity a:
    Start: In S sensor y is_equal 1;
    End: In S sensor y is_equal 0;
";
    let (_, diags) = parse_radiant(text);
    assert!(errors(&diags).iter().any(|m| m.contains("duplicate")), "{diags:?}");
}

#[test]
fn round_trip_of_fixture_programs() {
    for name in ["production.rad", "blood_donation.rad"] {
        let reference = parse_clean(&fixture(name));
        let printed = pretty_print(&reference);
        let reparsed = parse_clean(&printed);
        assert_eq!(reparsed, reference, "round-trip drift for {name}");
    }
}

#[test]
fn round_trip_of_generated_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    for i in 0..1000 {
        let process = gen::random_process(&mut rng);
        let printed = pretty_print(&process);
        let (reparsed, diags) = parse_radiant(&printed);
        assert!(
            diags.is_empty(),
            "program {i} produced diagnostics {diags:?}\n{printed}"
        );
        assert_eq!(reparsed.as_ref(), Some(&process), "round-trip drift\n{printed}");
    }
}

#[test]
fn printed_programs_use_case_blocks_only_for_multiple_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let process = gen::random_process(&mut rng);
        let printed = pretty_print(&process);
        for activity in &process.activities {
            let patterns =
                std::iter::once(&activity.start).chain(activity.intermediates.iter());
            for pattern in patterns.chain(std::iter::once(&activity.end)) {
                if pattern.cases.len() == 1 {
                    continue;
                }
                let occurrences = printed.matches("Case:").count();
                assert!(occurrences >= pattern.cases.len());
            }
        }
    }
}

fn factory() -> radiant_core::config::IoTSystem {
    parse_iot_config_with_env(&fixture("factory.yaml"), &|var| {
        (var == "MQTT_URL").then(|| "tcp://localhost:1883".to_string())
    })
    .unwrap()
}

#[test]
fn production_program_validates_cleanly_against_factory_config() {
    let process = parse_clean(&fixture("production.rad"));
    let diags = validate(&process, &factory());
    assert!(diags.is_empty(), "{diags:?}");
    assert!(is_executable(&diags));
}

#[test]
fn out_of_range_values_are_reported() {
    let text = "
Process P:
  Activity a:
    Start: In SM_1 sensor m1_speed is_equal 9999;
    End: In SM_1 sensor m1_speed is_equal 0;
";
    let process = parse_clean(text);
    let diags = validate(&process, &factory());
    let errs = errors(&diags);
    assert_eq!(errs.len(), 1, "{errs:?}");
    assert!(errs[0].contains("9999"), "{errs:?}");
    assert!(errs[0].contains("[-512, 512]"), "{errs:?}");
    assert!(!is_executable(&diags));
}

#[test]
fn unknown_station_and_sensor_are_reported() {
    let text = "
Process P:
  Activity a:
    Start: In XX_9 sensor foo is_equal 1;
    End: In SM_1 sensor bar is_equal 0;
";
    let process = parse_clean(text);
    let diags = validate(&process, &factory());
    let errs = errors(&diags);
    assert_eq!(errs.len(), 2, "{errs:?}");
    assert!(errs[0].contains("XX_9"), "{errs:?}");
    assert!(errs[1].contains("bar"), "{errs:?}");
}

#[test]
fn unresolvable_labels_list_the_valid_ones() {
    let text = "
Process P:
  Activity a:
    Start: In SM_1 sensor o5_valve changes_from ajar to closed;
    End: In SM_1 sensor o5_valve is_equal closed;
";
    let process = parse_clean(text);
    let diags = validate(&process, &factory());
    let errs = errors(&diags);
    assert_eq!(errs.len(), 1, "{errs:?}");
    assert!(errs[0].contains("ajar"), "{errs:?}");
    assert!(errs[0].contains("open"), "{errs:?}");
}

#[test]
fn in_range_requires_ordered_numeric_bounds() {
    let text = "
Process P:
  Activity a:
    Start: In SM_1 sensor m1_speed in_range 500 to 100;
    End: In SM_1 sensor m1_speed is_equal 0;
";
    let process = parse_clean(text);
    let diags = validate(&process, &factory());
    assert!(
        errors(&diags).iter().any(|m| m.contains("lower < upper")),
        "{diags:?}"
    );
}

#[test]
fn band_labels_cannot_serve_as_comparison_operands() {
    let text = "
Process P:
  Activity a:
    Start: In SM_1 sensor i2_color_sensor is_higher red;
    End: In SM_1 sensor i2_color_sensor is_changing;
";
    let process = parse_clean(text);
    let diags = validate(&process, &factory());
    let errs = errors(&diags);
    assert_eq!(errs.len(), 1, "{errs:?}");
    assert!(errs[0].contains("value band"), "{errs:?}");
}

#[test]
fn self_transition_warns_but_stays_executable() {
    let text = "
Process P:
  Activity a:
    Start: In SM_1 sensor m1_speed changes_from 0 to 0;
    End: In SM_1 sensor m1_speed is_equal 0;
";
    let process = parse_clean(text);
    let diags = validate(&process, &factory());
    assert!(errors(&diags).is_empty(), "{diags:?}");
    assert_eq!(diags.len(), 1, "{diags:?}");
    assert!(diags[0].message.contains("never matches"), "{diags:?}");
    assert!(is_executable(&diags));
}
