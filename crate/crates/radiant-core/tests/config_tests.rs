//! Configuration parsing and resolution against the bundled fixture files
//! plus targeted invariant checks.

use std::path::PathBuf;

use radiant_core::config::{
    parse_iot_config_with_env, ConfigError, SensorKind, SourceKind, ValueSpec,
};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn env(var: &str) -> Option<String> {
    (var == "MQTT_URL").then(|| "tcp://localhost:1883".to_string())
}

#[test]
fn factory_config_parses_and_resolves() {
    let system = parse_iot_config_with_env(&fixture("factory.yaml"), &env).unwrap();

    assert_eq!(system.stations.len(), 2);
    let sm1 = system.station("SM_1").unwrap();
    assert_eq!(sm1.name, "Sorting Machine");
    assert_eq!(sm1.sensors.len(), 5);

    let motor = system.sensor("SM_1", "m1_speed").unwrap();
    assert_eq!(motor.kind, SensorKind::Int);
    assert_eq!(motor.min_value, Some(-512.0));
    assert_eq!(motor.max_value, Some(512.0));
    assert_eq!(motor.resolve_label("off").unwrap(), ValueSpec::Exact(0.0));
    assert_eq!(motor.resolve_label("low").unwrap(), ValueSpec::Exact(-512.0));
    assert_eq!(
        motor.resolve_label("high").unwrap(),
        ValueSpec::Exact(512.0)
    );

    let valve = system.sensor("SM_1", "o5_valve").unwrap();
    assert_eq!(valve.resolve_label("open").unwrap(), ValueSpec::Exact(75.0));
    assert_eq!(
        valve.resolve_label("closed").unwrap(),
        ValueSpec::Exact(0.0)
    );

    let compressor = system.sensor("MM_1", "o8_compressor").unwrap();
    assert_eq!(compressor.resolve_label("on").unwrap(), ValueSpec::Exact(512.0));
    assert_eq!(compressor.resolve_label("off").unwrap(), ValueSpec::Exact(0.0));

    let source = system.source_of_station("SM_1").unwrap();
    match &source.kind {
        SourceKind::Mqtt { url, topic } => {
            assert_eq!(url, "tcp://localhost:1883");
            assert_eq!(topic, "FTFactory/SM_1");
        }
        other => panic!("expected mqtt source, got {other:?}"),
    }
    assert_eq!(source.client_id.as_deref(), Some("mqtt.SM_1.Sort"));
    assert!(system.warnings.is_empty(), "{:?}", system.warnings);
}

#[test]
fn switch_sensors_default_to_binary_states() {
    let system = parse_iot_config_with_env(&fixture("factory.yaml"), &env).unwrap();
    let barrier = system.sensor("SM_1", "i1_light_barrier").unwrap();
    assert_eq!(barrier.kind, SensorKind::Switch);
    assert_eq!(barrier.resolve_label("on").unwrap(), ValueSpec::Exact(1.0));
    assert_eq!(barrier.resolve_label("off").unwrap(), ValueSpec::Exact(0.0));
    assert_eq!(barrier.min_value, Some(0.0));
    assert_eq!(barrier.max_value, Some(1.0));
}

#[test]
fn discretization_bands_resolve_and_cover_the_line() {
    let system = parse_iot_config_with_env(&fixture("factory.yaml"), &env).unwrap();
    let color = system.sensor("SM_1", "i2_color_sensor").unwrap();
    assert_eq!(
        color.resolve_label("red").unwrap(),
        ValueSpec::Band {
            lo: f64::NEG_INFINITY,
            hi: 1725.0
        }
    );
    assert_eq!(
        color.resolve_label("blue").unwrap(),
        ValueSpec::Band {
            lo: 1725.0,
            hi: 1790.0
        }
    );
    assert_eq!(
        color.resolve_label("white").unwrap(),
        ValueSpec::Band {
            lo: 1790.0,
            hi: f64::INFINITY
        }
    );

    let d = color.discretization.as_ref().unwrap();
    assert_eq!(d.label_of(0.0), "red");
    assert_eq!(d.label_of(1724.9), "red");
    assert_eq!(d.label_of(1725.0), "blue");
    assert_eq!(d.label_of(1789.9), "blue");
    assert_eq!(d.label_of(1790.0), "white");
    assert_eq!(d.label_of(1e9), "white");
}

#[test]
fn healthcare_config_discretizes_without_intermediate_bands() {
    let system = parse_iot_config_with_env(&fixture("healthcare.yaml"), &env).unwrap();
    let cell = system.sensor("CHS", "load_cell").unwrap();
    assert_eq!(cell.kind, SensorKind::Float);
    assert_eq!(
        cell.resolve_label("low").unwrap(),
        ValueSpec::Band {
            lo: f64::NEG_INFINITY,
            hi: 1000.0
        }
    );
    assert_eq!(
        cell.resolve_label("high").unwrap(),
        ValueSpec::Band {
            lo: 1000.0,
            hi: f64::INFINITY
        }
    );
    assert!(system.station("LDS").is_some());
    assert!(system.warnings.is_empty(), "{:?}", system.warnings);
}

#[test]
fn unresolved_env_var_is_an_error() {
    let err = parse_iot_config_with_env(&fixture("factory.yaml"), &|_| None).unwrap_err();
    match err {
        ConfigError::UnresolvedVar { var, .. } => assert_eq!(var, "MQTT_URL"),
        other => panic!("expected unresolved variable error, got {other}"),
    }
}

#[test]
fn unknown_label_lists_the_valid_ones() {
    let system = parse_iot_config_with_env(&fixture("factory.yaml"), &env).unwrap();
    let valve = system.sensor("SM_1", "o5_valve").unwrap();
    match valve.resolve_label("ajar").unwrap_err() {
        ConfigError::UnknownLabel { label, valid, .. } => {
            assert_eq!(label, "ajar");
            assert_eq!(valid, vec!["open".to_string(), "closed".to_string()]);
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn station_source_references_are_checked() {
    let text = "
stations:
  - id: A
    source: Nowhere
    sensors:
      - id: s1
sources:
  - id: Somewhere
    type: file
    path: data.jsonl
    schema:
      ts: string
      s1: int
";
    let err = parse_iot_config_with_env(text, &env).unwrap_err();
    assert!(err.to_string().contains("Nowhere"), "{err}");
}

#[test]
fn schema_without_ts_is_rejected() {
    let text = "
stations:
  - id: A
    source: S
    sensors:
      - id: s1
sources:
  - id: S
    type: file
    path: data.jsonl
    schema:
      s1: int
";
    let err = parse_iot_config_with_env(text, &env).unwrap_err();
    assert!(err.to_string().contains("ts"), "{err}");
}
