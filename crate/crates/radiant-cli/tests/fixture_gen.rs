//! Regenerates the bundled replay fixture deterministically.
//!
//! The generator plans every activity execution first (the intent), renders
//! sensor rows realizing that plan, and only accepts the result if the
//! detection pipeline reproduces the intent exactly. Three anomalies are
//! injected on purpose: a phantom sort cycle (no ground truth), a mid-run
//! restart (late detection start), and a glitched mill boundary pair that
//! welds two executions into one detection.
//!
//! Run explicitly to refresh the files:
//!   cargo test -p radiant-cli --test fixture_gen -- --ignored

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radiant_core::engine::{run_replay, EventHooks, ReplayOptions};
use radiant_core::eval::{evaluate, EvalOptions, IntervalLog};
use radiant_core::time::format_ts;
use radiant_core::{compile, parse_iot_config, parse_radiant, validate};

const SEED: u64 = 0xFAB;
/// 2024-03-11 06:00:00 UTC.
const START_MS: i64 = 1_710_136_800_000;
const STEP_MS: i64 = 500;

const STORE: &str = "Store_workpiece";
const MILL: &str = "Mill_workpiece";
const SORT: &str = "Sort_product";

type Span = (&'static str, i64, i64);

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/replay")
}

/// Renders one station's rows; every row carries the full sensor state.
struct StationTrace {
    t: i64,
    state: Vec<(String, i64)>,
    rows: Vec<String>,
}

impl StationTrace {
    fn new(offset: i64, fields: &[(&str, i64)]) -> StationTrace {
        StationTrace {
            t: START_MS + offset,
            state: fields.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            rows: Vec::new(),
        }
    }

    fn row(&mut self, changes: &[(&str, i64)]) -> i64 {
        for (key, value) in changes {
            let slot = self
                .state
                .iter_mut()
                .find(|(name, _)| name == key)
                .expect("field declared in the schema");
            slot.1 = *value;
        }
        let mut obj = serde_json::Map::new();
        obj.insert("ts".into(), format_ts(self.t).into());
        for (key, value) in &self.state {
            obj.insert(key.clone(), (*value).into());
        }
        self.rows.push(serde_json::Value::Object(obj).to_string());
        let ts = self.t;
        self.t += STEP_MS;
        ts
    }

    fn idle(&mut self, n: usize) {
        for _ in 0..n {
            self.row(&[]);
        }
    }
}

struct Plan {
    rows: Vec<String>,
    gt: Vec<Span>,
    det: Vec<Span>,
}

fn gen_store(rng: &mut ChaCha8Rng) -> Plan {
    let mut tr = StationTrace::new(0, &[("i1_pos_switch", 0), ("m1_speed", 0)]);
    let (mut gt, mut det) = (Vec::new(), Vec::new());
    tr.idle(2);
    for i in 0..7 {
        tr.idle(rng.gen_range(3..9));
        if i == 3 {
            // The position switch drops out mid-run: the detector closes
            // early and a second detection covers the remainder.
            let s = tr.row(&[("i1_pos_switch", 1)]);
            tr.row(&[("m1_speed", 400)]);
            tr.idle(1);
            let dip = tr.row(&[("i1_pos_switch", 0)]);
            let re = tr.row(&[("i1_pos_switch", 1)]);
            tr.idle(rng.gen_range(2..5));
            tr.row(&[("m1_speed", 0)]);
            let e = tr.row(&[("i1_pos_switch", 0)]);
            gt.push((STORE, s, e));
            det.push((STORE, s, dip));
            det.push((STORE, re, e));
        } else {
            let s = tr.row(&[("i1_pos_switch", 1)]);
            tr.row(&[("m1_speed", 400)]);
            tr.idle(rng.gen_range(2..6));
            tr.row(&[("m1_speed", 0)]);
            let e = tr.row(&[("i1_pos_switch", 0)]);
            gt.push((STORE, s, e));
            det.push((STORE, s, e));
        }
    }
    tr.idle(3);
    Plan { rows: tr.rows, gt, det }
}

fn gen_mill(rng: &mut ChaCha8Rng) -> Plan {
    let mut tr = StationTrace::new(137, &[("m1_speed", 0), ("o8_compressor", 0)]);
    let (mut gt, mut det) = (Vec::new(), Vec::new());
    tr.idle(2);
    let mut i = 0;
    while i < 8 {
        tr.idle(rng.gen_range(3..9));
        if i == 4 {
            // Spin-down and spin-up glitches hide the boundary between two
            // runs, so one detection spans both.
            let s1 = tr.row(&[("m1_speed", 512)]);
            tr.idle(rng.gen_range(2..5));
            tr.row(&[("m1_speed", 37)]);
            let e1 = tr.row(&[("m1_speed", 0)]);
            tr.idle(rng.gen_range(3..6));
            tr.row(&[("m1_speed", 41)]);
            let s2 = tr.row(&[("m1_speed", 512)]);
            tr.idle(rng.gen_range(2..5));
            let e2 = tr.row(&[("m1_speed", 0)]);
            gt.push((MILL, s1, e1));
            gt.push((MILL, s2, e2));
            det.push((MILL, s1, e2));
            i += 2;
        } else {
            let s = tr.row(&[("m1_speed", 512)]);
            tr.idle(rng.gen_range(2..6));
            let e = tr.row(&[("m1_speed", 0)]);
            gt.push((MILL, s, e));
            det.push((MILL, s, e));
            i += 1;
        }
    }
    tr.idle(3);
    Plan { rows: tr.rows, gt, det }
}

fn gen_sort(rng: &mut ChaCha8Rng) -> Plan {
    let mut tr = StationTrace::new(
        281,
        &[
            ("i1_light_barrier", 0),
            ("i2_color_sensor", 1761),
            ("m1_speed", 0),
            ("o5_valve", 75),
        ],
    );
    let (mut gt, mut det) = (Vec::new(), Vec::new());
    let mut color = 1761;
    let mut flip = move || {
        color = if color == 1761 { 1802 } else { 1761 };
        color
    };
    tr.idle(2);
    for i in 0..8 {
        tr.idle(rng.gen_range(3..9));
        if i == 2 {
            // A belt jitter re-arms the start pattern mid-run; the detection
            // begins at the restart.
            let s = tr.row(&[("m1_speed", -512), ("i1_light_barrier", 1)]);
            tr.row(&[("i2_color_sensor", flip())]);
            tr.idle(1);
            tr.row(&[("m1_speed", 0)]);
            let rs = tr.row(&[("m1_speed", -512)]);
            tr.row(&[("i2_color_sensor", flip())]);
            tr.idle(rng.gen_range(1..4));
            let e = tr.row(&[("o5_valve", 0)]);
            tr.row(&[("o5_valve", 75), ("m1_speed", 0), ("i1_light_barrier", 0)]);
            gt.push((SORT, s, e));
            det.push((SORT, rs, e));
        } else {
            let s = tr.row(&[("m1_speed", -512), ("i1_light_barrier", 1)]);
            tr.row(&[("i2_color_sensor", flip())]);
            tr.idle(rng.gen_range(1..4));
            let e = tr.row(&[("o5_valve", 0)]);
            tr.row(&[("o5_valve", 75), ("m1_speed", 0), ("i1_light_barrier", 0)]);
            gt.push((SORT, s, e));
            det.push((SORT, s, e));
        }
        if i == 5 {
            // A conveyor test cycle runs the full pattern with no real sort.
            tr.idle(rng.gen_range(3..6));
            let ps = tr.row(&[("m1_speed", -512), ("i1_light_barrier", 1)]);
            tr.row(&[("i2_color_sensor", flip())]);
            tr.idle(1);
            let pe = tr.row(&[("o5_valve", 0)]);
            tr.row(&[("o5_valve", 75), ("m1_speed", 0), ("i1_light_barrier", 0)]);
            det.push((SORT, ps, pe));
        }
    }
    tr.idle(3);
    Plan { rows: tr.rows, gt, det }
}

fn interval_line(activity: &str, start: i64, end: i64) -> String {
    format!(
        r#"{{"activity":"{activity}","ts_start":"{}","ts_end":"{}"}}"#,
        format_ts(start),
        format_ts(end)
    )
}

fn write_lines(path: &Path, lines: &[String]) {
    let mut text = lines.join("\n");
    text.push('\n');
    fs::write(path, text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
}

#[test]
#[ignore = "rewrites fixtures/replay; run explicitly"]
fn regenerate_replay_fixture() {
    let dir = fixture_dir();
    fs::create_dir_all(&dir).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let store = gen_store(&mut rng);
    let mill = gen_mill(&mut rng);
    let sort = gen_sort(&mut rng);

    let mut gt: Vec<Span> = Vec::new();
    let mut intent: Vec<Span> = Vec::new();
    for plan in [&store, &mill, &sort] {
        gt.extend(&plan.gt);
        intent.extend(&plan.det);
    }
    gt.sort_by_key(|&(activity, s, _)| (s, activity));
    intent.sort_by_key(|&(_, _, e)| e);

    assert!(gt.len() >= 20, "need at least 20 executions, have {}", gt.len());

    write_lines(&dir.join("hbw_1.jsonl"), &store.rows);
    write_lines(&dir.join("mm_1.jsonl"), &mill.rows);
    write_lines(&dir.join("sm_1.jsonl"), &sort.rows);
    let gt_lines: Vec<String> = gt.iter().map(|&(a, s, e)| interval_line(a, s, e)).collect();
    write_lines(&dir.join("ground_truth.jsonl"), &gt_lines);

    // The pipeline must reproduce the plan exactly before anything is
    // accepted as an expectation.
    let system = parse_iot_config(&fs::read_to_string(dir.join("line.yaml")).unwrap()).unwrap();
    let (ast, diags) = parse_radiant(&fs::read_to_string(dir.join("line.rad")).unwrap());
    let process = ast.expect("fixture program parses");
    assert!(diags.is_empty(), "fixture program is clean: {diags:?}");
    assert!(validate(&process, &system).is_empty());
    let specs = compile(&process, &system).unwrap();
    assert_eq!(specs.len(), 3);

    let inputs = vec![
        ("HBW_1".to_string(), dir.join("hbw_1.jsonl")),
        ("MM_1".to_string(), dir.join("mm_1.jsonl")),
        ("SM_1".to_string(), dir.join("sm_1.jsonl")),
    ];
    let mut sink = |_: &radiant_core::ActivityDetection| -> io::Result<()> { Ok(()) };
    let mut hooks = EventHooks {
        on_pattern: None,
        on_detection: &mut sink,
    };
    let (summary, detections) =
        run_replay(&system, &specs, &inputs, &ReplayOptions::default(), &mut hooks).unwrap();

    assert_eq!(summary.skipped_payloads, 0);
    assert_eq!(summary.dropped_out_of_order, 0);
    assert!(summary.warnings.is_empty(), "{:?}", summary.warnings);

    let produced: Vec<Span> = detections
        .iter()
        .map(|d| {
            assert_eq!(d.process, "Assembly_line");
            let activity = [STORE, MILL, SORT]
                .into_iter()
                .find(|a| *a == d.activity)
                .expect("known activity");
            (activity, d.ts_start, d.ts_end)
        })
        .collect();
    assert_eq!(produced, intent, "pipeline output must match the plan");

    let det_lines: Vec<String> = detections.iter().map(|d| d.to_json_line()).collect();
    write_lines(&dir.join("expected_detections.jsonl"), &det_lines);

    let gt_log = IntervalLog::parse(&(gt_lines.join("\n") + "\n")).unwrap();
    let det_log = IntervalLog::parse(&(det_lines.join("\n") + "\n")).unwrap();
    let report = evaluate(&gt_log, &det_log, &EvalOptions::default());

    // Every injected anomaly must be visible in the scores.
    assert_eq!(report.activities.len(), 3);
    let frame_sum = |get: fn(&radiant_core::eval::ActivityMetrics) -> i64| -> i64 {
        report.activities.values().map(get).sum()
    };
    assert!(frame_sum(|m| m.frames.fp_split.insertion_ms) > 0, "phantom cycle");
    assert!(frame_sum(|m| m.frames.fp_split.merge_ms) > 0, "welded mill pair");
    assert!(frame_sum(|m| m.frames.fn_split.fragmentation_ms) > 0, "split store run");
    assert!(frame_sum(|m| m.frames.fn_split.underfill_ms) > 0, "late restart");
    let gt_events: u64 = report.activities.values().map(|m| m.events.gt.total).sum();
    assert!(gt_events >= 20);
    assert!(report.activities.values().any(|m| m.events.gt.merged > 0));
    assert!(report.activities.values().any(|m| m.events.gt.fragmented > 0));
    assert!(report.activities.values().any(|m| m.events.det.inserted > 0));

    let json = serde_json::to_string_pretty(&report).unwrap();
    fs::write(dir.join("expected_report.json"), json + "\n").unwrap();
}
