//! `radiant run`: execute detectors over replayed traces or live streams.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use radiant_core::engine::{
    export_xes, run_live, run_replay, EngineError, EventHooks, LiveOptions, OrderPolicy,
    ReplayOptions,
};
use radiant_core::time::format_ts;
use radiant_core::{ActivityDetection, PatternEvent};

use crate::fail::Failure;
use crate::load;

#[derive(Args)]
pub struct RunArgs {
    /// Activity definition program
    pub program: PathBuf,
    /// Device configuration (YAML)
    pub config: PathBuf,
    /// Replay trace files or subscribe to live MQTT sources
    #[arg(long, value_enum, default_value_t = Mode::Replay)]
    pub mode: Mode,
    /// Trace file for one station as station=path; repeat per station
    #[arg(long = "input", value_name = "STATION=PATH")]
    pub inputs: Vec<String>,
    /// Detection sink: JSONL file path, or - for stdout
    #[arg(long, value_name = "PATH")]
    pub detections: Option<PathBuf>,
    /// Also export detections as an XES event log
    #[arg(long, value_name = "PATH")]
    pub xes: Option<PathBuf>,
    /// Log every matched pattern stage as JSONL: file path, or - for stdout
    #[arg(long = "debug-patterns", value_name = "PATH")]
    pub debug_patterns: Option<PathBuf>,
    /// Pace the replay: 1 = recorded speed, 10 = ten times faster
    /// (default: no pacing)
    #[arg(long, value_name = "FACTOR")]
    pub speed: Option<f64>,
    /// Stop after this many events
    #[arg(long = "max-events", value_name = "N")]
    pub max_events: Option<u64>,
    /// Abort on backwards timestamps instead of dropping the event
    #[arg(long = "strict-order")]
    pub strict_order: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
pub enum Mode {
    Replay,
    Live,
}

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let system = load::load_system(&args.config)?;
    let process = load::load_program(&args.program, &system)?;
    let specs = radiant_core::compile(&process, &system).map_err(|_| Failure::Silent(1))?;

    let inputs = parse_inputs(&args.inputs)?;
    match args.mode {
        Mode::Replay if inputs.is_empty() => {
            return Err(Failure::usage(
                "replay mode requires at least one --input station=path",
            ));
        }
        Mode::Live if !inputs.is_empty() => {
            return Err(Failure::usage("--input only applies to replay mode"));
        }
        Mode::Live if args.speed.is_some() => {
            return Err(Failure::usage("--speed only applies to replay mode"));
        }
        _ => {}
    }

    let policy = if args.strict_order {
        OrderPolicy::Abort
    } else {
        OrderPolicy::DropAndWarn
    };

    let mut detection_sink = args.detections.as_deref().map(open_sink).transpose()?;
    let mut debug_sink = args.debug_patterns.as_deref().map(open_sink).transpose()?;
    let stdout_taken = [&args.detections, &args.debug_patterns]
        .iter()
        .any(|p| p.as_deref() == Some(Path::new("-")));

    let mut on_detection = |d: &ActivityDetection| -> io::Result<()> {
        if let Some(w) = detection_sink.as_mut() {
            writeln!(w, "{}", d.to_json_line())?;
            w.flush()?;
        }
        Ok(())
    };
    let mut on_pattern = |activity: &str, pe: &PatternEvent| -> io::Result<()> {
        let w = debug_sink.as_mut().expect("hook installed with sink");
        writeln!(w, "{}", pattern_line(activity, pe))?;
        w.flush()
    };
    let mut hooks = EventHooks {
        on_pattern: if args.debug_patterns.is_some() {
            Some(&mut on_pattern)
        } else {
            None
        },
        on_detection: &mut on_detection,
    };

    let outcome = match args.mode {
        Mode::Replay => {
            let opts = ReplayOptions {
                policy,
                speed: args.speed,
                max_events: args.max_events,
            };
            run_replay(&system, &specs, &inputs, &opts, &mut hooks)
        }
        Mode::Live => {
            let stop = Arc::new(AtomicBool::new(false));
            let flag = Arc::clone(&stop);
            let _ = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed));
            let opts = LiveOptions {
                policy,
                max_events: args.max_events,
                stop: Some(stop),
                ..LiveOptions::default()
            };
            let on_ready = || eprintln!("ready: all sources subscribed");
            run_live(&system, &specs, &opts, on_ready, &mut hooks)
        }
    };
    let (summary, detections) = outcome.map_err(engine_failure)?;

    if let Some(path) = &args.xes {
        let file = File::create(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let mut out = io::BufWriter::new(file);
        export_xes(&detections, &mut out).map_err(engine_failure)?;
        out.flush().map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }

    let rendered = serde_json::to_string_pretty(&summary).expect("summaries serialize");
    if stdout_taken {
        eprintln!("{rendered}");
    } else {
        println!("{rendered}");
    }
    Ok(())
}

fn parse_inputs(raw: &[String]) -> Result<Vec<(String, PathBuf)>, Failure> {
    raw.iter()
        .map(|spec| {
            let (station, path) = spec.split_once('=').ok_or_else(|| {
                Failure::usage(format!("--input {spec:?}: expected STATION=PATH"))
            })?;
            let path = PathBuf::from(path);
            if !path.is_file() {
                return Err(Failure::usage(format!("{}: no such file", path.display())));
            }
            Ok((station.to_string(), path))
        })
        .collect()
}

fn open_sink(path: &Path) -> Result<Box<dyn Write>, Failure> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdout()));
    }
    let file =
        File::create(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(Box::new(io::BufWriter::new(file)))
}

fn pattern_line(activity: &str, pe: &PatternEvent) -> String {
    let mut line = serde_json::json!({
        "activity": activity,
        "stage": pe.stage,
        "ts": format_ts(pe.ts),
    });
    if let Some(index) = pe.index {
        line["index"] = index.into();
    }
    line.to_string()
}

fn engine_failure(e: EngineError) -> Failure {
    match e {
        EngineError::Sink { .. } | EngineError::Io(_) => Failure::usage(e.to_string()),
        _ => Failure::domain(e.to_string()),
    }
}
