//! `radiant eval`: score a detection log against ground truth.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use radiant_core::eval::{to_csv, AggregateMode};
use radiant_core::{evaluate, EvalOptions, IntervalLog, MetricsReport};

use crate::fail::Failure;
use crate::load;

#[derive(Args)]
pub struct EvalArgs {
    /// Detection log (JSONL intervals)
    pub detections: PathBuf,
    /// Ground-truth log (JSONL intervals)
    pub ground_truth: PathBuf,
    /// Write the full JSON report to this path
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Write the per-activity CSV table to this path
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Frame length for duration scoring, in milliseconds
    #[arg(
        long = "frame-ms",
        value_name = "MS",
        default_value_t = 100,
        value_parser = clap::value_parser!(i64).range(1..)
    )]
    pub frame_ms: i64,
    /// Aggregate by summed counts (micro) or unweighted means (macro)
    #[arg(long, value_enum, default_value_t = ModeArg::Micro)]
    pub mode: ModeArg,
    /// Print a per-activity table instead of the headline scores
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Micro,
    Macro,
}

pub fn run(args: &EvalArgs) -> Result<(), Failure> {
    let det = load_log(&args.detections)?;
    let gt = load_log(&args.ground_truth)?;

    let opts = EvalOptions {
        frame_ms: args.frame_ms,
        mode: match args.mode {
            ModeArg::Micro => AggregateMode::Micro,
            ModeArg::Macro => AggregateMode::Macro,
        },
    };
    let report = evaluate(&gt, &det, &opts);

    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&report).expect("reports serialize");
        write_out(path, json + "\n")?;
    }
    if let Some(path) = &args.csv {
        write_out(path, to_csv(&report))?;
    }
    if args.pretty {
        print_table(&report);
    } else {
        print_headline(&report);
    }
    for flag in &report.flags {
        eprintln!("note: {flag}");
    }
    Ok(())
}

fn load_log(path: &Path) -> Result<IntervalLog, Failure> {
    let text = load::read(path)?;
    IntervalLog::parse(&text).map_err(|e| Failure::domain(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, content: String) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn print_headline(report: &MetricsReport) {
    let a = &report.aggregate;
    println!(
        "{}: f1 {:.4}  precision {:.4}  recall {:.4}  event f1 {:.4}  xcorr {:.4}  edit {:.4}",
        a.mode,
        a.two_set.f1,
        a.two_set.precision,
        a.two_set.recall,
        a.event_analysis.f1,
        a.cross_correlation,
        a.damerau_levenshtein_norm
    );
}

fn print_table(report: &MetricsReport) {
    println!(
        "{:<24} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "activity", "f1", "precision", "recall", "event f1", "xcorr", "edit"
    );
    let row = |name: &str, f1: f64, p: f64, r: f64, ef1: f64, xc: f64, ed: f64| {
        println!(
            "{name:<24} {f1:>9.4} {p:>9.4} {r:>9.4} {ef1:>9.4} {xc:>9.4} {ed:>9.4}"
        );
    };
    for (name, m) in &report.activities {
        row(
            name,
            m.two_set.f1,
            m.two_set.precision,
            m.two_set.recall,
            m.event_analysis.f1,
            m.cross_correlation,
            m.damerau_levenshtein_norm,
        );
    }
    let a = &report.aggregate;
    row(
        &format!("({})", a.mode),
        a.two_set.f1,
        a.two_set.precision,
        a.two_set.recall,
        a.event_analysis.f1,
        a.cross_correlation,
        a.damerau_levenshtein_norm,
    );
}
