//! Full metric battery: per-activity scores plus micro/macro aggregation.

use std::collections::BTreeMap;

use serde::Serialize;

use super::editdist::normalized_distance;
use super::events::{event_analysis, EventCounts};
use super::intervals::{timeline_bounds, IntervalLog};
use super::scores::{event_scores, ratio, two_set_scores, EventScores, TwoSetScores};
use super::segments::{segment_and_count, FrameCounts};
use super::xcorr::cross_correlation;
use crate::time::format_ts;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateMode {
    Micro,
    Macro,
}

impl AggregateMode {
    fn name(self) -> &'static str {
        match self {
            AggregateMode::Micro => "micro",
            AggregateMode::Macro => "macro",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub frame_ms: i64,
    pub mode: AggregateMode,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            frame_ms: 100,
            mode: AggregateMode::Micro,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityMetrics {
    pub frames: FrameCounts,
    pub events: EventCounts,
    pub two_set: TwoSetScores,
    pub event_analysis: EventScores,
    pub cross_correlation: f64,
    pub damerau_levenshtein_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateMetrics {
    pub mode: String,
    pub two_set: TwoSetScores,
    pub event_analysis: EventScores,
    pub cross_correlation: f64,
    pub damerau_levenshtein_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timeline {
    pub t0: String,
    pub t1: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub frame_ms: i64,
    /// Micro cross-correlation averages are weighted by set ground-truth
    /// frames per activity.
    pub cross_correlation_weighting: String,
    pub timeline: Timeline,
    pub activities: BTreeMap<String, ActivityMetrics>,
    pub aggregate: AggregateMetrics,
    pub flags: Vec<String>,
}

/// Scores `det` against `gt` over their shared timeline.
pub fn evaluate(gt: &IntervalLog, det: &IntervalLog, opts: &EvalOptions) -> MetricsReport {
    let (t0, t1) = timeline_bounds(gt, det);
    let mut names: Vec<String> = gt.activities();
    names.extend(det.activities());
    names.sort();
    names.dedup();

    let mut flags = Vec::new();
    let mut activities = BTreeMap::new();
    let mut frame_sum = FrameCounts::default();
    let mut event_sum = EventCounts::default();
    let mut xcorr_weighted = 0.0;
    let mut xcorr_weight = 0.0;

    for name in &names {
        let frames = segment_and_count(gt, det, name, t0, t1);
        let events = event_analysis(gt, det, name);
        let (two_set, deg) = two_set_scores(
            frames.tp_ms as f64,
            frames.tn_ms as f64,
            frames.fp_ms as f64,
            frames.fn_ms as f64,
        );
        for d in deg {
            flags.push(format!("undefined: activity {name}: {d} is 0/0, reported as 0"));
        }
        let (ea, deg) = event_scores(
            events.gt.correct,
            events.gt.total,
            events.det.correct,
            events.det.total,
        );
        for d in deg {
            flags.push(format!("undefined: activity {name}: {d} is 0/0, reported as 0"));
        }
        let xc = cross_correlation(gt, det, name, t0, t1, opts.frame_ms);
        if xc.degenerate {
            flags.push(format!(
                "undefined: activity {name}: cross-correlation of an all-zero signal, reported as 0"
            ));
        }
        let gt_seq = vec![name.as_str(); gt.of_activity(name).len()];
        let det_seq = vec![name.as_str(); det.of_activity(name).len()];
        let dl = normalized_distance(&gt_seq, &det_seq);

        frame_sum.add(&frames);
        event_sum.add(&events);
        xcorr_weighted += xc.value * xc.gt_frames as f64;
        xcorr_weight += xc.gt_frames as f64;

        activities.insert(
            name.clone(),
            ActivityMetrics {
                frames,
                events,
                two_set,
                event_analysis: ea,
                cross_correlation: xc.value,
                damerau_levenshtein_norm: dl,
            },
        );
    }

    let aggregate = match opts.mode {
        AggregateMode::Micro => {
            let (two_set, deg) = two_set_scores(
                frame_sum.tp_ms as f64,
                frame_sum.tn_ms as f64,
                frame_sum.fp_ms as f64,
                frame_sum.fn_ms as f64,
            );
            for d in deg {
                flags.push(format!("undefined: aggregate: {d} is 0/0, reported as 0"));
            }
            let (ea, deg) = event_scores(
                event_sum.gt.correct,
                event_sum.gt.total,
                event_sum.det.correct,
                event_sum.det.total,
            );
            for d in deg {
                flags.push(format!("undefined: aggregate: {d} is 0/0, reported as 0"));
            }
            let xc = ratio(xcorr_weighted, xcorr_weight);
            if xc.degenerate {
                flags.push(
                    "undefined: aggregate: cross-correlation weights sum to 0, reported as 0"
                        .to_string(),
                );
            }
            AggregateMetrics {
                mode: opts.mode.name().to_string(),
                two_set,
                event_analysis: ea,
                cross_correlation: xc.value,
                damerau_levenshtein_norm: normalized_distance(
                    &interleaved(gt),
                    &interleaved(det),
                ),
            }
        }
        AggregateMode::Macro => {
            let n = activities.len() as f64;
            let mean = |get: &dyn Fn(&ActivityMetrics) -> f64| -> f64 {
                if activities.is_empty() {
                    0.0
                } else {
                    activities.values().map(get).sum::<f64>() / n
                }
            };
            if activities.is_empty() {
                flags.push(
                    "undefined: aggregate: macro mean over zero activities, reported as 0"
                        .to_string(),
                );
            }
            AggregateMetrics {
                mode: opts.mode.name().to_string(),
                two_set: TwoSetScores {
                    precision: mean(&|m| m.two_set.precision),
                    recall: mean(&|m| m.two_set.recall),
                    f1: mean(&|m| m.two_set.f1),
                    balanced_accuracy: mean(&|m| m.two_set.balanced_accuracy),
                },
                event_analysis: EventScores {
                    precision: mean(&|m| m.event_analysis.precision),
                    recall: mean(&|m| m.event_analysis.recall),
                    f1: mean(&|m| m.event_analysis.f1),
                },
                cross_correlation: mean(&|m| m.cross_correlation),
                damerau_levenshtein_norm: mean(&|m| m.damerau_levenshtein_norm),
            }
        }
    };

    MetricsReport {
        frame_ms: opts.frame_ms,
        cross_correlation_weighting: "gt-frames".to_string(),
        timeline: Timeline {
            t0: format_ts(t0),
            t1: format_ts(t1),
        },
        activities,
        aggregate,
        flags,
    }
}

/// Activity-name sequence of a whole log in chronological order; ties broken
/// by name, then end timestamp, so the sequence is deterministic.
fn interleaved(log: &IntervalLog) -> Vec<&str> {
    let mut entries: Vec<_> = log.entries.iter().collect();
    entries.sort_by_key(|iv| (iv.start, iv.activity.as_str(), iv.end));
    entries.iter().map(|iv| iv.activity.as_str()).collect()
}

/// Plot-ready per-activity table with one row per activity.
pub fn to_csv(report: &MetricsReport) -> String {
    let mut out = String::from(
        "activity,tp_ms,tn_ms,fp_ms,fn_ms,insertion_ms,merge_ms,overfill_ms,\
         deletion_ms,fragmentation_ms,underfill_ms,gt_events,det_events,\
         precision,recall,f1,balanced_accuracy,event_precision,event_recall,\
         event_f1,cross_correlation,damerau_levenshtein_norm\n",
    );
    for (name, m) in &report.activities {
        let f = &m.frames;
        out.push_str(&format!(
            "{name},{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            f.tp_ms,
            f.tn_ms,
            f.fp_ms,
            f.fn_ms,
            f.fp_split.insertion_ms,
            f.fp_split.merge_ms,
            f.fp_split.overfill_ms,
            f.fn_split.deletion_ms,
            f.fn_split.fragmentation_ms,
            f.fn_split.underfill_ms,
            m.events.gt.total,
            m.events.det.total,
            m.two_set.precision,
            m.two_set.recall,
            m.two_set.f1,
            m.two_set.balanced_accuracy,
            m.event_analysis.precision,
            m.event_analysis.recall,
            m.event_analysis.f1,
            m.cross_correlation,
            m.damerau_levenshtein_norm,
        ));
    }
    out
}
