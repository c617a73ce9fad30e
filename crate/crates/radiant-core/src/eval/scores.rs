//! Score arithmetic shared by the frame- and event-level metrics.
//!
//! Every ratio maps 0/0 to 0.0 and reports that it did, so callers can surface
//! a flag instead of silently producing a meaningless perfect score.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TwoSetScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub balanced_accuracy: f64,
}

pub struct RatioOutcome {
    pub value: f64,
    pub degenerate: bool,
}

pub fn ratio(num: f64, den: f64) -> RatioOutcome {
    if den == 0.0 {
        RatioOutcome {
            value: 0.0,
            degenerate: true,
        }
    } else {
        RatioOutcome {
            value: num / den,
            degenerate: false,
        }
    }
}

pub fn f1_from(precision: f64, recall: f64) -> RatioOutcome {
    ratio(2.0 * precision * recall, precision + recall)
}

/// Computes precision, recall, F1 and balanced accuracy from duration counts.
/// Returns the scores plus the names of any ratios that hit 0/0.
pub fn two_set_scores(tp: f64, tn: f64, fp: f64, fn_: f64) -> (TwoSetScores, Vec<&'static str>) {
    let mut degenerate = Vec::new();
    let mut track = |name: &'static str, r: RatioOutcome| {
        if r.degenerate {
            degenerate.push(name);
        }
        r.value
    };
    let precision = track("precision", ratio(tp, tp + fp));
    let recall = track("recall", ratio(tp, tp + fn_));
    let f1 = track("f1", f1_from(precision, recall));
    let tpr = track("tpr", ratio(tp, tp + fn_));
    let tnr = track("tnr", ratio(tn, tn + fp));
    (
        TwoSetScores {
            precision,
            recall,
            f1,
            balanced_accuracy: 0.5 * (tpr + tnr),
        },
        degenerate,
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EventScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn event_scores(
    correct_gt: u64,
    total_gt: u64,
    correct_det: u64,
    total_det: u64,
) -> (EventScores, Vec<&'static str>) {
    let mut degenerate = Vec::new();
    let mut track = |name: &'static str, r: RatioOutcome| {
        if r.degenerate {
            degenerate.push(name);
        }
        r.value
    };
    let precision = track(
        "event precision",
        ratio(correct_det as f64, total_det as f64),
    );
    let recall = track("event recall", ratio(correct_gt as f64, total_gt as f64));
    let f1 = track("event f1", f1_from(precision, recall));
    (
        EventScores {
            precision,
            recall,
            f1,
        },
        degenerate,
    )
}
