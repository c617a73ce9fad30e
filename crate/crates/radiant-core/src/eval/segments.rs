//! Duration-weighted frame classification with Ward error sub-categories.
//!
//! Instead of sampling at a fixed frame rate, the timeline is cut exactly at
//! every interval boundary; each resulting segment lies fully inside or
//! outside each log, so the duration totals are the limit of frame-based
//! counting as the rate goes to infinity.

use serde::Serialize;

use super::intervals::{Interval, IntervalLog};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FpSplit {
    pub insertion_ms: i64,
    pub merge_ms: i64,
    pub overfill_ms: i64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FnSplit {
    pub deletion_ms: i64,
    pub fragmentation_ms: i64,
    pub underfill_ms: i64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FrameCounts {
    pub tp_ms: i64,
    pub tn_ms: i64,
    pub fp_ms: i64,
    pub fn_ms: i64,
    pub fp_split: FpSplit,
    pub fn_split: FnSplit,
}

impl FrameCounts {
    pub fn add(&mut self, other: &FrameCounts) {
        self.tp_ms += other.tp_ms;
        self.tn_ms += other.tn_ms;
        self.fp_ms += other.fp_ms;
        self.fn_ms += other.fn_ms;
        self.fp_split.insertion_ms += other.fp_split.insertion_ms;
        self.fp_split.merge_ms += other.fp_split.merge_ms;
        self.fp_split.overfill_ms += other.fp_split.overfill_ms;
        self.fn_split.deletion_ms += other.fn_split.deletion_ms;
        self.fn_split.fragmentation_ms += other.fn_split.fragmentation_ms;
        self.fn_split.underfill_ms += other.fn_split.underfill_ms;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SegClass {
    Tp,
    Tn,
    Fp,
    Fn,
}

struct Segment {
    start: i64,
    end: i64,
    class: SegClass,
    /// Index of the covering detection (for FP) or GT interval (for FN).
    owner: Option<usize>,
}

/// Classifies the shared timeline `[t0, t1]` for one activity.
pub fn segment_and_count(
    gt: &IntervalLog,
    det: &IntervalLog,
    activity: &str,
    t0: i64,
    t1: i64,
) -> FrameCounts {
    let gt_ivs = gt.of_activity(activity);
    let det_ivs = det.of_activity(activity);

    let mut bounds = vec![t0, t1];
    for iv in gt_ivs.iter().chain(det_ivs.iter()) {
        bounds.push(iv.start);
        bounds.push(iv.end);
    }
    bounds.sort_unstable();
    bounds.dedup();
    bounds.retain(|t| (t0..=t1).contains(t));

    let covering = |ivs: &[&Interval], s: i64, e: i64| -> Option<usize> {
        ivs.iter().position(|iv| iv.start <= s && e <= iv.end)
    };

    let mut segments = Vec::new();
    for pair in bounds.windows(2) {
        let (s, e) = (pair[0], pair[1]);
        if s == e {
            continue;
        }
        let in_gt = covering(&gt_ivs, s, e);
        let in_det = covering(&det_ivs, s, e);
        let (class, owner) = match (in_gt, in_det) {
            (Some(_), Some(_)) => (SegClass::Tp, None),
            (None, None) => (SegClass::Tn, None),
            (None, Some(d)) => (SegClass::Fp, Some(d)),
            (Some(g), None) => (SegClass::Fn, Some(g)),
        };
        segments.push(Segment {
            start: s,
            end: e,
            class,
            owner,
        });
    }

    let mut counts = FrameCounts::default();
    for (i, seg) in segments.iter().enumerate() {
        let dur = seg.end - seg.start;
        match seg.class {
            SegClass::Tp => counts.tp_ms += dur,
            SegClass::Tn => counts.tn_ms += dur,
            SegClass::Fp => {
                counts.fp_ms += dur;
                let det_iv = det_ivs[seg.owner.unwrap()];
                let (before, after) = tp_neighbors(&segments, i, det_iv);
                match (before, after) {
                    (true, true) => counts.fp_split.merge_ms += dur,
                    (true, false) | (false, true) => counts.fp_split.overfill_ms += dur,
                    (false, false) => counts.fp_split.insertion_ms += dur,
                }
            }
            SegClass::Fn => {
                counts.fn_ms += dur;
                let gt_iv = gt_ivs[seg.owner.unwrap()];
                let (before, after) = tp_neighbors(&segments, i, gt_iv);
                match (before, after) {
                    (true, true) => counts.fn_split.fragmentation_ms += dur,
                    (true, false) | (false, true) => counts.fn_split.underfill_ms += dur,
                    (false, false) => counts.fn_split.deletion_ms += dur,
                }
            }
        }
    }
    counts
}

/// Whether a TP segment inside `owner` exists before and after segment `i`.
fn tp_neighbors(segments: &[Segment], i: usize, owner: &Interval) -> (bool, bool) {
    let inside = |seg: &Segment| {
        seg.class == SegClass::Tp && owner.start <= seg.start && seg.end <= owner.end
    };
    let before = segments[..i].iter().any(|s| inside(s) && s.end <= segments[i].start);
    let after = segments[i + 1..]
        .iter()
        .any(|s| inside(s) && s.start >= segments[i].end);
    (before, after)
}
