//! Normalized cross-correlation of binary activity signals.
//!
//! Both logs are rasterized onto the shared timeline at a fixed frame width;
//! the score is the best normalized dot product over every possible shift of
//! the detection signal against the ground truth.

use std::collections::BTreeMap;

use super::intervals::IntervalLog;

/// Frame i covers `[t0 + i*frame_ms, t0 + (i+1)*frame_ms)` and is set when it
/// intersects any interval of the activity with positive length.
pub fn rasterize(
    log: &IntervalLog,
    activity: &str,
    t0: i64,
    t1: i64,
    frame_ms: i64,
) -> Vec<bool> {
    let span = (t1 - t0).max(0);
    let n = ((span + frame_ms - 1) / frame_ms) as usize;
    let mut frames = vec![false; n];
    for iv in log.of_activity(activity) {
        let lo = (iv.start - t0).max(0) / frame_ms;
        let hi = (iv.end - t0 + frame_ms - 1) / frame_ms;
        for f in lo..hi.min(n as i64) {
            let fs = t0 + f * frame_ms;
            let fe = fs + frame_ms;
            if iv.start.max(fs) < iv.end.min(fe) {
                frames[f as usize] = true;
            }
        }
    }
    frames
}

pub struct XcorrOutcome {
    pub value: f64,
    /// Number of set ground-truth frames, the weight for micro averaging.
    pub gt_frames: u64,
    pub degenerate: bool,
}

/// Best normalized cross-correlation over all integer frame lags.
///
/// Both signals decompose into maximal runs of set frames. A run pair's dot
/// product as a function of the lag is a trapezoid, so the total is piecewise
/// linear with breakpoints at the four corner lags of each pair; sweeping the
/// accumulated slope changes over the sorted breakpoints finds the exact
/// maximum in O(pairs log pairs), independent of run lengths.
pub fn cross_correlation(
    gt: &IntervalLog,
    det: &IntervalLog,
    activity: &str,
    t0: i64,
    t1: i64,
    frame_ms: i64,
) -> XcorrOutcome {
    let g_runs = runs(&rasterize(gt, activity, t0, t1, frame_ms));
    let d_runs = runs(&rasterize(det, activity, t0, t1, frame_ms));
    let g_frames: i64 = g_runs.iter().map(|&(s, e)| e - s).sum();
    let d_frames: i64 = d_runs.iter().map(|&(s, e)| e - s).sum();

    if g_frames == 0 || d_frames == 0 {
        return XcorrOutcome {
            value: 0.0,
            gt_frames: g_frames as u64,
            degenerate: true,
        };
    }

    // Overlap of [a, b) with [c + k, e + k) rises with slope 1 from k = a-e,
    // plateaus between min/max of (a-c, b-e), and falls to zero at k = b-c.
    let mut slope_deltas: BTreeMap<i64, i64> = BTreeMap::new();
    for &(a, b) in &g_runs {
        for &(c, e) in &d_runs {
            *slope_deltas.entry(a - e).or_insert(0) += 1;
            *slope_deltas.entry((a - c).min(b - e)).or_insert(0) -= 1;
            *slope_deltas.entry((a - c).max(b - e)).or_insert(0) -= 1;
            *slope_deltas.entry(b - c).or_insert(0) += 1;
        }
    }

    let mut best = 0i64;
    let mut value = 0i64;
    let mut slope = 0i64;
    let mut prev = None;
    for (&k, &delta) in &slope_deltas {
        if let Some(p) = prev {
            value += slope * (k - p);
        }
        best = best.max(value);
        slope += delta;
        prev = Some(k);
    }

    let norm = (g_frames as f64).sqrt() * (d_frames as f64).sqrt();
    XcorrOutcome {
        value: best as f64 / norm,
        gt_frames: g_frames as u64,
        degenerate: false,
    }
}

/// Maximal `[start, end)` index ranges of consecutive set frames.
fn runs(frames: &[bool]) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &b) in frames.iter().enumerate() {
        match (b, start) {
            (true, None) => start = Some(i as i64),
            (false, Some(s)) => {
                out.push((s, i as i64));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, frames.len() as i64));
    }
    out
}
