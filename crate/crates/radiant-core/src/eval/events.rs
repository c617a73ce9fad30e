//! Event analysis: whole-interval classification of ground-truth entries and
//! detections by their overlap structure.

use serde::Serialize;

use super::intervals::IntervalLog;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GtEventCounts {
    pub correct: u64,
    pub deleted: u64,
    pub fragmented: u64,
    pub merged: u64,
    pub fragmented_and_merged: u64,
    pub total: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DetEventCounts {
    pub correct: u64,
    pub inserted: u64,
    pub fragmenting: u64,
    pub merging: u64,
    pub fragmenting_and_merging: u64,
    pub total: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EventCounts {
    pub gt: GtEventCounts,
    pub det: DetEventCounts,
}

impl EventCounts {
    pub fn add(&mut self, other: &EventCounts) {
        self.gt.correct += other.gt.correct;
        self.gt.deleted += other.gt.deleted;
        self.gt.fragmented += other.gt.fragmented;
        self.gt.merged += other.gt.merged;
        self.gt.fragmented_and_merged += other.gt.fragmented_and_merged;
        self.gt.total += other.gt.total;
        self.det.correct += other.det.correct;
        self.det.inserted += other.det.inserted;
        self.det.fragmenting += other.det.fragmenting;
        self.det.merging += other.det.merging;
        self.det.fragmenting_and_merging += other.det.fragmenting_and_merging;
        self.det.total += other.det.total;
    }
}

/// Classifies every ground-truth interval and every detection of one activity.
pub fn event_analysis(gt: &IntervalLog, det: &IntervalLog, activity: &str) -> EventCounts {
    let gt_ivs = gt.of_activity(activity);
    let det_ivs = det.of_activity(activity);

    // overlaps[g][d] = true iff gt interval g and detection d intersect with
    // positive length.
    let overlaps: Vec<Vec<bool>> = gt_ivs
        .iter()
        .map(|g| det_ivs.iter().map(|d| g.overlaps(d)).collect())
        .collect();

    let gt_partners: Vec<usize> = overlaps
        .iter()
        .map(|row| row.iter().filter(|&&o| o).count())
        .collect();
    let mut det_partners = vec![0usize; det_ivs.len()];
    for row in &overlaps {
        for (slot, &o) in det_partners.iter_mut().zip(row) {
            *slot += usize::from(o);
        }
    }

    let mut counts = EventCounts::default();
    counts.gt.total = gt_ivs.len() as u64;
    counts.det.total = det_ivs.len() as u64;

    for (row, &partners) in overlaps.iter().zip(&gt_partners) {
        if partners == 0 {
            counts.gt.deleted += 1;
            continue;
        }
        let fragmented = partners >= 2;
        let merged = row.iter().zip(&det_partners).any(|(&o, &dp)| o && dp >= 2);
        match (fragmented, merged) {
            (true, true) => counts.gt.fragmented_and_merged += 1,
            (true, false) => counts.gt.fragmented += 1,
            (false, true) => counts.gt.merged += 1,
            (false, false) => counts.gt.correct += 1,
        }
    }

    for (d, &partners) in det_partners.iter().enumerate() {
        if partners == 0 {
            counts.det.inserted += 1;
            continue;
        }
        let merging = partners >= 2;
        let fragmenting = overlaps
            .iter()
            .zip(&gt_partners)
            .any(|(row, &gp)| row[d] && gp >= 2);
        match (fragmenting, merging) {
            (true, true) => counts.det.fragmenting_and_merging += 1,
            (true, false) => counts.det.fragmenting += 1,
            (false, true) => counts.det.merging += 1,
            (false, false) => counts.det.correct += 1,
        }
    }

    counts
}
