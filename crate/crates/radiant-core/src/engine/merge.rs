//! Ordering and merging of per-station event streams.

use super::event::SensorEvent;
use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderPolicy {
    /// Drop events whose ts regresses within a station stream, counting them.
    #[default]
    DropAndWarn,
    /// Abort the run on the first regression.
    Abort,
}

/// Enforces per-station ts monotonicity on one stream. Returns the kept
/// events and the number dropped.
pub fn enforce_order(
    events: Vec<SensorEvent>,
    policy: OrderPolicy,
) -> Result<(Vec<SensorEvent>, u64), EngineError> {
    let mut kept = Vec::with_capacity(events.len());
    let mut dropped = 0u64;
    let mut last: Option<i64> = None;
    for ev in events {
        if let Some(prev) = last {
            if ev.ts < prev {
                match policy {
                    OrderPolicy::DropAndWarn => {
                        dropped += 1;
                        continue;
                    }
                    OrderPolicy::Abort => {
                        return Err(EngineError::OutOfOrder {
                            station: ev.station,
                            ts: ev.ts,
                            previous: prev,
                        });
                    }
                }
            }
        }
        last = Some(ev.ts);
        kept.push(ev);
    }
    Ok((kept, dropped))
}

/// Merges individually ordered station streams into one timeline: ordered by
/// ts, ties broken by station id, then by arrival order within a station.
pub fn merge_streams(streams: Vec<Vec<SensorEvent>>) -> Vec<SensorEvent> {
    let mut all: Vec<SensorEvent> = streams.into_iter().flatten().collect();
    all.sort_by(|a, b| a.ts.cmp(&b.ts).then_with(|| a.station.cmp(&b.station)));
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use indexmap::IndexMap;

    fn ev(station: &str, ts: i64) -> SensorEvent {
        SensorEvent {
            station: station.to_string(),
            ts,
            values: IndexMap::new(),
        }
    }

    #[test]
    fn merges_by_ts() {
        let merged = merge_streams(vec![vec![ev("A", 1), ev("A", 3)], vec![ev("B", 2)]]);
        let order: Vec<(String, i64)> = merged.into_iter().map(|e| (e.station, e.ts)).collect();
        assert_eq!(
            order,
            vec![("A".into(), 1), ("B".into(), 2), ("A".into(), 3)]
        );
    }

    #[test]
    fn equal_ts_breaks_ties_by_station() {
        let merged = merge_streams(vec![vec![ev("B", 5)], vec![ev("A", 5)]]);
        assert_eq!(merged[0].station, "A");
        assert_eq!(merged[1].station, "B");
    }

    #[test]
    fn equal_ts_keeps_arrival_order_within_station() {
        let mut first = ev("A", 5);
        first.values.insert("x".into(), 1.0);
        let mut second = ev("A", 5);
        second.values.insert("x".into(), 2.0);
        let merged = merge_streams(vec![vec![first, second]]);
        assert_eq!(merged[0].values["x"], 1.0);
        assert_eq!(merged[1].values["x"], 2.0);
    }

    #[test]
    fn regression_dropped_by_default() {
        let (kept, dropped) =
            enforce_order(vec![ev("A", 5), ev("A", 4), ev("A", 6)], OrderPolicy::DropAndWarn)
                .unwrap();
        assert_eq!(dropped, 1);
        assert_eq!(kept.iter().map(|e| e.ts).collect::<Vec<_>>(), vec![5, 6]);
    }

    #[test]
    fn regression_aborts_under_strict_policy() {
        let err = enforce_order(vec![ev("A", 5), ev("A", 4)], OrderPolicy::Abort).unwrap_err();
        assert!(err.to_string().contains("out of order"));
    }

    #[test]
    fn equal_ts_within_station_is_not_a_regression() {
        let (kept, dropped) =
            enforce_order(vec![ev("A", 5), ev("A", 5)], OrderPolicy::Abort).unwrap();
        assert_eq!(dropped, 0);
        assert_eq!(kept.len(), 2);
    }
}
