//! Timestamp parsing and formatting.
//!
//! Sensor events and interval logs carry timestamps as `YYYY-MM-DD HH:MM:SS`
//! with an optional fraction of 1 to 6 digits. Internally all timestamps are
//! epoch milliseconds (UTC); sub-millisecond digits are truncated.

use chrono::{DateTime, NaiveDateTime, TimeZone, Utc};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TsError {
    #[error("invalid timestamp {0:?}: expected YYYY-MM-DD HH:MM:SS with up to 6 fractional digits")]
    Invalid(String),
}

/// Parses a timestamp string to epoch milliseconds.
pub fn parse_ts(s: &str) -> Result<i64, TsError> {
    let s = s.trim();
    let (base, frac) = match s.split_once('.') {
        Some((b, f)) => (b, Some(f)),
        None => (s, None),
    };
    let dt = NaiveDateTime::parse_from_str(base, "%Y-%m-%d %H:%M:%S")
        .map_err(|_| TsError::Invalid(s.to_string()))?;
    let mut millis = dt.and_utc().timestamp_millis();
    if let Some(f) = frac {
        if f.is_empty() || f.len() > 6 || !f.bytes().all(|b| b.is_ascii_digit()) {
            return Err(TsError::Invalid(s.to_string()));
        }
        let mut padded = f.to_string();
        while padded.len() < 3 {
            padded.push('0');
        }
        millis += padded[..3].parse::<i64>().unwrap();
    }
    Ok(millis)
}

fn utc(ms: i64) -> DateTime<Utc> {
    Utc.timestamp_millis_opt(ms).unwrap()
}

/// Formats epoch milliseconds as `YYYY-MM-DD HH:MM:SS.mmm`.
pub fn format_ts(ms: i64) -> String {
    utc(ms).format("%Y-%m-%d %H:%M:%S%.3f").to_string()
}

/// Formats epoch milliseconds as ISO-8601 with milliseconds and a UTC offset,
/// the form required by XES `time:timestamp` attributes.
pub fn format_ts_iso(ms: i64) -> String {
    utc(ms).format("%Y-%m-%dT%H:%M:%S%.3f+00:00").to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_digit_fraction() {
        let ms = parse_ts("2023-01-30 13:06:20.27").unwrap();
        assert_eq!(format_ts(ms), "2023-01-30 13:06:20.270");
    }

    #[test]
    fn parses_whole_seconds() {
        let ms = parse_ts("2024-09-12 11:14:22").unwrap();
        assert_eq!(format_ts(ms), "2024-09-12 11:14:22.000");
    }

    #[test]
    fn truncates_microseconds() {
        let ms = parse_ts("2023-01-01 00:00:00.123999").unwrap();
        assert_eq!(ms % 1000, 123);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_ts("not-a-date").is_err());
        assert!(parse_ts("2023-01-01 00:00:00.").is_err());
        assert!(parse_ts("2023-01-01 00:00:00.1234567").is_err());
        assert!(parse_ts("2023-13-01 00:00:00").is_err());
    }

    #[test]
    fn iso_format_carries_utc_offset() {
        let ms = parse_ts("2023-01-30 13:06:20.27").unwrap();
        assert_eq!(format_ts_iso(ms), "2023-01-30T13:06:20.270+00:00");
    }

    #[test]
    fn round_trips_format_parse() {
        for ms in [0i64, 1675084, 1675085180270, -1000] {
            assert_eq!(parse_ts(&format_ts(ms)).unwrap(), ms);
        }
    }
}
