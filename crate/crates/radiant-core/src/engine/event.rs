//! Sensor events and payload decoding.
//!
//! A payload is one JSON object per schema: a `ts` string plus numeric
//! sensor fields. Decoding is tolerant of noisy streams (malformed lines and
//! unknown fields are skipped with counted or one-time warnings); only
//! timestamps are load-bearing enough to stop a file replay.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use indexmap::IndexMap;

use crate::config::{FieldType, SourceDecl, Station};
use crate::time::parse_ts;

use super::EngineError;

#[derive(Debug, Clone, PartialEq)]
pub struct SensorEvent {
    pub station: String,
    pub ts: i64,
    /// Sensor readings carried by this event, keyed by sensor id.
    pub values: IndexMap<String, f64>,
}

/// Decodes payloads of one source, routing them to its assigned stations.
pub struct Decoder<'a> {
    source: &'a SourceDecl,
    stations: Vec<&'a Station>,
    /// Treat a bad timestamp as a skippable decode failure instead of a
    /// hard error; used for live streams.
    lenient_ts: bool,
    warned: HashSet<String>,
    pub warnings: Vec<String>,
    pub skipped: u64,
}

impl<'a> Decoder<'a> {
    pub fn new(source: &'a SourceDecl, stations: Vec<&'a Station>, lenient_ts: bool) -> Self {
        Decoder {
            source,
            stations,
            lenient_ts,
            warned: HashSet::new(),
            warnings: Vec::new(),
            skipped: 0,
        }
    }

    fn warn_once(&mut self, key: String, message: String) {
        if self.warned.insert(key) {
            self.warnings.push(message);
        }
    }

    fn skip(&mut self, key: &str, message: String) {
        self.skipped += 1;
        self.warn_once(key.to_string(), message);
    }

    /// Decodes one payload. `Ok(None)` means the payload was skipped with a
    /// warning; `where_` names the payload in messages (line number or topic).
    pub fn decode(&mut self, payload: &str, where_: &str) -> Result<Option<SensorEvent>, EngineError> {
        let obj: serde_json::Map<String, serde_json::Value> = match serde_json::from_str(payload) {
            Ok(v) => v,
            Err(e) => {
                self.skip(
                    "malformed",
                    format!("source {}: skipping malformed payloads ({where_}: {e})", self.source.id),
                );
                return Ok(None);
            }
        };

        let ts = match obj.get("ts").and_then(|v| v.as_str()) {
            Some(raw) => match parse_ts(raw) {
                Ok(ms) => ms,
                Err(e) => {
                    if self.lenient_ts {
                        self.skip("bad-ts", format!("source {}: {e} ({where_})", self.source.id));
                        return Ok(None);
                    }
                    return Err(EngineError::Timestamp {
                        location: where_.to_string(),
                        message: e.to_string(),
                    });
                }
            },
            None => {
                if self.lenient_ts {
                    self.skip("no-ts", format!("source {}: payload lacks a ts field ({where_})", self.source.id));
                    return Ok(None);
                }
                return Err(EngineError::Timestamp {
                    location: where_.to_string(),
                    message: "payload lacks a ts field".to_string(),
                });
            }
        };

        let payload_station = obj.get("station").and_then(|v| v.as_str());
        let station = if self.stations.len() == 1 {
            let assigned = self.stations[0];
            if let Some(claimed) = payload_station {
                if claimed != assigned.id {
                    self.skip(
                        &format!("station-{claimed}"),
                        format!(
                            "source {}: payload claims station {claimed:?} but the source feeds {:?}; skipping such payloads",
                            self.source.id, assigned.id
                        ),
                    );
                    return Ok(None);
                }
            }
            assigned
        } else {
            let Some(claimed) = payload_station else {
                self.skip(
                    "ambiguous-station",
                    format!(
                        "source {} feeds {} stations but payloads lack a station field; skipping them",
                        self.source.id,
                        self.stations.len()
                    ),
                );
                return Ok(None);
            };
            match self.stations.iter().find(|s| s.id == claimed) {
                Some(s) => s,
                None => {
                    self.skip(
                        &format!("station-{claimed}"),
                        format!(
                            "source {}: payload claims unknown station {claimed:?}; skipping such payloads",
                            self.source.id
                        ),
                    );
                    return Ok(None);
                }
            }
        };

        let mut values = IndexMap::new();
        for (field, ftype) in &self.source.schema {
            if field == "ts" {
                continue;
            }
            let Some(raw) = obj.get(field) else {
                self.warn_once(
                    format!("missing-{field}"),
                    format!("source {}: payloads are missing schema field {field:?}", self.source.id),
                );
                continue;
            };
            match ftype {
                FieldType::Int | FieldType::Float => match raw.as_f64() {
                    Some(v) => {
                        values.insert(field.clone(), v);
                    }
                    None => {
                        self.skip(
                            &format!("type-{field}"),
                            format!(
                                "source {}: field {field:?} is not numeric; skipping such payloads",
                                self.source.id
                            ),
                        );
                        return Ok(None);
                    }
                },
                FieldType::String => {}
            }
        }

        for field in obj.keys() {
            if !self.source.schema.contains_key(field) && field != "station" {
                self.warn_once(
                    format!("extra-{field}"),
                    format!(
                        "source {}: ignoring field {field:?} not declared in the schema",
                        self.source.id
                    ),
                );
            }
        }

        Ok(Some(SensorEvent {
            station: station.id.clone(),
            ts,
            values,
        }))
    }
}

/// Reads a line-delimited JSON trace. Returns the events in file order plus
/// the decoder's warnings and skip count.
pub fn ingest_file(
    path: &Path,
    source: &SourceDecl,
    stations: Vec<&Station>,
) -> Result<(Vec<SensorEvent>, Vec<String>, u64), EngineError> {
    let file = File::open(path).map_err(|e| EngineError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut decoder = Decoder::new(source, stations, false);
    let mut events = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| EngineError::Input {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let where_ = format!("{}:{}", path.display(), i + 1);
        if let Some(ev) = decoder.decode(&line, &where_)? {
            events.push(ev);
        }
    }
    Ok((events, decoder.warnings, decoder.skipped))
}
