//! Live detection from MQTT sources.
//!
//! One connection per source, each on its own thread, funneled into a
//! single channel. Events are processed in arrival order; per-station ts
//! monotonicity is enforced with the same policy as replay.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use rumqttc::{Client, Event, MqttOptions, Packet, QoS};

use crate::compile::DetectorSpec;
use crate::config::{IoTSystem, SourceDecl, SourceKind, Station};

use super::detector::{ActivityDetection, Detector};
use super::event::Decoder;
use super::merge::OrderPolicy;
use super::run::{EventHooks, RunSummary};
use super::EngineError;

#[derive(Debug, Clone)]
pub struct LiveOptions {
    pub policy: OrderPolicy,
    pub max_events: Option<u64>,
    /// How long to keep retrying the initial broker connection.
    pub connect_deadline: Duration,
    /// Cooperative shutdown: when the flag flips to true the run returns
    /// cleanly with everything processed so far.
    pub stop: Option<Arc<AtomicBool>>,
}

impl Default for LiveOptions {
    fn default() -> Self {
        LiveOptions {
            policy: OrderPolicy::default(),
            max_events: None,
            connect_deadline: Duration::from_secs(30),
            stop: None,
        }
    }
}

enum LiveMsg {
    Subscribed(String),
    Event(super::event::SensorEvent),
    Warning(String),
    Skipped,
    Fatal(String),
    Nop,
}

/// Runs detectors against live MQTT streams until `max_events` events have
/// been processed. `on_ready` fires once every source subscription has been
/// acknowledged by the broker.
pub fn run_live(
    system: &IoTSystem,
    specs: &[DetectorSpec],
    opts: &LiveOptions,
    on_ready: impl FnOnce(),
    hooks: &mut EventHooks,
) -> Result<(RunSummary, Vec<ActivityDetection>), EngineError> {
    let mut detectors: Vec<Detector> = specs.iter().cloned().map(Detector::new).collect();

    let mut source_ids: Vec<&str> = Vec::new();
    for spec in specs {
        for b in &spec.subscribed_stations {
            if !source_ids.contains(&b.source.as_str()) {
                source_ids.push(&b.source);
            }
        }
    }
    if source_ids.is_empty() {
        return Err(EngineError::Mqtt("no sources to subscribe to".to_string()));
    }

    let (tx, rx) = mpsc::channel::<LiveMsg>();
    for id in &source_ids {
        let source = system
            .source(id)
            .ok_or_else(|| EngineError::Mqtt(format!("unknown source {id:?}")))?;
        let SourceKind::Mqtt { url, topic } = &source.kind else {
            return Err(EngineError::Mqtt(format!(
                "live mode requires mqtt sources; source {id:?} reads a file"
            )));
        };
        let (host, port) = parse_broker_url(url)?;
        let stations: Vec<Station> = system
            .stations
            .iter()
            .filter(|s| s.source == *id)
            .cloned()
            .collect();
        let worker = SourceWorker {
            source: source.clone(),
            stations,
            host,
            port,
            topic: topic.clone(),
            deadline: opts.connect_deadline,
            tx: tx.clone(),
        };
        thread::spawn(move || worker.run());
    }
    drop(tx);

    let mut summary = RunSummary::new("live");
    let mut detections = Vec::new();
    let mut ready: HashSet<String> = HashSet::new();
    let mut on_ready = Some(on_ready);
    let mut last_ts: HashMap<String, i64> = HashMap::new();

    loop {
        if opts
            .stop
            .as_ref()
            .is_some_and(|flag| flag.load(Ordering::Relaxed))
        {
            break;
        }
        let msg = match rx.recv_timeout(Duration::from_millis(50)) {
            Ok(msg) => msg,
            Err(mpsc::RecvTimeoutError::Timeout) => continue,
            Err(mpsc::RecvTimeoutError::Disconnected) => break,
        };
        match msg {
            LiveMsg::Subscribed(id) => {
                ready.insert(id);
                if ready.len() == source_ids.len() {
                    if let Some(f) = on_ready.take() {
                        f();
                    }
                }
            }
            LiveMsg::Event(event) => {
                if let Some(&prev) = last_ts.get(&event.station) {
                    if event.ts < prev {
                        match opts.policy {
                            OrderPolicy::DropAndWarn => {
                                summary.dropped_out_of_order += 1;
                                continue;
                            }
                            OrderPolicy::Abort => {
                                return Err(EngineError::OutOfOrder {
                                    station: event.station,
                                    ts: event.ts,
                                    previous: prev,
                                });
                            }
                        }
                    }
                }
                last_ts.insert(event.station.clone(), event.ts);
                summary.events += 1;
                for detector in detectors.iter_mut() {
                    for pe in detector.step(&event) {
                        hooks.pattern(&detector.spec.activity, &pe)?;
                        if let Some(d) = detector.advance(&pe) {
                            hooks.detection(&d)?;
                            summary.count(&d);
                            detections.push(d);
                        }
                    }
                }
                if opts
                    .max_events
                    .is_some_and(|max| summary.events >= max)
                {
                    break;
                }
            }
            LiveMsg::Warning(w) => summary.warnings.push(w),
            LiveMsg::Skipped => summary.skipped_payloads += 1,
            LiveMsg::Fatal(message) => return Err(EngineError::Mqtt(message)),
            LiveMsg::Nop => {}
        }
    }

    Ok((summary, detections))
}

fn parse_broker_url(raw: &str) -> Result<(String, u16), EngineError> {
    let parsed = url::Url::parse(raw)
        .map_err(|e| EngineError::Mqtt(format!("invalid broker url {raw:?}: {e}")))?;
    match parsed.scheme() {
        "tcp" | "mqtt" => {}
        other => {
            return Err(EngineError::Mqtt(format!(
                "unsupported broker url scheme {other:?} in {raw:?}; expected tcp or mqtt"
            )));
        }
    }
    let host = parsed
        .host_str()
        .ok_or_else(|| EngineError::Mqtt(format!("broker url {raw:?} lacks a host")))?
        .to_string();
    Ok((host, parsed.port().unwrap_or(1883)))
}

struct SourceWorker {
    source: SourceDecl,
    stations: Vec<Station>,
    host: String,
    port: u16,
    topic: String,
    deadline: Duration,
    tx: mpsc::Sender<LiveMsg>,
}

impl SourceWorker {
    fn run(self) {
        let mut options =
            MqttOptions::new(self.source.effective_client_id(), &self.host, self.port);
        options.set_keep_alive(Duration::from_secs(30));
        let (client, mut connection) = Client::new(options, 100);
        if client.subscribe(&self.topic, QoS::AtLeastOnce).is_err() {
            let _ = self.tx.send(LiveMsg::Fatal("mqtt client closed".to_string()));
            return;
        }

        let station_refs: Vec<&Station> = self.stations.iter().collect();
        let mut decoder = Decoder::new(&self.source, station_refs, true);
        let started = Instant::now();
        let mut connected_once = false;
        let mut acked_once = false;

        for item in connection.iter() {
            match item {
                Ok(Event::Incoming(Packet::ConnAck(_))) => {
                    if connected_once {
                        // Session state is not retained across reconnects.
                        let _ = client.subscribe(&self.topic, QoS::AtLeastOnce);
                    }
                    connected_once = true;
                }
                Ok(Event::Incoming(Packet::SubAck(_))) => {
                    if !acked_once {
                        acked_once = true;
                        if self
                            .tx
                            .send(LiveMsg::Subscribed(self.source.id.clone()))
                            .is_err()
                        {
                            break;
                        }
                    }
                }
                Ok(Event::Incoming(Packet::Publish(publish))) => {
                    let Ok(payload) = std::str::from_utf8(&publish.payload) else {
                        if self.tx.send(LiveMsg::Skipped).is_err() {
                            break;
                        }
                        continue;
                    };
                    let before = decoder.skipped;
                    let decoded = decoder
                        .decode(payload, &format!("topic {}", publish.topic))
                        .ok()
                        .flatten();
                    let mut closed = false;
                    for w in decoder.warnings.drain(..) {
                        closed |= self.tx.send(LiveMsg::Warning(w)).is_err();
                    }
                    if decoder.skipped > before {
                        closed |= self.tx.send(LiveMsg::Skipped).is_err();
                    }
                    if let Some(ev) = decoded {
                        closed |= self.tx.send(LiveMsg::Event(ev)).is_err();
                    }
                    if closed {
                        break;
                    }
                }
                Ok(_) => {}
                Err(e) => {
                    if !connected_once && started.elapsed() > self.deadline {
                        let _ = self.tx.send(LiveMsg::Fatal(format!(
                            "could not reach broker {}:{} within {:?}: {e}",
                            self.host, self.port, self.deadline
                        )));
                        break;
                    }
                    if self.tx.send(LiveMsg::Nop).is_err() {
                        break;
                    }
                    thread::sleep(Duration::from_millis(500));
                }
            }
        }
    }
}
