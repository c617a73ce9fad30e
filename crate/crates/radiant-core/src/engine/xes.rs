//! XES export of detected activities.
//!
//! One trace per process; each detection contributes a `start` and a
//! `complete` event with the activity as `concept:name`. Events are ordered
//! by timestamp, with starts before completes on ties.

use std::io::Write;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::Writer;

use crate::time::format_ts_iso;

use super::detector::ActivityDetection;
use super::EngineError;

const EXTENSIONS: [(&str, &str, &str); 3] = [
    ("Concept", "concept", "http://www.xes-standard.org/concept.xesext"),
    ("Lifecycle", "lifecycle", "http://www.xes-standard.org/lifecycle.xesext"),
    ("Time", "time", "http://www.xes-standard.org/time.xesext"),
];

pub fn export_xes<W: Write>(detections: &[ActivityDetection], out: W) -> Result<(), EngineError> {
    let mut writer = Writer::new_with_indent(out, b' ', 2);
    writer.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;

    let mut log = BytesStart::new("log");
    log.push_attribute(("xes.version", "1.0"));
    log.push_attribute(("xmlns", "http://www.xes-standard.org/"));
    writer.write_event(Event::Start(log))?;

    for (name, prefix, uri) in EXTENSIONS {
        let mut ext = BytesStart::new("extension");
        ext.push_attribute(("name", name));
        ext.push_attribute(("prefix", prefix));
        ext.push_attribute(("uri", uri));
        writer.write_event(Event::Empty(ext))?;
    }

    let mut processes: Vec<&str> = Vec::new();
    for d in detections {
        if !processes.contains(&d.process.as_str()) {
            processes.push(&d.process);
        }
    }

    for process in processes {
        writer.write_event(Event::Start(BytesStart::new("trace")))?;
        string_attr(&mut writer, "concept:name", process)?;

        // (ts, 0 start / 1 complete, activity)
        let mut events: Vec<(i64, u8, &str)> = Vec::new();
        for d in detections.iter().filter(|d| d.process == process) {
            events.push((d.ts_start, 0, &d.activity));
            events.push((d.ts_end, 1, &d.activity));
        }
        events.sort();

        for (ts, transition, activity) in events {
            writer.write_event(Event::Start(BytesStart::new("event")))?;
            string_attr(&mut writer, "concept:name", activity)?;
            string_attr(
                &mut writer,
                "lifecycle:transition",
                if transition == 0 { "start" } else { "complete" },
            )?;
            let mut date = BytesStart::new("date");
            date.push_attribute(("key", "time:timestamp"));
            date.push_attribute(("value", format_ts_iso(ts).as_str()));
            writer.write_event(Event::Empty(date))?;
            writer.write_event(Event::End(BytesEnd::new("event")))?;
        }

        writer.write_event(Event::End(BytesEnd::new("trace")))?;
    }

    writer.write_event(Event::End(BytesEnd::new("log")))?;
    Ok(())
}

fn string_attr<W: Write>(
    writer: &mut Writer<W>,
    key: &str,
    value: &str,
) -> Result<(), EngineError> {
    let mut el = BytesStart::new("string");
    el.push_attribute(("key", key));
    el.push_attribute(("value", value));
    writer.write_event(Event::Empty(el))?;
    Ok(())
}
