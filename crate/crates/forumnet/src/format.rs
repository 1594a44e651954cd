//! Message logs (comma-separated table or JSON lines), role rosters and
//! sentiment lexicons.
//!
//! Both log layouts carry the same eight fields. Timestamps are
//! `YYYY-MM-DDThh:mm:ssZ`; an empty string means an absent optional field.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use forumnet_core::ingest::{self, Diagnostic, Ingested};
use forumnet_core::semantic::{Lexicon, Polarity};
use forumnet_core::{MessageEvent, Role, Roster, Timestamp};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const FIELDS: [&str; 8] = [
    "message_id",
    "thread_id",
    "parent_id",
    "author_id",
    "timestamp",
    "sentiment",
    "spam_label",
    "text",
];

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LogFormat {
    Csv,
    Jsonl,
}

impl LogFormat {
    /// `.jsonl` and `.ndjson` are JSON lines, anything else a table.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson") => LogFormat::Jsonl,
            _ => LogFormat::Csv,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogFormat::Csv => "csv",
            LogFormat::Jsonl => "jsonl",
        }
    }
}

pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .ok()
        .map(|t| Timestamp(t.and_utc().timestamp()))
}

pub fn format_timestamp(t: Timestamp) -> String {
    match DateTime::from_timestamp(t.0, 0) {
        Some(dt) => dt.format(TIMESTAMP_FORMAT).to_string(),
        None => t.0.to_string(),
    }
}

/// `30s`, `15m`, `12h`, `7d` or `2w` in seconds; must be positive.
pub fn parse_duration(s: &str) -> std::result::Result<i64, String> {
    let s = s.trim();
    let split = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    let (digits, unit) = s.split_at(split);
    let scale = match unit {
        "s" => 1,
        "m" => 60,
        "h" => 3600,
        "d" => 86_400,
        "w" => 7 * 86_400,
        _ => {
            return Err(format!(
                "invalid duration `{s}` (expected e.g. 7d, 12h, 90m, 30s, 2w)"
            ))
        }
    };
    let value: i64 = digits
        .parse()
        .map_err(|_| format!("invalid duration `{s}` (expected e.g. 7d, 12h, 90m, 30s, 2w)"))?;
    match value.checked_mul(scale) {
        Some(secs) if secs > 0 => Ok(secs),
        Some(_) => Err(format!("duration `{s}` must be positive")),
        None => Err(format!("duration `{s}` is too large")),
    }
}

pub fn format_duration(secs: i64) -> String {
    for (unit, scale) in [("d", 86_400), ("h", 3600), ("m", 60)] {
        if secs % scale == 0 {
            return format!("{}{unit}", secs / scale);
        }
    }
    format!("{secs}s")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A file's bytes with their digest.
pub struct Loaded {
    pub bytes: Vec<u8>,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let sha256 = sha256_hex(&bytes);
    Ok(Loaded { bytes, sha256 })
}

/// The eight fields of one record as text; empty means absent.
#[derive(Debug, Default)]
struct RawRecord([String; 8]);

fn decode(idx: usize, raw: RawRecord) -> std::result::Result<MessageEvent, Diagnostic> {
    let [message_id, thread_id, parent_id, author_id, timestamp, sentiment, spam_label, text] =
        raw.0;
    let id = Some(message_id.clone()).filter(|s| !s.is_empty());
    let reject = |reason: String| Diagnostic::rejected(idx, id.clone(), reason);
    if timestamp.is_empty() {
        return Err(reject("missing timestamp".into()));
    }
    let timestamp = parse_timestamp(&timestamp)
        .ok_or_else(|| reject(format!("malformed timestamp `{timestamp}`")))?;
    let sentiment = match sentiment.as_str() {
        "" => None,
        s => Some(
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| reject(format!("malformed sentiment `{s}`")))?,
        ),
    };
    let spam_label = match spam_label.to_ascii_lowercase().as_str() {
        "" => None,
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => return Err(reject(format!("malformed spam_label `{spam_label}`"))),
    };
    Ok(MessageEvent {
        message_id,
        thread_id,
        parent_id: Some(parent_id).filter(|s| !s.is_empty()),
        author_id,
        timestamp,
        sentiment,
        text: Some(text).filter(|s| !s.is_empty()),
        spam_label,
    })
}

fn csv_records(path: &Path, bytes: &[u8]) -> Result<Vec<std::result::Result<RawRecord, String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| Error::format(path, e.to_string()))?
        .clone();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    if names != FIELDS {
        return Err(Error::format(
            path,
            format!(
                "header must be `{}`, found `{}`",
                FIELDS.join(","),
                names.join(",")
            ),
        ));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        if record.len() != FIELDS.len() {
            out.push(Err(format!(
                "expected {} fields, found {}",
                FIELDS.len(),
                record.len()
            )));
            continue;
        }
        let mut raw = RawRecord::default();
        for (slot, field) in raw.0.iter_mut().zip(record.iter()) {
            *slot = field.to_string();
        }
        out.push(Ok(raw));
    }
    Ok(out)
}

fn json_field(value: &Value) -> std::result::Result<String, String> {
    match value {
        Value::Null => Ok(String::new()),
        Value::String(s) => Ok(s.clone()),
        Value::Bool(b) => Ok(b.to_string()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(format!("unsupported value {other}")),
    }
}

fn jsonl_records(path: &Path, bytes: &[u8]) -> Result<Vec<std::result::Result<RawRecord, String>>> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::format(path, format!("not UTF-8: {e}")))?;
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let object = match serde_json::from_str::<Value>(line) {
            Ok(Value::Object(map)) => map,
            Ok(_) => {
                out.push(Err("record is not a JSON object".to_string()));
                continue;
            }
            Err(e) => {
                out.push(Err(format!("malformed JSON: {e}")));
                continue;
            }
        };
        if let Some(unknown) = object.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            out.push(Err(format!("unknown field `{unknown}`")));
            continue;
        }
        let mut raw = RawRecord::default();
        let mut bad = None;
        for (slot, name) in raw.0.iter_mut().zip(FIELDS) {
            match object
                .get(name)
                .map(json_field)
                .unwrap_or(Ok(String::new()))
            {
                Ok(s) => *slot = s,
                Err(e) => bad = Some(format!("field `{name}`: {e}")),
            }
        }
        out.push(bad.map_or(Ok(raw), Err));
    }
    Ok(out)
}

/// Decodes and validates a message log. `path` is used only in errors.
pub fn parse_messages(path: &Path, bytes: &[u8], format: LogFormat) -> Result<Ingested> {
    let records = match format {
        LogFormat::Csv => csv_records(path, bytes)?,
        LogFormat::Jsonl => jsonl_records(path, bytes)?,
    };
    let total = records.len();
    let mut decoded = Vec::with_capacity(total);
    let mut diagnostics = Vec::new();
    for (idx, record) in records.into_iter().enumerate() {
        match record
            .map_err(|reason| Diagnostic::rejected(idx, None, reason))
            .and_then(|raw| decode(idx, raw))
        {
            Ok(event) => decoded.push((idx, event)),
            Err(d) => diagnostics.push(d),
        }
    }
    ingest::validate(decoded, diagnostics, total).map_err(|e| Error::data(path, e))
}

pub fn read_messages(path: &Path, format: Option<LogFormat>) -> Result<(Ingested, String)> {
    let loaded = load(path)?;
    let format = format.unwrap_or_else(|| LogFormat::from_path(path));
    Ok((parse_messages(path, &loaded.bytes, format)?, loaded.sha256))
}

fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    message_id: &'a str,
    thread_id: &'a str,
    parent_id: Option<&'a str>,
    author_id: &'a str,
    timestamp: String,
    sentiment: Option<f64>,
    spam_label: Option<bool>,
    text: Option<&'a str>,
}

pub fn write_messages<W: Write>(
    out: W,
    events: &[MessageEvent],
    format: LogFormat,
) -> std::io::Result<()> {
    match format {
        LogFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(FIELDS)?;
            for e in events {
                w.write_record([
                    e.message_id.as_str(),
                    &e.thread_id,
                    e.parent_id.as_deref().unwrap_or(""),
                    &e.author_id,
                    &format_timestamp(e.timestamp),
                    &fmt_opt_f64(e.sentiment),
                    e.spam_label
                        .map(|b| if b { "true" } else { "false" })
                        .unwrap_or(""),
                    e.text.as_deref().unwrap_or(""),
                ])?;
            }
            w.flush()
        }
        LogFormat::Jsonl => {
            let mut out = out;
            for e in events {
                let record = JsonRecord {
                    message_id: &e.message_id,
                    thread_id: &e.thread_id,
                    parent_id: e.parent_id.as_deref(),
                    author_id: &e.author_id,
                    timestamp: format_timestamp(e.timestamp),
                    sentiment: e.sentiment,
                    spam_label: e.spam_label,
                    text: e.text.as_deref(),
                };
                serde_json::to_writer(&mut out, &record)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

fn two_columns(path: &Path, bytes: &[u8], header: [&str; 2]) -> Result<Vec<(String, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let found = reader
        .headers()
        .map_err(|e| Error::format(path, e.to_string()))?
        .clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(Error::format(
            path,
            format!(
                "header must be `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        rows.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(rows)
}

pub fn parse_roster(path: &Path, bytes: &[u8]) -> Result<Roster> {
    let mut roster = Roster::new();
    for (author, role) in two_columns(path, bytes, ["author_id", "role"])? {
        let role: Role = role.parse().map_err(|e| Error::data(path, e))?;
        roster
            .insert(author, role)
            .map_err(|e| Error::data(path, e))?;
    }
    Ok(roster)
}

pub fn read_roster(path: &Path) -> Result<(Roster, String)> {
    let loaded = load(path)?;
    Ok((parse_roster(path, &loaded.bytes)?, loaded.sha256))
}

pub fn write_roster<W: Write>(out: W, roster: &Roster) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["author_id", "role"])?;
    for (author, role) in roster.iter() {
        w.write_record([author, role.as_str()])?;
    }
    w.flush()
}

pub fn parse_lexicon(path: &Path, bytes: &[u8]) -> Result<Lexicon> {
    let mut pairs = Vec::new();
    for (word, polarity) in two_columns(path, bytes, ["word", "polarity"])? {
        let polarity: Polarity = polarity.parse().map_err(|e| Error::data(path, e))?;
        pairs.push((word, polarity));
    }
    Lexicon::from_pairs(pairs).map_err(|e| Error::data(path, e))
}

pub fn read_lexicon(path: &Path) -> Result<(Lexicon, String)> {
    let loaded = load(path)?;
    Ok((parse_lexicon(path, &loaded.bytes)?, loaded.sha256))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("m.csv")
    }

    #[test]
    fn timestamps_round_trip() {
        let t = parse_timestamp("2016-03-01T10:00:00Z").unwrap();
        assert_eq!(t.0, 1_456_826_400);
        assert_eq!(format_timestamp(t), "2016-03-01T10:00:00Z");
        assert!(parse_timestamp("2016-03-01 10:00:00").is_none());
        assert!(parse_timestamp("2016-03-01T10:00:00+01:00").is_none());
    }

    #[test]
    fn durations() {
        assert_eq!(parse_duration("7d"), Ok(604_800));
        assert_eq!(parse_duration("90m"), Ok(5400));
        assert!(parse_duration("0d").is_err());
        assert!(parse_duration("7").is_err());
        assert!(parse_duration("d").is_err());
        assert_eq!(format_duration(604_800), "7d");
        assert_eq!(format_duration(86_400 * 3), "3d");
        assert_eq!(format_duration(61), "61s");
    }

    #[test]
    fn reply_with_known_parent() {
        let log = "message_id,thread_id,parent_id,author_id,timestamp,sentiment,spam_label,text\n\
                   m1,m1,,alice,2016-03-01T09:00:00Z,,,\n\
                   m2,m1,m1,bob,2016-03-01T10:00:00Z,0.25,false,hello there\n";
        let out = parse_messages(p(), log.as_bytes(), LogFormat::Csv).unwrap();
        assert!(out.diagnostics.is_empty());
        let m2 = &out.events[1];
        assert_eq!(m2.parent_id.as_deref(), Some("m1"));
        assert_eq!(m2.author_id, "bob");
        assert_eq!(m2.sentiment, Some(0.25));
        assert_eq!(m2.spam_label, Some(false));
        assert_eq!(m2.text.as_deref(), Some("hello there"));
    }

    #[test]
    fn bad_records_are_counted() {
        let log = "message_id,thread_id,parent_id,author_id,timestamp,sentiment,spam_label,text\n\
                   m1,m1,,alice,2016-03-01T09:00:00Z,,,\n\
                   m2,m1,ghost,bob,2016-03-01T10:00:00Z,,,\n\
                   m3,m1,,bob,yesterday,,,\n\
                   m4,m1,,bob,2016-03-01T10:00:00Z,1.5,,\n\
                   m5,m1,,bob\n";
        let out = parse_messages(p(), log.as_bytes(), LogFormat::Csv).unwrap();
        assert_eq!(out.input_records, 5);
        assert_eq!(out.events.len(), 2);
        assert_eq!(out.events.len() + out.rejected_count(), out.input_records);
        assert_eq!(out.events[1].parent_id, None);
        assert_eq!(out.diagnostics.len(), 4);
    }

    #[test]
    fn duplicate_id_is_fatal_and_names_path() {
        let log = "message_id,thread_id,parent_id,author_id,timestamp,sentiment,spam_label,text\n\
                   m1,m1,,alice,2016-03-01T09:00:00Z,,,\n\
                   m1,m1,,bob,2016-03-01T10:00:00Z,,,\n";
        let err = parse_messages(p(), log.as_bytes(), LogFormat::Csv).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("m.csv") && msg.contains("m1"), "{msg}");
    }

    #[test]
    fn wrong_header_is_fatal() {
        let err = parse_messages(p(), b"id,author\nm1,a\n", LogFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("header must be"));
    }

    #[test]
    fn jsonl_accepts_native_types() {
        let log = r#"{"message_id":"m1","thread_id":"m1","author_id":"a","timestamp":"2016-03-01T09:00:00Z","sentiment":0.5,"spam_label":true}
{"message_id":"m2","thread_id":"m1","parent_id":"m1","author_id":"b","timestamp":"2016-03-01T09:00:00Z","text":""}
not json
{"message_id":"m3","thread_id":"m1","author_id":"b","timestamp":"2016-03-01T09:00:00Z","extra":1}
"#;
        let out = parse_messages(p(), log.as_bytes(), LogFormat::Jsonl).unwrap();
        assert_eq!(out.input_records, 4);
        assert_eq!(out.events.len(), 2);
        assert_eq!(out.events[0].spam_label, Some(true));
        assert_eq!(out.events[1].parent_id.as_deref(), Some("m1"));
    }

    #[test]
    fn roster_rules() {
        let roster = parse_roster(p(), b"author_id,role\nalice,moderator\nbob, spammer\n").unwrap();
        assert_eq!(roster.role("alice"), Role::Moderator);
        assert_eq!(roster.role("bob"), Role::Spammer);
        assert_eq!(roster.role("carol"), Role::Regular);
        let err = parse_roster(p(), b"author_id,role\nalice,admin\n").unwrap_err();
        assert!(err.to_string().contains("moderator, spammer, regular"));
        assert!(parse_roster(p(), b"author_id,role\nalice,moderator\nalice,regular\n").is_err());
    }

    #[test]
    fn lexicon_rules() {
        let lex = parse_lexicon(p(), b"word,polarity\nGood,positive\nbad,negative\n").unwrap();
        assert_eq!(lex.polarity("good"), Some(Polarity::Positive));
        assert!(parse_lexicon(p(), b"word,polarity\ngood,neutral\n").is_err());
    }
}
