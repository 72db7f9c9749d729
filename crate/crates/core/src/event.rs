//! Browser interaction logs: the raw event schema, a streaming line parser,
//! the canonical serializer and non-fatal validation.
//!
//! A log is UTF-8 text with one JSON object per line. Every event carries
//! `kind`, `ts` (UTC milliseconds), `url` and `actor`; the remaining keys
//! (`el_name`, `el_kind`, `el_text`, `x`, `y`, `key`, `sel`, `dx`, `dy`,
//! `val`, `shot`) are optional except where the event kind needs them. Keys
//! outside the schema are kept in [`RawEvent::extra`] and written back out.
//!
//! The first non-blank line may instead be a header object without a `kind`
//! key, carrying `task` (the task title) and optionally `notes`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

/// Idle gaps longer than this are reported by [`validate_log`].
pub const DEFAULT_IDLE_GAP_MS: u64 = 120_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Click,
    Keyup,
    Select,
    Scroll,
    SwitchTab,
    Focus,
    Change,
    Submit,
    Navigate,
    Close,
}

impl EventKind {
    pub const ALL: [EventKind; 10] = [
        EventKind::Click,
        EventKind::Keyup,
        EventKind::Select,
        EventKind::Scroll,
        EventKind::SwitchTab,
        EventKind::Focus,
        EventKind::Change,
        EventKind::Submit,
        EventKind::Navigate,
        EventKind::Close,
    ];

    /// Name used on the wire.
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Click => "click",
            EventKind::Keyup => "keyup",
            EventKind::Select => "select",
            EventKind::Scroll => "scroll",
            EventKind::SwitchTab => "switch-tab",
            EventKind::Focus => "focus",
            EventKind::Change => "change",
            EventKind::Submit => "submit",
            EventKind::Navigate => "navigate",
            EventKind::Close => "close",
        }
    }

    /// Accepts the lowercase wire names; `switchtab` and `switch-tab` both
    /// map to [`EventKind::SwitchTab`].
    pub fn parse(s: &str) -> Option<EventKind> {
        Some(match s {
            "click" => EventKind::Click,
            "keyup" => EventKind::Keyup,
            "select" => EventKind::Select,
            "scroll" => EventKind::Scroll,
            "switchtab" | "switch-tab" => EventKind::SwitchTab,
            "focus" => EventKind::Focus,
            "change" => EventKind::Change,
            "submit" => EventKind::Submit,
            "navigate" => EventKind::Navigate,
            "close" => EventKind::Close,
            _ => return None,
        })
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One captured browser interaction.
#[derive(Clone, Debug, PartialEq)]
pub struct RawEvent {
    pub kind: EventKind,
    /// Milliseconds since the Unix epoch, UTC.
    pub timestamp: u64,
    pub url: String,
    pub actor_id: String,
    pub element_name: Option<String>,
    pub element_kind: Option<String>,
    pub element_text: Option<String>,
    pub coords: Option<(u32, u32)>,
    pub key_value: Option<String>,
    pub selected_text: Option<String>,
    pub scroll_dx: Option<i64>,
    pub scroll_dy: Option<i64>,
    pub new_value: Option<String>,
    /// Path relative to the asset directory.
    pub screenshot_ref: Option<String>,
    pub extra: BTreeMap<String, Value>,
}

impl RawEvent {
    /// An event with only the always-required fields set.
    pub fn new(
        kind: EventKind,
        timestamp: u64,
        url: impl Into<String>,
        actor_id: impl Into<String>,
    ) -> Self {
        RawEvent {
            kind,
            timestamp,
            url: url.into(),
            actor_id: actor_id.into(),
            element_name: None,
            element_kind: None,
            element_text: None,
            coords: None,
            key_value: None,
            selected_text: None,
            scroll_dx: None,
            scroll_dy: None,
            new_value: None,
            screenshot_ref: None,
            extra: BTreeMap::new(),
        }
    }

    /// Name of the first field this event is missing, if any.
    pub fn missing_field(&self) -> Option<&'static str> {
        if self.timestamp == 0 {
            return Some("ts");
        }
        if self.url.is_empty() {
            return Some("url");
        }
        if self.actor_id.is_empty() {
            return Some("actor");
        }
        match self.kind {
            EventKind::Click if self.coords.is_none() => Some("x"),
            EventKind::Keyup if self.key_value.is_none() => Some("key"),
            EventKind::Select if self.selected_text.is_none() => Some("sel"),
            EventKind::Scroll if self.scroll_dx.is_none() && self.scroll_dy.is_none() => Some("dy"),
            EventKind::Change if self.new_value.is_none() => Some("val"),
            _ => None,
        }
    }
}

/// A sorted, single-actor sequence of events for one task capture.
#[derive(Clone, Debug)]
pub struct EventLog {
    events: Vec<RawEvent>,
    actor_id: String,
    task_title: String,
    capture_notes: Option<String>,
    reordered: bool,
}

impl PartialEq for EventLog {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events
            && self.actor_id == other.actor_id
            && self.task_title == other.task_title
            && self.capture_notes == other.capture_notes
    }
}

impl EventLog {
    /// Builds a log, stably sorting events by timestamp.
    pub fn new(
        actor_id: impl Into<String>,
        task_title: impl Into<String>,
        capture_notes: Option<String>,
        mut events: Vec<RawEvent>,
    ) -> Result<Self, ParseError> {
        let actor_id = actor_id.into();
        if let Some(pos) = events.iter().position(|e| e.actor_id != actor_id) {
            return Err(ParseError::MixedActors {
                line: pos + 1,
                actor: events[pos].actor_id.clone(),
            });
        }
        let reordered = events.windows(2).any(|w| w[1].timestamp < w[0].timestamp);
        if reordered {
            events.sort_by_key(|e| e.timestamp);
        }
        Ok(EventLog {
            events,
            actor_id,
            task_title: task_title.into(),
            capture_notes,
            reordered,
        })
    }

    pub fn events(&self) -> &[RawEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn actor_id(&self) -> &str {
        &self.actor_id
    }

    pub fn task_title(&self) -> &str {
        &self.task_title
    }

    pub fn capture_notes(&self) -> Option<&str> {
        self.capture_notes.as_deref()
    }

    /// True when the input was not already in timestamp order.
    pub fn was_reordered(&self) -> bool {
        self.reordered
    }

    pub fn with_task_title(mut self, title: impl Into<String>) -> Self {
        self.task_title = title.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: unknown event kind {value:?}")]
    UnknownEventKind { line: usize, value: String },
    #[error("line {line}: missing field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: invalid value for `{field}`")]
    InvalidField { line: usize, field: &'static str },
    #[error("line {line}: actor {actor:?} differs from the log's actor")]
    MixedActors { line: usize, actor: String },
    #[error("log contains no events")]
    EmptyLog,
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::MalformedRecord { line, .. }
            | ParseError::UnknownEventKind { line, .. }
            | ParseError::MissingField { line, .. }
            | ParseError::InvalidField { line, .. }
            | ParseError::MixedActors { line, .. } => Some(*line),
            ParseError::EmptyLog => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Reject logs without events.
    pub strict: bool,
    /// Used when the log has no header line.
    pub default_title: String,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            strict: true,
            default_title: String::new(),
        }
    }
}

const KNOWN_KEYS: [&str; 15] = [
    "kind", "ts", "url", "actor", "el_name", "el_kind", "el_text", "x", "y", "key", "sel", "dx",
    "dy", "val", "shot",
];

/// Incremental parser; feed lines as they are read so large captures never
/// have to be buffered as one string.
#[derive(Debug)]
pub struct LogParser {
    opts: ParseOptions,
    events: Vec<RawEvent>,
    title: Option<String>,
    notes: Option<String>,
    header_actor: Option<String>,
    actor: Option<String>,
    seen_record: bool,
}

impl LogParser {
    pub fn new(opts: ParseOptions) -> Self {
        LogParser {
            opts,
            events: Vec::new(),
            title: None,
            notes: None,
            header_actor: None,
            actor: None,
            seen_record: false,
        }
    }

    /// Parses one line; `line_no` is 1-based and used in errors.
    pub fn push_line(&mut self, line_no: usize, line: &str) -> Result<(), ParseError> {
        let line = line.trim();
        if line.is_empty() {
            return Ok(());
        }
        let value: Value = serde_json::from_str(line).map_err(|e| ParseError::MalformedRecord {
            line: line_no,
            reason: e.to_string(),
        })?;
        let Value::Object(map) = value else {
            return Err(ParseError::MalformedRecord {
                line: line_no,
                reason: "not an object".into(),
            });
        };
        let first = !self.seen_record;
        self.seen_record = true;
        if first && !map.contains_key("kind") && map.contains_key("task") {
            return self.header(line_no, map);
        }
        let event = parse_event(line_no, map)?;
        match &self.actor {
            Some(actor) if *actor != event.actor_id => {
                return Err(ParseError::MixedActors {
                    line: line_no,
                    actor: event.actor_id,
                });
            }
            Some(_) => {}
            None => {
                if let Some(h) = &self.header_actor {
                    if *h != event.actor_id {
                        return Err(ParseError::MixedActors {
                            line: line_no,
                            actor: event.actor_id,
                        });
                    }
                }
                self.actor = Some(event.actor_id.clone());
            }
        }
        self.events.push(event);
        Ok(())
    }

    fn header(&mut self, line_no: usize, map: Map<String, Value>) -> Result<(), ParseError> {
        let field = |key: &'static str| -> Result<Option<String>, ParseError> {
            match map.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::String(s)) => Ok(Some(s.clone())),
                Some(_) => Err(ParseError::InvalidField {
                    line: line_no,
                    field: key,
                }),
            }
        };
        self.title = field("task")?;
        self.notes = field("notes")?;
        self.header_actor = field("actor")?;
        Ok(())
    }

    pub fn finish(self) -> Result<EventLog, ParseError> {
        if self.events.is_empty() && self.opts.strict {
            return Err(ParseError::EmptyLog);
        }
        let actor = self.actor.or(self.header_actor).unwrap_or_default();
        let title = self.title.unwrap_or(self.opts.default_title);
        EventLog::new(actor, title, self.notes, self.events)
    }
}

/// Parses a whole log held in memory.
pub fn parse_log(input: &str, opts: &ParseOptions) -> Result<EventLog, ParseError> {
    let mut parser = LogParser::new(opts.clone());
    for (i, line) in input.lines().enumerate() {
        parser.push_line(i + 1, line)?;
    }
    parser.finish()
}

fn parse_event(line: usize, mut map: Map<String, Value>) -> Result<RawEvent, ParseError> {
    let kind = match map.get("kind") {
        Some(Value::String(s)) => {
            EventKind::parse(s).ok_or_else(|| ParseError::UnknownEventKind {
                line,
                value: s.clone(),
            })?
        }
        Some(_) => {
            return Err(ParseError::InvalidField {
                line,
                field: "kind",
            })
        }
        None => {
            return Err(ParseError::MissingField {
                line,
                field: "kind",
            })
        }
    };
    let required_str =
        |map: &Map<String, Value>, key: &'static str| -> Result<String, ParseError> {
            match map.get(key) {
                Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
                Some(Value::String(_)) | None | Some(Value::Null) => {
                    Err(ParseError::MissingField { line, field: key })
                }
                Some(_) => Err(ParseError::InvalidField { line, field: key }),
            }
        };
    let timestamp = match map.get("ts") {
        Some(v) => match v.as_u64() {
            Some(ts) if ts > 0 => ts,
            _ => return Err(ParseError::InvalidField { line, field: "ts" }),
        },
        None => return Err(ParseError::MissingField { line, field: "ts" }),
    };
    let url = required_str(&map, "url")?;
    let actor = required_str(&map, "actor")?;

    let opt_str =
        |map: &Map<String, Value>, key: &'static str| -> Result<Option<String>, ParseError> {
            match map.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::String(s)) => Ok(Some(s.clone())),
                Some(_) => Err(ParseError::InvalidField { line, field: key }),
            }
        };
    let opt_u32 =
        |map: &Map<String, Value>, key: &'static str| -> Result<Option<u32>, ParseError> {
            match map.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => v
                    .as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .map(Some)
                    .ok_or(ParseError::InvalidField { line, field: key }),
            }
        };
    let opt_i64 =
        |map: &Map<String, Value>, key: &'static str| -> Result<Option<i64>, ParseError> {
            match map.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => v
                    .as_i64()
                    .map(Some)
                    .ok_or(ParseError::InvalidField { line, field: key }),
            }
        };

    let coords = match (opt_u32(&map, "x")?, opt_u32(&map, "y")?) {
        (Some(x), Some(y)) => Some((x, y)),
        (None, None) => None,
        (Some(_), None) => return Err(ParseError::MissingField { line, field: "y" }),
        (None, Some(_)) => return Err(ParseError::MissingField { line, field: "x" }),
    };
    let mut event = RawEvent {
        kind,
        timestamp,
        url,
        actor_id: actor,
        element_name: opt_str(&map, "el_name")?,
        element_kind: opt_str(&map, "el_kind")?,
        element_text: opt_str(&map, "el_text")?,
        coords,
        key_value: opt_str(&map, "key")?,
        selected_text: opt_str(&map, "sel")?,
        scroll_dx: opt_i64(&map, "dx")?,
        scroll_dy: opt_i64(&map, "dy")?,
        new_value: opt_str(&map, "val")?,
        screenshot_ref: opt_str(&map, "shot")?,
        extra: BTreeMap::new(),
    };
    if let Some(field) = event.missing_field() {
        return Err(ParseError::MissingField { line, field });
    }
    for key in KNOWN_KEYS {
        map.remove(key);
    }
    event.extra = map.into_iter().collect();
    Ok(event)
}

#[derive(Serialize)]
struct Header<'a> {
    task: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    notes: Option<&'a str>,
    actor: &'a str,
}

#[derive(Serialize)]
struct Record<'a> {
    kind: &'static str,
    ts: u64,
    url: &'a str,
    actor: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    el_name: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    el_kind: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    el_text: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    key: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sel: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dx: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dy: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    val: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shot: Option<&'a str>,
    #[serde(flatten)]
    extra: &'a BTreeMap<String, Value>,
}

impl<'a> From<&'a RawEvent> for Record<'a> {
    fn from(e: &'a RawEvent) -> Self {
        Record {
            kind: e.kind.as_str(),
            ts: e.timestamp,
            url: &e.url,
            actor: &e.actor_id,
            el_name: e.element_name.as_deref(),
            el_kind: e.element_kind.as_deref(),
            el_text: e.element_text.as_deref(),
            x: e.coords.map(|c| c.0),
            y: e.coords.map(|c| c.1),
            key: e.key_value.as_deref(),
            sel: e.selected_text.as_deref(),
            dx: e.scroll_dx,
            dy: e.scroll_dy,
            val: e.new_value.as_deref(),
            shot: e.screenshot_ref.as_deref(),
            extra: &e.extra,
        }
    }
}

/// Serializes one event as a single JSON line (no trailing newline).
pub fn serialize_event(event: &RawEvent) -> String {
    serde_json::to_string(&Record::from(event)).expect("event records always serialize")
}

/// Canonical text form of a log: a header line followed by one line per
/// event, each terminated by `\n`.
pub fn serialize_log(log: &EventLog) -> String {
    let mut out = serde_json::to_string(&Header {
        task: &log.task_title,
        notes: log.capture_notes.as_deref(),
        actor: &log.actor_id,
    })
    .expect("header always serializes");
    out.push('\n');
    for e in &log.events {
        out.push_str(&serialize_event(e));
        out.push('\n');
    }
    out
}

/// Answers whether a relative asset path exists.
pub trait AssetLookup {
    fn contains(&self, path: &str) -> bool;
}

impl AssetLookup for alloc::collections::BTreeSet<String> {
    fn contains(&self, path: &str) -> bool {
        alloc::collections::BTreeSet::contains(self, path)
    }
}

impl<F: Fn(&str) -> bool> AssetLookup for F {
    fn contains(&self, path: &str) -> bool {
        self(path)
    }
}

/// Non-fatal findings about a parsed log. Indices refer to sorted events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    /// Input lines were not in timestamp order and have been sorted.
    OutOfOrderInput,
    DuplicateTimestamp {
        index: usize,
        timestamp: u64,
    },
    NonHttpScheme {
        index: usize,
        url: String,
    },
    IdleGap {
        index: usize,
        gap_ms: u64,
    },
    DanglingAsset {
        index: usize,
        path: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::OutOfOrderInput => {
                write!(f, "warning: events were out of order and have been sorted")
            }
            Diagnostic::DuplicateTimestamp { index, timestamp } => {
                write!(f, "warning: event {index}: duplicate timestamp {timestamp}")
            }
            Diagnostic::NonHttpScheme { index, url } => {
                write!(f, "warning: event {index}: non-http(s) url {url}")
            }
            Diagnostic::IdleGap { index, gap_ms } => {
                write!(
                    f,
                    "warning: event {index}: idle gap of {} s before this event",
                    gap_ms / 1000
                )
            }
            Diagnostic::DanglingAsset { index, path } => {
                write!(f, "warning: event {index}: screenshot {path} not found")
            }
        }
    }
}

pub struct ValidateOptions<'a> {
    pub idle_gap_ms: u64,
    /// When set, screenshot references are checked against it.
    pub assets: Option<&'a dyn AssetLookup>,
}

impl Default for ValidateOptions<'_> {
    fn default() -> Self {
        ValidateOptions {
            idle_gap_ms: DEFAULT_IDLE_GAP_MS,
            assets: None,
        }
    }
}

pub fn validate_log(log: &EventLog, opts: &ValidateOptions<'_>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if log.reordered {
        out.push(Diagnostic::OutOfOrderInput);
    }
    for (index, e) in log.events.iter().enumerate() {
        if let Some(prev) = index.checked_sub(1).map(|i| &log.events[i]) {
            if prev.timestamp == e.timestamp {
                out.push(Diagnostic::DuplicateTimestamp {
                    index,
                    timestamp: e.timestamp,
                });
            }
            let gap = e.timestamp - prev.timestamp;
            if gap > opts.idle_gap_ms {
                out.push(Diagnostic::IdleGap { index, gap_ms: gap });
            }
        }
        let http = matches!(crate::url::scheme(&e.url), Some(s) if s.eq_ignore_ascii_case("http") || s.eq_ignore_ascii_case("https"));
        if !http {
            out.push(Diagnostic::NonHttpScheme {
                index,
                url: e.url.clone(),
            });
        }
        if let (Some(assets), Some(shot)) = (opts.assets, &e.screenshot_ref) {
            if !assets.contains(shot) {
                out.push(Diagnostic::DanglingAsset {
                    index,
                    path: shot.clone(),
                });
            }
        }
    }
    out
}
