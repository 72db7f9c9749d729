//! Steps: coalesced runs of raw events with one action kind, and their
//! knowledge-management classification.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{EventKind, EventLog, RawEvent};
use crate::rules::MappingRules;
use crate::url;

/// Action kind of a step. Ordering is the declaration order and is used to
/// sort mined patterns lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepKind {
    Navigate,
    Search,
    Fill,
    Upload,
    Annotate,
    Highlight,
    ApplyResource,
    ApplyRecommendation,
    Unknown,
}

impl StepKind {
    pub const ALL: [StepKind; 9] = [
        StepKind::Navigate,
        StepKind::Search,
        StepKind::Fill,
        StepKind::Upload,
        StepKind::Annotate,
        StepKind::Highlight,
        StepKind::ApplyResource,
        StepKind::ApplyRecommendation,
        StepKind::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Navigate => "NAVIGATE",
            StepKind::Search => "SEARCH",
            StepKind::Fill => "FILL",
            StepKind::Upload => "UPLOAD",
            StepKind::Annotate => "ANNOTATE",
            StepKind::Highlight => "HIGHLIGHT",
            StepKind::ApplyResource => "APPLY_RESOURCE",
            StepKind::ApplyRecommendation => "APPLY_RECOMMENDATION",
            StepKind::Unknown => "UNKNOWN",
        }
    }

    pub fn parse(s: &str) -> Option<StepKind> {
        StepKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Plain-language label shown to readers instead of the internal name.
    pub fn label(self) -> &'static str {
        match self {
            StepKind::Navigate => "Go to",
            StepKind::Search => "Find",
            StepKind::Fill => "Fill in",
            StepKind::Upload => "Upload",
            StepKind::Annotate => "Annotate",
            StepKind::Highlight => "Highlight",
            StepKind::ApplyResource => "Use resource",
            StepKind::ApplyRecommendation => "Follow recommendation",
            StepKind::Unknown => "Other action",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KmProcess {
    Access,
    Store,
    Sharing,
    Application,
}

impl KmProcess {
    pub fn name(self) -> &'static str {
        match self {
            KmProcess::Access => "Knowledge Access",
            KmProcess::Store => "Knowledge Store",
            KmProcess::Sharing => "Knowledge Sharing",
            KmProcess::Application => "Knowledge Application",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KmSubprocess {
    Navigation,
    Search,
    FillingInformation,
    UploadingResources,
    DocumentAnnotation,
    HighlightInformation,
    InteractWithResources,
    RelyOnRecommendations,
    NoProcess,
}

impl KmSubprocess {
    pub const ALL: [KmSubprocess; 9] = [
        KmSubprocess::Navigation,
        KmSubprocess::Search,
        KmSubprocess::FillingInformation,
        KmSubprocess::UploadingResources,
        KmSubprocess::DocumentAnnotation,
        KmSubprocess::HighlightInformation,
        KmSubprocess::InteractWithResources,
        KmSubprocess::RelyOnRecommendations,
        KmSubprocess::NoProcess,
    ];

    pub fn parent(self) -> Option<KmProcess> {
        Some(match self {
            KmSubprocess::Navigation | KmSubprocess::Search => KmProcess::Access,
            KmSubprocess::FillingInformation | KmSubprocess::UploadingResources => KmProcess::Store,
            KmSubprocess::DocumentAnnotation | KmSubprocess::HighlightInformation => {
                KmProcess::Sharing
            }
            KmSubprocess::InteractWithResources | KmSubprocess::RelyOnRecommendations => {
                KmProcess::Application
            }
            KmSubprocess::NoProcess => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            KmSubprocess::Navigation => "Navigation",
            KmSubprocess::Search => "Search",
            KmSubprocess::FillingInformation => "Filling information",
            KmSubprocess::UploadingResources => "Uploading resources",
            KmSubprocess::DocumentAnnotation => "Document annotation",
            KmSubprocess::HighlightInformation => "Highlight information",
            KmSubprocess::InteractWithResources => "Interact with resources",
            KmSubprocess::RelyOnRecommendations => "Rely on recommendations",
            KmSubprocess::NoProcess => "No process",
        }
    }
}

impl fmt::Display for KmSubprocess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fixed mapping from step kind to subprocess.
pub fn taxonomy(kind: StepKind) -> KmSubprocess {
    match kind {
        StepKind::Navigate => KmSubprocess::Navigation,
        StepKind::Search => KmSubprocess::Search,
        StepKind::Fill => KmSubprocess::FillingInformation,
        StepKind::Upload => KmSubprocess::UploadingResources,
        StepKind::Annotate => KmSubprocess::DocumentAnnotation,
        StepKind::Highlight => KmSubprocess::HighlightInformation,
        StepKind::ApplyResource => KmSubprocess::InteractWithResources,
        StepKind::ApplyRecommendation => KmSubprocess::RelyOnRecommendations,
        StepKind::Unknown => KmSubprocess::NoProcess,
    }
}

/// Half-open index range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }

    pub fn indices(&self) -> core::ops::Range<usize> {
        self.start..self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssetKind {
    Screenshot,
    Link,
    Annotation,
    HighlightedText,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextAsset {
    pub kind: AssetKind,
    /// Relative path, URL or text depending on `kind`.
    pub payload: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub index: usize,
    pub kind: StepKind,
    pub subprocess: KmSubprocess,
    pub event_span: Span,
    pub primary_url: String,
    pub summary: String,
    pub start_ts: u64,
    pub end_ts: u64,
    #[serde(default)]
    pub context: Vec<ContextAsset>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("log contains no events")]
    EmptyLog,
    #[error("asset directory {0:?} does not exist")]
    AssetDirMissing(String),
}

/// Kind of the first rule matching `e`, or [`StepKind::Unknown`].
pub fn classify_event(e: &RawEvent, rules: &MappingRules) -> StepKind {
    rules
        .rules
        .iter()
        .find(|r| r.matches(e))
        .map_or(StepKind::Unknown, |r| r.step)
}

/// Partitions the log into steps.
///
/// Events are classified one by one. A selection immediately followed, on
/// the same page and within the coalescing gap, by an annotation event is
/// folded into that annotation. Consecutive events then merge while kind,
/// page and gap allow; anything else starts a new step.
pub fn map_steps(log: &EventLog, rules: &MappingRules) -> Result<Vec<Step>, StepError> {
    let events = log.events();
    if events.is_empty() {
        return Err(StepError::EmptyLog);
    }
    let mut kinds: Vec<StepKind> = events.iter().map(|e| classify_event(e, rules)).collect();
    for i in 0..events.len() - 1 {
        if events[i].kind == EventKind::Select
            && kinds[i] == StepKind::Highlight
            && kinds[i + 1] == StepKind::Annotate
            && joins(&events[i], &events[i + 1], rules.coalesce_gap_ms)
        {
            kinds[i] = StepKind::Annotate;
        }
    }

    let mut steps = Vec::new();
    let mut start = 0;
    for i in 1..=events.len() {
        let boundary = i == events.len()
            || kinds[i] != kinds[start]
            || !joins(&events[i - 1], &events[i], rules.coalesce_gap_ms);
        if boundary {
            let span = Span::new(start, i);
            steps.push(make_step(
                steps.len(),
                kinds[start],
                span,
                &events[span.indices()],
            ));
            start = i;
        }
    }
    Ok(steps)
}

fn joins(prev: &RawEvent, next: &RawEvent, gap_ms: u64) -> bool {
    next.timestamp - prev.timestamp <= gap_ms && url::page(&prev.url) == url::page(&next.url)
}

fn make_step(index: usize, kind: StepKind, span: Span, events: &[RawEvent]) -> Step {
    let first = &events[0];
    Step {
        index,
        kind,
        subprocess: taxonomy(kind),
        event_span: span,
        primary_url: first.url.clone(),
        summary: caption(kind, events),
        start_ts: first.timestamp,
        end_ts: events[events.len() - 1].timestamp,
        context: Vec::new(),
    }
}

/// Text typed in a run of keyup events, honouring backspace.
fn typed_text(events: &[RawEvent]) -> String {
    let mut text = String::new();
    for e in events.iter().filter(|e| e.kind == EventKind::Keyup) {
        match e.key_value.as_deref() {
            Some("Backspace") => {
                text.pop();
            }
            Some(" ") | Some("Space") => text.push(' '),
            Some(k) if k.chars().count() == 1 => text.push_str(k),
            _ => {}
        }
    }
    text.trim().to_string()
}

fn target(events: &[RawEvent]) -> Option<&str> {
    events.iter().find_map(|e| {
        e.element_text
            .as_deref()
            .filter(|s| !s.trim().is_empty())
            .or(e.element_name.as_deref().filter(|s| !s.trim().is_empty()))
    })
}

fn caption(kind: StepKind, events: &[RawEvent]) -> String {
    let first = &events[0];
    let page = url::page(&first.url);
    let label = kind.label();
    match kind {
        StepKind::Navigate => format!("{label} {page}"),
        StepKind::Search => {
            let typed = typed_text(events);
            let query = if !typed.is_empty() {
                Some(typed)
            } else {
                events
                    .iter()
                    .find_map(|e| url::query_param(&e.url, "q"))
                    .map(|q| q.replace('+', " "))
            };
            match query {
                Some(q) => format!("{label} \"{q}\" on {page}"),
                None => format!("{label} on {page}"),
            }
        }
        StepKind::Fill => match target(events) {
            Some(field) => format!("{label} \"{field}\" on {page}"),
            None => format!("{label} a form on {page}"),
        },
        StepKind::Upload => match events.iter().rev().find_map(|e| e.new_value.as_deref()) {
            Some(file) => format!("{label} {file} on {page}"),
            None => format!("{label} on {page}"),
        },
        StepKind::Annotate => format!("{label} a document on {page}"),
        StepKind::Highlight => format!("{label} text on {page}"),
        StepKind::ApplyResource | StepKind::ApplyRecommendation => match target(events) {
            Some(t) => format!("{label} \"{t}\" on {page}"),
            None => format!("{label} on {page}"),
        },
        StepKind::Unknown => format!("{label} ({}) on {page}", first.kind),
    }
}

/// Harvests contextual data for each step from the events in its span:
/// screenshots, highlighted text, annotation text typed in annotation steps,
/// and page links for steps that reach or apply resources (Access and
/// Application subprocesses). Duplicates within a step are dropped.
pub fn attach_context(mut steps: Vec<Step>, log: &EventLog) -> Vec<Step> {
    let events = log.events();
    for step in &mut steps {
        let with_links = matches!(
            step.subprocess.parent(),
            Some(crate::step::KmProcess::Access) | Some(crate::step::KmProcess::Application)
        );
        let mut context: Vec<ContextAsset> = Vec::new();
        let mut push = |asset: ContextAsset| {
            if !context
                .iter()
                .any(|a| a.kind == asset.kind && a.payload == asset.payload)
            {
                context.push(asset);
            }
        };
        for e in &events[step.event_span.indices()] {
            if let Some(shot) = &e.screenshot_ref {
                push(ContextAsset {
                    kind: AssetKind::Screenshot,
                    payload: shot.clone(),
                    anchor: e.coords,
                });
            }
            if with_links {
                push(ContextAsset {
                    kind: AssetKind::Link,
                    payload: e.url.clone(),
                    anchor: None,
                });
            }
            if let Some(sel) = &e.selected_text {
                push(ContextAsset {
                    kind: AssetKind::HighlightedText,
                    payload: sel.clone(),
                    anchor: e.coords,
                });
            }
            if step.kind == StepKind::Annotate && e.kind == EventKind::Change {
                if let Some(text) = &e.new_value {
                    push(ContextAsset {
                        kind: AssetKind::Annotation,
                        payload: text.clone(),
                        anchor: e.coords,
                    });
                }
            }
        }
        step.context = context;
    }
    steps
}
