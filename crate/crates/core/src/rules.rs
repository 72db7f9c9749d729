//! Data-driven classification rules.
//!
//! A rule file is JSON:
//!
//! ```json
//! { "coalesce_gap_ms": 10000,
//!   "rules": [ { "on": ["keyup", "click"], "url": "(?i)search", "step": "SEARCH" } ] }
//! ```
//!
//! `on` lists event kinds (empty or absent: any kind). `url` is matched
//! against the page URL, `element` against the element kind (`el_kind`) and
//! `text` against the element name or its text. Absent patterns always
//! match; a pattern fails on an event that lacks the field. Rules are tried
//! in order and the first match wins; events matching nothing are UNKNOWN.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use regex_automata::meta::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{EventKind, RawEvent};
use crate::step::StepKind;

const DEFAULT_RULES: &str = include_str!("../rules/default.json");

/// Gap used when a rule file does not set one.
pub const DEFAULT_COALESCE_GAP_MS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RulesError {
    #[error("rule file is not valid: {0}")]
    Json(String),
    #[error("rule {rule}: unknown event kind {value:?}")]
    UnknownEventKind { rule: usize, value: String },
    #[error("rule {rule}: unknown step kind {value:?}")]
    UnknownStepKind { rule: usize, value: String },
    #[error("rule {rule}: bad `{field}` pattern: {reason}")]
    BadPattern {
        rule: usize,
        field: &'static str,
        reason: String,
    },
}

/// A compiled regular expression that remembers its source.
#[derive(Clone)]
pub struct Pattern {
    source: String,
    regex: Regex,
}

impl Pattern {
    pub fn new(source: &str) -> Result<Self, Box<regex_automata::meta::BuildError>> {
        Ok(Pattern {
            source: source.to_string(),
            regex: Regex::new(source).map_err(Box::new)?,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn is_match(&self, haystack: &str) -> bool {
        self.regex.is_match(haystack)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}/", self.source)
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub on: Vec<EventKind>,
    pub url: Option<Pattern>,
    pub element: Option<Pattern>,
    pub text: Option<Pattern>,
    pub step: StepKind,
}

impl Rule {
    pub fn matches(&self, e: &RawEvent) -> bool {
        if !self.on.is_empty() && !self.on.contains(&e.kind) {
            return false;
        }
        if let Some(p) = &self.url {
            if !p.is_match(&e.url) {
                return false;
            }
        }
        if let Some(p) = &self.element {
            if !e.element_kind.as_deref().is_some_and(|k| p.is_match(k)) {
                return false;
            }
        }
        if let Some(p) = &self.text {
            let name = e.element_name.as_deref().is_some_and(|s| p.is_match(s));
            let text = e.element_text.as_deref().is_some_and(|s| p.is_match(s));
            if !(name || text) {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MappingRules {
    pub rules: Vec<Rule>,
    pub coalesce_gap_ms: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    #[serde(default = "default_gap")]
    coalesce_gap_ms: u64,
    rules: Vec<RuleEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleEntry {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    on: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    element: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    step: String,
}

fn default_gap() -> u64 {
    DEFAULT_COALESCE_GAP_MS
}

impl MappingRules {
    /// Parses and compiles a rule file.
    pub fn from_json(text: &str) -> Result<Self, RulesError> {
        let file: RuleFile =
            serde_json::from_str(text).map_err(|e| RulesError::Json(e.to_string()))?;
        let mut rules = Vec::with_capacity(file.rules.len());
        for (i, entry) in file.rules.into_iter().enumerate() {
            let on = entry
                .on
                .iter()
                .map(|k| {
                    EventKind::parse(k).ok_or_else(|| RulesError::UnknownEventKind {
                        rule: i,
                        value: k.clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let step = StepKind::parse(&entry.step).ok_or(RulesError::UnknownStepKind {
                rule: i,
                value: entry.step,
            })?;
            let compile =
                |field: &'static str, src: Option<String>| -> Result<Option<Pattern>, RulesError> {
                    src.map(|s| {
                        Pattern::new(&s).map_err(|e| RulesError::BadPattern {
                            rule: i,
                            field,
                            reason: e.to_string(),
                        })
                    })
                    .transpose()
                };
            rules.push(Rule {
                on,
                url: compile("url", entry.url)?,
                element: compile("element", entry.element)?,
                text: compile("text", entry.text)?,
                step,
            });
        }
        Ok(MappingRules {
            rules,
            coalesce_gap_ms: file.coalesce_gap_ms,
        })
    }

    /// Rule file text equivalent to `self`.
    pub fn to_json(&self) -> String {
        let file = RuleFile {
            coalesce_gap_ms: self.coalesce_gap_ms,
            rules: self
                .rules
                .iter()
                .map(|r| RuleEntry {
                    on: r.on.iter().map(|k| k.as_str().to_string()).collect(),
                    url: r.url.as_ref().map(|p| p.as_str().to_string()),
                    element: r.element.as_ref().map(|p| p.as_str().to_string()),
                    text: r.text.as_ref().map(|p| p.as_str().to_string()),
                    step: r.step.as_str().to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("rule files always serialize")
    }

    /// The shipped rule table.
    pub fn default_text() -> &'static str {
        DEFAULT_RULES
    }
}

impl Default for MappingRules {
    fn default() -> Self {
        MappingRules::from_json(DEFAULT_RULES).expect("shipped rule file is valid")
    }
}
