//! Sequential pattern mining over step-kind sequences, process variants and
//! grouping of steps into sections.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::step::{KmSubprocess, Span, Step, StepKind};

/// Longest pattern mined unless configured otherwise.
pub const DEFAULT_MAX_LEN: usize = 5;

/// `ceil(0.5 * db_len)`, at least 1.
pub fn default_min_support(db_len: usize) -> usize {
    db_len.div_ceil(2).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSequence {
    pub trace_id: String,
    pub kinds: Vec<StepKind>,
}

impl StepSequence {
    pub fn new(trace_id: impl Into<String>, kinds: Vec<StepKind>) -> Self {
        StepSequence {
            trace_id: trace_id.into(),
            kinds,
        }
    }

    pub fn from_steps(trace_id: impl Into<String>, steps: &[Step]) -> Self {
        StepSequence::new(trace_id, steps.iter().map(|s| s.kind).collect())
    }
}

/// An order-preserving subsequence and the number of traces containing it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    pub kinds: Vec<StepKind>,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variant {
    pub kinds: Vec<StepKind>,
    pub count: usize,
    pub trace_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MiningError {
    #[error("sequence database is empty")]
    EmptyDatabase,
    #[error("min_support must be between 1 and {db_len}, got {min_support}")]
    InvalidSupport { min_support: usize, db_len: usize },
    #[error("max_len must be at least 1")]
    InvalidMaxLen,
    #[error("trace {0:?} has no steps")]
    EmptyTrace(String),
    #[error("no steps to group into sections")]
    EmptySteps,
}

/// Every pattern of length `1..=max_len` contained (as a not necessarily
/// contiguous subsequence) in at least `min_support` traces.
///
/// Pattern growth over projected databases: a projection keeps, per trace,
/// the position just after the leftmost match of the current prefix, which
/// is enough to decide containment of every extension. Support counts each
/// trace once.
///
/// Output is sorted by descending support, then ascending length, then
/// kinds in lexicographic order.
pub fn mine_patterns(
    db: &[StepSequence],
    min_support: usize,
    max_len: usize,
) -> Result<Vec<Pattern>, MiningError> {
    if db.is_empty() {
        return Err(MiningError::EmptyDatabase);
    }
    if min_support == 0 || min_support > db.len() {
        return Err(MiningError::InvalidSupport {
            min_support,
            db_len: db.len(),
        });
    }
    if max_len == 0 {
        return Err(MiningError::InvalidMaxLen);
    }
    if let Some(t) = db.iter().find(|t| t.kinds.is_empty()) {
        return Err(MiningError::EmptyTrace(t.trace_id.clone()));
    }

    let mut out = Vec::new();
    let projection: Vec<(usize, usize)> = (0..db.len()).map(|i| (i, 0)).collect();
    let mut prefix = Vec::with_capacity(max_len);
    grow(db, &projection, min_support, max_len, &mut prefix, &mut out);
    out.sort_by(|a, b| {
        b.support
            .cmp(&a.support)
            .then(a.kinds.len().cmp(&b.kinds.len()))
            .then_with(|| a.kinds.cmp(&b.kinds))
    });
    Ok(out)
}

fn grow(
    db: &[StepSequence],
    projection: &[(usize, usize)],
    min_support: usize,
    max_len: usize,
    prefix: &mut Vec<StepKind>,
    out: &mut Vec<Pattern>,
) {
    // per kind: projected entries (trace, position after first occurrence)
    let mut extensions: BTreeMap<StepKind, Vec<(usize, usize)>> = BTreeMap::new();
    for &(trace, pos) in projection {
        let kinds = &db[trace].kinds;
        let mut seen: Vec<StepKind> = Vec::new();
        for (offset, &kind) in kinds[pos..].iter().enumerate() {
            if !seen.contains(&kind) {
                seen.push(kind);
                extensions
                    .entry(kind)
                    .or_default()
                    .push((trace, pos + offset + 1));
            }
        }
    }
    for (kind, projected) in extensions {
        if projected.len() < min_support {
            continue;
        }
        prefix.push(kind);
        out.push(Pattern {
            kinds: prefix.clone(),
            support: projected.len(),
        });
        if prefix.len() < max_len {
            grow(db, &projected, min_support, max_len, prefix, out);
        }
        prefix.pop();
    }
}

/// One variant per distinct kind sequence, most frequent first, ties in
/// lexicographic order. Trace ids keep database order.
pub fn compute_variants(db: &[StepSequence]) -> Result<Vec<Variant>, MiningError> {
    if db.is_empty() {
        return Err(MiningError::EmptyDatabase);
    }
    let mut groups: BTreeMap<&[StepKind], Vec<String>> = BTreeMap::new();
    for t in db {
        groups.entry(&t.kinds).or_default().push(t.trace_id.clone());
    }
    let mut variants: Vec<Variant> = groups
        .into_iter()
        .map(|(kinds, trace_ids)| Variant {
            kinds: kinds.to_vec(),
            count: trace_ids.len(),
            trace_ids,
        })
        .collect();
    // BTreeMap order is lexicographic already; the stable sort keeps it for ties
    variants.sort_by_key(|v| core::cmp::Reverse(v.count));
    Ok(variants)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub index: usize,
    pub subprocess: KmSubprocess,
    pub title: String,
    pub steps: Span,
}

/// Default section heading, e.g. `Navigation (2 steps)`.
pub fn section_title(subprocess: KmSubprocess, n_steps: usize) -> String {
    let noun = if n_steps == 1 { "step" } else { "steps" };
    format!("{} ({n_steps} {noun})", subprocess.name())
}

/// Maximal runs of consecutive steps sharing a subprocess.
pub fn sectionize(steps: &[Step]) -> Result<Vec<Section>, MiningError> {
    let Some(first) = steps.first() else {
        return Err(MiningError::EmptySteps);
    };
    let mut sections: Vec<Section> = Vec::new();
    let mut start = 0;
    let mut current = first.subprocess;
    for i in 1..=steps.len() {
        if i < steps.len() && steps[i].subprocess == current {
            continue;
        }
        sections.push(Section {
            index: sections.len(),
            subprocess: current,
            title: section_title(current, i - start),
            steps: Span::new(start, i),
        });
        if let Some(next) = steps.get(i) {
            start = i;
            current = next.subprocess;
        }
    }
    Ok(sections)
}

/// Support of `pattern` in `db` by direct subsequence test.
pub fn support(db: &[StepSequence], pattern: &[StepKind]) -> usize {
    db.iter()
        .filter(|t| is_subsequence(pattern, &t.kinds))
        .count()
}

pub fn is_subsequence(needle: &[StepKind], haystack: &[StepKind]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|k| it.any(|h| h == k))
}
