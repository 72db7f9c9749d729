use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Prototype {
    P1,
    P2,
    P3,
    P4,
}

impl Prototype {
    pub const ALL: [Prototype; 4] = [Prototype::P1, Prototype::P2, Prototype::P3, Prototype::P4];

    pub fn as_str(self) -> &'static str {
        match self {
            Prototype::P1 => "P1",
            Prototype::P2 => "P2",
            Prototype::P3 => "P3",
            Prototype::P4 => "P4",
        }
    }
}

impl fmt::Display for Prototype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Prototype {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Prototype::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Part {
    A,
    B,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::A => "A",
            Part::B => "B",
        })
    }
}

/// One answer given by one participant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub participant_id: String,
    pub prototype: Prototype,
    pub task: u8,
    pub part: Part,
    pub question_id: String,
    pub answer: String,
    pub time_sec: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyEntry {
    pub question_id: String,
    pub correct_answer: String,
    pub task: u8,
    pub part: Part,
}

/// Correct answers by question id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnswerKey {
    entries: BTreeMap<String, KeyEntry>,
}

impl AnswerKey {
    /// Later entries for the same question replace earlier ones.
    pub fn new(entries: impl IntoIterator<Item = KeyEntry>) -> Result<Self, StatsError> {
        let mut map = BTreeMap::new();
        for e in entries {
            if !(1..=2).contains(&e.task) {
                return Err(StatsError::InvalidTask(e.task));
            }
            map.insert(e.question_id.clone(), e);
        }
        Ok(AnswerKey { entries: map })
    }

    pub fn get(&self, question_id: &str) -> Option<&KeyEntry> {
        self.entries.get(question_id)
    }

    /// Number of questions in a task, over both parts.
    pub fn questions_in_task(&self, task: u8) -> usize {
        self.entries.values().filter(|e| e.task == task).count()
    }

    pub fn questions_in(&self, task: u8, part: Part) -> usize {
        self.entries
            .values()
            .filter(|e| e.task == task && e.part == part)
            .count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Per-participant totals for one part of one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub participant_id: String,
    pub prototype: Prototype,
    pub task: u8,
    pub part: Part,
    pub score: u32,
    /// Responses counted, correct or not.
    pub answered: u32,
    pub total_time_sec: f64,
    pub mean_time_per_q: f64,
}

/// One questionnaire rating.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertRecord {
    pub participant_id: String,
    pub prototype: Prototype,
    pub question_id: String,
    pub rating: u8,
}

/// Answers are compared after trimming, ignoring ASCII case.
pub fn score_responses(
    records: &[ResponseRecord],
    key: &AnswerKey,
) -> Result<Vec<ScoreRow>, StatsError> {
    let mut seen = BTreeSet::new();
    let mut prototypes: BTreeMap<&str, Prototype> = BTreeMap::new();
    let mut rows: BTreeMap<(&str, u8, Part), ScoreRow> = BTreeMap::new();
    for r in records {
        if !(1..=2).contains(&r.task) {
            return Err(StatsError::InvalidTask(r.task));
        }
        if !r.time_sec.is_finite() || r.time_sec < 0.0 {
            return Err(StatsError::InvalidTime {
                participant_id: r.participant_id.clone(),
                time_sec: r.time_sec,
            });
        }
        let entry = key
            .get(&r.question_id)
            .ok_or_else(|| StatsError::UnknownQuestion(r.question_id.clone()))?;
        if entry.task != r.task || entry.part != r.part {
            return Err(StatsError::QuestionMismatch {
                question_id: r.question_id.clone(),
                key_task: entry.task,
                key_part: entry.part,
            });
        }
        if !seen.insert((r.participant_id.as_str(), r.question_id.as_str())) {
            return Err(StatsError::DuplicateResponse {
                participant_id: r.participant_id.clone(),
                question_id: r.question_id.clone(),
            });
        }
        if *prototypes.entry(&r.participant_id).or_insert(r.prototype) != r.prototype {
            return Err(StatsError::MixedPrototype(r.participant_id.clone()));
        }
        let row = rows
            .entry((&r.participant_id, r.task, r.part))
            .or_insert_with(|| ScoreRow {
                participant_id: r.participant_id.clone(),
                prototype: r.prototype,
                task: r.task,
                part: r.part,
                score: 0,
                answered: 0,
                total_time_sec: 0.0,
                mean_time_per_q: 0.0,
            });
        row.answered += 1;
        row.total_time_sec += r.time_sec;
        if r.answer
            .trim()
            .eq_ignore_ascii_case(entry.correct_answer.trim())
        {
            row.score += 1;
        }
    }
    Ok(rows
        .into_values()
        .map(|mut row| {
            row.mean_time_per_q = row.total_time_sec / f64::from(row.answered);
            row
        })
        .collect())
}

/// Splits rows into `(kept, excluded)`. A participant is excluded from a task
/// when their mean time per question over both parts of that task is below
/// `threshold_sec`; both parts go together.
pub fn exclude_fast(rows: &[ScoreRow], threshold_sec: f64) -> (Vec<ScoreRow>, Vec<ScoreRow>) {
    let mut totals: BTreeMap<(&str, u8), (f64, u32)> = BTreeMap::new();
    for row in rows {
        let t = totals.entry((&row.participant_id, row.task)).or_default();
        t.0 += row.total_time_sec;
        t.1 += row.answered;
    }
    let fast = |row: &ScoreRow| {
        let (time, n) = totals[&(row.participant_id.as_str(), row.task)];
        n > 0 && time / f64::from(n) < threshold_sec
    };
    let (excluded, kept): (Vec<ScoreRow>, Vec<ScoreRow>) =
        rows.iter().cloned().partition(|r| fast(r));
    (kept, excluded)
}
