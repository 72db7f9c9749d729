//! Logs in, document out: steps, sections, patterns and variants.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::event::EventLog;
use crate::mining::{
    compute_variants, default_min_support, mine_patterns, sectionize, MiningError, StepSequence,
    DEFAULT_MAX_LEN,
};
use crate::model::{build_document, DocumentParts, ModelError, VprDocument};
use crate::rules::MappingRules;
use crate::step::{attach_context, map_steps, StepError};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MineOptions {
    /// Defaults to half the number of traces, rounded up.
    pub min_support: Option<usize>,
    pub max_len: Option<usize>,
    /// Overrides the first log's task title.
    pub title: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("no logs given")]
    NoLogs,
    #[error("trace {trace}: {source}")]
    Step { trace: String, source: StepError },
    #[error(transparent)]
    Mining(#[from] MiningError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Every log is one trace of the pattern database, keyed by its id. The first
/// log is the one rendered step by step.
pub fn build_from_logs(
    logs: &[(String, EventLog)],
    rules: &MappingRules,
    opts: &MineOptions,
) -> Result<VprDocument, PipelineError> {
    let ((_, first), _) = logs.split_first().ok_or(PipelineError::NoLogs)?;
    let mut db = Vec::with_capacity(logs.len());
    let mut shown = Vec::new();
    for (i, (id, log)) in logs.iter().enumerate() {
        let steps = map_steps(log, rules).map_err(|source| PipelineError::Step {
            trace: id.clone(),
            source,
        })?;
        db.push(StepSequence::from_steps(id.clone(), &steps));
        if i == 0 {
            shown = attach_context(steps, log);
        }
    }
    let min_support = opts
        .min_support
        .unwrap_or_else(|| default_min_support(db.len()));
    let patterns = mine_patterns(&db, min_support, opts.max_len.unwrap_or(DEFAULT_MAX_LEN))?;
    let variants = compute_variants(&db)?;
    let sections = sectionize(&shown)?;
    Ok(build_document(DocumentParts {
        title: opts
            .title
            .clone()
            .unwrap_or_else(|| first.task_title().into()),
        actor_id: first.actor_id().into(),
        steps: shown,
        sections,
        patterns,
        variants,
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synth_log, Profile};
    use alloc::format;

    #[test]
    fn synthetic_logs_build_a_valid_document() {
        let logs: Vec<(String, EventLog)> = (0..3)
            .map(|s| {
                (
                    format!("trace-{s}"),
                    synth_log(s, 40, Profile::MarkingCorrection).unwrap(),
                )
            })
            .collect();
        let doc =
            build_from_logs(&logs, &MappingRules::default(), &MineOptions::default()).unwrap();
        doc.validate().unwrap();
        assert_eq!(doc.title, logs[0].1.task_title());
        assert_eq!(doc.variants.iter().map(|v| v.count).sum::<usize>(), 3);
        assert!(doc.patterns.iter().all(|p| p.support >= 2));
        let again =
            build_from_logs(&logs, &MappingRules::default(), &MineOptions::default()).unwrap();
        assert_eq!(
            crate::serialize_document(&doc),
            crate::serialize_document(&again)
        );
    }

    #[test]
    fn errors() {
        assert_eq!(
            build_from_logs(&[], &MappingRules::default(), &MineOptions::default()),
            Err(PipelineError::NoLogs)
        );
        let logs = [(
            String::from("a"),
            synth_log(1, 10, Profile::PollCreation).unwrap(),
        )];
        let opts = MineOptions {
            min_support: Some(2),
            ..MineOptions::default()
        };
        assert!(matches!(
            build_from_logs(&logs, &MappingRules::default(), &opts),
            Err(PipelineError::Mining(MiningError::InvalidSupport { .. }))
        ));
    }
}
