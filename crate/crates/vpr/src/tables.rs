//! CSV inputs for the study analysis.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use thiserror::Error;
use vpr_core::stats::{KeyEntry, LikertRecord, ResponseRecord};

pub const RESPONSE_COLUMNS: [&str; 7] = [
    "participant_id",
    "prototype",
    "task",
    "part",
    "question_id",
    "answer",
    "time_sec",
];
pub const ANSWER_COLUMNS: [&str; 4] = ["question_id", "correct_answer", "task", "part"];
pub const LIKERT_COLUMNS: [&str; 4] = ["participant_id", "prototype", "question_id", "rating"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: PathBuf, column: &'static str },
    #[error("{path}: line {line}: {reason}")]
    Row {
        path: PathBuf,
        line: u64,
        reason: String,
    },
}

impl TableError {
    /// Whether the file itself could not be read, as opposed to bad contents.
    pub fn is_io(&self) -> bool {
        matches!(self, TableError::Csv { source, .. } if source.is_io_error())
    }
}

/// Reads a headed CSV file whose header must include every name in
/// `columns`. Extra columns are ignored.
pub fn read_table<T: DeserializeOwned>(
    path: &Path,
    columns: &[&'static str],
) -> Result<Vec<T>, TableError> {
    let csv_err = |source| TableError::Csv {
        path: path.into(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    if let Some(&column) = columns.iter().find(|c| !headers.iter().any(|h| h == **c)) {
        return Err(TableError::MissingColumn {
            path: path.into(),
            column,
        });
    }
    let mut out = Vec::new();
    for record in reader.deserialize() {
        out.push(record.map_err(|e: csv::Error| {
            if e.is_io_error() {
                return csv_err(e);
            }
            let line = e.position().map_or(0, |p| p.line());
            let reason = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
                _ => e.to_string(),
            };
            TableError::Row {
                path: path.into(),
                line,
                reason,
            }
        })?);
    }
    Ok(out)
}

pub fn read_responses(path: &Path) -> Result<Vec<ResponseRecord>, TableError> {
    read_table(path, &RESPONSE_COLUMNS)
}

pub fn read_answers(path: &Path) -> Result<Vec<KeyEntry>, TableError> {
    read_table(path, &ANSWER_COLUMNS)
}

pub fn read_likert(path: &Path) -> Result<Vec<LikertRecord>, TableError> {
    read_table(path, &LIKERT_COLUMNS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_responses() {
        let f = file("participant_id,prototype,task,part,question_id,answer,time_sec\np1,P3,1,A,q1, b ,41.5\n");
        let rows = read_responses(f.path()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].answer, "b");
        assert_eq!(rows[0].time_sec, 41.5);
    }

    #[test]
    fn names_missing_column() {
        let f = file("participant_id,prototype,task,part,question_id,answer\np1,P3,1,A,q1,b\n");
        match read_responses(f.path()) {
            Err(TableError::MissingColumn { column, .. }) => assert_eq!(column, "time_sec"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_cell_reports_line() {
        let f = file("question_id,correct_answer,task,part\nq1,a,1,A\nq2,b,1,C\n");
        match read_answers(f.path()) {
            Err(TableError::Row { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
