//! Reading logs and assets from disk, writing outputs.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read};
use std::path::{Component, Path, PathBuf};

use thiserror::Error;
use vpr_core::event::{AssetLookup, LogParser, ParseError, ParseOptions};
use vpr_core::render::AssetSource;
use vpr_core::step::{AssetKind, Step, StepError};
use vpr_core::EventLog;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

impl IoError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Streams a log file line by line into the parser.
pub fn read_log(path: &Path, opts: ParseOptions) -> Result<EventLog, IoError> {
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    read_log_from(BufReader::new(file), opts).map_err(|e| match e {
        ReadError::Io(source) => IoError::Io {
            path: path.into(),
            source,
        },
        ReadError::Parse(source) => IoError::Parse {
            path: path.into(),
            source,
        },
    })
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub fn read_log_from(reader: impl BufRead, opts: ParseOptions) -> Result<EventLog, ReadError> {
    let mut parser = LogParser::new(opts);
    for (i, line) in reader.lines().enumerate() {
        parser.push_line(i + 1, &line?)?;
    }
    Ok(parser.finish()?)
}

pub fn read_to_string(path: &Path) -> Result<String, IoError> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|e| IoError::io(path, e))?;
    Ok(s)
}

/// Writes `contents`, creating parent directories.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| IoError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| IoError::io(path, e))
}

/// An asset directory on disk. Paths that are absolute or climb out of the
/// directory never resolve.
#[derive(Clone, Debug)]
pub struct DirAssets {
    root: PathBuf,
}

impl DirAssets {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DirAssets { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn exists(&self) -> bool {
        self.root.is_dir()
    }

    pub fn resolve(&self, rel: &str) -> Option<PathBuf> {
        let rel = Path::new(rel);
        if rel.components().all(|c| matches!(c, Component::Normal(_))) {
            Some(self.root.join(rel))
        } else {
            None
        }
    }
}

impl AssetLookup for DirAssets {
    fn contains(&self, path: &str) -> bool {
        self.resolve(path).is_some_and(|p| p.is_file())
    }
}

impl AssetSource for DirAssets {
    fn load(&self, path: &str) -> Option<Vec<u8>> {
        fs::read(self.resolve(path)?).ok()
    }
}

/// [`vpr_core::attach_context`] with a check that screenshots have somewhere
/// to live.
pub fn attach_context(
    steps: Vec<Step>,
    log: &EventLog,
    assets: &DirAssets,
) -> Result<Vec<Step>, StepError> {
    let steps = vpr_core::attach_context(steps, log);
    let has_shots = steps
        .iter()
        .flat_map(|s| &s.context)
        .any(|a| a.kind == AssetKind::Screenshot);
    if has_shots && !assets.exists() {
        return Err(StepError::AssetDirMissing(
            assets.root().display().to_string(),
        ));
    }
    Ok(steps)
}
