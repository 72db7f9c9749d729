//! `vpr.config.json` and its merge with command-line flags.
//!
//! Precedence is flags, then the config file, then built-in defaults. The
//! asset directory additionally falls back to `VPR_ASSET_DIR` before the
//! default of `assets/` next to the input file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use vpr_core::mining::DEFAULT_MAX_LEN;
use vpr_core::render::{Format, Palette};
use vpr_core::rules::{MappingRules, RulesError};
use vpr_core::stats::DEFAULT_THRESHOLD_SEC;

use crate::io::{read_to_string, IoError};

pub const CONFIG_FILE: &str = "vpr.config.json";
pub const ASSET_DIR_ENV: &str = "VPR_ASSET_DIR";

/// Every setting is optional; the same shape carries flag overrides.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub rules_path: Option<PathBuf>,
    pub asset_dir: Option<PathBuf>,
    pub coalesce_gap_ms: Option<u64>,
    pub min_support: Option<usize>,
    pub max_len: Option<usize>,
    pub format: Option<String>,
    pub palette: Option<String>,
    pub section_colors: Option<bool>,
    pub embed_assets: Option<bool>,
    pub threshold_sec: Option<f64>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("unknown format {0:?}, expected p1, p2, p3 or p4")]
    Format(String),
    #[error("unknown palette {0:?}, expected default or high-contrast")]
    Palette(String),
    #[error("{path}: {source}")]
    Rules { path: PathBuf, source: RulesError },
    #[error("threshold_sec must be a non-negative number")]
    Threshold,
}

impl ConfigFile {
    /// Parses a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read_to_string(path)?;
        let mut cfg: ConfigFile =
            serde_json::from_str(&text).map_err(|source| ConfigError::Json {
                path: path.into(),
                source,
            })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.rules_path, &mut cfg.asset_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// `explicit` if given, else `vpr.config.json` in `dir` when present.
    pub fn discover(explicit: Option<&Path>, dir: &Path) -> Result<Self, ConfigError> {
        match explicit {
            Some(p) => Self::load(p),
            None => {
                let p = dir.join(CONFIG_FILE);
                if p.is_file() {
                    Self::load(&p)
                } else {
                    Ok(ConfigFile::default())
                }
            }
        }
    }

    /// `self` wins over `other` field by field.
    pub fn or(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            rules_path: self.rules_path.or(other.rules_path),
            asset_dir: self.asset_dir.or(other.asset_dir),
            coalesce_gap_ms: self.coalesce_gap_ms.or(other.coalesce_gap_ms),
            min_support: self.min_support.or(other.min_support),
            max_len: self.max_len.or(other.max_len),
            format: self.format.or(other.format),
            palette: self.palette.or(other.palette),
            section_colors: self.section_colors.or(other.section_colors),
            embed_assets: self.embed_assets.or(other.embed_assets),
            threshold_sec: self.threshold_sec.or(other.threshold_sec),
        }
    }
}

/// Fully resolved settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub rules: MappingRules,
    /// `None` means "next to the input".
    pub asset_dir: Option<PathBuf>,
    pub min_support: Option<usize>,
    pub max_len: usize,
    pub format: Format,
    pub palette: Palette,
    pub section_colors: bool,
    pub embed_assets: bool,
    pub threshold_sec: f64,
}

impl Settings {
    /// `merged` is flags already combined with the file via [`ConfigFile::or`].
    pub fn resolve(
        merged: ConfigFile,
        env_asset_dir: Option<PathBuf>,
    ) -> Result<Self, ConfigError> {
        let mut rules = match &merged.rules_path {
            Some(path) => {
                let text = read_to_string(path)?;
                MappingRules::from_json(&text).map_err(|source| ConfigError::Rules {
                    path: path.clone(),
                    source,
                })?
            }
            None => MappingRules::default(),
        };
        if let Some(gap) = merged.coalesce_gap_ms {
            rules.coalesce_gap_ms = gap;
        }
        let format = match merged.format {
            Some(f) => f.parse().map_err(|_| ConfigError::Format(f))?,
            None => Format::P4,
        };
        let palette = match merged.palette {
            Some(p) => p.parse().map_err(|_| ConfigError::Palette(p))?,
            None => Palette::Default,
        };
        let threshold_sec = merged.threshold_sec.unwrap_or(DEFAULT_THRESHOLD_SEC);
        if !(threshold_sec.is_finite() && threshold_sec >= 0.0) {
            return Err(ConfigError::Threshold);
        }
        Ok(Settings {
            rules,
            asset_dir: merged.asset_dir.or(env_asset_dir),
            min_support: merged.min_support,
            max_len: merged.max_len.unwrap_or(DEFAULT_MAX_LEN),
            format,
            palette,
            section_colors: merged.section_colors.unwrap_or(true),
            embed_assets: merged.embed_assets.unwrap_or(true),
            threshold_sec,
        })
    }

    /// The configured asset directory, or `assets/` beside `input`.
    pub fn asset_dir_for(&self, input: &Path) -> PathBuf {
        self.asset_dir
            .clone()
            .unwrap_or_else(|| input.parent().unwrap_or(Path::new("")).join("assets"))
    }
}

/// `VPR_ASSET_DIR`, ignoring an empty value.
pub fn env_asset_dir() -> Option<PathBuf> {
    std::env::var_os(ASSET_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}
