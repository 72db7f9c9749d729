//! The renderer-independent document for one visual process representation,
//! its `*.vpr.json` file format and the pictograph dictionary.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::mining::{Pattern, Section, Variant};
use crate::step::{AssetKind, KmProcess, Step, StepKind};

/// Version written to and required in model files.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetRef {
    pub media_type: String,
    /// Steps whose context references this asset.
    pub steps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VprDocument {
    pub schema_version: u32,
    /// The goal of the task.
    pub title: String,
    pub actor_id: String,
    /// Timestamp of the last captured event, so rebuilding is reproducible.
    pub created_at: u64,
    pub sections: Vec<Section>,
    pub steps: Vec<Step>,
    pub patterns: Vec<Pattern>,
    pub variants: Vec<Variant>,
    /// Screenshot path (relative to the asset directory) to its metadata.
    pub assets: BTreeMap<String, AssetRef>,
    /// Steps drawn with the emphasis style.
    pub decision_points: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("document title is empty")]
    MissingTitle,
    #[error("document has no steps")]
    EmptyDocument,
    #[error("sections do not match steps: {0}")]
    InconsistentSections(String),
    #[error("model file uses schema version {found}, expected {expected}")]
    SchemaVersionMismatch { found: u64, expected: u32 },
    #[error("model file is corrupt: {0}")]
    CorruptDocument(String),
}

/// Everything [`build_document`] assembles.
#[derive(Clone, Debug, Default)]
pub struct DocumentParts {
    pub title: String,
    pub actor_id: String,
    pub steps: Vec<Step>,
    pub sections: Vec<Section>,
    pub patterns: Vec<Pattern>,
    pub variants: Vec<Variant>,
}

/// Media type guessed from a file extension.
pub fn media_type(path: &str) -> &'static str {
    let ext = path
        .rsplit_once('.')
        .map(|(_, e)| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "png" => "image/png",
        "jpg" | "jpeg" => "image/jpeg",
        "gif" => "image/gif",
        "webp" => "image/webp",
        "svg" => "image/svg+xml",
        _ => "application/octet-stream",
    }
}

/// First step of every section whose parent process differs from the
/// previous section's (the first section always qualifies).
pub fn decision_points(sections: &[Section]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev: Option<Option<KmProcess>> = None;
    for s in sections {
        let parent = s.subprocess.parent();
        if prev != Some(parent) {
            out.push(s.steps.start);
        }
        prev = Some(parent);
    }
    out
}

pub fn build_document(parts: DocumentParts) -> Result<VprDocument, ModelError> {
    if parts.title.trim().is_empty() {
        return Err(ModelError::MissingTitle);
    }
    let mut assets: BTreeMap<String, AssetRef> = BTreeMap::new();
    for step in &parts.steps {
        for a in step
            .context
            .iter()
            .filter(|a| a.kind == AssetKind::Screenshot)
        {
            let entry = assets.entry(a.payload.clone()).or_insert_with(|| AssetRef {
                media_type: media_type(&a.payload).to_string(),
                steps: Vec::new(),
            });
            if entry.steps.last() != Some(&step.index) {
                entry.steps.push(step.index);
            }
        }
    }
    let doc = VprDocument {
        schema_version: SCHEMA_VERSION,
        title: parts.title,
        actor_id: parts.actor_id,
        created_at: parts.steps.last().map_or(0, |s| s.end_ts),
        decision_points: decision_points(&parts.sections),
        sections: parts.sections,
        steps: parts.steps,
        patterns: parts.patterns,
        variants: parts.variants,
        assets,
    };
    doc.validate()?;
    Ok(doc)
}

impl VprDocument {
    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.title.trim().is_empty() {
            return Err(ModelError::MissingTitle);
        }
        if self.steps.is_empty() {
            return Err(ModelError::EmptyDocument);
        }
        let bad = |msg: String| Err(ModelError::InconsistentSections(msg));
        for (i, step) in self.steps.iter().enumerate() {
            if step.index != i {
                return bad(format!("step at position {i} has index {}", step.index));
            }
            if step.event_span.is_empty() || step.end_ts < step.start_ts {
                return bad(format!("step {i} has an empty span or inverted times"));
            }
            if step.subprocess != crate::step::taxonomy(step.kind) {
                return bad(format!("step {i} subprocess does not match its kind"));
            }
        }
        let mut next = 0;
        for (i, section) in self.sections.iter().enumerate() {
            if section.index != i {
                return bad(format!(
                    "section at position {i} has index {}",
                    section.index
                ));
            }
            if section.steps.start != next || section.steps.is_empty() {
                return bad(format!("section {i} does not start at step {next}"));
            }
            if section.steps.end > self.steps.len() {
                return bad(format!(
                    "section {i} references step {} of {}",
                    section.steps.end - 1,
                    self.steps.len()
                ));
            }
            if let Some(step) = self.steps[section.steps.indices()]
                .iter()
                .find(|s| s.subprocess != section.subprocess)
            {
                return bad(format!(
                    "step {} is not a {} step",
                    step.index, section.subprocess
                ));
            }
            if i > 0 && self.sections[i - 1].subprocess == section.subprocess {
                return bad(format!("sections {} and {i} share a subprocess", i - 1));
            }
            next = section.steps.end;
        }
        if next != self.steps.len() {
            return bad(format!(
                "sections cover {next} of {} steps",
                self.steps.len()
            ));
        }
        if let Some(&d) = self
            .decision_points
            .iter()
            .find(|&&d| d >= self.steps.len())
        {
            return bad(format!("decision point {d} is not a step"));
        }
        Ok(())
    }

    /// Replaces a templated section title.
    pub fn set_section_title(
        &mut self,
        section: usize,
        title: impl Into<String>,
    ) -> Result<(), ModelError> {
        let s = self
            .sections
            .get_mut(section)
            .ok_or_else(|| ModelError::InconsistentSections(format!("no section {section}")))?;
        s.title = title.into();
        Ok(())
    }

    /// Section containing `step`.
    pub fn section_of(&self, step: usize) -> Option<&Section> {
        self.sections.iter().find(|s| s.steps.contains(step))
    }

    pub fn is_decision_point(&self, step: usize) -> bool {
        self.decision_points.contains(&step)
    }

    /// One panel per step, in step order.
    pub fn panels(&self, context_visible: bool) -> Vec<Panel> {
        self.steps
            .iter()
            .map(|s| Panel {
                step_index: s.index,
                glyph: glyph_for(s.kind).symbol_id,
                caption: s.summary.clone(),
                emphasized: self.is_decision_point(s.index),
                context_visible: context_visible && !s.context.is_empty(),
            })
            .collect()
    }
}

/// Writes the document as pretty JSON with a trailing newline. `<`, `>` and
/// `&` are escaped inside strings so the bytes can be embedded verbatim in
/// an HTML script block.
pub fn serialize_document(doc: &VprDocument) -> String {
    let json = serde_json::to_string_pretty(doc).expect("documents always serialize");
    let mut out = String::with_capacity(json.len() + 1);
    for c in json.chars() {
        match c {
            '<' => out.push_str("\\u003c"),
            '>' => out.push_str("\\u003e"),
            '&' => out.push_str("\\u0026"),
            c => out.push(c),
        }
    }
    out.push('\n');
    out
}

pub fn deserialize_document(text: &str) -> Result<VprDocument, ModelError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ModelError::CorruptDocument(e.to_string()))?;
    match value.get("schema_version").map(|v| v.as_u64()) {
        Some(Some(v)) if v == u64::from(SCHEMA_VERSION) => {}
        Some(Some(found)) => {
            return Err(ModelError::SchemaVersionMismatch {
                found,
                expected: SCHEMA_VERSION,
            })
        }
        Some(None) => {
            return Err(ModelError::CorruptDocument(
                "schema_version is not an integer".into(),
            ))
        }
        None => {
            return Err(ModelError::CorruptDocument(
                "missing field `schema_version`".into(),
            ))
        }
    }
    let doc: VprDocument =
        serde_json::from_value(value).map_err(|e| ModelError::CorruptDocument(e.to_string()))?;
    doc.validate().map_err(|e| match e {
        ModelError::MissingTitle => ModelError::CorruptDocument("missing title".into()),
        other => ModelError::CorruptDocument(other.to_string()),
    })?;
    Ok(doc)
}

/// Pictograph for one step kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Glyph {
    pub step_kind: StepKind,
    pub symbol_id: &'static str,
    /// Body of a 24x24 SVG `<symbol>`.
    pub vector_markup: &'static str,
    /// Panel heading; `{n}` is replaced by the 1-based step number.
    pub caption_template: &'static str,
}

impl Glyph {
    pub fn caption(&self, step_number: usize) -> String {
        self.caption_template
            .replace("{n}", &format!("{step_number}"))
    }
}

static GLYPHS: [Glyph; 9] = [
    Glyph {
        step_kind: StepKind::Navigate,
        symbol_id: "glyph-navigate",
        // compass
        vector_markup: concat!(
            "<circle cx=\"12\" cy=\"12\" r=\"9\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\"/>",
            "<path d=\"M15.5 8.5 13 13l-4.5 2.5L11 11z\" fill=\"currentColor\"/>"
        ),
        caption_template: "{n}. Go to",
    },
    Glyph {
        step_kind: StepKind::Search,
        symbol_id: "glyph-search",
        // magnifier
        vector_markup: concat!(
            "<circle cx=\"10\" cy=\"10\" r=\"6\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\"/>",
            "<path d=\"m14.5 14.5 6 6\" stroke=\"currentColor\" stroke-width=\"2.5\" stroke-linecap=\"round\"/>"
        ),
        caption_template: "{n}. Find",
    },
    Glyph {
        step_kind: StepKind::Fill,
        symbol_id: "glyph-fill",
        // form with lines
        vector_markup: concat!(
            "<rect x=\"4\" y=\"3\" width=\"16\" height=\"18\" rx=\"2\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\"/>",
            "<path d=\"M8 8h8M8 12h8M8 16h5\" stroke=\"currentColor\" stroke-width=\"2\" stroke-linecap=\"round\"/>"
        ),
        caption_template: "{n}. Fill in",
    },
    Glyph {
        step_kind: StepKind::Upload,
        symbol_id: "glyph-upload",
        // up arrow over a tray
        vector_markup: concat!(
            "<path d=\"M12 15V4m-4.5 4.5L12 4l4.5 4.5\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>",
            "<path d=\"M4 14v5h16v-5\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\" stroke-linejoin=\"round\"/>"
        ),
        caption_template: "{n}. Upload",
    },
    Glyph {
        step_kind: StepKind::Annotate,
        symbol_id: "glyph-annotate",
        // pencil on a page
        vector_markup: concat!(
            "<path d=\"M5 3h9l5 5v13H5z\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\" stroke-linejoin=\"round\"/>",
            "<path d=\"m9 17 1-3 6-6 2 2-6 6z\" fill=\"currentColor\"/>"
        ),
        caption_template: "{n}. Annotate",
    },
    Glyph {
        step_kind: StepKind::Highlight,
        symbol_id: "glyph-highlight",
        // marker
        vector_markup: concat!(
            "<path d=\"m14 4 6 6-8 8H6v-6z\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\" stroke-linejoin=\"round\"/>",
            "<path d=\"M3 21h18\" stroke=\"currentColor\" stroke-width=\"3\" stroke-linecap=\"round\"/>"
        ),
        caption_template: "{n}. Highlight",
    },
    Glyph {
        step_kind: StepKind::ApplyResource,
        symbol_id: "glyph-apply-resource",
        // play button
        vector_markup: concat!(
            "<circle cx=\"12\" cy=\"12\" r=\"9\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\"/>",
            "<path d=\"M10 8v8l6-4z\" fill=\"currentColor\"/>"
        ),
        caption_template: "{n}. Use resource",
    },
    Glyph {
        step_kind: StepKind::ApplyRecommendation,
        symbol_id: "glyph-apply-recommendation",
        // sparkle
        vector_markup: concat!(
            "<path d=\"M12 2l2 7 7 2-7 2-2 7-2-7-7-2 7-2z\" fill=\"currentColor\"/>",
            "<path d=\"M19 3v4M17 5h4\" stroke=\"currentColor\" stroke-width=\"1.5\" stroke-linecap=\"round\"/>"
        ),
        caption_template: "{n}. Follow recommendation",
    },
    Glyph {
        step_kind: StepKind::Unknown,
        symbol_id: "glyph-unknown",
        // question mark
        vector_markup: concat!(
            "<circle cx=\"12\" cy=\"12\" r=\"9\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\"/>",
            "<path d=\"M9.5 9.5a2.5 2.5 0 1 1 3.5 2.3c-.7.3-1 .9-1 1.7\" fill=\"none\" stroke=\"currentColor\" stroke-width=\"2\" stroke-linecap=\"round\"/>",
            "<circle cx=\"12\" cy=\"17\" r=\"1.2\" fill=\"currentColor\"/>"
        ),
        caption_template: "{n}. Other action",
    },
];

pub fn glyph_for(kind: StepKind) -> Glyph {
    GLYPHS[kind as usize]
}

/// The whole dictionary, in step-kind order.
pub fn glyphs() -> &'static [Glyph] {
    &GLYPHS
}

/// Pictorial rendering unit for one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Panel {
    pub step_index: usize,
    pub glyph: &'static str,
    pub caption: String,
    pub emphasized: bool,
    pub context_visible: bool,
}
