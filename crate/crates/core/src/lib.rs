//! Turn browser interaction logs captured from expert users into visual
//! process representations.
//!
//! The pipeline runs in four stages, each a module of this crate:
//!
//! 1. [`event`]: parse and validate line-delimited interaction logs.
//! 2. [`step`]: classify events with a rule table, coalesce them into
//!    labelled steps and attach screenshots, links and annotations.
//! 3. [`mining`]: mine frequent step sequences, count process variants and
//!    group steps into sections by knowledge-management subprocess.
//! 4. [`model`] and [`render`]: assemble a [`model::VprDocument`] and emit it
//!    as one of four prototype formats (textual or pictorial, with or without
//!    contextual data) as a self-contained HTML page or a static SVG.
//!
//! [`stats`] holds the machinery used to compare prototypes in a user study:
//! scoring, exclusion, pairwise regression, effect sizes, Bonferroni
//! correction, correlations and Likert summaries.
//!
//! The crate is `no_std` and only needs `alloc`. File system access, CSV
//! parsing and the command line live in the companion `vpr` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod event;
pub mod mining;
pub mod model;
pub mod pipeline;
pub mod render;
pub mod rules;
pub mod stats;
pub mod step;
pub mod synth;
mod url;

pub use event::{parse_log, serialize_log, validate_log, EventKind, EventLog, RawEvent};
pub use mining::{
    compute_variants, mine_patterns, sectionize, Pattern, Section, StepSequence, Variant,
};
pub use model::{build_document, deserialize_document, glyph_for, serialize_document, VprDocument};
pub use pipeline::{build_from_logs, MineOptions};
pub use render::{render, render_overview, Format, OutputKind, RenderConfig};
pub use rules::MappingRules;
pub use step::{
    attach_context, classify_event, map_steps, taxonomy, KmProcess, KmSubprocess, Span, Step,
    StepKind,
};
pub use synth::{synth_log, Profile};
