//! Rendering of a [`VprDocument`] into one of the four prototype formats.
//!
//! | format | steps as        | contextual data |
//! |--------|-----------------|-----------------|
//! | P1     | numbered list   | no              |
//! | P2     | glyph panels    | no              |
//! | P3     | numbered list   | yes             |
//! | P4     | glyph panels    | yes             |
//!
//! Interactive output is a single HTML file: styles, glyphs, screenshots
//! (as data URIs), the serialized document (in `<script id="vpr-data">`) and
//! the viewer runtime are all inlined, so it opens offline. Static output is
//! an SVG image with the same layout and no scripting.

mod html;
mod svg;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::model::{ModelError, VprDocument};
use crate::step::{AssetKind, KmSubprocess};

pub use html::render_overview;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Format {
    P1,
    P2,
    P3,
    P4,
}

impl Format {
    pub const ALL: [Format; 4] = [Format::P1, Format::P2, Format::P3, Format::P4];

    /// Glyph panels rather than a numbered list.
    pub fn is_pictorial(self) -> bool {
        matches!(self, Format::P2 | Format::P4)
    }

    pub fn includes_context(self) -> bool {
        matches!(self, Format::P3 | Format::P4)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Format::P1 => "p1",
            Format::P2 => "p2",
            Format::P3 => "p3",
            Format::P4 => "p4",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Format {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Format::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownName(s.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputKind {
    InteractiveDocument,
    StaticVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Palette {
    Default,
    HighContrast,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown name {0:?}")]
pub struct UnknownName(pub String);

impl FromStr for Palette {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(Palette::Default),
            "high-contrast" => Ok(Palette::HighContrast),
            _ => Err(UnknownName(s.into())),
        }
    }
}

/// Color used for entries when section colors are off.
pub const NEUTRAL_COLOR: &str = "#5f6368";
/// Accent for decision points.
pub const EMPHASIS_COLOR: &str = "#c62828";

impl Palette {
    /// One color per subprocess. Subprocesses under the same parent process
    /// share a hue in two shades.
    pub fn color(self, subprocess: KmSubprocess) -> &'static str {
        use KmSubprocess::*;
        match (self, subprocess) {
            (Palette::Default, Navigation) => "#1f6fb2",
            (Palette::Default, Search) => "#4f9bd9",
            (Palette::Default, FillingInformation) => "#2e7d4f",
            (Palette::Default, UploadingResources) => "#5fae7c",
            (Palette::Default, DocumentAnnotation) => "#6a3fa0",
            (Palette::Default, HighlightInformation) => "#a57fd1",
            (Palette::Default, InteractWithResources) => "#c56a12",
            (Palette::Default, RelyOnRecommendations) => "#e39b4a",
            (Palette::Default, NoProcess) => "#8a8f98",
            (Palette::HighContrast, Navigation) => "#003f88",
            (Palette::HighContrast, Search) => "#0072b2",
            (Palette::HighContrast, FillingInformation) => "#00593a",
            (Palette::HighContrast, UploadingResources) => "#009e73",
            (Palette::HighContrast, DocumentAnnotation) => "#4b0082",
            (Palette::HighContrast, HighlightInformation) => "#8e44ad",
            (Palette::HighContrast, InteractWithResources) => "#a04000",
            (Palette::HighContrast, RelyOnRecommendations) => "#d55e00",
            (Palette::HighContrast, NoProcess) => "#3c3c3c",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderConfig {
    pub format: Format,
    /// Inline screenshots as data URIs instead of linking `assets/<path>`.
    pub embed_assets: bool,
    pub palette: Palette,
    pub section_colors: bool,
    pub output: OutputKind,
}

impl RenderConfig {
    pub fn new(format: Format) -> Self {
        RenderConfig {
            format,
            embed_assets: true,
            palette: Palette::Default,
            section_colors: true,
            output: OutputKind::InteractiveDocument,
        }
    }

    pub(crate) fn section_color(&self, subprocess: KmSubprocess) -> &'static str {
        if self.section_colors {
            self.palette.color(subprocess)
        } else {
            NEUTRAL_COLOR
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("document has no steps")]
    EmptyDocument,
    #[error("invalid document: {0}")]
    InvalidDocument(ModelError),
    #[error("unresolved assets: {}", .0.join(", "))]
    UnresolvedAsset(Vec<String>),
}

/// Supplies screenshot bytes by relative path.
pub trait AssetSource {
    fn load(&self, path: &str) -> Option<Vec<u8>>;
}

impl AssetSource for BTreeMap<String, Vec<u8>> {
    fn load(&self, path: &str) -> Option<Vec<u8>> {
        self.get(path).cloned()
    }
}

/// An asset source with nothing in it, for formats without screenshots.
pub struct NoAssets;

impl AssetSource for NoAssets {
    fn load(&self, _: &str) -> Option<Vec<u8>> {
        None
    }
}

/// Renders `doc`. `runtime` is the viewer script inlined into interactive
/// output; it is treated as opaque text. Output is a pure function of the
/// arguments.
pub fn render(
    doc: &VprDocument,
    cfg: &RenderConfig,
    assets: &dyn AssetSource,
    runtime: &str,
) -> Result<String, RenderError> {
    doc.validate().map_err(|e| match e {
        ModelError::EmptyDocument => RenderError::EmptyDocument,
        other => RenderError::InvalidDocument(other),
    })?;
    let images = if cfg.format.includes_context() {
        resolve_images(doc, cfg, assets)?
    } else {
        BTreeMap::new()
    };
    Ok(match cfg.output {
        OutputKind::InteractiveDocument => html::render_html(doc, cfg, &images, runtime),
        OutputKind::StaticVector => svg::render_svg(doc, cfg, &images),
    })
}

/// Screenshot path to the `src`/`href` used for it.
type Images = BTreeMap<String, String>;

fn resolve_images(
    doc: &VprDocument,
    cfg: &RenderConfig,
    assets: &dyn AssetSource,
) -> Result<Images, RenderError> {
    use base64::Engine as _;
    let paths: BTreeSet<&str> = doc
        .steps
        .iter()
        .flat_map(|s| s.context.iter())
        .filter(|a| a.kind == AssetKind::Screenshot)
        .map(|a| a.payload.as_str())
        .collect();
    let mut images = BTreeMap::new();
    let mut missing = Vec::new();
    for path in paths {
        if !cfg.embed_assets {
            images.insert(path.into(), alloc::format!("assets/{path}"));
            continue;
        }
        match assets.load(path) {
            Some(bytes) => {
                let data = base64::engine::general_purpose::STANDARD.encode(bytes);
                images.insert(
                    path.into(),
                    alloc::format!("data:{};base64,{data}", crate::model::media_type(path)),
                );
            }
            None => missing.push(String::from(path)),
        }
    }
    if missing.is_empty() {
        Ok(images)
    } else {
        Err(RenderError::UnresolvedAsset(missing))
    }
}

/// Escapes text for HTML and XML content and attribute values.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Only http(s) URLs become hyperlinks.
pub(crate) fn linkable(url: &str) -> bool {
    matches!(crate::url::scheme(url), Some(s) if s.eq_ignore_ascii_case("http") || s.eq_ignore_ascii_case("https"))
}

/// `YYYY-MM-DD` for a UTC millisecond timestamp.
pub(crate) fn utc_date(ms: u64) -> String {
    // days-to-civil conversion for the proleptic Gregorian calendar
    let days = (ms / 86_400_000) as i64 + 719_468;
    let era = days.div_euclid(146_097);
    let doe = days.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = doy - (153 * mp + 2) / 5 + 1;
    let month = if mp < 10 { mp + 3 } else { mp - 9 };
    let year = yoe + era * 400 + i64::from(month <= 2);
    alloc::format!("{year:04}-{month:02}-{day:02}")
}

/// The most common path: among mined patterns with the highest support (at
/// least two traces), the longest, then the one with the most distinct step
/// kinds. Earlier patterns win remaining ties.
pub(crate) fn common_path(doc: &VprDocument) -> Option<&crate::mining::Pattern> {
    let top = doc
        .patterns
        .iter()
        .map(|p| p.support)
        .max()
        .filter(|&s| s >= 2)?;
    let rank =
        |p: &crate::mining::Pattern| (p.kinds.len(), p.kinds.iter().collect::<BTreeSet<_>>().len());
    doc.patterns.iter().filter(|p| p.support == top).fold(
        None,
        |best: Option<&crate::mining::Pattern>, p| match best {
            Some(b) if rank(b) >= rank(p) => Some(b),
            _ => Some(p),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_properties() {
        assert!(!Format::P1.is_pictorial() && !Format::P1.includes_context());
        assert!(Format::P2.is_pictorial() && !Format::P2.includes_context());
        assert!(!Format::P3.is_pictorial() && Format::P3.includes_context());
        assert!(Format::P4.is_pictorial() && Format::P4.includes_context());
        assert_eq!("P3".parse::<Format>(), Ok(Format::P3));
        assert!("p5".parse::<Format>().is_err());
    }

    #[test]
    fn palette_colors_distinct_per_subprocess() {
        for palette in [Palette::Default, Palette::HighContrast] {
            let colors: BTreeSet<&str> = KmSubprocess::ALL
                .iter()
                .map(|&s| palette.color(s))
                .collect();
            assert_eq!(colors.len(), KmSubprocess::ALL.len());
            assert!(!colors.contains(EMPHASIS_COLOR));
        }
    }

    #[test]
    fn dates() {
        assert_eq!(utc_date(0), "1970-01-01");
        assert_eq!(utc_date(1_700_000_000_000), "2023-11-14");
        assert_eq!(utc_date(951_782_400_000), "2000-02-29");
    }

    #[test]
    fn escaping() {
        assert_eq!(
            escape(r#"<a href="x">'&'</a>"#),
            "&lt;a href=&quot;x&quot;&gt;&#39;&amp;&#39;&lt;/a&gt;"
        );
    }
}
