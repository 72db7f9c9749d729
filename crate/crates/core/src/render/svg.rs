use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use super::{common_path, escape, linkable, Images, RenderConfig, EMPHASIS_COLOR};
use crate::model::{glyph_for, glyphs, VprDocument};
use crate::step::{AssetKind, Step};
use crate::url;

const WIDTH: u32 = 960;
const MARGIN: u32 = 24;
const LINE: u32 = 20;
const COLUMNS: u32 = 4;
const GAP: u32 = 12;
const PANEL_W: u32 = (WIDTH - 2 * MARGIN - (COLUMNS - 1) * GAP) / COLUMNS;
const THUMB_W: u32 = 160;
const THUMB_H: u32 = 100;
/// Rough average glyph advance at 13px, used for wrapping.
const CHAR_W: u32 = 7;

pub(super) fn render_svg(doc: &VprDocument, cfg: &RenderConfig, images: &Images) -> String {
    let mut body = String::with_capacity(8 * 1024);
    let mut y = MARGIN + 24;
    let _ = writeln!(body, "<text class=\"vpr-title\" x=\"{MARGIN}\" y=\"{y}\" font-size=\"22\" font-weight=\"600\">{}</text>", escape(&doc.title));
    y += 16;

    // overview strip
    let n = doc.sections.len() as u32;
    let cell = (WIDTH - 2 * MARGIN) / n.max(1);
    body.push_str("<g class=\"vpr-overview\">\n");
    for section in &doc.sections {
        let x = MARGIN + section.index as u32 * cell;
        let label = fit(
            &alloc::format!("{} ({})", section.subprocess.name(), section.steps.len()),
            cell.saturating_sub(8),
        );
        let _ = writeln!(
            body,
            "<a href=\"#vpr-section-{i}\"><g class=\"vpr-overview-entry\" data-section=\"{i}\"><rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"28\" fill=\"{color}\"/><text x=\"{tx}\" y=\"{ty}\" fill=\"#ffffff\">{label}</text></g></a>",
            i = section.index,
            w = cell - 2,
            color = cfg.section_color(section.subprocess),
            tx = x + 4,
            ty = y + 19,
            label = escape(&label),
        );
    }
    body.push_str("</g>\n");
    y += 28 + LINE;
    if let Some(p) = common_path(doc) {
        let labels: Vec<&str> = p.kinds.iter().map(|k| k.label()).collect();
        let _ = writeln!(body, "<text class=\"vpr-common-path\" x=\"{MARGIN}\" y=\"{y}\" fill=\"#5f6368\">Common path: {}</text>", escape(&labels.join(" \u{2192} ")));
        y += LINE;
    }

    for section in &doc.sections {
        y += 12;
        let color = cfg.section_color(section.subprocess);
        let _ = writeln!(
            body,
            "<g class=\"vpr-section\" id=\"vpr-section-{}\">",
            section.index
        );
        let _ = writeln!(
            body,
            "<rect x=\"{MARGIN}\" y=\"{y}\" width=\"{}\" height=\"26\" fill=\"{color}\"/>",
            WIDTH - 2 * MARGIN
        );
        let _ = writeln!(body, "<text x=\"{}\" y=\"{}\" fill=\"#ffffff\" font-size=\"15\" font-weight=\"600\">{}</text>", MARGIN + 8, y + 18, escape(&section.title));
        y += 26 + 8;
        let steps = &doc.steps[section.steps.start..section.steps.end];
        if cfg.format.is_pictorial() {
            for row in steps.chunks(COLUMNS as usize) {
                let mut row_h = 0;
                for (col, step) in row.iter().enumerate() {
                    let x = MARGIN + col as u32 * (PANEL_W + GAP);
                    row_h = row_h.max(panel(&mut body, doc, cfg, images, step, x, y, color));
                }
                y += row_h + GAP;
            }
        } else {
            for step in steps {
                y = list_item(&mut body, doc, cfg, images, step, y);
            }
        }
        body.push_str("</g>\n");
    }
    let height = y + MARGIN;

    let mut out = String::with_capacity(body.len() + 2048);
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" class=\"vpr\" data-vpr-format=\"{}\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\" font-family=\"system-ui, sans-serif\" font-size=\"13\">",
        cfg.format
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&doc.title));
    if cfg.format.is_pictorial() {
        out.push_str("<defs>\n");
        for g in glyphs() {
            let _ = writeln!(
                out,
                "<symbol id=\"{}\" viewBox=\"0 0 24 24\">{}</symbol>",
                g.symbol_id, g.vector_markup
            );
        }
        out.push_str("</defs>\n");
    }
    let _ = writeln!(
        out,
        "<rect width=\"{WIDTH}\" height=\"{height}\" fill=\"#ffffff\"/>"
    );
    out.push_str(&body);
    out.push_str("</svg>\n");
    out
}

fn list_item(
    out: &mut String,
    doc: &VprDocument,
    cfg: &RenderConfig,
    images: &Images,
    step: &Step,
    mut y: u32,
) -> u32 {
    let x = MARGIN + 12;
    let width = WIDTH - 2 * MARGIN - 24;
    let _ = write!(out, "<g class=\"vpr-step\" data-step=\"{}\">", step.index);
    let lines = wrap(
        &alloc::format!("{}. {}", step.index + 1, step.summary),
        width / CHAR_W,
    );
    let top = y;
    for line in &lines {
        y += LINE;
        let _ = write!(out, "<text x=\"{x}\" y=\"{y}\">{}</text>", escape(line));
    }
    if doc.is_decision_point(step.index) {
        let _ = write!(out, "<rect class=\"vpr-decision\" x=\"{}\" y=\"{}\" width=\"4\" height=\"{}\" fill=\"{EMPHASIS_COLOR}\"/>", MARGIN + 2, top + 5, y - top);
    }
    if cfg.format.includes_context() && !step.context.is_empty() {
        y = context(out, images, step, x + 16, y + 6, width - 16);
    }
    out.push_str("</g>\n");
    y + 4
}

#[allow(clippy::too_many_arguments)]
fn panel(
    out: &mut String,
    doc: &VprDocument,
    cfg: &RenderConfig,
    images: &Images,
    step: &Step,
    x: u32,
    top: u32,
    color: &str,
) -> u32 {
    let glyph = glyph_for(step.kind);
    let mut inner = String::new();
    let _ = write!(
        inner,
        "<use href=\"#{}\" x=\"{}\" y=\"{}\" width=\"40\" height=\"40\" color=\"{color}\"/>",
        glyph.symbol_id,
        x + 10,
        top + 10
    );
    let _ = write!(
        inner,
        "<text x=\"{}\" y=\"{}\" font-weight=\"600\">{}</text>",
        x + 58,
        top + 34,
        escape(&fit(&glyph.caption(step.index + 1), PANEL_W - 64))
    );
    let mut y = top + 56;
    for line in wrap(&step.summary, (PANEL_W - 20) / CHAR_W) {
        y += LINE - 2;
        let _ = write!(
            inner,
            "<text x=\"{}\" y=\"{y}\">{}</text>",
            x + 10,
            escape(&line)
        );
    }
    if cfg.format.includes_context() && !step.context.is_empty() {
        y = context(&mut inner, images, step, x + 10, y + 6, PANEL_W - 20);
    }
    let height = y + 10 - top;
    let stroke = if doc.is_decision_point(step.index) {
        EMPHASIS_COLOR
    } else {
        "#d0d4d9"
    };
    let class = if doc.is_decision_point(step.index) {
        "vpr-panel vpr-decision"
    } else {
        "vpr-panel"
    };
    let _ = writeln!(
        out,
        "<g class=\"{class}\" data-step=\"{}\"><rect x=\"{x}\" y=\"{top}\" width=\"{PANEL_W}\" height=\"{height}\" rx=\"8\" fill=\"#fafbfc\" stroke=\"{stroke}\" stroke-width=\"2\"/>{inner}</g>",
        step.index
    );
    height
}

/// Draws the step's context below `y` and returns the new baseline.
fn context(out: &mut String, images: &Images, step: &Step, x: u32, mut y: u32, width: u32) -> u32 {
    let _ = write!(
        out,
        "<g class=\"vpr-context\" data-step=\"{}\">",
        step.index
    );
    let chars = width / CHAR_W;
    for asset in &step.context {
        match asset.kind {
            AssetKind::Screenshot => {
                if let Some(src) = images.get(&asset.payload) {
                    let w = THUMB_W.min(width);
                    let _ = write!(out, "<image href=\"{}\" x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{THUMB_H}\" preserveAspectRatio=\"xMinYMin meet\"/>", escape(src));
                    y += THUMB_H + 4;
                }
            }
            AssetKind::Link => {
                y += LINE;
                let text = escape(&fit(url::page(&asset.payload), width));
                if linkable(&asset.payload) {
                    let _ = write!(out, "<a href=\"{}\"><text x=\"{x}\" y=\"{y}\" fill=\"#1a57a8\" text-decoration=\"underline\">{text}</text></a>", escape(&asset.payload));
                } else {
                    let _ = write!(out, "<text x=\"{x}\" y=\"{y}\">{text}</text>");
                }
            }
            AssetKind::HighlightedText | AssetKind::Annotation => {
                let (prefix, style) = if asset.kind == AssetKind::Annotation {
                    ("Note: ", " font-style=\"italic\"")
                } else {
                    ("\u{201c}", " fill=\"#6b5a00\"")
                };
                let text = if asset.kind == AssetKind::Annotation {
                    alloc::format!("{prefix}{}", asset.payload)
                } else {
                    alloc::format!("{prefix}{}\u{201d}", asset.payload)
                };
                for line in wrap(&text, chars) {
                    y += LINE - 2;
                    let _ = write!(
                        out,
                        "<text x=\"{x}\" y=\"{y}\"{style}>{}</text>",
                        escape(&line)
                    );
                }
            }
        }
    }
    out.push_str("</g>");
    y
}

/// Greedy word wrap to at most `width` chars per line; long words are split.
fn wrap(text: &str, width: u32) -> Vec<String> {
    let width = width.max(8) as usize;
    let mut lines = Vec::new();
    let mut line = String::new();
    for word in text.split_whitespace() {
        let mut word: Vec<char> = word.chars().collect();
        loop {
            let used = line.chars().count();
            let sep = usize::from(used > 0);
            if used + sep + word.len() <= width {
                if sep == 1 {
                    line.push(' ');
                }
                line.extend(word.iter());
                break;
            }
            if used > 0 {
                lines.push(core::mem::take(&mut line));
                continue;
            }
            let rest = word.split_off(width);
            lines.push(word.iter().collect());
            word = rest;
        }
    }
    if !line.is_empty() || lines.is_empty() {
        lines.push(line);
    }
    lines
}

/// Truncates to fit `width` pixels, marking the cut with an ellipsis.
fn fit(text: &str, width: u32) -> String {
    let max = (width / CHAR_W).max(2) as usize;
    if text.chars().count() <= max {
        return text.into();
    }
    let mut s: String = text.chars().take(max - 1).collect();
    s.push('\u{2026}');
    s
}
