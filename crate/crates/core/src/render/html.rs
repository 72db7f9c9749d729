use alloc::string::String;
use core::fmt::Write as _;

use super::{common_path, escape, linkable, utc_date, Images, RenderConfig, EMPHASIS_COLOR};
use crate::mining::Section;
use crate::model::{glyph_for, glyphs, serialize_document, VprDocument};
use crate::step::{AssetKind, Step};
use crate::url;

const STYLE: &str = r#"
:root { --vpr-accent: #c62828; --vpr-ink: #1d2327; --vpr-muted: #5f6368; --vpr-paper: #ffffff; }
* { box-sizing: border-box; }
body.vpr { margin: 0; font: 16px/1.5 system-ui, -apple-system, "Segoe UI", sans-serif; color: var(--vpr-ink); background: var(--vpr-paper); }
.vpr-header, .vpr-overview, .vpr-sections { max-width: 56rem; margin: 0 auto; padding: 0 1rem; }
.vpr-title { font-size: 1.6rem; margin: 1.5rem 0 0.25rem; }
.vpr-goal { color: var(--vpr-muted); margin: 0 0 1rem; }
.vpr-overview { position: sticky; top: 0; background: var(--vpr-paper); border-bottom: 1px solid #ddd; padding-top: 0.5rem; padding-bottom: 0.5rem; z-index: 1; }
.vpr-overview-list { display: flex; flex-wrap: wrap; gap: 0.5rem; list-style: none; margin: 0; padding: 0; }
.vpr-overview-entry a { display: block; padding: 0.25rem 0.6rem; border-radius: 0.3rem; border-left: 0.4rem solid var(--vpr-color); color: inherit; text-decoration: none; background: #f4f5f7; }
.vpr-overview-entry.vpr-active a { background: #e3e7ee; font-weight: 600; }
.vpr-overview-count { color: var(--vpr-muted); font-size: 0.85em; }
.vpr-common-path { color: var(--vpr-muted); font-size: 0.9em; margin: 0.4rem 0 0; }
.vpr-section { border-left: 0.4rem solid var(--vpr-color); padding: 0.25rem 0 0.25rem 1rem; margin: 1.5rem 0; scroll-margin-top: 4rem; }
.vpr-section-title { font-size: 1.2rem; margin: 0 0 0.5rem; color: var(--vpr-color); }
.vpr-steps { margin: 0; padding-left: 1.5rem; }
.vpr-step { margin: 0.4rem 0; padding: 0.2rem 0.4rem; }
.vpr-panels { display: grid; grid-template-columns: repeat(auto-fill, minmax(12rem, 1fr)); gap: 0.75rem; }
.vpr-panel { margin: 0; padding: 0.75rem; border: 1px solid #ddd; border-radius: 0.5rem; background: #fafbfc; }
.vpr-glyph { width: 3rem; height: 3rem; color: var(--vpr-color); }
.vpr-panel-heading { display: block; font-weight: 600; }
.vpr-decision { outline: 2px solid var(--vpr-accent); outline-offset: 2px; }
.vpr-decision-badge { display: inline-block; margin-left: 0.4rem; padding: 0 0.35rem; border-radius: 0.25rem; background: var(--vpr-accent); color: #fff; font-size: 0.75em; vertical-align: middle; }
.vpr-context { margin-top: 0.4rem; font-size: 0.9em; }
.vpr-shot { margin: 0.3rem 0; }
.vpr-shot img { max-width: 12rem; border: 1px solid #ccc; cursor: zoom-in; }
.vpr-shot.vpr-zoomed img { max-width: 100%; cursor: zoom-out; }
.vpr-highlight { margin: 0.3rem 0; padding: 0.2rem 0.6rem; border-left: 3px solid #f2c744; background: #fff8dc; }
.vpr-annotation { margin: 0.3rem 0; font-style: italic; }
.vpr-error { padding: 1rem; background: #fdecea; color: #611a15; }
@media (max-width: 40rem) { .vpr-overview { position: static; } .vpr-panels { grid-template-columns: 1fr; } }
@media print { .vpr-overview { position: static; } }
"#;

pub(super) fn render_html(
    doc: &VprDocument,
    cfg: &RenderConfig,
    images: &Images,
    runtime: &str,
) -> String {
    let mut out = String::with_capacity(16 * 1024);
    let title = escape(&doc.title);
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    out.push_str("<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n");
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, "<style>{STYLE}</style>");
    out.push_str("</head>\n");
    let _ = writeln!(
        out,
        "<body class=\"vpr\" data-vpr-format=\"{}\">",
        cfg.format
    );
    if cfg.format.is_pictorial() {
        glyph_defs(&mut out);
    }
    out.push_str("<header class=\"vpr-header\">\n");
    let _ = writeln!(out, "<h1 class=\"vpr-title\">{title}</h1>");
    let _ = writeln!(
        out,
        "<p class=\"vpr-goal\">Goal: {title}. Recorded from {} on {}: {} steps in {} sections.</p>",
        escape(&doc.actor_id),
        utc_date(doc.created_at),
        doc.steps.len(),
        doc.sections.len()
    );
    out.push_str("</header>\n");
    out.push_str(&render_overview(doc, cfg));
    out.push_str("<main class=\"vpr-sections\">\n");
    for section in &doc.sections {
        render_section(&mut out, doc, cfg, images, section);
    }
    out.push_str("</main>\n");
    out.push_str("<script type=\"application/json\" id=\"vpr-data\">");
    out.push_str(&serialize_document(doc));
    out.push_str("</script>\n");
    let _ = writeln!(
        out,
        "<script id=\"vpr-runtime\">{}</script>",
        runtime.replace("</script", "<\\/script")
    );
    out.push_str("</body>\n</html>\n");
    out
}

/// The section overview with per-section step totals and, when patterns were
/// mined, the common path. An HTML fragment.
pub fn render_overview(doc: &VprDocument, cfg: &RenderConfig) -> String {
    let mut out = String::new();
    out.push_str(
        "<nav class=\"vpr-overview\" id=\"vpr-overview\" aria-label=\"Process overview\">\n",
    );
    out.push_str("<ol class=\"vpr-overview-list\">\n");
    for section in &doc.sections {
        let n = section.steps.len();
        let _ = writeln!(
            out,
            "<li class=\"vpr-overview-entry\" data-section=\"{i}\" style=\"--vpr-color:{color}\"><a href=\"#vpr-section-{i}\"><span class=\"vpr-overview-name\">{name}</span> <span class=\"vpr-overview-count\" data-total=\"{n}\">{n} {unit}</span></a></li>",
            i = section.index,
            color = cfg.section_color(section.subprocess),
            name = escape(section.subprocess.name()),
            unit = if n == 1 { "step" } else { "steps" },
        );
    }
    out.push_str("</ol>\n");
    if let Some(p) = common_path(doc) {
        let labels: alloc::vec::Vec<&str> = p.kinds.iter().map(|k| k.label()).collect();
        let _ = writeln!(
            out,
            "<p class=\"vpr-common-path\">Common path: {} (in {} of {} traces)</p>",
            escape(&labels.join(" \u{2192} ")),
            p.support,
            doc.variants
                .iter()
                .map(|v| v.count)
                .sum::<usize>()
                .max(p.support)
        );
    }
    out.push_str("</nav>\n");
    out
}

fn glyph_defs(out: &mut String) {
    out.push_str("<svg class=\"vpr-glyph-defs\" xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\" style=\"position:absolute\" aria-hidden=\"true\">\n");
    for g in glyphs() {
        let _ = writeln!(
            out,
            "<symbol id=\"{}\" viewBox=\"0 0 24 24\">{}</symbol>",
            g.symbol_id, g.vector_markup
        );
    }
    out.push_str("</svg>\n");
}

fn render_section(
    out: &mut String,
    doc: &VprDocument,
    cfg: &RenderConfig,
    images: &Images,
    section: &Section,
) {
    let _ = writeln!(
        out,
        "<section class=\"vpr-section\" id=\"vpr-section-{i}\" data-section=\"{i}\" data-subprocess=\"{sub}\" style=\"--vpr-color:{color}\">",
        i = section.index,
        sub = escape(section.subprocess.name()),
        color = cfg.section_color(section.subprocess),
    );
    let _ = writeln!(
        out,
        "<h2 class=\"vpr-section-title\">{}</h2>",
        escape(&section.title)
    );
    let steps = &doc.steps[section.steps.start..section.steps.end];
    if cfg.format.is_pictorial() {
        out.push_str("<div class=\"vpr-panels\">\n");
        for step in steps {
            let glyph = glyph_for(step.kind);
            let _ = write!(
                out,
                "<figure class=\"vpr-panel{}\" id=\"vpr-step-{i}\" data-step=\"{i}\" data-glyph=\"{id}\"><svg class=\"vpr-glyph\" viewBox=\"0 0 24 24\" role=\"img\" aria-label=\"{label}\"><use href=\"#{id}\"/></svg><figcaption><span class=\"vpr-panel-heading\">{heading}{badge}</span> <span class=\"vpr-caption\">{caption}</span></figcaption>",
                decision_class(doc, step),
                i = step.index,
                id = glyph.symbol_id,
                label = step.kind.label(),
                heading = escape(&glyph.caption(step.index + 1)),
                badge = badge(doc, step),
                caption = escape(&step.summary),
            );
            context(out, cfg, images, step);
            out.push_str("</figure>\n");
        }
        out.push_str("</div>\n");
    } else {
        let _ = writeln!(
            out,
            "<ol class=\"vpr-steps\" start=\"{}\">",
            section.steps.start + 1
        );
        for step in steps {
            let _ = write!(
                out,
                "<li class=\"vpr-step{}\" id=\"vpr-step-{i}\" data-step=\"{i}\"><span class=\"vpr-caption\">{caption}</span>{badge}",
                decision_class(doc, step),
                i = step.index,
                caption = escape(&step.summary),
                badge = badge(doc, step),
            );
            context(out, cfg, images, step);
            out.push_str("</li>\n");
        }
        out.push_str("</ol>\n");
    }
    out.push_str("</section>\n");
}

fn decision_class(doc: &VprDocument, step: &Step) -> &'static str {
    if doc.is_decision_point(step.index) {
        " vpr-decision"
    } else {
        ""
    }
}

fn badge(doc: &VprDocument, step: &Step) -> String {
    if doc.is_decision_point(step.index) {
        alloc::format!("<span class=\"vpr-decision-badge\" style=\"background:{EMPHASIS_COLOR}\">Key step</span>")
    } else {
        String::new()
    }
}

fn context(out: &mut String, cfg: &RenderConfig, images: &Images, step: &Step) {
    if !cfg.format.includes_context() || step.context.is_empty() {
        return;
    }
    let _ = write!(
        out,
        "<div class=\"vpr-context\" data-step=\"{}\">",
        step.index
    );
    for asset in &step.context {
        match asset.kind {
            AssetKind::Screenshot => {
                if let Some(src) = images.get(&asset.payload) {
                    let _ = write!(
                        out,
                        "<figure class=\"vpr-shot\" data-zoom=\"\"><img src=\"{}\" alt=\"Screenshot for step {}\" loading=\"lazy\"></figure>",
                        escape(src),
                        step.index + 1
                    );
                }
            }
            AssetKind::Link => {
                let text = escape(url::page(&asset.payload));
                if linkable(&asset.payload) {
                    let _ = write!(
                        out,
                        "<p class=\"vpr-link\"><a href=\"{}\" target=\"_blank\" rel=\"noopener noreferrer\">{text}</a></p>",
                        escape(&asset.payload)
                    );
                } else {
                    let _ = write!(out, "<p class=\"vpr-link\">{text}</p>");
                }
            }
            AssetKind::HighlightedText => {
                let _ = write!(
                    out,
                    "<blockquote class=\"vpr-highlight\">{}</blockquote>",
                    escape(&asset.payload)
                );
            }
            AssetKind::Annotation => {
                let _ = write!(
                    out,
                    "<p class=\"vpr-annotation\">Note: {}</p>",
                    escape(&asset.payload)
                );
            }
        }
    }
    out.push_str("</div>");
}
