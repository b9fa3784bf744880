use std::fmt::Write as _;
use std::path::Path;

use super::AnalyzeError;
use crate::model::{AnnotatedObject, AnnotationCorpus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Indices(Vec<usize>),
}

const PALETTE: [&str; 8] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6", "#808000",
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Builds an SVG that draws each selected object once over the referenced image.
///
/// The raster is linked by `image_href`, never decoded, so the viewport is
/// sized from the largest box extent.
pub fn overlay_svg(
    corpus: &AnnotationCorpus,
    filename: &str,
    selection: &Selection,
    image_href: &str,
) -> Result<String, AnalyzeError> {
    let vrs = corpus
        .images
        .get(filename)
        .ok_or_else(|| AnalyzeError::ImageNotFound(filename.to_string()))?;
    let indices: Vec<usize> = match selection {
        Selection::All => (0..vrs.len()).collect(),
        Selection::Indices(ix) => ix.clone(),
    };

    let mut objects: Vec<AnnotatedObject> = Vec::new();
    for &i in &indices {
        let vr = vrs.get(i).ok_or_else(|| AnalyzeError::IndexOutOfRange {
            image: filename.to_string(),
            index: i,
        })?;
        for o in [vr.subject, vr.object] {
            if !objects.contains(&o) {
                objects.push(o);
            }
        }
    }

    let width = objects
        .iter()
        .map(|o| o.bbox.xmax)
        .max()
        .unwrap_or(0)
        .max(1);
    let height = objects
        .iter()
        .map(|o| o.bbox.ymax)
        .max()
        .unwrap_or(0)
        .max(1);

    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <image href="{0}" xlink:href="{0}" x="0" y="0"/>"#,
        escape(image_href)
    )
    .unwrap();
    for o in &objects {
        let colour = PALETTE[o.class_id % PALETTE.len()];
        let label = escape(corpus.class_name(o.class_id));
        let b = o.bbox;
        writeln!(
            svg,
            r#"  <rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{colour}" stroke-width="2"><title>{label}</title></rect>"#,
            b.xmin,
            b.ymin,
            b.width(),
            b.height()
        )
        .unwrap();
        writeln!(
            svg,
            r#"  <text x="{}" y="{}" fill="{colour}" font-size="12" font-family="sans-serif">{label}</text>"#,
            b.xmin + 2,
            b.ymin + 12
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_overlay(
    corpus: &AnnotationCorpus,
    filename: &str,
    selection: &Selection,
    out_path: &Path,
) -> Result<(), AnalyzeError> {
    let svg = overlay_svg(corpus, filename, selection, filename)?;
    std::fs::write(out_path, svg).map_err(|source| AnalyzeError::Io {
        path: out_path.to_path_buf(),
        source,
    })
}
