//! Adams-graded chart documents: one glyph per class, structure lines for
//! `v_i`-multiplications, and differential arrows; JSON (versioned) and a
//! thin deterministic SVG rendering with a fixed grid.

use serde::{Deserialize, Serialize};

use crate::cohomology::{BocksteinEntry, CohomologyReport};
use crate::complex::ComplexSlice;
use crate::error::{Error, Result};
use crate::ops::{render_monomial, v_degree};

pub const CHART_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDocument {
    #[serde(rename = "chart-format")]
    pub chart_format: u32,
    pub metadata: ChartMetadata,
    pub classes: Vec<ChartClass>,
    pub lines: Vec<ChartLine>,
    pub differentials: Vec<ChartDifferential>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartMetadata {
    pub n: i32,
    pub module: String,
    pub window: ChartWindow,
    pub engine_version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartWindow {
    pub x_min: i32,
    pub x_max: i32,
    pub s_max: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_max: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartClass {
    pub id: String,
    pub x: i32,
    pub s: u32,
    pub weight: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartLine {
    /// `v0`, `v1`, ... — a `v_i` line runs from `(x, s)` to
    /// `(x + 2^(i+1) - 2, s + 1)`.
    pub kind: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDifferential {
    pub page: u32,
    pub from: String,
    pub to: String,
}

fn class_id(x: i32, s: u32, i: usize) -> String {
    format!("{x}:{s}:{i}")
}

fn metadata(slice: &ComplexSlice) -> ChartMetadata {
    let w = slice.window();
    ChartMetadata {
        n: w.n,
        module: slice.module().name().to_string(),
        window: ChartWindow {
            x_min: w.x_min,
            x_max: w.x_max,
            s_max: w.s_max,
            weight_max: w.weight_max,
        },
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// One glyph per basis monomial, with the differential matrices drawn as
/// page-1 arrows.
pub fn emit_basis_chart(slice: &ComplexSlice) -> ChartDocument {
    let w = *slice.window();
    let mut classes = Vec::new();
    let mut differentials = Vec::new();
    for (&(x, s), cell) in slice.cells() {
        if !w.contains(x, s) {
            continue;
        }
        for (i, m) in cell.iter().enumerate() {
            classes.push(ChartClass {
                id: class_id(x, s, i),
                x,
                s,
                weight: m.bidegree().w,
                label: render_monomial(m, slice.module()),
            });
        }
    }
    for (&(x, s), matrix) in slice.cells().filter_map(|(k, _)| {
        slice.matrix_at(k.0, k.1).map(|m| (k, m))
    }) {
        if !w.contains(x, s) || !w.contains(x - 1, s + 1) {
            continue;
        }
        for j in 0..matrix.cols() {
            for i in matrix.column(j).support() {
                differentials.push(ChartDifferential {
                    page: 1,
                    from: class_id(x, s, j),
                    to: class_id(x - 1, s + 1, i),
                });
            }
        }
    }
    ChartDocument {
        chart_format: CHART_FORMAT_VERSION,
        metadata: metadata(slice),
        classes,
        lines: Vec::new(),
        differentials,
    }
}

/// One glyph per cohomology basis element, with `v_i` structure lines
/// read off the action matrices.
pub fn emit_cohomology_chart(report: &CohomologyReport, slice: &ComplexSlice) -> ChartDocument {
    let mut classes = Vec::new();
    for (&(x, s), cell) in &report.cells {
        for i in 0..cell.dimension {
            let lead = cell.representatives[i].leading_term().expect("nonzero");
            classes.push(ChartClass {
                id: class_id(x, s, i),
                x,
                s,
                weight: lead.bidegree().w,
                label: report.class_label(x, s, i, slice.module()),
            });
        }
    }
    let mut lines = Vec::new();
    for (&i, action) in &report.v_actions {
        let kind = format!("v{i}");
        for (&(x, s), matrix) in action {
            let (tx, ts) = (x + v_degree(i), s + 1);
            for j in 0..matrix.cols() {
                for r in matrix.column(j).support() {
                    lines.push(ChartLine {
                        kind: kind.clone(),
                        from: class_id(x, s, j),
                        to: class_id(tx, ts, r),
                    });
                }
            }
        }
    }
    ChartDocument {
        chart_format: CHART_FORMAT_VERSION,
        metadata: metadata(slice),
        classes,
        lines,
        differentials: Vec::new(),
    }
}

/// Cohomology chart at level `n - 1` with the first Bockstein
/// differentials drawn as page-1 arrows.
pub fn emit_bockstein_chart(
    report: &CohomologyReport,
    slice: &ComplexSlice,
    entries: &[BocksteinEntry],
) -> ChartDocument {
    let mut doc = emit_cohomology_chart(report, slice);
    for e in entries {
        for r in e.target_class.support() {
            doc.differentials.push(ChartDifferential {
                page: 1,
                from: class_id(e.source_cell.0, e.source_cell.1, e.source_index),
                to: class_id(e.target_cell.0, e.target_cell.1, r),
            });
        }
    }
    doc
}

/// Parses a chart JSON document; inverse of serialization.
pub fn parse_chart(text: &str) -> Result<ChartDocument> {
    let doc: ChartDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("chart JSON: {e}")))?;
    if doc.chart_format != CHART_FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported chart format {}",
            doc.chart_format
        )));
    }
    validate_chart(&doc)?;
    Ok(doc)
}

/// Every line and differential endpoint must name an existing class, and
/// every `v_i` line must respect the bidegree shift of `v_i`.
pub fn validate_chart(doc: &ChartDocument) -> Result<()> {
    let find = |id: &str| doc.classes.iter().find(|c| c.id == id);
    for line in &doc.lines {
        let (Some(from), Some(to)) = (find(&line.from), find(&line.to)) else {
            return Err(Error::Parse(format!(
                "line {} -> {} references a missing class",
                line.from, line.to
            )));
        };
        let Some(i) = line.kind.strip_prefix('v').and_then(|s| s.parse::<u32>().ok()) else {
            return Err(Error::Parse(format!("bad line kind `{}`", line.kind)));
        };
        if to.x != from.x + v_degree(i) || to.s != from.s + 1 {
            return Err(Error::Parse(format!(
                "v{i} line from ({}, {}) to ({}, {}) violates the degree shift",
                from.x, from.s, to.x, to.s
            )));
        }
    }
    for d in &doc.differentials {
        if find(&d.from).is_none() || find(&d.to).is_none() {
            return Err(Error::Parse(format!(
                "differential {} -> {} references a missing class",
                d.from, d.to
            )));
        }
    }
    Ok(())
}

pub fn chart_to_json(doc: &ChartDocument) -> String {
    serde_json::to_string_pretty(doc).expect("chart serialization")
}

const CELL: i32 = 48;
const MARGIN: i32 = 56;

/// Deterministic SVG: fixed grid spacing, no layout engine. Classes at
/// the same `(x, s)` are spread horizontally in index order.
pub fn render_svg(doc: &ChartDocument) -> String {
    let w = &doc.metadata.window;
    let cols = w.x_max - w.x_min + 1;
    let rows = w.s_max as i32 + 1;
    let width = 2 * MARGIN + cols * CELL;
    let height = 2 * MARGIN + rows * CELL;
    let cx = |x: i32| MARGIN + (x - w.x_min) * CELL + CELL / 2;
    let cy = |s: u32| height - MARGIN - (s as i32) * CELL - CELL / 2;

    let mut counts: std::collections::BTreeMap<(i32, u32), usize> = Default::default();
    for c in &doc.classes {
        *counts.entry((c.x, c.s)).or_default() += 1;
    }
    let mut placed: std::collections::BTreeMap<(i32, u32), usize> = Default::default();
    let mut pos: std::collections::BTreeMap<&str, (i32, i32)> = Default::default();
    let mut glyphs = String::new();
    for c in &doc.classes {
        let k = counts[&(c.x, c.s)];
        let i = placed.entry((c.x, c.s)).or_default();
        let dx = (*i as i32) * 10 - ((k as i32 - 1) * 10) / 2;
        *i += 1;
        let (px, py) = (cx(c.x) + dx, cy(c.s));
        pos.insert(&c.id, (px, py));
        glyphs.push_str(&format!(
            "  <circle cx=\"{px}\" cy=\"{py}\" r=\"3\" fill=\"black\"/>\n"
        ));
        glyphs.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"8\" text-anchor=\"middle\">{}</text>\n",
            px,
            py - 6,
            xml_escape(&c.label)
        ));
    }

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(
        "  <defs><marker id=\"arrow\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" \
         refY=\"3\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"crimson\"/></marker></defs>\n",
    );
    // grid and axis labels
    for x in w.x_min..=w.x_max {
        let px = cx(x);
        svg.push_str(&format!(
            "  <line x1=\"{px}\" y1=\"{}\" x2=\"{px}\" y2=\"{}\" stroke=\"#eee\"/>\n",
            MARGIN,
            height - MARGIN
        ));
        if x.rem_euclid(2) == 0 {
            svg.push_str(&format!(
                "  <text x=\"{px}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{x}</text>\n",
                height - MARGIN + 16
            ));
        }
    }
    for s in 0..=w.s_max {
        let py = cy(s);
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{py}\" x2=\"{}\" y2=\"{py}\" stroke=\"#eee\"/>\n",
            MARGIN,
            width - MARGIN
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{s}</text>\n",
            MARGIN - 8,
            py + 3
        ));
    }
    for line in &doc.lines {
        let (Some(&(x1, y1)), Some(&(x2, y2))) =
            (pos.get(line.from.as_str()), pos.get(line.to.as_str()))
        else {
            continue;
        };
        svg.push_str(&format!(
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"#555\" stroke-width=\"1\"/>\n"
        ));
    }
    for d in &doc.differentials {
        let (Some(&(x1, y1)), Some(&(x2, y2))) =
            (pos.get(d.from.as_str()), pos.get(d.to.as_str()))
        else {
            continue;
        };
        svg.push_str(&format!(
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"crimson\" \
             stroke-width=\"1\" marker-end=\"url(#arrow)\"/>\n"
        ));
    }
    svg.push_str(&glyphs);
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
