//! SVG and DOT output for topology graphs.

use std::fmt::Write;

use crate::error::{RenderError, Result};
use crate::graph::{EdgeKind, GraphEdge, NodeKind, TopologyGraph};

const EVEN_ROW: &str = "#c2185b";
const ODD_ROW: &str = "#00897b";
const KNIT_FILL: &str = "#9e9e9e";
const PURL_FILL: &str = "#43a047";
const PCN_FILL: &str = "#ffffff";
const OUTLINE: &str = "#424242";
const MARKER: &str = "#757575";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderStyle {
    pub spacing: f64,
    pub node_radius: f64,
    pub square_size: f64,
    pub arrowheads: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle { spacing: 40.0, node_radius: 7.0, square_size: 10.0, arrowheads: true }
    }
}

impl RenderStyle {
    pub fn check(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.spacing) {
            return Err(RenderError::DegenerateStyle("spacing").into());
        }
        if !positive(self.node_radius) {
            return Err(RenderError::DegenerateStyle("node radius").into());
        }
        if !positive(self.square_size) {
            return Err(RenderError::DegenerateStyle("square size").into());
        }
        Ok(())
    }

    fn pad(&self) -> f64 {
        self.spacing
    }

    fn x(&self, i: usize) -> f64 {
        self.pad() + i as f64 * self.spacing
    }

    fn y(&self, j: usize, h: usize) -> f64 {
        self.pad() + (h - 1 - j) as f64 * self.spacing
    }
}

fn row_color(row: usize) -> &'static str {
    if row.is_multiple_of(2) {
        EVEN_ROW
    } else {
        ODD_ROW
    }
}

/// Writes a standalone SVG document.
pub fn to_svg(graph: &TopologyGraph, style: &RenderStyle) -> Result<String> {
    style.check()?;
    let (w, h) = (graph.dims.w, graph.dims.h);
    let width = 2.0 * style.pad() + (w.max(1) - 1) as f64 * style.spacing;
    let height = 2.0 * style.pad() + (h.max(1) - 1) as f64 * style.spacing;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    if style.arrowheads {
        out.push_str("<defs>\n");
        for (id, color) in [("even", EVEN_ROW), ("odd", ODD_ROW)] {
            writeln!(
                out,
                r#"<marker id="arrow-{id}" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="{color}"/></marker>"#
            )
            .unwrap();
        }
        out.push_str("</defs>\n");
    }

    out.push_str("<g class=\"edges\">\n");
    for e in &graph.edges {
        edge_svg(&mut out, e, h, style);
    }
    out.push_str("</g>\n<g class=\"nodes\">\n");
    for n in graph.contacts() {
        let fill = match n.kind {
            NodeKind::PurlACN => PURL_FILL,
            NodeKind::PCN => PCN_FILL,
            _ => KNIT_FILL,
        };
        writeln!(
            out,
            r#"<circle class="{:?}" data-i="{}" data-j="{}" cx="{}" cy="{}" r="{}" fill="{fill}" stroke="{OUTLINE}" stroke-width="1.5"/>"#,
            n.kind,
            n.i,
            n.j,
            style.x(n.i),
            style.y(n.j, h),
            style.node_radius
        )
        .unwrap();
    }
    for n in graph.markers() {
        let s = style.square_size;
        // Offset so a marker next to a contact node stays visible.
        let x = style.x(n.i) + style.node_radius - s / 2.0;
        let y = style.y(n.j, h) - style.node_radius - s / 2.0;
        writeln!(
            out,
            r#"<rect class="UACNMarker" data-i="{}" data-j="{}" x="{x}" y="{y}" width="{s}" height="{s}" fill="none" stroke="{MARKER}" stroke-width="1.5"/>"#,
            n.i, n.j
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn edge_svg(out: &mut String, e: &GraphEdge, h: usize, style: &RenderStyle) {
    let (x1, y1) = (style.x(e.from.0), style.y(e.from.1, h));
    let (x2, y2) = (style.x(e.to.0), style.y(e.to.1, h));
    let color = row_color(e.row);
    let marker = |row: usize| {
        if style.arrowheads {
            format!(r#" marker-end="url(#arrow-{})""#, if row.is_multiple_of(2) { "even" } else { "odd" })
        } else {
            String::new()
        }
    };
    match e.kind {
        EdgeKind::Segment => {
            writeln!(
                out,
                r#"<line data-row="{}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}" stroke-width="2"{}/>"#,
                e.row,
                marker(e.row)
            )
            .unwrap();
        }
        EdgeKind::BorderLoop => {
            // Swing outward past the edge, then come back in on the next row.
            let outward = if e.row.is_multiple_of(2) { 1.0 } else { -1.0 };
            let bulge = x1 + outward * style.spacing * 0.6;
            let mid = (y1 + y2) / 2.0;
            let r = style.spacing * 0.3;
            writeln!(
                out,
                r#"<path data-row="{}" d="M {x1} {y1} Q {bulge} {y1} {bulge} {mid}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                e.row
            )
            .unwrap();
            writeln!(
                out,
                r#"<path data-row="{}" d="M {bulge} {mid} A {r} {r} 0 0 {} {bulge} {}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                e.row,
                if outward > 0.0 { 0 } else { 1 },
                mid - r / 2.0
            )
            .unwrap();
            let next = row_color(e.row + 1);
            writeln!(
                out,
                r#"<path data-row="{}" d="M {bulge} {} Q {bulge} {y2} {x2} {y2}" fill="none" stroke="{next}" stroke-width="2"{}/>"#,
                e.row + 1,
                mid - r / 2.0,
                marker(e.row + 1)
            )
            .unwrap();
        }
    }
}

/// Writes a Graphviz digraph with pinned positions.
pub fn to_dot(graph: &TopologyGraph) -> String {
    let id = |i: usize, j: usize| format!("n{i}_{j}");
    let mut out = String::from("digraph topology {\n  node [shape=circle, label=\"\"];\n");
    for n in graph.contacts() {
        writeln!(
            out,
            "  {} [kind={:?}, i={}, j={}, pos=\"{},{}!\"];",
            id(n.i, n.j),
            n.kind,
            n.i,
            n.j,
            n.i,
            n.j
        )
        .unwrap();
    }
    for n in graph.markers() {
        writeln!(
            out,
            "  u{}_{} [kind=UACNMarker, shape=square, i={}, j={}, pos=\"{},{}!\"];",
            n.i, n.j, n.i, n.j, n.i, n.j
        )
        .unwrap();
    }
    for e in &graph.edges {
        writeln!(
            out,
            "  {} -> {} [row={}, dir_={:?}, kind={:?}, color=\"{}\"];",
            id(e.from.0, e.from.1),
            id(e.to.0, e.to.1),
            e.row,
            e.dir,
            e.kind,
            row_color(e.row)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
