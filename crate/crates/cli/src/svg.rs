//! SVG rendering of a tessellation: filled cells, stroked internal edges and a
//! dashed window outline. The y-axis points up.

use std::fmt::Write;

use stit_core::{Point, Polygon, Tessellation};

struct Frame {
    min_x: f64,
    max_y: f64,
    margin: f64,
}

impl Frame {
    fn map(&self, p: Point) -> (f64, f64) {
        (p.x - self.min_x + self.margin, self.max_y - p.y + self.margin)
    }

    fn points(&self, poly: &Polygon) -> String {
        poly.vertices()
            .iter()
            .map(|&v| {
                let (x, y) = self.map(v);
                format!("{x:.6},{y:.6}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn fill(id: u64) -> String {
    // golden-angle hues keep neighbouring ids apart
    let hue = (id as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},55%,78%)")
}

pub fn render(t: &Tessellation) -> String {
    let v = t.window.vertices();
    let min_x = v.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max_x = v.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let min_y = v.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = v.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let diam = t.window.diameter();
    let stroke = 0.002 * diam;
    let frame = Frame {
        min_x,
        max_y,
        margin: 0.02 * diam,
    };
    let (w, h) = (max_x - min_x + 2.0 * frame.margin, max_y - min_y + 2.0 * frame.margin);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.6} {h:.6}" width="800" height="{:.0}">"#,
        800.0 * h / w
    );
    let _ = writeln!(out, r#"  <g id="cells" stroke="none">"#);
    for c in &t.live_cells {
        let _ = writeln!(
            out,
            r#"    <polygon class="cell" data-id="{}" fill="{}" points="{}"/>"#,
            c.id,
            fill(c.id),
            frame.points(&c.polygon)
        );
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(
        out,
        r#"  <g id="edges" stroke="black" stroke-width="{stroke:.6}" stroke-linecap="round">"#
    );
    for e in &t.internal_edges {
        let ((x1, y1), (x2, y2)) = (frame.map(e.a), frame.map(e.b));
        let _ = writeln!(
            out,
            r#"    <line x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}"/>"#
        );
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(
        out,
        r#"  <polygon id="window" fill="none" stroke="black" stroke-width="{stroke:.6}" stroke-dasharray="{:.6} {:.6}" points="{}"/>"#,
        4.0 * stroke,
        2.0 * stroke,
        frame.points(&t.window)
    );
    out.push_str("</svg>\n");
    out
}
