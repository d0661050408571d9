//! SVG scenes: demands as translucent rectangles, input points as disks,
//! auxiliary points as crosses, and optional lower-bound witnesses.

use std::fmt::Write;

use crate::bounds::BoundarySegment;
use crate::model::{Instance, Pt, Solution};
use crate::verify::Cut;

/// Lower-bound witnesses drawn on top of the scene.
#[derive(Clone, Debug, Default)]
pub struct Witnesses {
    pub boundary: Vec<BoundarySegment>,
    pub cuts: Vec<Cut>,
}

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

struct Frame {
    xmin: i64,
    ymax: i64,
    k: f64,
}

impl Frame {
    fn new(pts: &[Pt]) -> Self {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (0, 0, 0, 0);
        if let Some(p) = pts.first() {
            (xmin, xmax, ymin, ymax) = (p.x, p.x, p.y, p.y);
        }
        for p in pts {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        let span = (xmax - xmin).max(ymax - ymin).max(1) as f64;
        Frame {
            xmin,
            ymax,
            k: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn x(&self, v: i64) -> f64 {
        MARGIN + (v - self.xmin) as f64 * self.k
    }

    /// SVG y grows downward.
    fn y(&self, v: i64) -> f64 {
        MARGIN + (self.ymax - v) as f64 * self.k
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(inst: &Instance, sol: Option<&Solution>, wit: Option<&Witnesses>) -> String {
    let mut pts = inst.positions();
    if let Some(s) = sol {
        pts.extend_from_slice(&s.aux);
    }
    let f = Frame::new(&pts);
    let mut o = String::new();
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(o, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(o, r#"<g id="demands" fill="orange" fill-opacity="0.25" stroke="darkorange" stroke-width="0.5">"#);
    for d in &inst.demands {
        let r = inst.rect(d);
        let _ = writeln!(
            o,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            f.x(r.xlo),
            f.y(r.yhi),
            f.x(r.xhi) - f.x(r.xlo),
            f.y(r.ylo) - f.y(r.yhi)
        );
    }
    let _ = writeln!(o, "</g>");
    if let Some(w) = wit {
        let _ = writeln!(o, r#"<g id="witnesses" stroke-width="2">"#);
        for s in &w.boundary {
            let _ = writeln!(
                o,
                r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="blue"/>"#,
                f.x(s.x),
                f.y(s.ylo),
                f.y(s.yhi)
            );
        }
        for c in &w.cuts {
            let _ = writeln!(
                o,
                r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="green" stroke-dasharray="4 2"/>"#,
                f.x(c.x),
                f.y(c.ylo),
                f.y(c.yhi)
            );
        }
        let _ = writeln!(o, "</g>");
    }
    let _ = writeln!(o, r#"<g id="points" fill="crimson">"#);
    for p in &inst.points {
        let _ = writeln!(
            o,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4"><title>{}</title></circle>"#,
            f.x(p.pos.x),
            f.y(p.pos.y),
            esc(&p.id)
        );
    }
    let _ = writeln!(o, "</g>");
    if let Some(s) = sol {
        let _ = writeln!(o, r#"<g id="solution" stroke="black" stroke-width="1.5">"#);
        for p in &s.aux {
            let (x, y) = (f.x(p.x), f.y(p.y));
            let _ = writeln!(
                o,
                r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}"/>"#,
                x - 3.0,
                y - 3.0,
                x + 3.0,
                y + 3.0,
                x - 3.0,
                y + 3.0,
                x + 3.0,
                y - 3.0
            );
        }
        let _ = writeln!(o, "</g>");
    }
    o.push_str("</svg>\n");
    o
}
