//! Deterministic SVG drawings of planar diagrams, broken lines and chambers.

use std::fmt::Write as _;

use num_traits::{One, ToPrimitive, Zero};

use crate::broken_lines::BrokenLine;
use crate::error::{Error, Result};
use crate::lattice::{PerturbedPoint, RationalVec};
use crate::scattering::{ScatteringDiagram, SupportKind, Wall};

const SIZE: f64 = 480.0;
const WALL_COLOR: &str = "#1f5fbf";
const LINE_COLORS: [&str; 6] = ["#d62728", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Viewport {
    pub fn square(half: f64) -> Self {
        Viewport { xmin: -half, xmax: half, ymin: -half, ymax: half }
    }

    fn to_screen(self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.xmin) / (self.xmax - self.xmin) * SIZE, (self.ymax - y) / (self.ymax - self.ymin) * SIZE)
    }

    fn corners(&self) -> Vec<(f64, f64)> {
        vec![(self.xmin, self.ymin), (self.xmax, self.ymin), (self.xmax, self.ymax), (self.xmin, self.ymax)]
    }

    fn diameter(&self) -> f64 {
        (self.xmax - self.xmin).hypot(self.ymax - self.ymin)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RenderOptions {
    /// Shade the cell containing this point of the arrangement of lines through the walls.
    pub shade: Option<PerturbedPoint>,
    pub labels: bool,
}

fn f(x: &num_rational::BigRational) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

fn point2(v: &RationalVec) -> (f64, f64) {
    (f(&v[0]), f(&v[1]))
}

/// Parameter interval of `a + t·u` inside the viewport, intersected with `[t0, ∞)`.
fn clip(vp: &Viewport, a: (f64, f64), u: (f64, f64), t0: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (t0, f64::INFINITY);
    for (p, d, min, max) in [(a.0, u.0, vp.xmin, vp.xmax), (a.1, u.1, vp.ymin, vp.ymax)] {
        if d == 0.0 {
            if p < min || p > max {
                return None;
            }
            continue;
        }
        let (t1, t2) = ((min - p) / d, (max - p) / d);
        lo = lo.max(t1.min(t2));
        hi = hi.min(t1.max(t2));
    }
    (lo < hi).then_some((lo, hi))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn wall_label(w: &Wall) -> String {
    let mut parts = vec!["1".to_string()];
    let base = &w.function.base;
    for (j, c) in w.function.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = base.scale(j as u32 + 1);
        let coeff = if c.is_one() { String::new() } else { c.to_string() };
        parts.push(format!("{coeff}x^{}y^{}", crate::lattice::fmt_vec(&e.m), crate::lattice::fmt_vec(&e.q)));
        if parts.len() > 3 {
            parts.push("…".into());
            break;
        }
    }
    parts.join("+")
}

fn fmt_pt(p: (f64, f64)) -> String {
    format!("{:.2},{:.2}", p.0, p.1)
}

/// Sutherland–Hodgman clip of a convex polygon to `{x : n·x ≥ c}`.
fn clip_half_plane(poly: &[(f64, f64)], n: (f64, f64), c: f64) -> Vec<(f64, f64)> {
    let inside = |p: (f64, f64)| n.0 * p.0 + n.1 * p.1 >= c;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fa, fb) = (n.0 * a.0 + n.1 * a.1 - c, n.0 * b.0 + n.1 * b.1 - c);
        if inside(a) {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let t = fa / (fa - fb);
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    out
}

fn chamber_polygon(d: &ScatteringDiagram, vp: &Viewport, p: &PerturbedPoint) -> Result<Vec<(f64, f64)>> {
    let mut poly = vp.corners();
    for w in &d.walls {
        let s = w.side(p)?.sign() as f64;
        let n = (s * w.normal[0].to_f64().unwrap_or(0.0), s * w.normal[1].to_f64().unwrap_or(0.0));
        let b = point2(&w.support.base);
        poly = clip_half_plane(&poly, n, n.0 * b.0 + n.1 * b.1);
        if poly.is_empty() {
            break;
        }
    }
    Ok(poly)
}

/// Polyline of a broken line from outside the viewport to its endpoint.
fn polyline(l: &BrokenLine, vp: &Viewport) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = l.events.iter().map(|e| point2(&e.point.base)).collect();
    pts.push(point2(&l.endpoint.base));
    let m = (l.initial.m[0].to_f64().unwrap_or(0.0), l.initial.m[1].to_f64().unwrap_or(0.0));
    let norm = m.0.hypot(m.1);
    if norm > 0.0 {
        let t = 2.0 * vp.diameter() / norm;
        let first = pts[0];
        pts.insert(0, (first.0 + t * m.0, first.1 + t * m.1));
    }
    pts
}

/// SVG of a planar diagram with optional broken lines and a shaded chamber.
pub fn render_svg(d: &ScatteringDiagram, lines: &[BrokenLine], vp: &Viewport, opts: &RenderOptions) -> Result<String> {
    if !d.walls.is_empty() && d.walls[0].normal.len() != 2 {
        return Err(Error::Unsupported("rendering needs a planar diagram".into()));
    }
    if !(vp.xmin < vp.xmax && vp.ymin < vp.ymax) {
        return Err(Error::Domain("empty viewport".into()));
    }
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    if let Some(p) = &opts.shade {
        let poly = chamber_polygon(d, vp, p)?;
        if poly.len() >= 3 {
            let pts: Vec<String> = poly.iter().map(|&q| fmt_pt(vp.to_screen(q))).collect();
            let _ = writeln!(s, r##"<polygon class="chamber" points="{}" fill="#2ca02c" fill-opacity="0.3"/>"##, pts.join(" "));
        }
    }
    for (a, b) in [((vp.xmin, 0.0), (vp.xmax, 0.0)), ((0.0, vp.ymin), (0.0, vp.ymax))] {
        let (a, b) = (vp.to_screen(a), vp.to_screen(b));
        let _ = writeln!(
            s,
            r##"<line class="axis" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbbbbb" stroke-width="1"/>"##,
            a.0, a.1, b.0, b.1
        );
    }
    for w in &d.walls {
        let a = point2(&w.support.base);
        let u = (w.support.direction[0].to_f64().unwrap_or(0.0), w.support.direction[1].to_f64().unwrap_or(0.0));
        let t0 = if w.support.kind == SupportKind::Ray { 0.0 } else { f64::NEG_INFINITY };
        let Some((lo, hi)) = clip(vp, a, u, t0) else { continue };
        let (p, q) = (vp.to_screen((a.0 + lo * u.0, a.1 + lo * u.1)), vp.to_screen((a.0 + hi * u.0, a.1 + hi * u.1)));
        let _ = writeln!(
            s,
            r#"<line class="wall {}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{WALL_COLOR}" stroke-width="1.5"/>"#,
            w.support.kind.as_str(),
            p.0,
            p.1,
            q.0,
            q.1
        );
        if opts.labels {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" fill="{WALL_COLOR}">{}</text>"#,
                q.0.clamp(4.0, SIZE - 120.0),
                q.1.clamp(12.0, SIZE - 4.0),
                escape(&wall_label(w))
            );
        }
    }
    for (i, l) in lines.iter().enumerate() {
        let pts: Vec<String> = polyline(l, vp).into_iter().map(|q| fmt_pt(vp.to_screen(q))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="broken-line" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            pts.join(" "),
            LINE_COLORS[i % LINE_COLORS.len()]
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
