//! Hand-written SVG output.

use std::fmt::Write;

use paraclose::parametric::{ParametricProfile, Rational};
use paraclose::{ConvexPolygon, Point};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Maps data coordinates into the drawing box, y pointing up.
struct Frame {
    min: (f64, f64),
    scale: (f64, f64),
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let range = |it: &mut dyn Iterator<Item = f64>| it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let (x0, x1) = range(&mut xs.clone());
        let (y0, y1) = range(&mut ys.clone());
        let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
        let inner = SIZE - 2.0 * MARGIN;
        Frame { min: (x0, y0), scale: (inner / span(x0, x1), inner / span(y0, y1)) }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + (x - self.min.0) * self.scale.0, SIZE - MARGIN - (y - self.min.1) * self.scale.1)
    }
}

fn header(out: &mut String) {
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn polyline(f: &Frame, pts: &[(f64, f64)]) -> String {
    pts.iter()
        .map(|&(x, y)| {
            let (u, v) = f.map(x, y);
            format!("{u:.2},{v:.2}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Hull outline, one marker per vertex, optional lower-set point cloud, and
/// the upper hull dashed.
pub fn polygon_svg(poly: &ConvexPolygon, cloud: &[Point]) -> String {
    let all: Vec<Point> = poly.vertices().iter().chain(cloud).copied().collect();
    let f = Frame::new(all.iter().map(|p| p.x as f64), all.iter().map(|p| p.y as f64));
    let fp = |p: &Point| (p.x as f64, p.y as f64);
    let mut out = String::new();
    header(&mut out);
    let hull: Vec<(f64, f64)> = poly.vertices().iter().map(fp).collect();
    let _ = writeln!(out, r##"<polygon class="hull" points="{}" fill="#dde8f5" stroke="#1f4e8c" stroke-width="1.5"/>"##, polyline(&f, &hull));
    let upper: Vec<(f64, f64)> = poly.upper_chain().iter().map(fp).collect();
    let _ = writeln!(
        out,
        r##"<polyline class="upper" points="{}" fill="none" stroke="#c0392b" stroke-width="2" stroke-dasharray="6 4"/>"##,
        polyline(&f, &upper)
    );
    let mut last = None;
    for p in cloud {
        if last == Some(*p) {
            continue;
        }
        last = Some(*p);
        let (u, v) = f.map(p.x as f64, p.y as f64);
        let _ = writeln!(out, r##"<circle class="point" cx="{u:.2}" cy="{v:.2}" r="2.5" fill="#555"/>"##);
    }
    for p in poly.vertices() {
        let (u, v) = f.map(p.x as f64, p.y as f64);
        let _ = writeln!(out, r##"<circle class="vertex" cx="{u:.2}" cy="{v:.2}" r="4" fill="#1f4e8c"><title>({}, {})</title></circle>"##, p.x, p.y);
    }
    out.push_str("</svg>\n");
    out
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Upper envelope `max a·λ + b` over a window around the breakpoints.
pub fn profile_svg(prof: &ParametricProfile) -> String {
    let bps: Vec<f64> = prof.breakpoints.iter().map(|&b| to_f64(b)).collect();
    let (lo, hi) = match (bps.first(), bps.last()) {
        (Some(&a), Some(&b)) => {
            let pad = ((b - a) * 0.25).max(1.0);
            (a - pad, b + pad)
        }
        _ => (-1.0, 1.0),
    };
    let value = |l: f64| {
        let i = bps.partition_point(|&b| b < l);
        let v = prof.pieces[i].vertex;
        v.x as f64 * l + v.y as f64
    };
    let mut xs = vec![lo];
    xs.extend(&bps);
    xs.push(hi);
    let pts: Vec<(f64, f64)> = xs.iter().map(|&l| (l, value(l))).collect();
    let f = Frame::new(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1));
    let mut out = String::new();
    header(&mut out);
    let _ = writeln!(out, r##"<polyline class="envelope" points="{}" fill="none" stroke="#1f4e8c" stroke-width="2"/>"##, polyline(&f, &pts));
    for &(l, v) in &pts[1..pts.len() - 1] {
        let (u, w) = f.map(l, v);
        let _ = writeln!(out, r##"<circle class="breakpoint" cx="{u:.2}" cy="{w:.2}" r="4" fill="#c0392b"><title>λ = {l}</title></circle>"##);
    }
    out.push_str("</svg>\n");
    out
}
