//! Static SVG figures. Output depends only on the inputs, so repeated runs
//! produce identical files.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use normplane::bisector::BisectorTrace;
use normplane::convex::convex_hull;
use normplane::curves::TimedPolyline;
use normplane::norm::NormModel;
use normplane::Vec2;

const SPHERE_SAMPLES: usize = 256;
const PIXELS: f64 = 640.0;

fn num(x: f64) -> String {
    format!("{x:.6e}")
}

fn points(pts: impl IntoIterator<Item = Vec2>) -> String {
    pts.into_iter()
        .map(|p| format!("{},{}", num(p.x), num(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn sphere(norm: &NormModel, center: Vec2, radius: f64) -> Vec<Vec2> {
    (0..SPHERE_SAMPLES)
        .map(|k| center + radius * norm.sphere_point(TAU * k as f64 / SPHERE_SAMPLES as f64))
        .collect()
}

/// Square view `center ± half`, drawn with the y axis pointing up.
struct Figure {
    center: Vec2,
    half: f64,
    body: String,
}

impl Figure {
    fn new(center: Vec2, half: f64) -> Self {
        Self { center, half: half.max(1e-12), body: String::new() }
    }

    fn stroke(&self) -> f64 {
        self.half / 250.0
    }

    fn polygon(&mut self, pts: &[Vec2], class: &str) {
        writeln!(self.body, r#"  <polygon class="{class}" points="{}"/>"#, points(pts.iter().copied())).unwrap();
    }

    fn polyline(&mut self, pts: &[Vec2], class: &str) {
        writeln!(self.body, r#"  <polyline class="{class}" points="{}"/>"#, points(pts.iter().copied())).unwrap();
    }

    fn line(&mut self, a: Vec2, b: Vec2, class: &str) {
        writeln!(
            self.body,
            r#"  <line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(a.x),
            num(a.y),
            num(b.x),
            num(b.y)
        )
        .unwrap();
    }

    fn dot(&mut self, p: Vec2, class: &str) {
        writeln!(
            self.body,
            r#"  <circle class="{class}" cx="{}" cy="{}" r="{}"/>"#,
            num(p.x),
            num(p.y),
            num(3.0 * self.stroke())
        )
        .unwrap();
    }

    fn finish(self, title: &str) -> String {
        let (c, h, w) = (self.center, self.half, self.stroke());
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PIXELS}" height="{PIXELS}" viewBox="{} {} {} {}">"#,
            num(c.x - h),
            num(-c.y - h),
            num(2.0 * h),
            num(2.0 * h)
        )
        .unwrap();
        writeln!(s, "<title>{title}</title>").unwrap();
        writeln!(
            s,
            "<style>\n  * {{ stroke-width: {}; fill: none; }}\n  .ball {{ stroke: #555; }}\n  .strip {{ fill: #e8eef8; stroke: none; }}\n  .asymptote {{ stroke: #36c; stroke-dasharray: {} {}; }}\n  .bisector {{ stroke: #c33; }}\n  .segment {{ stroke: #000; }}\n  .hull {{ fill: #f4efe4; stroke: #b95; }}\n  .curve {{ stroke: #000; }}\n  .start {{ fill: #2a2; stroke: none; }}\n  .end {{ fill: #c33; stroke: none; }}\n  .point {{ fill: #000; stroke: none; }}\n</style>",
            num(w),
            num(6.0 * w),
            num(4.0 * w)
        )
        .unwrap();
        writeln!(s, r#"<g transform="scale(1,-1)">"#).unwrap();
        s.push_str(&self.body);
        s.push_str("</g>\n</svg>\n");
        s
    }
}

/// Segment, the norm ball through its endpoints, the traced bisector, the
/// asymptote and the κ-strip.
pub fn bisector_figure(norm: &NormModel, trace: &BisectorTrace, kappa: f64, title: &str) -> String {
    let seg = &trace.segment;
    let m = seg.midpoint();
    let len = seg.v.norm();
    let mut fig = Figure::new(m, 3.0 * len);
    let w = trace.asymptote.direction;
    let far = 20.0 * len;
    let shift = kappa * seg.v;
    fig.polygon(
        &[m + shift - far * w, m + shift + far * w, m - shift + far * w, m - shift - far * w],
        "strip",
    );
    fig.polygon(&sphere(norm, m, 0.5 * seg.norm_length), "ball");
    fig.line(m - far * w, m + far * w, "asymptote");
    fig.polyline(&trace.samples.iter().map(|s| s.z).collect::<Vec<_>>(), "bisector");
    fig.line(seg.a, seg.b, "segment");
    fig.dot(seg.a, "point");
    fig.dot(seg.b, "point");
    fig.finish(title)
}

/// Curve, its convex hull, and the ball around the last vertex through the
/// first one (it contains a self-contracted curve).
pub fn curve_figure(norm: &NormModel, curve: &TimedPolyline, title: &str) -> String {
    let v = curve.vertices();
    let (first, last) = (v[0], v[v.len() - 1]);
    let radius = norm.value(first - last);
    let ball = sphere(norm, last, radius);
    let (mut lo, mut hi) = (last, last);
    for p in v.iter().chain(&ball) {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let half = 0.55 * (hi - lo).max().max(1e-9);
    let mut fig = Figure::new(0.5 * (lo + hi), half);
    if let Ok(hull) = convex_hull(v) {
        fig.polygon(hull.vertices(), "hull");
    }
    if radius > 0.0 {
        fig.polygon(&ball, "ball");
    }
    fig.polyline(v, "curve");
    fig.dot(first, "start");
    fig.dot(last, "end");
    fig.finish(title)
}

/// The unit sphere of `norm`.
pub fn ball_figure(norm: &NormModel, title: &str) -> String {
    let mut fig = Figure::new(Vec2::zeros(), 1.5);
    fig.polygon(&sphere(norm, Vec2::zeros(), 1.0), "ball");
    fig.line(Vec2::new(-1.4, 0.0), Vec2::new(1.4, 0.0), "asymptote");
    fig.line(Vec2::new(0.0, -1.4), Vec2::new(0.0, 1.4), "asymptote");
    fig.finish(title)
}

#[cfg(test)]
mod tests {
    use super::*;
    use normplane::bisector::{trace_bisector, Segment};

    #[test]
    fn bisector_figure_has_all_layers() {
        let norm = NormModel::lp(4.0).unwrap();
        let seg = Segment::new(&norm, Vec2::zeros(), Vec2::new(1.0, 0.3)).unwrap();
        let tr = trace_bisector(&norm, &seg, 51).unwrap();
        let s = bisector_figure(&norm, &tr, 0.2, "lp:4");
        for class in ["strip", "ball", "asymptote", "bisector", "segment"] {
            assert!(s.contains(&format!("class=\"{class}\"")), "{class}");
        }
        assert_eq!(s, bisector_figure(&norm, &tr, 0.2, "lp:4"));
    }

    #[test]
    fn curve_figure_for_single_vertex() {
        let c = TimedPolyline::from_vertices(vec![Vec2::new(1.0, 1.0)]).unwrap();
        let s = curve_figure(&NormModel::euclid(), &c, "one");
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
    }
}
