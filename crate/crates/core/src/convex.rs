//! Planar convex hulls and their Euclidean measures.
//!
//! The mean width is `W(K) = (1/2π) ∫_{S¹} H¹(P_u K) du`, evaluated with the
//! periodic trapezoidal rule on the projection width `h(u) + h(−u)`, where
//! `h` is the support function over the hull vertices. For a polygon the
//! rule has error at most `perimeter·h²/(8π)` with step `h = 2π/n`, and it
//! is monotone under inclusion sample by sample.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::{cross, Error, Result, Vec2};

/// Relative tolerance below which three hull candidates count as collinear.
pub const COLLINEAR_TOL: f64 = 1e-12;
/// Smallest accepted quadrature size for [`mean_width`].
pub const MIN_QUADRATURE: usize = 360;
/// Quadrature size used by the higher-level checks.
pub const DEFAULT_QUADRATURE: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HullKind {
    Point,
    Segment,
    Polygon,
}

/// Convex hull with counterclockwise vertices and no collinear triples.
///
/// `Point` hulls hold one vertex, `Segment` hulls their two endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    kind: HullKind,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn kind(&self) -> HullKind {
        self.kind
    }

    pub fn is_degenerate(&self) -> bool {
        self.kind != HullKind::Polygon
    }

    /// Support function `h(u) = max ⟨x, u⟩` over the vertices.
    pub fn support(&self, u: Vec2) -> f64 {
        self.vertices.iter().map(|v| v.dot(&u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Projection length `H¹(P_u K) = h(u) + h(−u)`.
    pub fn projection_width(&self, u: Vec2) -> f64 {
        self.support(u) + self.support(-u)
    }
}

fn turn(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    cross(a - o, b - o)
}

fn is_left_turn(o: Vec2, a: Vec2, b: Vec2) -> bool {
    let c = turn(o, a, b);
    c > COLLINEAR_TOL * (a - o).norm() * (b - o).norm()
}

/// Andrew's monotone chain. Points are sorted lexicographically so the
/// output is deterministic; the first vertex is the lexicographic minimum.
pub fn convex_hull(points: &[Vec2]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::EmptyInput("convex_hull"));
    }
    if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(Error::InvalidArgument("convex_hull: non-finite point".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();

    if pts.len() == 1 {
        return Ok(ConvexPolygon { vertices: pts, kind: HullKind::Point });
    }

    let mut hull: Vec<Vec2> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && !is_left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && !is_left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    if hull.len() <= 2 {
        // all points (nearly) collinear: keep the extreme pair
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        return Ok(ConvexPolygon {
            vertices: vec![first, last],
            kind: HullKind::Segment,
        });
    }
    Ok(ConvexPolygon { vertices: hull, kind: HullKind::Polygon })
}

/// Euclidean diameter (rotating calipers over antipodal vertex pairs).
pub fn diameter(polygon: &ConvexPolygon) -> f64 {
    let v = &polygon.vertices;
    match polygon.kind {
        HullKind::Point => 0.0,
        HullKind::Segment => (v[1] - v[0]).norm(),
        HullKind::Polygon => {
            let n = v.len();
            let mut best = 0.0f64;
            let mut j = 1;
            for i in 0..n {
                let e = v[(i + 1) % n] - v[i];
                // advance j while the next vertex is farther from edge i
                while cross(e, v[(j + 1) % n] - v[i]) > cross(e, v[j] - v[i]) {
                    j = (j + 1) % n;
                }
                best = best.max((v[j] - v[i]).norm()).max((v[j] - v[(i + 1) % n]).norm());
            }
            best
        }
    }
}

/// `H¹(∂K)`; a segment counts both sides.
pub fn perimeter(polygon: &ConvexPolygon) -> f64 {
    let v = &polygon.vertices;
    match polygon.kind {
        HullKind::Point => 0.0,
        HullKind::Segment => 2.0 * (v[1] - v[0]).norm(),
        HullKind::Polygon => (0..v.len()).map(|i| (v[(i + 1) % v.len()] - v[i]).norm()).sum(),
    }
}

/// Mean width by trapezoidal quadrature over `quadrature_n` equally spaced
/// directions; degenerate hulls use the exact values `0` and `2L/π`.
pub fn mean_width(polygon: &ConvexPolygon, quadrature_n: usize) -> Result<f64> {
    if quadrature_n < MIN_QUADRATURE {
        return Err(Error::InvalidArgument(format!(
            "mean_width quadrature {quadrature_n} is below {MIN_QUADRATURE}"
        )));
    }
    let v = &polygon.vertices;
    Ok(match polygon.kind {
        HullKind::Point => 0.0,
        HullKind::Segment => 2.0 * (v[1] - v[0]).norm() / PI,
        HullKind::Polygon => width_samples(v, quadrature_n).sum::<f64>() / quadrature_n as f64,
    })
}

/// Projection widths at the angles `2πk/n`, `k = 0..n`.
///
/// The maximising vertex of `⟨·, u⟩` turns counterclockwise with `u`, so
/// the two support pointers (for `u` and `−u`) sweep the polygon once.
fn width_samples(v: &[Vec2], n: usize) -> impl Iterator<Item = f64> + '_ {
    let m = v.len();
    let dir = move |k: usize| {
        let a = TAU * k as f64 / n as f64;
        Vec2::new(a.cos(), a.sin())
    };
    let argmax = |u: Vec2| {
        (0..m)
            .max_by(|&i, &j| v[i].dot(&u).total_cmp(&v[j].dot(&u)))
            .expect("nonempty polygon")
    };
    let u0 = dir(0);
    let mut hi = argmax(u0);
    let mut lo = argmax(-u0);
    (0..n).map(move |k| {
        let u = dir(k);
        while v[(hi + 1) % m].dot(&u) > v[hi].dot(&u) {
            hi = (hi + 1) % m;
        }
        while v[(lo + 1) % m].dot(&u) < v[lo].dot(&u) {
            lo = (lo + 1) % m;
        }
        v[hi].dot(&u) - v[lo].dot(&u)
    })
}
