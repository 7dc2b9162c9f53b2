//! Curve bisectors `M(a,b) = {z : ‖a−z‖ = ‖b−z‖}`.
//!
//! The bisector is traced through the chord construction: for a norm-unit
//! direction `v` and an offset `t`, the line `H_t = t·n + ℝv` (with `n` the
//! Euclidean unit normal to `v`) cuts the unit sphere in two points
//! `a_t, b_t`. The origin is equidistant from both, so rescaling the chord
//! to the segment `[a, b]` yields the bisector point
//!
//! ```text
//! z(t) = a − ‖b−a‖ · a_t / ‖b_t − a_t‖,      t ∈ (−t₀, t₀),
//! ```
//!
//! where `t₀` is the height at which `H_t` becomes tangent to the ball.
//! Approaching `±t₀` sends `z(t)` to infinity along the asymptote
//! `L(a,b) = (a+b)/2 + L_{b−a}`.
//!
//! Chords are parametrised as `c_t + s·v` with `c_t = (t/t₀)·y` on the dual
//! line, so the oblique coordinate `Q_v(m_t)` of the chord midpoint is just
//! `(s₋ + s₊)/2` and the chord norm is `s₊ − s₋`, both free of cancellation
//! near the tangency heights.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::norm::{unit_normal, DualDirection, NormModel};
use crate::solve::{bisect_newton, bisect_with_values, golden_section_min, Bracket};
use crate::{cross, Error, Result, Vec2};

/// Tolerance of the bracketing phase of the chord root finder.
const CHORD_XTOL: f64 = 1e-12;
const CHORD_NEWTON_STEPS: usize = 3;
/// Largest exponent of the graded grid `t₀·(1 − 2^{−k})`. Beyond it the chord
/// roots lose more than `ε/2^{−k}` relative accuracy.
const GRADED_MAX_EXPONENT: f64 = 20.0;
/// Relative bisector residual accepted for traced samples.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Minimum grid size for [`kappa_estimate`].
pub const KAPPA_MIN_GRID: usize = 256;
/// Smallest gap `1 − t/t₀` explored by [`kappa_estimate`].
const KAPPA_MIN_GAP: f64 = 1e-7;

/// Oriented segment `[a, b]` with its norm length and dual line.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
    /// `b − a`.
    pub v: Vec2,
    pub norm_length: f64,
    /// Tangency data of `(b − a)/‖b − a‖`; `L_{b−a} = ℝ·dual.y`.
    pub dual: DualDirection,
}

impl Segment {
    pub fn new(norm: &NormModel, a: Vec2, b: Vec2) -> Result<Self> {
        let v = b - a;
        if v == Vec2::zeros() {
            return Err(Error::DegenerateSegment);
        }
        let norm_length = norm.value(v);
        let dual = norm.dual_direction(v / norm_length)?;
        Ok(Self { a, b, v, norm_length, dual })
    }

    pub fn midpoint(&self) -> Vec2 {
        0.5 * (self.a + self.b)
    }

    /// Norm-unit direction `(b − a)/‖b − a‖`.
    pub fn unit(&self) -> Vec2 {
        self.v / self.norm_length
    }

    /// `Q_{(b−a)/‖b−a‖}(x)`: the `v` coefficient of `x` in the basis `(v, L_v)`.
    pub fn oblique(&self, x: Vec2) -> f64 {
        oblique_coefficient(self.unit(), self.dual.line_direction, x)
    }

    /// The asymptote `L(a,b)`.
    pub fn asymptote(&self) -> Line {
        Line {
            point: self.midpoint(),
            direction: self.dual.line_direction,
        }
    }
}

/// Affine line `point + ℝ·direction` (direction is Euclidean-unit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    pub point: Vec2,
    pub direction: Vec2,
}

impl Line {
    pub fn distance(&self, x: Vec2) -> f64 {
        cross(x - self.point, self.direction).abs()
    }
}

/// Intersection of `H_t` with the unit sphere.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChordSample {
    pub t: f64,
    pub a_t: Vec2,
    pub b_t: Vec2,
    /// `(a_t + b_t)/2`.
    pub m_t: Vec2,
    /// `‖b_t − a_t‖`.
    pub chord_norm: f64,
    /// `Q_v(m_t)`.
    pub oblique_offset: f64,
}

impl ChordSample {
    /// `|Q_v(m_t)| / ‖b_t − a_t‖`, the strip ratio of this chord.
    pub fn strip_ratio(&self) -> f64 {
        self.oblique_offset.abs() / self.chord_norm
    }
}

/// All chords parallel to one norm-unit direction `v`.
#[derive(Debug, Clone, Copy)]
pub struct ChordFamily<'a> {
    norm: &'a NormModel,
    v: Vec2,
    n: Vec2,
    dual: DualDirection,
    t0: f64,
}

impl<'a> ChordFamily<'a> {
    /// `v` is rescaled to norm one.
    pub fn new(norm: &'a NormModel, v: Vec2) -> Result<Self> {
        if v == Vec2::zeros() {
            return Err(Error::ZeroVector { what: "chord direction" });
        }
        let v = v / norm.value(v);
        let n = unit_normal(v);
        let dual = norm.dual_direction(v)?;
        // The dual point maximises ⟨z, n⟩ over the ball.
        let t0 = dual.y.dot(&n);
        Ok(Self { norm, v, n, dual, t0 })
    }

    pub fn direction(&self) -> Vec2 {
        self.v
    }

    /// Euclidean unit normal `n` along which `t` is measured.
    pub fn normal(&self) -> Vec2 {
        self.n
    }

    pub fn dual(&self) -> &DualDirection {
        &self.dual
    }

    /// Support extent of the ball along `n`.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn chord(&self, t: f64) -> Result<ChordSample> {
        if !(t.abs() < self.t0) {
            return Err(Error::ChordMissesBall { t, t0: self.t0 });
        }
        let c = (t / self.t0) * self.dual.y;
        let v = self.v;
        let f = |s: f64| self.norm.value(c + s * v) - 1.0;
        let df = |s: f64| self.norm.gradient(c + s * v).dot(&v);
        // ‖c + s·v‖ ≥ |s| − ‖c‖ > 0 for |s| ≥ 2, so [0, ±2] brackets each root.
        let s_plus = bisect_newton(f, df, 0.0, 2.0, CHORD_XTOL, CHORD_NEWTON_STEPS, "chord endpoint b_t")?;
        let s_minus = bisect_newton(f, df, -2.0, 0.0, CHORD_XTOL, CHORD_NEWTON_STEPS, "chord endpoint a_t")?;
        let q = 0.5 * (s_minus + s_plus);
        Ok(ChordSample {
            t,
            a_t: c + s_minus * v,
            b_t: c + s_plus * v,
            m_t: c + q * v,
            chord_norm: s_plus - s_minus,
            oblique_offset: q,
        })
    }
}

/// `H_t ∩ ∂B` for the norm-unit direction `v` (rescaled if needed).
pub fn chord_endpoints(norm: &NormModel, v: Vec2, t: f64) -> Result<ChordSample> {
    ChordFamily::new(norm, v)?.chord(t)
}

/// The bisector point `z(t)` of `segment`.
pub fn bisector_point(norm: &NormModel, segment: &Segment, t: f64) -> Result<Vec2> {
    let chord = ChordFamily::new(norm, segment.v)?.chord(t)?;
    Ok(point_from_chord(segment, &chord))
}

fn point_from_chord(segment: &Segment, chord: &ChordSample) -> Vec2 {
    segment.a - (segment.norm_length / chord.chord_norm) * chord.a_t
}

/// Offsets `±t₀·(1 − 2^{−k})` with `k` uniform in `[0, 20]`, ordered
/// increasingly; `n` points, symmetric about 0.
pub fn graded_t_grid(t0: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let s = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let k = GRADED_MAX_EXPONENT * s.abs();
            s.signum() * t0 * (1.0 - (-k).exp2())
        })
        .map(|t| if t == 0.0 { 0.0 } else { t })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BisectorSample {
    pub t: f64,
    pub z: Vec2,
    /// `|‖a−z‖ − ‖b−z‖|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BisectorTrace {
    pub segment: Segment,
    pub samples: Vec<BisectorSample>,
    pub asymptote: Line,
    /// Smallest κ with every sample inside `S_κ(a, b)`.
    pub kappa_used: f64,
}

pub fn trace_bisector(norm: &NormModel, segment: &Segment, n_samples: usize) -> Result<BisectorTrace> {
    if n_samples < 3 {
        return Err(Error::InvalidArgument(format!("trace needs at least 3 samples, got {n_samples}")));
    }
    let family = ChordFamily::new(norm, segment.v)?;
    let mut samples = Vec::with_capacity(n_samples);
    let mut kappa_used = 0.0f64;
    for t in graded_t_grid(family.t0(), n_samples) {
        let chord = family.chord(t)?;
        let z = point_from_chord(segment, &chord);
        let da = norm.value(segment.a - z);
        let residual = (da - norm.value(segment.b - z)).abs();
        if residual > RESIDUAL_TOL * da.max(1.0) {
            return Err(Error::BisectorResidual { t, residual });
        }
        kappa_used = kappa_used.max(chord.strip_ratio());
        samples.push(BisectorSample { t, z, residual });
    }
    Ok(BisectorTrace {
        segment: *segment,
        samples,
        asymptote: segment.asymptote(),
        kappa_used,
    })
}

fn oblique_coefficient(v_unit: Vec2, w: Vec2, x: Vec2) -> f64 {
    cross(x, w) / cross(v_unit, w)
}

/// `Q_v(x)`: the coefficient of `x` along `v/‖v‖` in the basis `(v/‖v‖, L_v)`.
pub fn oblique_projection(norm: &NormModel, v: Vec2, x: Vec2) -> Result<f64> {
    if v == Vec2::zeros() {
        return Err(Error::ZeroVector { what: "oblique_projection" });
    }
    let v_unit = v / norm.value(v);
    let w = norm.dual_direction(v_unit)?.line_direction;
    Ok(oblique_coefficient(v_unit, w, x))
}

/// Membership in `S_κ(a,b) = {x : |Q_v(x − (a+b)/2)| ≤ κ‖b−a‖}`.
pub fn strip_contains(segment: &Segment, kappa: f64, x: Vec2) -> bool {
    segment.oblique(x - segment.midpoint()).abs() <= kappa * segment.norm_length
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KappaEstimate {
    /// Refined supremum of `|Q_v(m_t)| / ‖b_t − a_t‖`.
    pub kappa: f64,
    /// Supremum over the grid alone.
    pub grid_kappa: f64,
    /// Polar angle of the maximising direction.
    pub theta: f64,
    /// Maximising relative offset `t/t₀`.
    pub offset: f64,
}

/// Strip ratio at direction angle `theta` (with `v = sphere_point(theta)`)
/// and relative offset `u = t/t₀ ∈ (−1, 1)`.
pub fn strip_ratio_at(norm: &NormModel, theta: f64, u: f64) -> Result<f64> {
    let family = ChordFamily::new(norm, norm.sphere_point(theta))?;
    Ok(family.chord(u * family.t0())?.strip_ratio())
}

/// Best offset for one direction: `(ratio, u)`.
///
/// Offsets are graded geometrically towards the tangency, `1 − u` running
/// from `1` down to `KAPPA_MIN_GAP`, and the best node is polished by
/// golden-section search in `log(1 − u)`.
fn best_offset(family: &ChordFamily, n: usize) -> Result<(f64, f64, f64)> {
    let u_of = |s: f64| 1.0 - KAPPA_MIN_GAP.powf(s);
    let ratio = |s: f64| family.chord(u_of(s) * family.t0()).map(|c| c.strip_ratio());
    let ds = 1.0 / (n - 1) as f64;
    let mut grid_best = (f64::NEG_INFINITY, 0usize);
    for j in 0..n {
        let r = ratio(j as f64 * ds)?;
        if r > grid_best.0 {
            grid_best = (r, j);
        }
    }
    let s0 = grid_best.1 as f64 * ds;
    let (s, neg) = golden_section_min(
        |s| ratio(s).map_or(f64::NAN, |r| -r),
        (s0 - ds).max(0.0),
        (s0 + ds).min(1.0),
        1e-9,
    );
    Ok(if -neg > grid_best.0 {
        (-neg, u_of(s), grid_best.0)
    } else {
        (grid_best.0, u_of(s0), grid_best.0)
    })
}

/// Estimate `κ = sup_{v, t} |Q_v(m_t)| / ‖b_t − a_t‖`.
///
/// Directions cover a half-turn and offsets the half-chord range `[0, t₀)`;
/// both halves are enough since `a_{−t} = −b_t`. For each direction the
/// offset is maximised on a grid graded towards the tangency. The
/// direction is then polished by golden-section search around the best
/// node.
///
/// Near a point of vanishing curvature (the axes of `ℓ_p`, `p > 2`) the
/// supremum is only approached as the direction tends to the flat point and
/// the chord to the tangency; the graded offsets follow that limit down to
/// `1 − u = 1e-7`; closer to the tangency the chord midpoint is dominated
/// by round-off (its error grows like `ε/(1 − u)`).
pub fn kappa_estimate(norm: &NormModel, direction_grid: usize, t_grid: usize) -> Result<KappaEstimate> {
    if direction_grid < KAPPA_MIN_GRID || t_grid < KAPPA_MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "kappa grids must have at least {KAPPA_MIN_GRID} nodes (got {direction_grid} × {t_grid})"
        )));
    }
    let dtheta = PI / direction_grid as f64;
    let profile = |theta: f64| -> Result<(f64, f64, f64)> {
        let family = ChordFamily::new(norm, norm.sphere_point(theta))?;
        best_offset(&family, t_grid)
    };

    let rows: Vec<(f64, f64, f64)> = (0..direction_grid)
        .into_par_iter()
        .map(|i| profile(i as f64 * dtheta))
        .collect::<Result<_>>()?;
    let grid_kappa = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let (i_best, &(h_best, u_best, _)) = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .expect("nonempty grid");
    let theta_best = i_best as f64 * dtheta;

    let (theta, neg) = golden_section_min(
        |th| profile(th).map_or(f64::NAN, |r| -r.0),
        theta_best - dtheta,
        theta_best + dtheta,
        1e-12,
    );
    let (kappa, theta, offset) = if -neg > h_best {
        (-neg, theta, profile(theta)?.1)
    } else {
        (h_best, theta_best, u_best)
    };
    if kappa >= 0.5 {
        return Err(Error::KappaTooLarge { kappa });
    }
    Ok(KappaEstimate {
        kappa,
        grid_kappa,
        theta: theta.rem_euclid(PI),
        offset,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoteDeviation {
    /// Norm distance `‖z_R − a‖`.
    pub radius: f64,
    /// Offset `t_R ∈ (−t₀, 0)` producing `z_R`.
    pub t: f64,
    pub point: Vec2,
    /// Euclidean distance from `z_R` to `L(a, b)`.
    pub deviation: f64,
}

/// Distance from the bisector point `z_R` (with `‖z_R − a‖ = R`) to the
/// asymptote, for each requested `R`.
///
/// `R < ‖b − a‖/2` is rejected: no bisector point is that close to `a`.
pub fn asymptote_deviation(norm: &NormModel, segment: &Segment, radii: &[f64]) -> Result<Vec<AsymptoteDeviation>> {
    let family = ChordFamily::new(norm, segment.v)?;
    let len = segment.norm_length;
    let w = segment.dual.line_direction;
    let slant = cross(family.direction(), w).abs();
    radii
        .iter()
        .map(|&radius| {
            let min = 0.5 * len;
            if !(radius >= min) || !radius.is_finite() {
                return Err(Error::RadiusTooSmall { radius, min });
            }
            let target = len / radius;
            let chord_at = |u: f64| family.chord(-u * family.t0()).map(|c| c.chord_norm - target);
            let br = Bracket {
                lo: 0.0,
                hi: 1.0,
                f_lo: chord_at(0.0)?,
                f_hi: -target,
            };
            let br = bisect_with_values(|u| chord_at(u).unwrap_or(f64::NAN), br, 0.0, "asymptote offset t_R")?;
            let u = br.lo;
            let chord = family.chord(-u * family.t0())?;
            let scale = len / chord.chord_norm;
            Ok(AsymptoteDeviation {
                radius,
                t: chord.t,
                point: point_from_chord(segment, &chord),
                deviation: scale * chord.oblique_offset.abs() * slant,
            })
        })
        .collect()
}
