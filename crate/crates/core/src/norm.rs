//! C² strictly convex norms on the plane.
//!
//! Three families are supported, all written as spec strings:
//!
//! | string                    | norm                                   |
//! |---------------------------|----------------------------------------|
//! | `euclid`                  | `|x|`                                  |
//! | `lp:P`                    | `(|x₁|^P + |x₂|^P)^{1/P}`, `P ≥ 2`     |
//! | `alp:P:a11,a12,a21,a22`   | `‖A·x‖_P` with `A` invertible, `P ≥ 2` |
//!
//! Numbers use Rust's shortest round-trip float syntax, so
//! `spec.to_string().parse()` reproduces `spec` exactly.
//!
//! Exponents below 2 are rejected: the ℓ_p ball then has unbounded
//! curvature at the axes and the norm is not C².

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::solve::{bisect, golden_section_min};
use crate::{cross, perp, Error, Mat2, Result, Vec2};

/// Default number of sphere samples for [`NormModel::alpha0`].
pub const ALPHA0_DEFAULT_RESOLUTION: usize = 4096;
/// Smallest accepted resolution for [`NormModel::alpha0`].
pub const ALPHA0_MIN_RESOLUTION: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    Euclid,
    Lp { p: f64 },
    AnisotropicLp { p: f64, matrix: Mat2 },
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Euclid => f.write_str("euclid"),
            NormSpec::Lp { p } => write!(f, "lp:{p}"),
            NormSpec::AnisotropicLp { p, matrix: m } => write!(
                f,
                "alp:{p}:{},{},{},{}",
                m[(0, 0)],
                m[(0, 1)],
                m[(1, 0)],
                m[(1, 1)]
            ),
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn spec_error(spec: &str, reason: impl Into<String>) -> Error {
    Error::InvalidNormSpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn parse_exponent(spec: &str, raw: &str) -> Result<f64> {
    let p: f64 = raw
        .trim()
        .parse()
        .map_err(|_| spec_error(spec, format!("cannot parse exponent `{raw}`")))?;
    validate_exponent(spec, p)
}

fn validate_exponent(spec: &str, p: f64) -> Result<f64> {
    if !p.is_finite() {
        return Err(spec_error(spec, "p must be finite"));
    }
    if p < 2.0 {
        return Err(spec_error(spec, "p must be ≥ 2"));
    }
    Ok(p)
}

impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let mut parts = trimmed.split(':');
        match parts.next() {
            Some("euclid") if parts.next().is_none() => Ok(NormSpec::Euclid),
            Some("lp") => {
                let p = parts
                    .next()
                    .ok_or_else(|| spec_error(s, "missing exponent"))
                    .and_then(|raw| parse_exponent(s, raw))?;
                if parts.next().is_some() {
                    return Err(spec_error(s, "trailing fields"));
                }
                Ok(NormSpec::Lp { p })
            }
            Some("alp") => {
                let p = parts
                    .next()
                    .ok_or_else(|| spec_error(s, "missing exponent"))
                    .and_then(|raw| parse_exponent(s, raw))?;
                let raw = parts.next().ok_or_else(|| spec_error(s, "missing matrix"))?;
                if parts.next().is_some() {
                    return Err(spec_error(s, "trailing fields"));
                }
                let entries = raw
                    .split(',')
                    .map(|e| e.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| spec_error(s, format!("cannot parse matrix `{raw}`")))?;
                if entries.len() != 4 || entries.iter().any(|e| !e.is_finite()) {
                    return Err(spec_error(s, "matrix needs four finite entries a11,a12,a21,a22"));
                }
                let matrix = Mat2::new(entries[0], entries[1], entries[2], entries[3]);
                check_invertible(s, &matrix)?;
                Ok(NormSpec::AnisotropicLp { p, matrix })
            }
            _ => Err(spec_error(s, "expected `euclid`, `lp:P` or `alp:P:a11,a12,a21,a22`")),
        }
    }
}

fn check_invertible(spec: &str, m: &Mat2) -> Result<()> {
    let scale = m.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    if scale == 0.0 || m.determinant().abs() <= 1e-12 * scale * scale {
        return Err(spec_error(spec, "matrix must be invertible"));
    }
    Ok(())
}

/// Result of [`NormModel::dual_direction`].
///
/// `y` is the unit-sphere point whose tangent is directed by `x`, chosen on
/// the side `⟨y, x^⊥⟩ > 0`; the other tangency point is `-y`. The dual line
/// `L_x` is `ℝ·y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualDirection {
    pub x: Vec2,
    pub y: Vec2,
    pub line_direction: Vec2,
}

#[derive(Debug, Clone, Copy)]
enum Family {
    Euclid,
    Lp { p: f64, p_int: Option<i32> },
    AnisotropicLp { p: f64, p_int: Option<i32>, matrix: Mat2 },
}

/// Evaluation interface of a validated [`NormSpec`].
#[derive(Debug, Clone)]
pub struct NormModel {
    spec: NormSpec,
    family: Family,
}

fn integer_exponent(p: f64) -> Option<i32> {
    (p.fract() == 0.0 && p <= 64.0).then_some(p as i32)
}

#[inline]
fn pow_abs(r: f64, p: f64, p_int: Option<i32>) -> f64 {
    match p_int {
        Some(k) => r.powi(k),
        None => r.powf(p),
    }
}

fn lp_value(p: f64, p_int: Option<i32>, x: Vec2) -> f64 {
    let (ax, ay) = (x.x.abs(), x.y.abs());
    let m = ax.max(ay);
    if m == 0.0 {
        return 0.0;
    }
    let s = pow_abs(ax / m, p, p_int) + pow_abs(ay / m, p, p_int);
    m * s.powf(1.0 / p)
}

fn lp_gradient(p: f64, p_int: Option<i32>, x: Vec2) -> Vec2 {
    let r = lp_value(p, p_int, x);
    if r == 0.0 {
        return Vec2::zeros();
    }
    let q = p_int.map(|k| k - 1);
    let comp = |c: f64| c.signum() * pow_abs(c.abs() / r, p - 1.0, q);
    Vec2::new(comp(x.x), comp(x.y))
}

impl NormModel {
    pub fn new(spec: NormSpec) -> Result<Self> {
        let family = match &spec {
            NormSpec::Euclid => Family::Euclid,
            NormSpec::Lp { p } => {
                validate_exponent(&spec.to_string(), *p)?;
                Family::Lp { p: *p, p_int: integer_exponent(*p) }
            }
            NormSpec::AnisotropicLp { p, matrix } => {
                let text = spec.to_string();
                validate_exponent(&text, *p)?;
                check_invertible(&text, matrix)?;
                Family::AnisotropicLp { p: *p, p_int: integer_exponent(*p), matrix: *matrix }
            }
        };
        Ok(Self { spec, family })
    }

    pub fn euclid() -> Self {
        Self::new(NormSpec::Euclid).expect("euclidean norm is valid")
    }

    pub fn lp(p: f64) -> Result<Self> {
        Self::new(NormSpec::Lp { p })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.parse()?)
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    pub fn is_euclid(&self) -> bool {
        matches!(self.family, Family::Euclid)
    }

    /// `‖x‖`.
    pub fn value(&self, x: Vec2) -> f64 {
        match self.family {
            Family::Euclid => x.x.hypot(x.y),
            Family::Lp { p, p_int } => lp_value(p, p_int, x),
            Family::AnisotropicLp { p, p_int, matrix } => lp_value(p, p_int, matrix * x),
        }
    }

    /// `∇‖·‖` at `x`; the zero vector is returned for `x = 0`, where the
    /// norm is not differentiable.
    pub fn gradient(&self, x: Vec2) -> Vec2 {
        match self.family {
            Family::Euclid => {
                let r = x.x.hypot(x.y);
                if r == 0.0 {
                    Vec2::zeros()
                } else {
                    x / r
                }
            }
            Family::Lp { p, p_int } => lp_gradient(p, p_int, x),
            Family::AnisotropicLp { p, p_int, matrix } => matrix.transpose() * lp_gradient(p, p_int, matrix * x),
        }
    }

    /// Boundary point of the unit ball in direction `(cos θ, sin θ)`.
    pub fn sphere_point(&self, theta: f64) -> Vec2 {
        let u = Vec2::new(theta.cos(), theta.sin());
        u / self.value(u)
    }

    /// Outer Euclidean unit normal to the sphere through `x`.
    pub fn outer_normal(&self, x: Vec2) -> Result<Vec2> {
        if x == Vec2::zeros() {
            return Err(Error::ZeroVector { what: "outer_normal" });
        }
        Ok(self.gradient(x).normalize())
    }

    /// The sphere point whose tangent line is directed by `x`.
    ///
    /// Solves `⟨∇‖y‖, x⟩ = 0` by bisection in the polar angle of `y` over the
    /// half-turn `(arg x, arg x + π)`: the function is positive at `arg x`
    /// (Euler's identity `⟨∇‖y‖, y⟩ = ‖y‖`) and negative at `arg x + π`.
    pub fn dual_direction(&self, x: Vec2) -> Result<DualDirection> {
        if x == Vec2::zeros() {
            return Err(Error::ZeroVector { what: "dual_direction" });
        }
        let phi = x.y.atan2(x.x);
        let xu = x.normalize();
        let f = |theta: f64| self.gradient(self.sphere_point(theta)).dot(&xu);
        let br = bisect(f, phi, phi + PI, 1e-15, "dual direction")?;
        let y = self.sphere_point(br.midpoint());
        if cross(x, y) <= 0.0 {
            return Err(Error::RootNotFound {
                context: format!("dual direction of {x:?} landed on the wrong half-turn"),
            });
        }
        Ok(DualDirection {
            x,
            y,
            line_direction: y.normalize(),
        })
    }

    /// Angle between the radius and the tangent at `sphere_point(θ)`,
    /// i.e. `arcsin ⟨ν_x, x/|x|⟩`, in `[0, π/2]`.
    pub fn normal_radial_angle(&self, theta: f64) -> f64 {
        let u = Vec2::new(theta.cos(), theta.sin());
        let nu = self.gradient(u);
        // atan2 keeps full precision near π/2, where arcsin does not.
        nu.dot(&u).atan2(cross(nu, u).abs())
    }

    /// The angle constant `α₀ = min_x arcsin⟨ν_x, x/|x|⟩` over the sphere.
    ///
    /// A uniform grid of `resolution` angles locates the minimum, which is
    /// then polished by golden-section search between the neighbouring grid
    /// nodes.
    pub fn alpha0(&self, resolution: usize) -> Result<f64> {
        if resolution < ALPHA0_MIN_RESOLUTION {
            return Err(Error::InvalidArgument(format!(
                "alpha0 resolution {resolution} is below {ALPHA0_MIN_RESOLUTION}"
            )));
        }
        let h = TAU / resolution as f64;
        let (k_min, grid_min) = (0..resolution)
            .map(|k| (k, self.normal_radial_angle(k as f64 * h)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("resolution > 0");
        if grid_min <= 0.0 {
            return Err(Error::InvalidAlpha0 { min_alignment: grid_min.sin() });
        }
        let center = k_min as f64 * h;
        let (_, refined) = golden_section_min(|t| self.normal_radial_angle(t), center - h, center + h, 1e-13);
        Ok(refined.min(grid_min))
    }
}

impl FromStr for NormModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NormModel::parse(s)
    }
}

/// Unit Euclidean normal to a direction, rotated counterclockwise.
pub fn unit_normal(v: Vec2) -> Vec2 {
    perp(v).normalize()
}
