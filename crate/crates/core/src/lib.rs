//! Geometry of planar normed spaces with a C² strictly convex unit ball.
//!
//! The crate is organised bottom-up:
//!
//! - [`norm`]: norm families, sphere parametrisation, outer normals, dual
//!   lines `L_x` and the normal/radius angle `α₀`.
//! - [`bisector`]: the curve bisector `M(a,b)` traced through the chord
//!   construction, its asymptote, the oblique projection `Q_v` and the strip
//!   constant `κ`.
//! - [`convex`]: convex hulls with diameter, perimeter and mean width.
//! - [`curves`]: discrete self-contracted curves (validation, generators,
//!   length and the triple-cosine bound).
//! - [`certificate`]: the constant chain `(α₀, κ) → c₀` and the per-pair
//!   separating-vector and mean-width decrement checks behind the length
//!   bound `ℓ(γ) ≤ C·diam K(γ)`.
//!
//! Lengths, diameters and widths are Euclidean; self-contractedness is
//! always measured in the chosen norm.

pub mod bisector;
pub mod certificate;
pub mod convex;
pub mod curves;
pub mod error;
pub mod norm;
pub mod solve;

pub use error::{Error, Result};
/// Plane vector / point.
pub type Vec2 = nalgebra::Vector2<f64>;
/// 2×2 real matrix.
pub type Mat2 = nalgebra::Matrix2<f64>;

/// Counterclockwise rotation by π/2.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// z-component of the planar cross product.
#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}
