//! Discrete self-contracted curves.
//!
//! A curve is an ordered vertex sequence `γ_0, …, γ_{n−1}`. It is
//! `‖·‖`-self-contracted when, for every `k`, the distances
//! `i ↦ ‖γ_i − γ_k‖` are non-increasing for `i ≤ k`. Continuity plays no
//! role, so vertex sequences are exact instances rather than
//! approximations.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::norm::NormModel;
use crate::{Error, Mat2, Result, Vec2};

/// Default tolerance for [`is_self_contracted`], relative to the norm
/// diameter of the vertex set.
pub const SC_DEFAULT_TOL: f64 = 1e-12;
/// Slack granted to the triple-cosine bound.
pub const COSINE_TOL: f64 = 1e-9;

/// Consecutive rejections after which the greedy generator halves its step.
pub const GREEDY_REJECTIONS_PER_LEVEL: usize = 200;
/// Halvings after which the greedy generator gives up. Acceptance near a
/// stuck vertex is governed by the angle of the feasible cone, not the step,
/// so further halvings only add vertices at vanishing scale.
pub const GREEDY_MAX_HALVINGS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimedPolyline {
    vertices: Vec<Vec2>,
    params: Vec<f64>,
}

impl TimedPolyline {
    pub fn new(vertices: Vec<Vec2>, params: Vec<f64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidCurve("curve needs at least one vertex".into()));
        }
        if vertices.len() != params.len() {
            return Err(Error::InvalidCurve(format!(
                "{} vertices but {} parameters",
                vertices.len(),
                params.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::InvalidCurve(format!("vertex {i} is not finite")));
        }
        if let Some(i) = params.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidCurve(format!(
                "parameters must increase strictly (t[{i}] = {}, t[{}] = {})",
                params[i],
                i + 1,
                params[i + 1]
            )));
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidCurve(format!("vertices {i} and {} coincide", i + 1)));
        }
        Ok(Self { vertices, params })
    }

    /// Parameters default to `0, 1, …, n−1`.
    pub fn from_vertices(vertices: Vec<Vec2>) -> Result<Self> {
        let params = (0..vertices.len()).map(|i| i as f64).collect();
        Self::new(vertices, params)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The curve from vertex `start` on.
    pub fn suffix(&self, start: usize) -> Result<Self> {
        if start >= self.len() {
            return Err(Error::InvalidArgument(format!("suffix start {start} out of range")));
        }
        Ok(Self {
            vertices: self.vertices[start..].to_vec(),
            params: self.params[start..].to_vec(),
        })
    }

    /// Image under `x ↦ s·x + shift`.
    pub fn affine(&self, s: f64, shift: Vec2) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&v| s * v + shift).collect(), self.params.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `‖γ_j − γ_k‖ − ‖γ_i − γ_k‖`.
    pub defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfContractedReport {
    pub is_sc: bool,
    /// Triple `i < j < k` with the largest defect; `None` below three vertices.
    pub worst_violation: Option<Violation>,
    pub checked_triples: u64,
    /// Largest `‖γ_i − γ_k‖`; the tolerance is relative to it.
    pub norm_diameter: f64,
}

fn triple_count(n: usize) -> u64 {
    let n = n as u64;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Checks `‖γ_j − γ_k‖ ≤ ‖γ_i − γ_k‖` for all `i < j < k` in `O(n²)`:
/// for each `k` a running minimum over `i < j` gives the worst defect at `j`.
///
/// The curve counts as self-contracted when the worst defect is at most
/// `tol` times the norm diameter of the vertex set.
pub fn is_self_contracted(curve: &TimedPolyline, norm: &NormModel, tol: f64) -> SelfContractedReport {
    let v = curve.vertices();
    let mut worst: Option<Violation> = None;
    let mut scale = 0.0f64;
    let mut dist = Vec::with_capacity(v.len());
    for k in 0..v.len() {
        dist.clear();
        dist.extend(v[..k].iter().map(|&p| norm.value(p - v[k])));
        let mut best_i = 0;
        for j in 0..k {
            scale = scale.max(dist[j]);
            if j == 0 {
                continue;
            }
            if dist[j - 1] < dist[best_i] {
                best_i = j - 1;
            }
            let defect = dist[j] - dist[best_i];
            if worst.is_none_or(|w| defect > w.defect) {
                worst = Some(Violation { i: best_i, j, k, defect });
            }
        }
    }
    let threshold = tol * scale.max(f64::MIN_POSITIVE);
    SelfContractedReport {
        is_sc: worst.is_none_or(|w| w.defect <= threshold),
        worst_violation: worst,
        checked_triples: triple_count(v.len()),
        norm_diameter: scale,
    }
}

pub(crate) fn require_self_contracted(curve: &TimedPolyline, norm: &NormModel) -> Result<SelfContractedReport> {
    let report = is_self_contracted(curve, norm, SC_DEFAULT_TOL);
    match (report.is_sc, report.worst_violation) {
        (false, Some(w)) => Err(Error::NotSelfContracted {
            i: w.i,
            j: w.j,
            k: w.k,
            defect: w.defect,
        }),
        _ => Ok(report),
    }
}

/// Euclidean length `Σ |γ_{i+1} − γ_i|`.
pub fn length(curve: &TimedPolyline) -> f64 {
    curve.vertices().windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepLevel {
    pub step: f64,
    pub proposals: usize,
    pub accepted: usize,
}

impl StepLevel {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyCurve {
    pub curve: TimedPolyline,
    /// The generator gave up before reaching the requested length.
    pub stalled: bool,
    /// Proposal statistics per step size, in the order used.
    pub levels: Vec<StepLevel>,
}

/// Random self-contracted curve grown one vertex at a time.
///
/// Starting at the origin, a proposal `z = γ_last + step·(cos φ, sin φ)` with
/// `φ` uniform is accepted iff `‖γ_i − z‖ ≥ ‖γ_{i+1} − z‖` for every existing
/// `i`, which is exactly the set of new constraints created by appending
/// `z`. After 200 consecutive rejections the step is halved. Randomness
/// comes from ChaCha8 seeded with `seed` through `SeedableRng::seed_from_u64`,
/// and angles are `2π·U` with `U` the standard 53-bit uniform `f64`.
pub fn generate_greedy(norm: &NormModel, n: usize, step: f64, seed: u64) -> Result<GreedyCurve> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("greedy curve needs n ≥ 2, got {n}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("greedy step must be positive, got {step}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = vec![Vec2::zeros()];
    let mut levels = vec![StepLevel { step, proposals: 0, accepted: 0 }];
    let mut current = step;
    let mut rejections = 0usize;
    let mut halvings = 0usize;
    let mut stalled = false;

    while vertices.len() < n {
        let phi = TAU * rng.random::<f64>();
        let last = *vertices.last().expect("nonempty");
        let z = last + current * Vec2::new(phi.cos(), phi.sin());
        let level = levels.last_mut().expect("nonempty");
        level.proposals += 1;
        let ok = z != last
            && vertices
                .windows(2)
                .all(|w| norm.value(w[0] - z) >= norm.value(w[1] - z));
        if ok {
            level.accepted += 1;
            vertices.push(z);
            rejections = 0;
            continue;
        }
        rejections += 1;
        if rejections >= GREEDY_REJECTIONS_PER_LEVEL {
            if halvings == GREEDY_MAX_HALVINGS {
                stalled = true;
                break;
            }
            halvings += 1;
            rejections = 0;
            current *= 0.5;
            levels.push(StepLevel { step: current, proposals: 0, accepted: 0 });
        }
    }
    Ok(GreedyCurve {
        curve: TimedPolyline::from_vertices(vertices)?,
        stalled,
        levels,
    })
}

/// `f(x) = ½⟨H(x − c), x − c⟩` with `H` symmetric positive definite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticPotential {
    pub hessian: Mat2,
    pub center: Vec2,
}

impl QuadraticPotential {
    pub fn new(hessian: Mat2, center: Vec2) -> Result<Self> {
        if (hessian[(0, 1)] - hessian[(1, 0)]).abs() > 1e-12 * hessian.abs().max() {
            return Err(Error::InvalidArgument("quadratic potential needs a symmetric Hessian".into()));
        }
        let pot = Self { hessian, center };
        if !(pot.eigenvalues().0 > 0.0) {
            return Err(Error::InvalidArgument("quadratic potential must be positive definite".into()));
        }
        Ok(pot)
    }

    /// `(λ_min, λ_max)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let (a, b, d) = (self.hessian[(0, 0)], self.hessian[(0, 1)], self.hessian[(1, 1)]);
        let mean = 0.5 * (a + d);
        let r = (0.5 * (a - d)).hypot(b);
        (mean - r, mean + r)
    }

    pub fn gradient(&self, x: Vec2) -> Vec2 {
        self.hessian * (x - self.center)
    }
}

/// Explicit Euler for `γ' = −∇f(γ)`: `x_{k+1} = x_k − step·∇f(x_k)`.
///
/// Requires `step·λ_max < 2` (stability). For `step·λ_max ≤ 1` the iterates
/// are Euclidean self-contracted; other norms must be checked.
/// Iteration stops early if an iterate repeats exactly.
pub fn generate_gradient_descent(potential: &QuadraticPotential, x0: Vec2, step: f64, n: usize) -> Result<TimedPolyline> {
    if n < 1 {
        return Err(Error::InvalidArgument("gradient descent needs n ≥ 1".into()));
    }
    let (_, lmax) = potential.eigenvalues();
    if !(step > 0.0 && step * lmax < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "step {step} violates the stability bound step·λ_max < 2 (λ_max = {lmax})"
        )));
    }
    let mut vertices = Vec::with_capacity(n);
    let mut x = x0;
    let scale0 = (x0 - potential.center).norm();
    for k in 0..n {
        if !(x.x.is_finite() && x.y.is_finite()) || (x - potential.center).norm() > 1e6 * scale0.max(1.0) {
            return Err(Error::Divergence { step: k });
        }
        if vertices.last() == Some(&x) {
            break;
        }
        vertices.push(x);
        x -= step * potential.gradient(x);
    }
    let params = (0..vertices.len()).map(|k| k as f64 * step).collect();
    TimedPolyline::new(vertices, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleCosineReport {
    /// Minimum of `⟨(y−x₀)/|y−x₀|, (y′−x₀)/|y′−x₀|⟩` over `x₀ ≺ y ≺ y′`;
    /// `1` when the curve has fewer than three vertices.
    pub min_cosine: f64,
    pub triple: Option<(usize, usize, usize)>,
    /// `−cos α₀`.
    pub bound: f64,
    /// `min_cosine ≥ bound − 1e-9`.
    pub holds: bool,
}

/// Exhaustive `O(n³)` evaluation of the triple-cosine bound. The curve must
/// be self-contracted under `norm`.
pub fn triple_cosine_check(curve: &TimedPolyline, norm: &NormModel, alpha0: f64) -> Result<TripleCosineReport> {
    require_self_contracted(curve, norm)?;
    let v = curve.vertices();
    let mut min_cosine = 1.0f64;
    let mut triple = None;
    let mut dirs = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        dirs.clear();
        dirs.extend(v[i + 1..].iter().map(|&p| (p - v[i]).normalize()));
        for a in 0..dirs.len() {
            for b in a + 1..dirs.len() {
                let c = dirs[a].dot(&dirs[b]);
                if c < min_cosine {
                    min_cosine = c;
                    triple = Some((i, i + 1 + a, i + 1 + b));
                }
            }
        }
    }
    let bound = -alpha0.cos();
    Ok(TripleCosineReport {
        min_cosine,
        triple,
        bound,
        holds: min_cosine >= bound - COSINE_TOL,
    })
}
