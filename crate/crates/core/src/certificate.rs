//! The constant chain behind the length bound and its checks on concrete
//! curves.
//!
//! For a pair `x′ ≺ x` of a self-contracted curve the tail `Γ(x)` sits on
//! the `x`-side of the bisector `M(x, x′)`, hence inside a half-plane
//! bounded by a translate of the dual line `L_{v₀}`. A slightly tilted
//! normal `ν̄` then separates the whole tail from a vertex `x₀` placed
//! between `x` and `x′`, and the mean width of the tail hull drops by
//! `c₀·|x − x′|` when `x` is dropped.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bisector::{kappa_estimate, KAPPA_MIN_GRID};
use crate::convex::{convex_hull, diameter, mean_width, ConvexPolygon, DEFAULT_QUADRATURE};
use crate::curves::{length, require_self_contracted, TimedPolyline};
use crate::norm::{unit_normal, NormModel, ALPHA0_DEFAULT_RESOLUTION};
use crate::{perp, Error, Result, Vec2};

/// Relative slack on the tail half-plane bound.
pub const TAIL_REL_TOL: f64 = 1e-9;
/// Absolute slack on the mean-width decrement.
pub const DECREMENT_TOL: f64 = 1e-9;
/// Relative slack on the telescoping identity.
pub const TELESCOPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsBundle {
    pub alpha0: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub tau1: f64,
    pub mu: f64,
    pub eps0: f64,
    pub tau: f64,
    pub delta: f64,
    pub c0: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
}

impl ConstantsBundle {
    /// Assemble the chain from `(α₀, κ)`:
    ///
    /// ```text
    /// λ = 1/2 − κ          τ₁ = sin α₀          μ = min(1/4, sin(α₀/2)/4)
    /// ε₀ = min(τ₁/6, μ/3, λ/12)                 τ = min(μ, λ/4, ε₀/2)
    /// δ = min(τ, τ₁/4)     c₀ = (λτ/4)·arcsin(δ/2)/π     C = 1/c₀
    /// ```
    pub fn from_alpha_kappa(alpha0: f64, kappa: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0 <= PI / 2.0) {
            return Err(Error::InvalidAlpha0 { min_alignment: alpha0.sin() });
        }
        if !(kappa >= 0.0) || kappa >= 0.5 {
            return Err(Error::KappaTooLarge { kappa });
        }
        let lambda = 0.5 - kappa;
        let tau1 = alpha0.sin();
        let mu = (0.25f64).min((alpha0 / 2.0).sin() / 4.0);
        let eps0 = (tau1 / 6.0).min(mu / 3.0).min(lambda / 12.0);
        let tau = mu.min(lambda / 4.0).min(eps0 / 2.0);
        let delta = tau.min(tau1 / 4.0);
        let c0 = (lambda * tau / 4.0) * (delta / 2.0).asin() / PI;
        Ok(Self {
            alpha0,
            kappa,
            lambda,
            tau1,
            mu,
            eps0,
            tau,
            delta,
            c0,
            big_c: 1.0 / c0,
        })
    }

    /// `β_μ = −cos(2·arcsin(2μ))`, the worst cosine inside the far components.
    pub fn beta_mu(&self) -> f64 {
        -(2.0 * (2.0 * self.mu).asin()).cos()
    }
}

/// Bundle for `norm` from `alpha0(4096)` and a `256 × 256` κ estimate.
pub fn derive_constants(norm: &NormModel) -> Result<ConstantsBundle> {
    let alpha0 = norm.alpha0(ALPHA0_DEFAULT_RESOLUTION)?;
    let kappa = kappa_estimate(norm, KAPPA_MIN_GRID, KAPPA_MIN_GRID)?.kappa;
    ConstantsBundle::from_alpha_kappa(alpha0, kappa)
}

/// Hull of `γ_index, γ_index+1, …`.
pub fn tail_hull(curve: &TimedPolyline, index: usize) -> Result<ConvexPolygon> {
    let v = curve.vertices();
    if index >= v.len() {
        return Err(Error::InvalidArgument(format!("tail index {index} out of range")));
    }
    convex_hull(&v[index..])
}

/// `ν_ε = (ν + ε ν^⊥)/|ν + ε ν^⊥|`.
pub fn nu_eps(nu: Vec2, eps: f64) -> Vec2 {
    (nu + eps * perp(nu)).normalize()
}

/// Where a tail vertex falls relative to `x₀` and `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRegion {
    /// `⟨ξ₀, ν⟩ ≤ −2μ`.
    H1,
    /// Not in `H₁` and `|y − x₀| < |x − x′|`.
    Near,
    /// Not in `H₁`, far from `x₀`, `⟨y − x₀, ν^⊥⟩ ≥ 0`.
    FarPlus,
    /// Not in `H₁`, far from `x₀`, `⟨y − x₀, ν^⊥⟩ < 0`.
    FarMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    pub h1: usize,
    pub near: usize,
    pub far_plus: usize,
    pub far_minus: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCertificate {
    /// Index of the earlier point `x′`.
    pub i: usize,
    /// Index of the later point `x`.
    pub j: usize,
    pub x_prime: Vec2,
    pub x: Vec2,
    /// `(x′ − x)/|x′ − x|`.
    pub v0: Vec2,
    /// `x′ − v₀·(λ/2)|x − x′|`.
    pub x0: Vec2,
    pub nu: Vec2,
    pub nu_bar: Vec2,
    /// Signed tilt `±ε₀` used for `ν̄`.
    pub eps: f64,
    pub regions: RegionCounts,
    /// `⟨ν̄, v₀⟩`.
    pub cl20_value: f64,
    /// `max_y ⟨ν̄, ξ₀(y)⟩`.
    pub cl21_value: f64,
    /// `max_y ⟨y − x₀, ν⟩ / |x − x′|`.
    pub tail_value: f64,
    pub cl20: bool,
    pub cl21: bool,
    pub tail1: bool,
}

impl PairCertificate {
    pub fn holds(&self) -> bool {
        self.cl20 && self.cl21 && self.tail1
    }
}

/// Builds `ν̄` for the pair `x′ = γ_i ≺ x = γ_j` and checks it against the
/// tail `γ_j, γ_{j+1}, …`.
///
/// The checks are `⟨ν̄, v₀⟩ ≥ τ₁/2`, `⟨ν̄, ξ₀(y)⟩ ≤ −δ` and
/// `⟨y − x₀, ν⟩ ≤ −(λ/2)|x − x′|` (relative slack `1e-9`). A tail meeting
/// both far components is reported as [`Error::BothComponentsOccupied`].
///
/// Self-contractedness is not re-checked here; see [`certify_pairs`].
pub fn separating_vector(
    norm: &NormModel,
    curve: &TimedPolyline,
    i: usize,
    j: usize,
    bundle: &ConstantsBundle,
) -> Result<PairCertificate> {
    let v = curve.vertices();
    if !(i < j && j < v.len()) {
        return Err(Error::InvalidArgument(format!(
            "pair ({i}, {j}) must satisfy i < j < {}",
            v.len()
        )));
    }
    let (x_prime, x) = (v[i], v[j]);
    let d = (x_prime - x).norm();
    if d == 0.0 {
        return Err(Error::InvalidCurve(format!("vertices {i} and {j} coincide")));
    }
    // pair-normalized coordinates: x at the origin, |x − x′| = 1
    let to_local = |p: Vec2| (p - x) / d;
    let v0 = (x_prime - x) / d;
    let x0 = x_prime - v0 * (bundle.lambda / 2.0) * d;
    let x0_local = v0 * (1.0 - bundle.lambda / 2.0);

    let dual = norm.dual_direction(v0)?;
    let mut nu = unit_normal(dual.line_direction);
    if nu.dot(&v0) < 0.0 {
        nu = -nu;
    }
    let nu_perp = perp(nu);

    let mut regions = RegionCounts { h1: 0, near: 0, far_plus: 0, far_minus: 0 };
    let mut first_plus = None;
    let mut first_minus = None;
    let mut tail_value = f64::NEG_INFINITY;
    let mut local = Vec::with_capacity(v.len() - j);
    for (k, &p) in v.iter().enumerate().skip(j) {
        let w = to_local(p) - x0_local;
        let r = w.norm();
        let xi = w / r;
        tail_value = tail_value.max(w.dot(&nu));
        let region = if xi.dot(&nu) <= -2.0 * bundle.mu {
            TailRegion::H1
        } else if r < 1.0 {
            TailRegion::Near
        } else if w.dot(&nu_perp) >= 0.0 {
            TailRegion::FarPlus
        } else {
            TailRegion::FarMinus
        };
        match region {
            TailRegion::H1 => regions.h1 += 1,
            TailRegion::Near => regions.near += 1,
            TailRegion::FarPlus => {
                regions.far_plus += 1;
                first_plus.get_or_insert(k);
            }
            TailRegion::FarMinus => {
                regions.far_minus += 1;
                first_minus.get_or_insert(k);
            }
        }
        local.push(xi);
    }
    let eps = match (first_plus, first_minus) {
        (Some(plus), Some(minus)) => return Err(Error::BothComponentsOccupied { i, j, plus, minus }),
        (Some(_), None) => -bundle.eps0,
        _ => bundle.eps0,
    };
    let nu_bar = nu_eps(nu, eps);
    let cl20_value = nu_bar.dot(&v0);
    let cl21_value = local.iter().map(|xi| nu_bar.dot(xi)).fold(f64::NEG_INFINITY, f64::max);
    let tail_bound = -(bundle.lambda / 2.0) * (1.0 - TAIL_REL_TOL);

    Ok(PairCertificate {
        i,
        j,
        x_prime,
        x,
        v0,
        x0,
        nu,
        nu_bar,
        eps,
        regions,
        cl20_value,
        cl21_value,
        tail_value,
        cl20: cl20_value >= bundle.tau1 / 2.0,
        cl21: cl21_value <= -bundle.delta,
        tail1: tail_value <= tail_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSummary {
    pub pairs: usize,
    pub cl20_failures: usize,
    pub cl21_failures: usize,
    pub tail1_failures: usize,
    pub both_components: usize,
    pub min_cl20: f64,
    pub max_cl21: f64,
    pub max_tail: f64,
    /// First failures in pair order, at most 16.
    pub failures: Vec<PairFailure>,
}

impl PairSummary {
    pub fn all_hold(&self) -> bool {
        self.cl20_failures + self.cl21_failures + self.tail1_failures + self.both_components == 0
    }
}

/// Runs [`separating_vector`] on every pair `i < j` of an SC curve.
/// Pairs are checked in parallel and aggregated in `(i, j)` order.
pub fn certify_pairs(norm: &NormModel, curve: &TimedPolyline, bundle: &ConstantsBundle) -> Result<PairSummary> {
    require_self_contracted(curve, norm)?;
    let n = curve.len();
    let rows: Vec<Vec<Result<PairCertificate>>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| separating_vector(norm, curve, i, j, bundle)).collect())
        .collect();

    let mut s = PairSummary {
        pairs: 0,
        cl20_failures: 0,
        cl21_failures: 0,
        tail1_failures: 0,
        both_components: 0,
        min_cl20: f64::INFINITY,
        max_cl21: f64::NEG_INFINITY,
        max_tail: f64::NEG_INFINITY,
        failures: Vec::new(),
    };
    let note = |f: &mut Vec<PairFailure>, i, j, reason: String| {
        if f.len() < 16 {
            f.push(PairFailure { i, j, reason });
        }
    };
    for r in rows.into_iter().flatten() {
        s.pairs += 1;
        match r {
            Ok(c) => {
                s.min_cl20 = s.min_cl20.min(c.cl20_value);
                s.max_cl21 = s.max_cl21.max(c.cl21_value);
                s.max_tail = s.max_tail.max(c.tail_value);
                if !c.cl20 {
                    s.cl20_failures += 1;
                    note(&mut s.failures, c.i, c.j, format!("cl20 {:e}", c.cl20_value));
                }
                if !c.cl21 {
                    s.cl21_failures += 1;
                    note(&mut s.failures, c.i, c.j, format!("cl21 {:e}", c.cl21_value));
                }
                if !c.tail1 {
                    s.tail1_failures += 1;
                    note(&mut s.failures, c.i, c.j, format!("tail {:e}", c.tail_value));
                }
            }
            Err(Error::BothComponentsOccupied { i, j, plus, minus }) => {
                s.both_components += 1;
                note(&mut s.failures, i, j, format!("both components occupied ({plus}, {minus})"));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecrementViolation {
    pub i: usize,
    pub j: usize,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthDecrementReport {
    /// Euclidean diameter the curve was divided by.
    pub scale: f64,
    /// `W(Ω(γ_k))` of the normalized curve, one per vertex.
    pub tail_widths: Vec<f64>,
    /// `W_i − W_{i+1} − c₀|γ_{i+1} − γ_i|` for consecutive vertices.
    pub consecutive_slacks: Vec<f64>,
    pub pairs_checked: usize,
    pub min_slack: f64,
    /// `min (W_i − W_j)/|γ_j − γ_i|` over the checked pairs.
    pub best_c0: f64,
    pub violations: Vec<DecrementViolation>,
}

/// Checks `W(Ω(γ_j)) + c₀|γ_j − γ_i| ≤ W(Ω(γ_i))` on the curve rescaled
/// to unit Euclidean diameter.
///
/// Every consecutive pair is checked. Other pairs use every `pair_stride`-th
/// `i` and `j`.
pub fn width_decrement_check(
    curve: &TimedPolyline,
    norm: &NormModel,
    bundle: &ConstantsBundle,
    pair_stride: usize,
) -> Result<WidthDecrementReport> {
    if pair_stride == 0 {
        return Err(Error::InvalidArgument("pair stride must be positive".into()));
    }
    require_self_contracted(curve, norm)?;
    let scale = diameter(&convex_hull(curve.vertices())?);
    let v: Vec<Vec2> = if scale > 0.0 {
        curve.vertices().iter().map(|&p| p / scale).collect()
    } else {
        curve.vertices().to_vec()
    };
    let n = v.len();
    let tail_widths: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| mean_width(&convex_hull(&v[k..])?, DEFAULT_QUADRATURE))
        .collect::<Result<_>>()?;

    let slack = |i: usize, j: usize| tail_widths[i] - tail_widths[j] - bundle.c0 * (v[j] - v[i]).norm();
    let rate = |i: usize, j: usize| (tail_widths[i] - tail_widths[j]) / (v[j] - v[i]).norm();

    let consecutive_slacks: Vec<f64> = (0..n.saturating_sub(1)).map(|i| slack(i, i + 1)).collect();
    let mut pairs = 0;
    let mut min_slack = f64::INFINITY;
    let mut best_c0 = f64::INFINITY;
    let mut violations = Vec::new();
    let mut visit = |i: usize, j: usize| {
        pairs += 1;
        let s = slack(i, j);
        min_slack = min_slack.min(s);
        best_c0 = best_c0.min(rate(i, j));
        if s < -DECREMENT_TOL {
            violations.push(DecrementViolation { i, j, slack: s });
        }
    };
    for i in 0..n.saturating_sub(1) {
        visit(i, i + 1);
    }
    for i in (0..n).step_by(pair_stride) {
        for j in (i + pair_stride..n).step_by(pair_stride) {
            if j != i + 1 {
                visit(i, j);
            }
        }
    }
    Ok(WidthDecrementReport {
        scale,
        tail_widths,
        consecutive_slacks,
        pairs_checked: pairs,
        min_slack,
        best_c0,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthBoundReport {
    pub length: f64,
    pub diam: f64,
    pub mean_width: f64,
    /// `length / diam`.
    pub ratio: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    /// `Σ` consecutive decrement slacks, in unit-diameter coordinates.
    pub slack_sum: f64,
    /// `slack_sum + c₀·ℓ − (W(K) − W(Ω(γ_last)))`, unit-diameter coordinates.
    pub telescope_residual: f64,
    pub telescope_ok: bool,
    /// `ℓ ≤ W(K)/c₀ ≤ diam/c₀`.
    pub bound_ok: bool,
    pub min_decrement_slack: f64,
}

/// Length, diameter, mean width and the certified ratio bound.
/// Fails with [`Error::BoundExceeded`] when `ℓ/diam > C`.
pub fn length_bound_report(curve: &TimedPolyline, norm: &NormModel, bundle: &ConstantsBundle) -> Result<LengthBoundReport> {
    let dec = width_decrement_check(curve, norm, bundle, 1.max(curve.len() / 8))?;
    let hull = convex_hull(curve.vertices())?;
    let len = length(curve);
    let diam = diameter(&hull);
    let w = mean_width(&hull, DEFAULT_QUADRATURE)?;
    let ratio = if diam > 0.0 { len / diam } else { 0.0 };
    if ratio > bundle.big_c {
        return Err(Error::BoundExceeded { ratio, bound: bundle.big_c });
    }
    let unit_len = if dec.scale > 0.0 { len / dec.scale } else { 0.0 };
    let slack_sum: f64 = dec.consecutive_slacks.iter().sum();
    let drop = dec.tail_widths[0] - dec.tail_widths[dec.tail_widths.len() - 1];
    let telescope_residual = slack_sum + bundle.c0 * unit_len - drop;
    let telescope_ok = telescope_residual.abs() <= TELESCOPE_TOL * drop.abs().max(1.0);
    let unit_w = dec.tail_widths[0];
    let bound_ok = bundle.c0 * unit_len <= unit_w + DECREMENT_TOL && unit_w <= 1.0 + DECREMENT_TOL;
    Ok(LengthBoundReport {
        length: len,
        diam,
        mean_width: w,
        ratio,
        big_c: bundle.big_c,
        slack_sum,
        telescope_residual,
        telescope_ok,
        bound_ok,
        min_decrement_slack: dec.min_slack,
    })
}
