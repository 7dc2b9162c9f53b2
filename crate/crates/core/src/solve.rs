//! Scalar root finding and low-dimensional optimisation.

use crate::{Error, Result};

/// Bracket `[lo, hi]` on which `f` changes sign.
///
/// Bisects until the bracket is narrower than `xtol` (or stops shrinking)
/// and returns the bracket together with the endpoint values.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64, context: &str) -> Result<Bracket>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    bisect_with_values(f, Bracket { lo, hi, f_lo, f_hi }, xtol, context)
}

pub fn bisect_with_values<F>(mut f: F, mut br: Bracket, xtol: f64, context: &str) -> Result<Bracket>
where
    F: FnMut(f64) -> f64,
{
    if !(br.f_lo.is_finite() && br.f_hi.is_finite()) || br.f_lo.signum() == br.f_hi.signum() {
        if br.f_lo == 0.0 {
            return Ok(Bracket { hi: br.lo, f_hi: 0.0, ..br });
        }
        if br.f_hi == 0.0 {
            return Ok(Bracket { lo: br.hi, f_lo: 0.0, ..br });
        }
        return Err(Error::RootNotFound {
            context: format!(
                "{context}: no sign change on [{}, {}] (f = {}, {})",
                br.lo, br.hi, br.f_lo, br.f_hi
            ),
        });
    }
    for _ in 0..200 {
        if (br.hi - br.lo).abs() <= xtol {
            break;
        }
        let mid = br.midpoint();
        if mid <= br.lo.min(br.hi) || mid >= br.lo.max(br.hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Bracket { lo: mid, hi: mid, f_lo: 0.0, f_hi: 0.0 });
        }
        if !fm.is_finite() {
            return Err(Error::RootNotFound {
                context: format!("{context}: non-finite value at {mid}"),
            });
        }
        if fm.signum() == br.f_lo.signum() {
            br.lo = mid;
            br.f_lo = fm;
        } else {
            br.hi = mid;
            br.f_hi = fm;
        }
    }
    Ok(br)
}

/// Bracketed bisection followed by `newton_steps` safeguarded Newton steps.
///
/// A Newton iterate is accepted only if it stays inside the current bracket
/// and does not increase `|f|`.
pub fn bisect_newton<F, D>(
    mut f: F,
    mut df: D,
    lo: f64,
    hi: f64,
    xtol: f64,
    newton_steps: usize,
    context: &str,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let br = bisect(&mut f, lo, hi, xtol, context)?;
    let (a, b) = (br.lo.min(br.hi), br.lo.max(br.hi));
    let (mut x, mut fx) = if br.f_lo.abs() <= br.f_hi.abs() {
        (br.lo, br.f_lo)
    } else {
        (br.hi, br.f_hi)
    };
    for _ in 0..newton_steps {
        if fx == 0.0 {
            break;
        }
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let cand = x - fx / d;
        if !(a..=b).contains(&cand) {
            break;
        }
        let fc = f(cand);
        if fc.abs() > fx.abs() {
            break;
        }
        x = cand;
        fx = fc;
    }
    Ok(x)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_section_min<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
