//! Acceptance run: one `[PASS]`/`[FAIL]` line per criterion, with timing.
//! Exits nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use normplane::bisector::{asymptote_deviation, kappa_estimate, strip_contains, trace_bisector, Segment, KAPPA_MIN_GRID};
use normplane::certificate::{certify_pairs, derive_constants, length_bound_report, width_decrement_check};
use normplane::convex::{convex_hull, diameter, mean_width, perimeter, DEFAULT_QUADRATURE};
use normplane::curves::{generate_greedy, is_self_contracted, triple_cosine_check, TimedPolyline, SC_DEFAULT_TOL};
use normplane::norm::{NormModel, ALPHA0_DEFAULT_RESOLUTION};
use normplane::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lift<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn c1() -> Check {
    let e = lift(NormModel::euclid().alpha0(ALPHA0_DEFAULT_RESOLUTION))?;
    let lp4 = lift(NormModel::lp(4.0))?;
    let a = lift(lp4.alpha0(4096))?;
    let b = lift(lp4.alpha0(8192))?;
    let (de, dd) = ((e - FRAC_PI_2).abs(), (a - b).abs());
    ensure(de <= 1e-9 && dd <= 1e-6, format!("|α₀(euclid) − π/2| = {de:.1e}, lp:4 doubling change {dd:.1e}"))
}

fn c2() -> Check {
    let ke = lift(kappa_estimate(&NormModel::euclid(), KAPPA_MIN_GRID, KAPPA_MIN_GRID))?.kappa;
    let lp4 = lift(NormModel::lp(4.0))?;
    let k = lift(kappa_estimate(&lp4, KAPPA_MIN_GRID, KAPPA_MIN_GRID))?.kappa;
    let k2 = lift(kappa_estimate(&lp4, 2 * KAPPA_MIN_GRID, 2 * KAPPA_MIN_GRID))?.kappa;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut outside = 0usize;
    let mut points = 0usize;
    for _ in 0..1000 {
        let a = Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let phi = rng.random_range(0.0..TAU);
        let b = a + rng.random_range(0.05..3.0) * Vec2::new(phi.cos(), phi.sin());
        let seg = lift(Segment::new(&lp4, a, b))?;
        let tr = lift(trace_bisector(&lp4, &seg, 101))?;
        points += tr.samples.len();
        outside += tr.samples.iter().filter(|s| !strip_contains(&seg, k + 1e-6, s.z)).count();
    }
    ensure(
        ke <= 1e-8 && k > 0.0 && k < 0.5 && (k - k2).abs() <= 1e-4 && outside == 0,
        format!(
            "κ(euclid) = {ke:.1e}, κ(lp:4) = {k:.6}, doubling change {:.1e}, {outside}/{points} points outside S(κ̂+1e-6)",
            (k - k2).abs()
        ),
    )
}

fn c3() -> Check {
    let lp4 = lift(NormModel::lp(4.0))?;
    let axis = lift(Segment::new(&lp4, Vec2::new(-0.3, 1.0), Vec2::new(0.7, 1.0)))?;
    let tr = lift(trace_bisector(&lp4, &axis, 401))?;
    let ex = tr.samples.iter().map(|s| (s.z.x - 0.2).abs()).fold(0.0, f64::max);
    let diag = lift(Segment::new(&lp4, Vec2::new(0.0, 0.0), Vec2::new(0.8, 0.8)))?;
    let tr = lift(trace_bisector(&lp4, &diag, 401))?;
    let ed = tr.samples.iter().map(|s| (s.z.x + s.z.y - 0.8).abs()).fold(0.0, f64::max);
    ensure(ex <= 1e-9 && ed <= 1e-9, format!("axis max |x − 0.2| = {ex:.1e}, diagonal max |x + y − 0.8| = {ed:.1e}"))
}

fn c4() -> Check {
    let lp4 = lift(NormModel::lp(4.0))?;
    let a = Vec2::new(0.2, -0.1);
    let b = a + Vec2::new(0.5f64.cos(), 0.5f64.sin());
    let seg = lift(Segment::new(&lp4, a, b))?;
    let radii = [10.0, 30.0, 100.0, 300.0, 1000.0];
    let devs = lift(asymptote_deviation(&lp4, &seg, &radii))?;
    let (lx, ly): (Vec<f64>, Vec<f64>) = devs.iter().map(|d| (d.radius.ln(), d.deviation.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / 5.0, ly.iter().sum::<f64>() / 5.0);
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    ensure((-1.15..=-0.85).contains(&slope), format!("log-log slope {slope:.4}"))
}

fn c5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_id, mut worst_w) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..100 {
        let n = rng.random_range(3..80);
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let pts: Vec<Vec2> = (0..n)
            .map(|_| scale * Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let hull = lift(convex_hull(&pts))?;
        let w = lift(mean_width(&hull, DEFAULT_QUADRATURE))?;
        worst_id = worst_id.max((PI * w - perimeter(&hull)).abs() / scale.max(1.0));
        worst_w = worst_w.max(w - diameter(&hull));
    }
    ensure(worst_id <= 1e-6 && worst_w <= 0.0, format!("max |πW − per| = {worst_id:.1e}, max W − diam = {worst_w:.2e}"))
}

fn oracle_defect(curve: &TimedPolyline, norm: &NormModel) -> Option<f64> {
    let v = curve.vertices();
    let mut worst: Option<f64> = None;
    for k in 0..v.len() {
        for j in 0..k {
            for i in 0..j {
                let d = norm.value(v[j] - v[k]) - norm.value(v[i] - v[k]);
                worst = Some(worst.map_or(d, |w: f64| w.max(d)));
            }
        }
    }
    worst
}

fn c6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let norms = [NormModel::euclid(), lift(NormModel::lp(4.0))?];
    let (mut agree, mut sc) = (0usize, 0usize);
    for k in 0..200 {
        let norm = &norms[k % 2];
        let n = rng.random_range(3..=50);
        let curve = if rng.random_bool(0.5) {
            let mut v = lift(generate_greedy(norm, n, 0.1, rng.random()))?.curve.vertices().to_vec();
            if rng.random_bool(0.5) {
                let i = rng.random_range(0..v.len());
                v[i] += Vec2::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05));
            }
            lift(TimedPolyline::from_vertices(v))?
        } else {
            let mut p = Vec2::zeros();
            let v = (0..n)
                .map(|_| {
                    p += Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    p
                })
                .collect();
            lift(TimedPolyline::from_vertices(v))?
        };
        let r = is_self_contracted(&curve, norm, SC_DEFAULT_TOL);
        let oracle = oracle_defect(&curve, norm);
        let oracle_sc = oracle.is_none_or(|d| d <= SC_DEFAULT_TOL * r.norm_diameter);
        if r.is_sc == oracle_sc && r.worst_violation.map(|w| w.defect) == oracle {
            agree += 1;
        }
        sc += r.is_sc as usize;
    }
    let back = lift(TimedPolyline::from_vertices(vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(0.4, 0.0),
    ]))?;
    let r = is_self_contracted(&back, &NormModel::euclid(), SC_DEFAULT_TOL);
    let triple = r.worst_violation.map(|w| (w.i, w.j, w.k));
    ensure(
        agree == 200 && !r.is_sc && triple == Some((0, 1, 2)),
        format!("{agree}/200 agree ({sc} SC), backtracking fixture triple {triple:?}"),
    )
}

fn c7() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for (spec, count) in [("lp:4", 100), ("euclid", 100)] {
        let norm = lift(NormModel::parse(spec))?;
        let alpha0 = lift(norm.alpha0(ALPHA0_DEFAULT_RESOLUTION))?;
        let bound = -alpha0.cos() - 1e-9;
        let mut min = f64::INFINITY;
        for seed in 0..count {
            let c = lift(generate_greedy(&norm, 200, 0.1, seed))?.curve;
            min = min.min(lift(triple_cosine_check(&c, &norm, alpha0))?.min_cosine);
        }
        ok &= min >= bound;
        lines.push(format!("{spec}: min cosine {min:.4} (bound {bound:.4})"));
    }
    ensure(ok, lines.join(", "))
}

fn c8() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for spec in ["euclid", "lp:3", "lp:4"] {
        let norm = lift(NormModel::parse(spec))?;
        let b = lift(derive_constants(&norm))?;
        let (mut pairs, mut bad, mut both) = (0usize, 0usize, 0usize);
        for seed in 0..20 {
            let c = lift(generate_greedy(&norm, 100, 0.1, seed))?.curve;
            let s = lift(certify_pairs(&norm, &c, &b))?;
            pairs += s.pairs;
            bad += s.cl20_failures + s.cl21_failures + s.tail1_failures;
            both += s.both_components;
        }
        ok &= bad == 0 && both == 0;
        lines.push(format!("{spec}: {pairs} pairs, {bad} failures, {both} both-occupied"));
    }
    ensure(ok, lines.join(", "))
}

fn c9() -> Check {
    let mut worst = f64::INFINITY;
    let mut checked = 0usize;
    let mut bad = Vec::new();
    let mut max_ratio = 0.0f64;
    for spec in ["euclid", "lp:3", "lp:4", "alp:4:1,0.3,0,0.8"] {
        let norm = lift(NormModel::parse(spec))?;
        let b = lift(derive_constants(&norm))?;
        for seed in 0..25 {
            let c = lift(generate_greedy(&norm, 120, 0.1, seed))?.curve;
            let d = lift(width_decrement_check(&c, &norm, &b, 3))?;
            let l = lift(length_bound_report(&c, &norm, &b))?;
            worst = worst.min(d.min_slack);
            checked += d.pairs_checked;
            max_ratio = max_ratio.max(l.ratio);
            let chain = l.length <= l.mean_width * l.big_c * (1.0 + 1e-9) && l.mean_width <= l.diam;
            if !d.violations.is_empty() || !l.telescope_ok || !l.bound_ok || !chain {
                bad.push(format!("{spec}/{seed}"));
            }
        }
    }
    ensure(
        worst >= -1e-9 && bad.is_empty(),
        format!("100 curves, {checked} pairs, min slack {worst:.3e}, max ratio {max_ratio:.3}, failing {bad:?}"),
    )
}

fn normplane(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = lift(Command::new(env!("CARGO_BIN_EXE_normplane")).args(args).output())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn close(got: &Value, want: &Value) -> bool {
    match (got, want) {
        (Value::Object(g), Value::Object(w)) => g.keys().eq(w.keys()) && w.iter().all(|(k, v)| close(&g[k], v)),
        (Value::Array(g), Value::Array(w)) => g.len() == w.len() && g.iter().zip(w).all(|(a, b)| close(a, b)),
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
        }
        _ => got == want,
    }
}

fn c10() -> Check {
    let first = normplane(&["certify", "--seed", "42"])?;
    let second = normplane(&["certify", "--seed", "42"])?;
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut matched = Vec::new();
    for (spec, file) in [("euclid", "euclid.json"), ("lp:4", "lp4.json")] {
        let got: Value = lift(serde_json::from_slice(&normplane(&["norm-info", "--norm", spec])?))?;
        let want: Value = lift(serde_json::from_str(&lift(std::fs::read_to_string(golden.join(file)))?))?;
        matched.push(close(&got, &want));
    }
    ensure(
        first == second && matched.iter().all(|&m| m),
        format!("certify --seed 42 identical: {}, golden euclid/lp:4 match: {matched:?}", first == second),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("C1 alpha0", c1, Duration::from_secs(1)),
        ("C2 kappa and strip containment", c2, Duration::from_secs(30)),
        ("C3 bisector symmetry fixtures", c3, Duration::from_secs(1)),
        ("C4 asymptote decay", c4, Duration::from_secs(5)),
        ("C5 mean width identities", c5, Duration::from_secs(1)),
        ("C6 self-contracted validator", c6, Duration::from_secs(10)),
        ("C7 triple cosine bound", c7, Duration::from_secs(60)),
        ("C8 pair certificates", c8, Duration::from_secs(120)),
        ("C9 width decrement and length bound", c9, Duration::from_secs(120)),
        ("C10 determinism and golden files", c10, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget {:.0?}", budget)),
            Err(d) => (false, d),
        };
        failed += !ok as usize;
        println!("[{}] {name}: {detail} ({:.2}s)", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
    }
    println!("{}/10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
