//! Subcommand implementations. Each returns a JSON report; the caller
//! appends the config echo and decides where it goes.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use normplane::bisector::{asymptote_deviation, kappa_estimate, trace_bisector, Segment, KAPPA_MIN_GRID};
use normplane::certificate::{
    certify_pairs, length_bound_report, width_decrement_check, ConstantsBundle, PairSummary,
};
use normplane::curves::{
    generate_gradient_descent, generate_greedy, is_self_contracted, length, triple_cosine_check, QuadraticPotential,
    TimedPolyline, SC_DEFAULT_TOL,
};
use normplane::norm::{NormModel, ALPHA0_DEFAULT_RESOLUTION};
use normplane::{Mat2, Vec2};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::csvio::{curve_csv, read_curve, trace_csv};
use crate::error::{CliError, CliResult};
use crate::output::{to_value, write_atomic};
use crate::svg;

/// A finished report plus an optional check failure (exit 1 after the
/// report has been emitted).
pub struct Outcome {
    pub report: Value,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { report, failure: None }
    }
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => {
            let x: f64 = x.parse().map_err(|_| format!("`{x}` is not a number"))?;
            let y: f64 = y.parse().map_err(|_| format!("`{y}` is not a number"))?;
            if x.is_finite() && y.is_finite() {
                Ok([x, y])
            } else {
                Err("coordinates must be finite".into())
            }
        }
        _ => Err(format!("expected `x,y`, found `{s}`")),
    }
}

fn parse_matrix(s: &str) -> Result<[f64; 4], String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<Result<_, _>>()?;
    vals.try_into().map_err(|_| format!("expected four entries `a11,a12,a21,a22`, found `{s}`"))
}

fn vec2(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

fn norm_model(spec: &str) -> CliResult<NormModel> {
    Ok(NormModel::parse(spec)?)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    write_atomic(path, text.as_bytes()).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn bundle_fields(norm: &NormModel, b: &ConstantsBundle) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("norm".into(), json!(norm.spec().to_string()));
    if let Value::Object(fields) = to_value(b) {
        m.extend(fields);
    }
    m
}

fn bundle(norm: &NormModel, alpha_grid: usize, kappa_grid: usize) -> CliResult<ConstantsBundle> {
    let alpha0 = norm.alpha0(alpha_grid)?;
    let kappa = kappa_estimate(norm, kappa_grid, kappa_grid)?.kappa;
    Ok(ConstantsBundle::from_alpha_kappa(alpha0, kappa)?)
}

#[derive(Args, Serialize, Debug)]
pub struct NormArgs {
    /// Norm: `euclid`, `lp:P` or `alp:P:a11,a12,a21,a22` (P ≥ 2).
    #[arg(long, default_value = "euclid")]
    pub norm: String,
}

#[derive(Args, Serialize, Debug)]
pub struct ConstantGrids {
    /// Polar grid for α₀.
    #[arg(long, default_value_t = ALPHA0_DEFAULT_RESOLUTION)]
    pub alpha_grid: usize,
    /// Direction and offset grid for κ.
    #[arg(long, default_value_t = KAPPA_MIN_GRID)]
    pub kappa_grid: usize,
}

// ---------------------------------------------------------------- norm-info

#[derive(Args, Serialize, Debug)]
pub struct NormInfoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grids: ConstantGrids,
}

pub fn norm_info(args: &NormInfoArgs) -> CliResult<Outcome> {
    let norm = norm_model(&args.norm.norm)?;
    let b = bundle(&norm, args.grids.alpha_grid, args.grids.kappa_grid)?;
    Ok(Outcome::ok(Value::Object(bundle_fields(&norm, &b))))
}

// ---------------------------------------------------------------- alpha0

#[derive(Args, Serialize, Debug)]
pub struct Alpha0Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    /// Polar grid size; the report also gives the value on twice this grid.
    #[arg(long, default_value_t = ALPHA0_DEFAULT_RESOLUTION)]
    pub grid: usize,
}

pub fn alpha0(args: &Alpha0Args) -> CliResult<Outcome> {
    let norm = norm_model(&args.norm.norm)?;
    let a = norm.alpha0(args.grid)?;
    let a2 = norm.alpha0(2 * args.grid)?;
    Ok(Outcome::ok(json!({
        "norm": norm.spec().to_string(),
        "alpha0": a,
        "sin_alpha0": a.sin(),
        "alpha0_doubled_grid": a2,
        "doubling_change": (a2 - a).abs(),
    })))
}

// ---------------------------------------------------------------- kappa

#[derive(Args, Serialize, Debug)]
pub struct KappaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    /// Directions in [0, π).
    #[arg(long, default_value_t = KAPPA_MIN_GRID)]
    pub directions: usize,
    /// Offsets per direction.
    #[arg(long, default_value_t = KAPPA_MIN_GRID)]
    pub offsets: usize,
}

pub fn kappa(args: &KappaArgs) -> CliResult<Outcome> {
    let norm = norm_model(&args.norm.norm)?;
    let k = kappa_estimate(&norm, args.directions, args.offsets)?;
    let mut report = Map::new();
    report.insert("norm".into(), json!(norm.spec().to_string()));
    if let Value::Object(fields) = to_value(&k) {
        report.extend(fields);
    }
    Ok(Outcome::ok(Value::Object(report)))
}

// ---------------------------------------------------------------- bisector

#[derive(Args, Serialize, Debug)]
pub struct BisectorArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    /// First endpoint `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub a: [f64; 2],
    /// Second endpoint `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub b: [f64; 2],
    /// Number of trace samples.
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Comma-separated radii R for the asymptote deviation table.
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 30.0, 100.0, 300.0, 1000.0])]
    pub radii: Vec<f64>,
    /// Grid for the κ estimate drawn as the strip.
    #[arg(long, default_value_t = KAPPA_MIN_GRID)]
    pub kappa_grid: usize,
    /// Trace CSV output (`t,zx,zy,residual`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG figure output.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Least-squares slope of `log y` against `log x`; `None` unless every
/// value is positive.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || ys.iter().chain(xs).any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

pub fn bisector(args: &BisectorArgs) -> CliResult<Outcome> {
    let norm = norm_model(&args.norm.norm)?;
    let seg = Segment::new(&norm, vec2(args.a), vec2(args.b))?;
    let trace = trace_bisector(&norm, &seg, args.samples)?;
    let devs = asymptote_deviation(&norm, &seg, &args.radii)?;
    let kappa = kappa_estimate(&norm, args.kappa_grid, args.kappa_grid)?.kappa;
    if let Some(p) = &args.out {
        write_text(p, &trace_csv(&trace))?;
    }
    if let Some(p) = &args.svg {
        write_text(p, &svg::bisector_figure(&norm, &trace, kappa, &norm.spec().to_string()))?;
    }
    let max_residual = trace.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    let radii: Vec<f64> = devs.iter().map(|d| d.radius).collect();
    let dev: Vec<f64> = devs.iter().map(|d| d.deviation).collect();
    Ok(Outcome::ok(json!({
        "norm": norm.spec().to_string(),
        "a": args.a,
        "b": args.b,
        "samples": trace.samples.len(),
        "max_residual": max_residual,
        "asymptote": {
            "point": [trace.asymptote.point.x, trace.asymptote.point.y],
            "direction": [trace.asymptote.direction.x, trace.asymptote.direction.y],
        },
        "kappa_used": trace.kappa_used,
        "kappa_estimate": kappa,
        "deviations": to_value(&devs),
        "deviation_slope": log_log_slope(&radii, &dev),
    })))
}

// ---------------------------------------------------------------- generate

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Greedy random construction, self-contracted under the chosen norm.
    Greedy,
    /// Explicit Euler steps of Euclidean gradient descent on a quadratic.
    Gd,
}

#[derive(Args, Serialize, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, value_enum, default_value_t = Method::Greedy)]
    pub method: Method,
    /// Number of vertices.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Initial step (greedy) or Euler step (gd).
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Seed of the ChaCha8 generator (greedy only).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Hessian `a11,a12,a21,a22` of the quadratic (gd only).
    #[arg(long, value_parser = parse_matrix, default_value = "1,0,0,10", allow_hyphen_values = true)]
    pub hessian: [f64; 4],
    /// Minimiser of the quadratic (gd only).
    #[arg(long, value_parser = parse_point, default_value = "0,0", allow_hyphen_values = true)]
    pub center: [f64; 2],
    /// Start point (gd only).
    #[arg(long, value_parser = parse_point, default_value = "1,1", allow_hyphen_values = true)]
    pub x0: [f64; 2],
    /// Curve CSV output (`t,x,y`).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn generate(args: &GenerateArgs) -> CliResult<Outcome> {
    let norm = norm_model(&args.norm.norm)?;
    let mut report = json!({ "norm": norm.spec().to_string(), "method": args.method });
    let curve = match args.method {
        Method::Greedy => {
            let g = generate_greedy(&norm, args.n, args.step, args.seed)?;
            report["stalled"] = json!(g.stalled);
            report["levels"] = to_value(&g.levels);
            g.curve
        }
        Method::Gd => {
            let h = args.hessian;
            let pot = QuadraticPotential::new(Mat2::new(h[0], h[1], h[2], h[3]), vec2(args.center))?;
            generate_gradient_descent(&pot, vec2(args.x0), args.step, args.n)?
        }
    };
    write_text(&args.out, &curve_csv(&curve))?;
    let sc = is_self_contracted(&curve, &norm, SC_DEFAULT_TOL);
    report["n"] = json!(curve.len());
    report["length"] = json!(length(&curve));
    report["self_contracted"] = json!(sc.is_sc);
    Ok(Outcome::ok(report))
}

// ---------------------------------------------------------------- verify

#[derive(Args, Serialize, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    /// Curve CSV (`t,x,y`).
    #[arg(long)]
    pub curve: PathBuf,
    /// Defect tolerance relative to the norm diameter of the vertices.
    #[arg(long, default_value_t = SC_DEFAULT_TOL)]
    pub tol: f64,
}

pub fn verify(args: &VerifyArgs) -> CliResult<Outcome> {
    let norm = norm_model(&args.norm.norm)?;
    let curve = read_curve(&args.curve)?;
    let sc = is_self_contracted(&curve, &norm, args.tol);
    let mut report = json!({
        "norm": norm.spec().to_string(),
        "n": curve.len(),
        "length": length(&curve),
        "self_contracted": sc.is_sc,
        "worst_violation": sc.worst_violation.map(|v| json!({
            "triple": [v.i, v.j, v.k],
            "defect": v.defect,
        })),
        "checked_triples": sc.checked_triples,
        "norm_diameter": sc.norm_diameter,
        "cosine": Value::Null,
    });
    if !sc.is_sc {
        let v = sc.worst_violation.expect("a failed check names a triple");
        return Ok(Outcome {
            report,
            failure: Some(format!(
                "curve is not self-contracted: triple ({}, {}, {}) has defect {:e}",
                v.i, v.j, v.k, v.defect
            )),
        });
    }
    let alpha0 = norm.alpha0(ALPHA0_DEFAULT_RESOLUTION)?;
    let cos = triple_cosine_check(&curve, &norm, alpha0)?;
    report["cosine"] = to_value(&cos);
    let failure = (!cos.holds).then(|| format!("triple cosine {} is below the bound {}", cos.min_cosine, cos.bound));
    Ok(Outcome { report, failure })
}

// ---------------------------------------------------------------- certify

#[derive(Args, Serialize, Debug)]
pub struct BatchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    /// First greedy seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of consecutive seeds.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Vertices per greedy curve.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Initial greedy step.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Certify this curve CSV instead of generated ones.
    #[arg(long, conflicts_with_all = ["seed", "count"])]
    pub curve: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grids: ConstantGrids,
}

#[derive(Args, Serialize, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub batch: BatchArgs,
    /// Stride for non-consecutive pairs in the width decrement check.
    #[arg(long, default_value_t = 3)]
    pub stride: usize,
}

fn batch_curves(args: &BatchArgs, norm: &NormModel) -> CliResult<Vec<(Option<u64>, TimedPolyline)>> {
    match &args.curve {
        Some(path) => Ok(vec![(None, read_curve(path)?)]),
        None => (0..args.count)
            .into_par_iter()
            .map(|k| {
                let seed = args.seed + k;
                Ok((Some(seed), generate_greedy(norm, args.n, args.step, seed)?.curve))
            })
            .collect(),
    }
}

fn summary_failure(s: &PairSummary) -> Option<String> {
    (!s.all_hold()).then(|| {
        format!(
            "{} CL20, {} CL21, {} tail1 failures, {} pairs with both far components occupied",
            s.cl20_failures, s.cl21_failures, s.tail1_failures, s.both_components
        )
    })
}

pub fn certify(args: &CertifyArgs) -> CliResult<Outcome> {
    let norm = norm_model(&args.batch.norm.norm)?;
    let b = bundle(&norm, args.batch.grids.alpha_grid, args.batch.grids.kappa_grid)?;
    let curves = batch_curves(&args.batch, &norm)?;
    let stride = args.stride.max(1);
    let rows: Vec<CliResult<(Value, Vec<String>)>> = curves
        .par_iter()
        .map(|(seed, c)| {
            let pairs = certify_pairs(&norm, c, &b)?;
            let dec = width_decrement_check(c, &norm, &b, stride)?;
            let lb = length_bound_report(c, &norm, &b)?;
            let mut fails = Vec::new();
            if let Some(f) = summary_failure(&pairs) {
                fails.push(f);
            }
            if !dec.violations.is_empty() {
                fails.push(format!("{} width decrement violations", dec.violations.len()));
            }
            if !lb.telescope_ok {
                fails.push(format!("telescoping residual {:e}", lb.telescope_residual));
            }
            let row = json!({
                "seed": seed,
                "n": c.len(),
                "length": lb.length,
                "diam": lb.diam,
                "mean_width": lb.mean_width,
                "ratio": lb.ratio,
                "min_decrement_slack": dec.min_slack,
                "best_c0": dec.best_c0,
                "decrement_pairs": dec.pairs_checked,
                "telescope_residual": lb.telescope_residual,
                "pairs": to_value(&pairs),
            });
            Ok((row, fails))
        })
        .collect();
    let mut report = bundle_fields(&norm, &b);
    let mut list = Vec::with_capacity(rows.len());
    let mut failures = Vec::new();
    for ((seed, _), row) in curves.iter().zip(rows) {
        let (row, fails) = row?;
        let label = seed.map_or("curve".to_string(), |s| format!("seed {s}"));
        failures.extend(fails.into_iter().map(|f| format!("{label}: {f}")));
        list.push(row);
    }
    report.insert("curves".into(), Value::Array(list));
    Ok(Outcome {
        report: Value::Object(report),
        failure: (!failures.is_empty()).then(|| failures.join("; ")),
    })
}

// ---------------------------------------------------------------- bound-report

#[derive(Args, Serialize, Debug)]
pub struct BoundReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub batch: BatchArgs,
}

pub fn bound_report(args: &BoundReportArgs) -> CliResult<Outcome> {
    let norm = norm_model(&args.batch.norm.norm)?;
    let b = bundle(&norm, args.batch.grids.alpha_grid, args.batch.grids.kappa_grid)?;
    let curves = batch_curves(&args.batch, &norm)?;
    let rows: Vec<CliResult<Value>> = curves
        .par_iter()
        .map(|(seed, c)| {
            let lb = length_bound_report(c, &norm, &b)?;
            let mut row = json!({ "seed": seed, "n": c.len() });
            if let Value::Object(fields) = to_value(&lb) {
                row.as_object_mut().unwrap().extend(fields);
            }
            Ok(row)
        })
        .collect();
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;
    let max_ratio = rows.iter().filter_map(|r| r["ratio"].as_f64()).fold(0.0, f64::max);
    let failure = rows.iter().any(|r| r["telescope_ok"] != json!(true)).then(|| "telescoping check failed".to_string());
    let mut report = bundle_fields(&norm, &b);
    report.insert("max_ratio".into(), json!(max_ratio));
    report.insert("curves".into(), Value::Array(rows));
    Ok(Outcome { report: Value::Object(report), failure })
}

// ---------------------------------------------------------------- plot

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    /// Unit sphere of the norm.
    Ball,
    /// A curve CSV with its hull and enclosing ball.
    Curve,
    /// Bisector of a segment.
    Bisector,
}

#[derive(Args, Serialize, Debug)]
pub struct PlotArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// Curve CSV (kind `curve`).
    #[arg(long, required_if_eq("kind", "curve"))]
    pub curve: Option<PathBuf>,
    /// First endpoint (kind `bisector`).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, required_if_eq("kind", "bisector"))]
    pub a: Option<[f64; 2]>,
    /// Second endpoint (kind `bisector`).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, required_if_eq("kind", "bisector"))]
    pub b: Option<[f64; 2]>,
    /// Trace samples (kind `bisector`).
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Grid for the κ strip (kind `bisector`).
    #[arg(long, default_value_t = KAPPA_MIN_GRID)]
    pub kappa_grid: usize,
    /// SVG output.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn plot(args: &PlotArgs) -> CliResult<Outcome> {
    let norm = norm_model(&args.norm.norm)?;
    let title = norm.spec().to_string();
    let text = match args.kind {
        PlotKind::Ball => svg::ball_figure(&norm, &title),
        PlotKind::Curve => {
            let path = args.curve.as_ref().ok_or_else(|| CliError::Input("--curve is required".into()))?;
            svg::curve_figure(&norm, &read_curve(path)?, &title)
        }
        PlotKind::Bisector => {
            let (a, b) = args.a.zip(args.b).ok_or_else(|| CliError::Input("--a and --b are required".into()))?;
            let seg = Segment::new(&norm, vec2(a), vec2(b))?;
            let trace = trace_bisector(&norm, &seg, args.samples)?;
            let kappa = kappa_estimate(&norm, args.kappa_grid, args.kappa_grid)?.kappa;
            svg::bisector_figure(&norm, &trace, kappa, &title)
        }
    };
    write_text(&args.out, &text)?;
    Ok(Outcome::ok(json!({
        "norm": title,
        "kind": args.kind,
        "out": args.out.display().to_string(),
        "bytes": text.len(),
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_and_matrix_parsing() {
        assert_eq!(parse_point("-1.5, 2").unwrap(), [-1.5, 2.0]);
        assert!(parse_point("1").is_err());
        assert!(parse_point("1,inf").is_err());
        assert_eq!(parse_matrix("1,0,0,3").unwrap(), [1.0, 0.0, 0.0, 3.0]);
        assert!(parse_matrix("1,0,0").is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [10.0, 30.0, 100.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 2.0 * x.powf(-1.0)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&xs, &[1.0, 0.0, 1.0]), None);
    }
}
