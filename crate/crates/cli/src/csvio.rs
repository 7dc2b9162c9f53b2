//! Curve and trace CSV files.
//!
//! Curves use the header `t,x,y`, traces `t,zx,zy,residual`. Floats are
//! written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use normplane::bisector::BisectorTrace;
use normplane::curves::TimedPolyline;
use normplane::Vec2;

use crate::error::{CliError, CliResult};

const CURVE_HEADER: [&str; 3] = ["t", "x", "y"];

pub fn read_curve(path: &Path) -> CliResult<TimedPolyline> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_curve(&bytes).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_curve(bytes: &[u8]) -> CliResult<TimedPolyline> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(bytes);
    let header = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("line 1: {e}")))?
        .clone();
    if header.iter().map(str::trim).ne(CURVE_HEADER) {
        return Err(CliError::Input(format!(
            "line 1: expected header `t,x,y`, found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut params = Vec::new();
    let mut vertices = Vec::new();
    let mut lines = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Input(format!("line {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(CliError::Input(format!("line {line}: expected 3 fields, found {}", rec.len())));
        }
        let mut vals = [0.0; 3];
        for (k, field) in rec.iter().enumerate() {
            vals[k] = field
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("line {line}: `{field}` is not a finite number")))?;
        }
        params.push(vals[0]);
        vertices.push(Vec2::new(vals[1], vals[2]));
        lines.push(line);
    }
    if vertices.is_empty() {
        return Err(CliError::Input("curve file has no vertices".into()));
    }
    if let Some(k) = params.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(CliError::Input(format!("line {}: t must increase strictly", lines[k + 1])));
    }
    if let Some(k) = vertices.windows(2).position(|w| w[0] == w[1]) {
        return Err(CliError::Input(format!("line {}: vertex repeats the previous one", lines[k + 1])));
    }
    TimedPolyline::new(vertices, params).map_err(|e| CliError::Input(e.to_string()))
}

pub fn curve_csv(curve: &TimedPolyline) -> String {
    let mut s = String::from("t,x,y\n");
    for (t, v) in curve.params().iter().zip(curve.vertices()) {
        writeln!(s, "{t:.16e},{:.16e},{:.16e}", v.x, v.y).unwrap();
    }
    s
}

pub fn trace_csv(trace: &BisectorTrace) -> String {
    let mut s = String::from("t,zx,zy,residual\n");
    for p in &trace.samples {
        writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", p.t, p.z.x, p.z.y, p.residual).unwrap();
    }
    s
}
