//! Text formats: CSV for curves and density maps, one-partition-per-line
//! chains, and plain SVG renderings.

use std::fmt::Write as _;

use crate::dimer::MatchingSequence;
use crate::error::{DimerError, FormatError};
use crate::lattice::LatticeSpec;
use crate::limitshape::{CurveSample, DensityCell, FrozenBoundaryCurve};
use crate::partitions::Partition;

pub const CURVE_HEADER: &str = "t,chi,kappa,residual";
pub const DENSITY_HEADER: &str = "chi,kappa,density";

pub fn curve_csv(curve: &FrozenBoundaryCurve) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for s in &curve.samples {
        let _ = writeln!(out, "{},{},{},{}", s.t, s.chi, s.kappa, s.residual);
    }
    out
}

fn rows<'a>(text: &'a str, header: &'static str) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>, FormatError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let found = lines.next().map(|(_, l)| l.trim()).unwrap_or("");
    if found != header {
        return Err(FormatError::Header { expected: header, found: found.to_string() });
    }
    Ok(lines.map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect())))
}

fn floats<const K: usize>(line: usize, fields: &[&str]) -> Result<[f64; K], FormatError> {
    if fields.len() != K {
        return Err(FormatError::Field { line, msg: format!("expected {K} fields, got {}", fields.len()) });
    }
    let mut out = [0.0; K];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse().map_err(|_| FormatError::Field { line, msg: format!("not a number: {f:?}") })?;
    }
    Ok(out)
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveSample>, FormatError> {
    rows(text, CURVE_HEADER)?
        .map(|(line, f)| {
            let [t, chi, kappa, residual] = floats::<4>(line, &f)?;
            Ok(CurveSample { t, chi, kappa, residual })
        })
        .collect()
}

pub fn density_csv(cells: &[DensityCell]) -> String {
    let mut out = format!("{DENSITY_HEADER}\n");
    for c in cells {
        let _ = writeln!(out, "{},{},{}", c.chi, c.kappa, c.density);
    }
    out
}

pub fn parse_density_csv(text: &str) -> Result<Vec<DensityCell>, FormatError> {
    rows(text, DENSITY_HEADER)?
        .map(|(line, f)| {
            let [chi, kappa, density] = floats::<3>(line, &f)?;
            Ok(DensityCell { chi, kappa, density })
        })
        .collect()
}

/// Inverse of [`MatchingSequence::to_text`].
pub fn parse_sequence(spec: &LatticeSpec, text: &str) -> Result<MatchingSequence, DimerError> {
    let mut mu = Vec::new();
    let mut nu = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let p: Partition = line.parse()?;
        if k % 2 == 0 {
            mu.push(p);
        } else {
            nu.push(p);
        }
    }
    MatchingSequence::from_rows(spec, mu, nu)
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = (x - self.x0) / (self.x1 - self.x0) * self.w;
        let py = self.h - (y - self.y0) / (self.y1 - self.y0) * self.h;
        (px, py)
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Curves in the (χ, κ) plane, one polyline per connected arc.
pub fn curves_svg(curves: &[FrozenBoundaryCurve], width: u32, height: u32) -> String {
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, _) in curves.iter().flat_map(|c| c.points()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    let pad = 0.05 * (x1 - x0).max(1e-9);
    let frame = Frame { x0: x0 - pad, x1: x1 + pad, y0: -0.05, y1: 1.05, w: width as f64, h: height as f64 };
    let mut out = svg_open(width, height);
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for seg in &c.segments {
            let pts: Vec<String> = c.samples[seg.clone()]
                .iter()
                .map(|s| {
                    let (px, py) = frame.map(s.chi, s.kappa);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Grey-scale heat map of a density grid of `w × h` cells.
pub fn density_svg(cells: &[DensityCell], w: usize, h: usize, cell_px: u32) -> String {
    let (width, height) = (w as u32 * cell_px, h as u32 * cell_px);
    let mut out = svg_open(width, height);
    for (k, c) in cells.iter().enumerate() {
        let (i, j) = (k % w, k / w);
        let g = (255.0 * (1.0 - c.density.clamp(0.0, 1.0))).round() as u8;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{cell_px}" height="{cell_px}" fill="rgb({g},{g},{g})"/>"#,
            i as u32 * cell_px,
            (h - 1 - j) as u32 * cell_px
        );
    }
    out.push_str("</svg>\n");
    out
}

fn svg_open(width: u32, height: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}
