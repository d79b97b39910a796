//! Standalone SVG figures: curves as polylines or polygons, with an optional
//! raster of owned squares underneath.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write;
use std::path::Path;

use crate::curve::PathCurve;
use crate::erosion::Snapshot;
use crate::error::Result;
use crate::lattice::CellId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveStyle {
    pub stroke: String,
    /// Stroke width in thousandths of the larger side of the view box.
    pub width: f64,
    pub fill: Option<String>,
}

impl CurveStyle {
    pub fn line(stroke: &str) -> Self {
        CurveStyle { stroke: stroke.into(), width: 2.0, fill: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StyledCurve {
    pub curve: PathCurve,
    pub style: CurveStyle,
}

/// Filled squares of side `mesh` at `origin + mesh·(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRaster {
    pub mesh: f64,
    pub origin: Complex64,
    pub cells: Vec<(CellId, String)>,
}

pub const PALETTE: [&str; 6] = ["#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

impl CellRaster {
    /// Owned squares of a snapshot, one palette colour per droplet.
    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        let cells = snapshot
            .droplets
            .iter()
            .enumerate()
            .flat_map(|(k, d)| {
                let colour = PALETTE[k % PALETTE.len()].to_string();
                d.cell_list().into_iter().map(move |c| (c, colour.clone()))
            })
            .collect();
        CellRaster { mesh: snapshot.mesh, origin: snapshot.surface.origin(), cells }
    }
}

/// Formats `x` with 9 significant digits and no trailing zeros.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (8 - mag).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub fn render_svg(curves: &[StyledCurve], raster: Option<&CellRaster>) -> String {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |z: Complex64| {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    };
    for c in curves {
        c.curve.points.iter().for_each(|&z| grow(z));
    }
    if let Some(r) = raster {
        for (c, _) in &r.cells {
            let z = r.origin + Complex64::new(c.i as f64, c.j as f64) * r.mesh;
            grow(z);
            grow(z + Complex64::new(r.mesh, r.mesh));
        }
    }
    if !lo.re.is_finite() {
        lo = Complex64::new(0.0, 0.0);
        hi = Complex64::new(1.0, 1.0);
    }
    let side = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
    let pad = 0.03 * side;
    let (x0, y0) = (lo.re - pad, -(hi.im + pad));
    let (w, h) = (hi.re - lo.re + 2.0 * pad, hi.im - lo.im + 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}" width="800" height="{}">"#,
        sig9(x0),
        sig9(y0),
        sig9(w),
        sig9(h),
        sig9((800.0 * h / w).round())
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
    if let Some(r) = raster {
        for (c, colour) in &r.cells {
            let z = r.origin + Complex64::new(c.i as f64, c.j as f64) * r.mesh;
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{m}" height="{m}" fill="{colour}" fill-opacity="0.35"/>"#,
                sig9(z.re),
                sig9(z.im),
                m = sig9(r.mesh)
            );
        }
    }
    for c in curves {
        let pts: Vec<String> = c.curve.points.iter().map(|z| format!("{},{}", sig9(z.re), sig9(z.im))).collect();
        let tag = if c.curve.closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            out,
            r#"<{tag} points="{}" fill="{}" stroke="{}" stroke-width="{}"/>"#,
            pts.join(" "),
            c.style.fill.as_deref().unwrap_or("none"),
            c.style.stroke,
            sig9(c.style.width * side / 1000.0)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

pub fn emit_svg(curves: &[StyledCurve], raster: Option<&CellRaster>, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(curves, raster))?;
    Ok(())
}
