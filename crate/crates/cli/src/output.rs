//! Artifact writers. Floats in CSV carry 17 significant digits; JSON objects
//! are emitted with sorted keys.

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use subspec_core::spectral::{GridBox, PseudospectrumGrid, Side};
use subspec_core::{Complex64, OperatorMatrix, SpectralRegion};

pub const CONTOUR_LEVELS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const LEVEL_COLOURS: [&str; 3] = ["#1f77b4", "#2ca02c", "#d62728"];
const CANVAS: f64 = 800.0;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn params(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

/// `{"kind": ..., "params": {...}}` for every region variant.
pub fn region_json(region: &SpectralRegion) -> Value {
    let p = match region {
        SpectralRegion::HalfPlane { c, side, closed } => params(vec![
            ("c", json!(c)),
            ("side", json!(if *side == Side::Left { "left" } else { "right" })),
            ("closed", json!(closed)),
        ]),
        SpectralRegion::Strip { a, b, left_closed, right_closed } => params(vec![
            ("a", json!(a)),
            ("b", json!(b)),
            ("left_closed", json!(left_closed)),
            ("right_closed", json!(right_closed)),
        ]),
        SpectralRegion::Disk { center, radius, closed } => params(vec![
            ("center", complex(*center)),
            ("radius", json!(radius)),
            ("closed", json!(closed)),
        ]),
        SpectralRegion::Circle { center, radius } => {
            params(vec![("center", complex(*center)), ("radius", json!(radius))])
        }
        SpectralRegion::Annulus { center, r_in, r_out } => params(vec![
            ("center", complex(*center)),
            ("r_in", json!(r_in)),
            ("r_out", json!(r_out)),
        ]),
        SpectralRegion::Crescent {
            outer_center,
            outer_radius,
            outer_closed,
            inner_center,
            inner_radius,
            inner_closed,
        } => params(vec![
            ("outer_center", complex(*outer_center)),
            ("outer_radius", json!(outer_radius)),
            ("outer_closed", json!(outer_closed)),
            ("inner_center", complex(*inner_center)),
            ("inner_radius", json!(inner_radius)),
            ("inner_closed", json!(inner_closed)),
        ]),
        SpectralRegion::Point(z) => params(vec![("at", complex(*z))]),
        SpectralRegion::Union(parts) => params(vec![("parts", Value::Array(parts.iter().map(region_json).collect()))]),
        SpectralRegion::Cloud { points, resolution } => params(vec![
            ("points", Value::Array(points.iter().map(|z| complex(*z)).collect())),
            ("resolution", json!(resolution)),
        ]),
    };
    json!({ "kind": region.kind_name(), "params": p })
}

pub fn write_text(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

pub fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn boundary_csv(points: &[Complex64]) -> String {
    let mut s = String::from("re,im\n");
    for z in points {
        let _ = writeln!(s, "{},{}", num(z.re), num(z.im));
    }
    s
}

/// Row-major `m,k,re,im`.
pub fn matrix_csv(a: &OperatorMatrix) -> String {
    let n = a.dim();
    let mut s = String::with_capacity(64 * n * n + 16);
    s.push_str("m,k,re,im\n");
    for m in 0..n {
        for k in 0..n {
            let v = a.entry(m, k);
            let _ = writeln!(s, "{m},{k},{},{}", num(v.re), num(v.im));
        }
    }
    s
}

pub fn trace_csv(values: &[(usize, f64)]) -> String {
    let mut s = String::from("n,r_n\n");
    for (n, r) in values {
        let _ = writeln!(s, "{n},{}", num(*r));
    }
    s
}

/// `re,im,sigma_min`, rows in `y` outer, `x` inner.
pub fn grid_csv(grid: &PseudospectrumGrid) -> String {
    let mut s = String::with_capacity(80 * grid.values.len() + 20);
    s.push_str("re,im,sigma_min\n");
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let z = grid.point(i, j);
            let _ = writeln!(s, "{},{},{}", num(z.re), num(z.im), num(grid.value(i, j)));
        }
    }
    s
}

/// Level-set segments of the grid by marching squares, with linear
/// interpolation along cell edges. Saddle cells are split by the cell mean.
pub fn contour_segments(grid: &PseudospectrumGrid, level: f64) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::new();
    if grid.nx < 2 || grid.ny < 2 {
        return out;
    }
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v: Vec<f64> = corners.iter().map(|&(a, b)| grid.value(a, b)).collect();
            let p: Vec<Complex64> = corners.iter().map(|&(a, b)| grid.point(a, b)).collect();
            let cross = |e: usize| -> Option<Complex64> {
                let (a, b) = (e, (e + 1) % 4);
                if (v[a] <= level) == (v[b] <= level) {
                    return None;
                }
                let s = (level - v[a]) / (v[b] - v[a]);
                Some(p[a] + (p[b] - p[a]) * s)
            };
            let hits: Vec<(usize, Complex64)> = (0..4).filter_map(|e| cross(e).map(|z| (e, z))).collect();
            match hits.len() {
                2 => out.push((hits[0].1, hits[1].1)),
                4 => {
                    let centre_below = v.iter().sum::<f64>() / 4.0 <= level;
                    let below0 = v[0] <= level;
                    if centre_below == below0 {
                        out.push((hits[0].1, hits[1].1));
                        out.push((hits[2].1, hits[3].1));
                    } else {
                        out.push((hits[3].1, hits[0].1));
                        out.push((hits[1].1, hits[2].1));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

struct Frame {
    bounds: GridBox,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(bounds: GridBox) -> Self {
        let (dx, dy) = ((bounds.x1 - bounds.x0).max(1e-300), (bounds.y1 - bounds.y0).max(1e-300));
        let scale = CANVAS / dx.max(dy);
        Self { bounds, width: dx * scale, height: dy * scale }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let b = self.bounds;
        let x = (z.re - b.x0) / (b.x1 - b.x0).max(1e-300) * self.width;
        let y = (b.y1 - z.im) / (b.y1 - b.y0).max(1e-300) * self.height;
        (x, y)
    }

    fn inside(&self, z: Complex64) -> bool {
        let b = self.bounds;
        z.re >= b.x0 && z.re <= b.x1 && z.im >= b.y0 && z.im <= b.y1
    }
}

/// Contours at [`CONTOUR_LEVELS`] with the closed-form boundary overlaid as
/// dashed polylines (one per connected run of in-box samples).
pub fn contour_svg(grid: &PseudospectrumGrid, overlay: Option<&SpectralRegion>) -> String {
    let frame = Frame::new(grid.bounds);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#,
        w = frame.width,
        h = frame.height
    );
    let _ = writeln!(
        s,
        r#"<path d="M0,0 L{w:.3},0 L{w:.3},{h:.3} L0,{h:.3} Z" fill="none" stroke="black" stroke-width="1"/>"#,
        w = frame.width,
        h = frame.height
    );
    for (level, colour) in CONTOUR_LEVELS.iter().zip(LEVEL_COLOURS) {
        let mut d = String::new();
        for (a, b) in contour_segments(grid, *level) {
            let (pa, pb) = (frame.map(a), frame.map(b));
            let _ = write!(d, "M{:.3},{:.3} L{:.3},{:.3} ", pa.0, pa.1, pb.0, pb.1);
        }
        let _ = writeln!(
            s,
            r#"<path data-eps="{level:e}" d="{}" fill="none" stroke="{colour}" stroke-width="1"/>"#,
            d.trim_end()
        );
    }
    if let Some(region) = overlay {
        let points = region.boundary_sample(512);
        let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        let closed = region.is_bounded() && !matches!(region, SpectralRegion::Point(_) | SpectralRegion::Cloud { .. });
        for z in &points {
            if frame.inside(*z) {
                runs.last_mut().unwrap().push(frame.map(*z));
            } else if !runs.last().unwrap().is_empty() {
                runs.push(Vec::new());
            }
        }
        for run in runs.iter().filter(|r| r.len() >= 2) {
            let mut pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            if closed && runs.len() == 1 && run.len() == points.len() {
                pts.push(pts[0].clone());
            }
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1" stroke-dasharray="4 3"/>"#,
                pts.join(" ")
            );
        }
        for z in points.iter().filter(|z| frame.inside(**z)) {
            if matches!(region, SpectralRegion::Point(_)) {
                let (x, y) = frame.map(*z);
                let _ = writeln!(
                    s,
                    r#"<path d="M{:.3},{:.3} L{:.3},{:.3} M{:.3},{:.3} L{:.3},{:.3}" stroke="black" stroke-width="1"/>"#,
                    x - 4.0,
                    y,
                    x + 4.0,
                    y,
                    x,
                    y - 4.0,
                    x,
                    y + 4.0
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
