//! Curve exchange as CSV and rendering as SVG.
//!
//! CSV columns are `u,x,y,nu_x,nu_y`, optionally followed by `beta,ell` and
//! `t`. Numbers are written in the shortest form that parses back to the
//! same `f64`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::curve::{grid_point, LegendreCurvature, LegendreCurve};
use crate::{FlowError, Result, Vec2};

const BASE_COLUMNS: [&str; 5] = ["u", "x", "y", "nu_x", "nu_y"];
/// Tolerance on the `u` column against the uniform grid.
const GRID_TOL: f64 = 1e-9;

fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_curve_csv<W: Write>(
    out: W,
    curve: &LegendreCurve,
    curvature: Option<&LegendreCurvature>,
    t: Option<f64>,
) -> Result<()> {
    let len = curve.grid_size();
    if let Some(k) = curvature {
        if k.beta.len() != len || k.ell.len() != len {
            return Err(FlowError::LengthMismatch { what: "curvature samples", got: k.beta.len(), expected: len });
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = BASE_COLUMNS.to_vec();
    if curvature.is_some() {
        header.extend(["beta", "ell"]);
    }
    if t.is_some() {
        header.push("t");
    }
    w.write_record(&header)?;
    for (j, (p, nu)) in curve.positions().iter().zip(curve.normals()).enumerate() {
        let mut row = vec![num(grid_point(j, len)), num(p.x), num(p.y), num(nu.x), num(nu.y)];
        if let Some(k) = curvature {
            row.push(num(k.beta[j]));
            row.push(num(k.ell[j]));
        }
        if let Some(t) = t {
            row.push(num(t));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_csv_file(
    path: &Path,
    curve: &LegendreCurve,
    curvature: Option<&LegendreCurvature>,
    t: Option<f64>,
) -> Result<()> {
    write_curve_csv(File::create(path)?, curve, curvature, t)
}

/// A curve read back from CSV, with whatever optional columns were present.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub curve: LegendreCurve,
    pub curvature: Option<LegendreCurvature>,
    pub t: Option<f64>,
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<CurveTable> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let mut base = [0usize; 5];
    for (slot, name) in base.iter_mut().zip(BASE_COLUMNS) {
        *slot = col(name).ok_or_else(|| FlowError::Format(format!("missing column `{name}`")))?;
    }
    let extra = match (col("beta"), col("ell")) {
        (Some(b), Some(l)) => Some((b, l)),
        (None, None) => None,
        _ => return Err(FlowError::Format("columns `beta` and `ell` must appear together".into())),
    };
    let t_col = col("t");
    let mut us = Vec::new();
    let (mut positions, mut normals) = (Vec::new(), Vec::new());
    let (mut beta, mut ell) = (Vec::new(), Vec::new());
    let mut t = None;
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            let s = rec.get(i).ok_or_else(|| FlowError::Format(format!("row {}: too few fields", line + 2)))?;
            s.trim()
                .parse::<f64>()
                .map_err(|_| FlowError::Format(format!("row {}: `{s}` is not a number", line + 2)))
        };
        us.push(field(base[0])?);
        positions.push(Vec2::new(field(base[1])?, field(base[2])?));
        normals.push(Vec2::new(field(base[3])?, field(base[4])?));
        if let Some((b, l)) = extra {
            beta.push(field(b)?);
            ell.push(field(l)?);
        }
        if let Some(c) = t_col {
            let v = field(c)?;
            match t {
                None => t = Some(v),
                Some(prev) if prev != v => {
                    return Err(FlowError::Format(format!("row {}: mixed times in one curve file", line + 2)))
                }
                _ => {}
            }
        }
    }
    let len = us.len();
    for (j, u) in us.iter().enumerate() {
        if (u - grid_point(j, len)).abs() > GRID_TOL {
            return Err(FlowError::Format(format!(
                "row {}: u = {u} is not on the uniform grid 2πj/{len}",
                j + 2
            )));
        }
    }
    let curve = LegendreCurve::new(positions, normals)?;
    Ok(CurveTable { curve, curvature: extra.map(|_| LegendreCurvature { ell, beta }), t })
}

pub fn read_curve_csv_file(path: &Path) -> Result<CurveTable> {
    read_curve_csv(File::open(path)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub stroke: String,
    /// Longer side of the drawing in user units.
    pub size: f64,
    /// Stroke width as a fraction of the longer side of the bounding box.
    pub stroke_fraction: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { stroke: "#1f4e99".into(), size: 1000.0, stroke_fraction: 0.004 }
    }
}

/// One closed path through `points` in order, fitted to a viewBox with a 5%
/// margin. The `y` axis points up as in the plane.
pub fn render_svg(points: &[Vec2], style: &SvgStyle) -> Result<String> {
    if points.len() < 3 {
        return Err(FlowError::GridTooCoarse { got: points.len(), min: 3 });
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(FlowError::InvalidParameter("degenerate bounding box: the curve is a point".into()));
    }
    let margin = 0.05 * extent;
    let k = style.size / (extent + 2.0 * margin);
    let width = (hi.x - lo.x + 2.0 * margin) * k;
    let height = (hi.y - lo.y + 2.0 * margin) * k;
    let map = |p: Vec2| ((p.x - lo.x + margin) * k, (hi.y - p.y + margin) * k);
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = map(*p);
        let _ = write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    let stroke = style.stroke_fraction * extent * k;
    Ok(format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {width:.3} {height:.3}\" width=\"{width:.0}\" height=\"{height:.0}\">\n\
         <path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{stroke:.3}\" stroke-linejoin=\"round\"/>\n\
         </svg>\n",
        style.stroke
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curvature_from_samples;
    use crate::self_similar::SelfSimilarProfile;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let p = SelfSimilarProfile::new(1, 3, 1.0, 2.0).unwrap();
        let curve = p.sample(64).unwrap();
        let k = curvature_from_samples(&curve).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &curve, Some(&k), Some(0.5)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("u,x,y,nu_x,nu_y,beta,ell,t\n"));
        let back = read_curve_csv(buf.as_slice()).unwrap();
        assert_eq!(back.curve, curve);
        assert_eq!(back.curvature.unwrap(), k);
        assert_eq!(back.t, Some(0.5));
    }

    #[test]
    fn csv_minimal_columns() {
        let curve = SelfSimilarProfile::new(1, 0, 1.0, 0.0).unwrap().sample(16).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &curve, None, None).unwrap();
        let back = read_curve_csv(buf.as_slice()).unwrap();
        assert!(back.curvature.is_none() && back.t.is_none());
        assert_eq!(back.curve, curve);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        let bad = "u,x,y,nu_x\n0,1,2,3\n";
        assert!(matches!(read_curve_csv(bad.as_bytes()), Err(FlowError::Format(_))));
        let bad = "u,x,y,nu_x,nu_y\n0,1,2,0,abc\n";
        assert!(matches!(read_curve_csv(bad.as_bytes()), Err(FlowError::Format(_))));
        let off_grid = "u,x,y,nu_x,nu_y\n0,0,0,0,-1\n1,0,0,1,0\n2,0,0,0,1\n3,0,0,-1,0\n";
        assert!(matches!(read_curve_csv(off_grid.as_bytes()), Err(FlowError::Format(_))));
    }

    #[test]
    fn circle_svg_is_square_with_one_path() {
        let c = SelfSimilarProfile::new(1, 0, 2.0, 0.0).unwrap().sample(256).unwrap();
        let svg = render_svg(c.positions(), &SvgStyle::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("viewBox=\"0 0 1000.000 1000.000\""));
        assert_eq!(svg, render_svg(c.positions(), &SvgStyle::default()).unwrap());
    }

    #[test]
    fn point_curve_is_rejected() {
        let pts = vec![Vec2::new(1.0, 1.0); 10];
        assert!(render_svg(&pts, &SvgStyle::default()).is_err());
    }
}
