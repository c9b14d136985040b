//! Cartesian picture of 2×2 correlations and region outlines.
//!
//! Valid correlations fill the square `|x| + |y| ≤ 1`, where
//! `x = p(1|1) + p(1|2) − 1` and `y = p(1|1) − p(1|2)`. Relabeling inputs,
//! outputs or both maps `(x, y)` to `(x, −y)`, `(−x, −y)` and `(−x, y)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::ChannelSpec;
use crate::compat::{band_wedge, ThresholdModel};
use crate::correlation::Correlation;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
}

impl CartesianPoint {
    pub fn new(x: f64, y: f64) -> Self {
        CartesianPoint { x, y }
    }

    pub fn in_square(&self, tol: f64) -> bool {
        self.x.abs() + self.y.abs() <= 1.0 + tol
    }
}

/// Closed polyline: the first point is repeated at the end.
pub type Polyline = Vec<CartesianPoint>;

pub fn to_cartesian(p: &Correlation) -> Result<CartesianPoint> {
    p.require_binary()?;
    let (x, y) = p.xy();
    Ok(CartesianPoint { x, y })
}

pub fn from_cartesian(pt: CartesianPoint) -> Result<Correlation> {
    if !pt.in_square(1e-12) {
        return Err(Error::InvalidCorrelation(format!(
            "point ({}, {}) lies outside the square |x| + |y| ≤ 1",
            pt.x, pt.y
        )));
    }
    Correlation::from_xy(pt.x, pt.y)
}

/// The point and its images under the three relabelings.
pub fn symmetry_orbit(pt: CartesianPoint) -> [CartesianPoint; 4] {
    let CartesianPoint { x, y } = pt;
    [
        CartesianPoint::new(x, y),
        CartesianPoint::new(x, -y),
        CartesianPoint::new(-x, y),
        CartesianPoint::new(-x, -y),
    ]
}

/// Half-plane `a x + b y ≤ c`.
#[derive(Clone, Copy, Debug)]
struct HalfPlane {
    a: f64,
    b: f64,
    c: f64,
}

impl HalfPlane {
    fn slack(&self, p: (f64, f64)) -> f64 {
        self.c - self.a * p.0 - self.b * p.1
    }
}

fn clip(poly: &[(f64, f64)], h: HalfPlane) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    for k in 0..poly.len() {
        let cur = poly[k];
        let next = poly[(k + 1) % poly.len()];
        let (sc, sn) = (h.slack(cur), h.slack(next));
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc >= 0.0) != (sn >= 0.0) {
            let t = sc / (sc - sn);
            out.push((cur.0 + t * (next.0 - cur.0), cur.1 + t * (next.1 - cur.1)));
        }
    }
    out
}

fn clip_all(mut poly: Vec<(f64, f64)>, planes: &[HalfPlane]) -> Vec<(f64, f64)> {
    for &h in planes {
        if poly.is_empty() {
            break;
        }
        poly = clip(&poly, h);
    }
    poly.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    while poly.len() > 1 {
        let (f, l) = (poly[0], poly[poly.len() - 1]);
        if (f.0 - l.0).abs() < 1e-15 && (f.1 - l.1).abs() < 1e-15 {
            poly.pop();
        } else {
            break;
        }
    }
    poly
}

/// Closes the polygon and inserts points so no edge is longer than `step`.
fn densify_closed(poly: &[(f64, f64)], step: f64) -> Polyline {
    let mut out = Vec::new();
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let pieces = ((len / step).ceil() as usize).max(1);
        for s in 0..pieces {
            let t = s as f64 / pieces as f64;
            out.push(CartesianPoint::new(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    if let Some(&first) = out.first() {
        out.push(first);
    }
    out
}

fn diamond() -> Vec<(f64, f64)> {
    vec![(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
}

/// The square cut by `|y| ≤ band` and `|y| + r|x| ≤ r`.
fn band_wedge_polygon(band: Option<f64>, wedge: Option<f64>) -> Vec<(f64, f64)> {
    let mut planes = Vec::new();
    if let Some(b) = band {
        planes.push(HalfPlane { a: 0.0, b: 1.0, c: b });
        planes.push(HalfPlane { a: 0.0, b: -1.0, c: b });
    }
    if let Some(r) = wedge {
        for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            planes.push(HalfPlane { a: sx * r, b: sy, c: r });
        }
    }
    clip_all(diamond(), &planes)
}

/// The amplitude-damping region: the ellipse `x²/(1−λ) + y²/λ ≤ 1` for
/// `|x| ≤ 1−λ`, where it touches the square edges, and the full square beyond.
fn amp_damp_polygon(lambda: f64, vertices: usize) -> Vec<(f64, f64)> {
    let (ax, ay) = ((1.0 - lambda).sqrt(), lambda.sqrt());
    let t0 = ax.clamp(0.0, 1.0).acos();
    let half = (vertices / 2).max(2);
    let arc = |from: f64, to: f64| {
        (0..=half).map(move |k| {
            let t = from + (to - from) * k as f64 / half as f64;
            (ax * t.cos(), ay * t.sin())
        })
    };
    let pi = std::f64::consts::PI;
    let mut poly = vec![(1.0, 0.0)];
    poly.extend(arc(t0, pi - t0));
    poly.push((-1.0, 0.0));
    poly.extend(arc(pi + t0, 2.0 * pi - t0));
    clip_all(poly, &[])
}

/// Furthest compatible point from the origin along direction `theta`.
fn radial_extent(model: &ThresholdModel, theta: f64) -> Result<CartesianPoint> {
    let (c, s) = (theta.cos(), theta.sin());
    let edge = 1.0 / (c.abs() + s.abs());
    let inside = |r: f64| -> Result<bool> {
        let p = Correlation::from_xy((r * c).clamp(-1.0, 1.0), (r * s).clamp(-1.0, 1.0))?;
        Ok(model.check(&p)?.compatible)
    };
    if inside(edge)? {
        return Ok(CartesianPoint::new(edge * c, edge * s));
    }
    let (mut lo, mut hi) = (0.0, edge);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CartesianPoint::new(lo * c, lo * s))
}

/// Outline of the compatible region by bisection along rays from the
/// origin, which always lies inside the convex region.
pub fn radial_boundary(model: &ThresholdModel, rays: usize) -> Result<Polyline> {
    let rays = rays.max(8);
    let mut pts = (0..rays)
        .into_par_iter()
        .map(|k| radial_extent(model, 2.0 * std::f64::consts::PI * k as f64 / rays as f64))
        .collect::<Result<Vec<_>>>()?;
    pts.push(pts[0]);
    Ok(pts)
}

/// Closed outlines of the region of correlations compatible with `spec`.
///
/// Polygonal and elliptical regions are emitted exactly; other channels with
/// a decidable membership are traced by radial bisection. Neighbouring
/// points are at most `2/resolution` apart.
pub fn region_boundary(spec: &ChannelSpec, resolution: usize) -> Result<Vec<Polyline>> {
    let resolution = resolution.max(4);
    let step = 2.0 / resolution as f64;
    if let ChannelSpec::AmpDamp { lambda } = *spec {
        let poly = amp_damp_polygon(lambda, 8 * resolution);
        return Ok(vec![densify_closed(&poly, step)]);
    }
    if let Some(bw) = band_wedge(spec) {
        return Ok(vec![densify_closed(&band_wedge_polygon(bw.band, bw.wedge), step)]);
    }
    let model = ThresholdModel::for_channel(spec)?;
    Ok(vec![radial_boundary(&model, 8 * resolution)?])
}

/// CSV with header `x,y`, a blank line between polylines, 17 significant digits.
pub fn boundary_csv(lines: &[Polyline]) -> String {
    let mut out = String::from("x,y\n");
    for (k, line) in lines.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for p in line {
            writeln!(out, "{:.16e},{:.16e}", p.x, p.y).unwrap();
        }
    }
    out
}

/// Minimal SVG: the probability square and one path per polyline, `y` up.
pub fn boundary_svg(lines: &[Polyline]) -> String {
    let mut out = String::new();
    out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1 -1 2 2\" width=\"400\" height=\"400\">\n");
    out.push_str("<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"0.005\">\n");
    out.push_str("<polygon points=\"1,0 0,1 -1,0 0,-1\" stroke=\"#999999\"/>\n");
    for line in lines {
        let mut d = String::new();
        for (k, p) in line.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            write!(d, "{cmd}{} {} ", p.x, p.y).unwrap();
        }
        d.push('Z');
        writeln!(out, "<path d=\"{d}\" stroke=\"#1f5fbf\"/>").unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Minimal SVG scatter of Cartesian points over the probability square.
pub fn points_svg(points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1 -1 2 2\" width=\"400\" height=\"400\">\n");
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    out.push_str("<polygon points=\"1,0 0,1 -1,0 0,-1\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.005\"/>\n");
    for (x, y) in points {
        writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"0.003\" fill=\"#bf3f1f\"/>").unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Largest `|y|` over all polylines.
pub fn max_abs_y(lines: &[Polyline]) -> f64 {
    lines.iter().flatten().map(|p| p.y.abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::check;
    use crate::sampling::rng_from;
    use rand::Rng;

    fn specs_two_settings() -> Vec<ChannelSpec> {
        vec![
            ChannelSpec::pauli([0.7, 0.1, 0.1, 0.1]).unwrap(),
            ChannelSpec::pauli([0.4, 0.3, 0.2, 0.1]).unwrap(),
            ChannelSpec::amp_damp(0.25).unwrap(),
            ChannelSpec::amp_damp(0.6).unwrap(),
            ChannelSpec::erasure(2, 0.5).unwrap(),
            ChannelSpec::erasure(4, 0.2).unwrap(),
            ChannelSpec::depolarizing(2, 0.4).unwrap(),
            ChannelSpec::depolarizing(4, 0.5).unwrap(),
            ChannelSpec::cloning(2).unwrap(),
            ChannelSpec::cloning(3).unwrap(),
            ChannelSpec::transposition(2).unwrap(),
            ChannelSpec::transposition(5).unwrap(),
        ]
    }

    #[test]
    fn coordinate_examples() {
        let uniform = Correlation::binary(0.5, 0.5, 0.5, 0.5).unwrap();
        assert_eq!(to_cartesian(&uniform).unwrap(), CartesianPoint::new(0.0, 0.0));
        let ident = Correlation::binary(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(to_cartesian(&ident).unwrap(), CartesianPoint::new(0.0, 1.0));
        let constant = Correlation::binary(1.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(to_cartesian(&constant).unwrap(), CartesianPoint::new(1.0, 0.0));
        for p in [uniform, ident, constant] {
            assert_eq!(from_cartesian(to_cartesian(&p).unwrap()).unwrap(), p);
        }
        assert!(from_cartesian(CartesianPoint::new(0.7, 0.7)).is_err());
    }

    #[test]
    fn round_trip_random_points() {
        let mut rng = rng_from(6);
        for _ in 0..10_000 {
            let x: f64 = rng.random_range(-1.0..1.0);
            let y: f64 = rng.random_range(-1.0..1.0) * (1.0 - x.abs());
            let back = to_cartesian(&from_cartesian(CartesianPoint::new(x, y)).unwrap()).unwrap();
            assert!((back.x - x).abs() < 1e-12 && (back.y - y).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_examples() {
        assert!(symmetry_orbit(CartesianPoint::new(0.0, 0.0)).iter().all(|p| p.x == 0.0 && p.y == 0.0));
        let orbit = symmetry_orbit(CartesianPoint::new(0.2, 0.5));
        for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            assert!(orbit.contains(&CartesianPoint::new(0.2 * sx, 0.5 * sy)));
        }
        let spec = ChannelSpec::depolarizing(2, 0.7).unwrap();
        let mut rng = rng_from(8);
        for _ in 0..200 {
            let x: f64 = rng.random_range(-1.0..1.0);
            let y: f64 = rng.random_range(-1.0..1.0) * (1.0 - x.abs());
            let verdicts: Vec<bool> = symmetry_orbit(CartesianPoint::new(x, y))
                .iter()
                .map(|&q| check(&spec, &from_cartesian(q).unwrap()).unwrap().compatible)
                .collect();
            assert!(verdicts.iter().all(|&v| v == verdicts[0]));
        }
    }

    #[test]
    fn erasure_outline_is_hexagonal() {
        let lines = region_boundary(&ChannelSpec::erasure(3, 0.5).unwrap(), 100).unwrap();
        let line = &lines[0];
        assert_eq!(line.first(), line.last());
        assert!((max_abs_y(&lines) - 0.5).abs() < 1e-12);
        let corners = band_wedge_polygon(Some(0.5), None);
        assert_eq!(corners.len(), 6);
    }

    #[test]
    fn transposition_wedge_extents() {
        for d in 2..6 {
            let poly = band_wedge_polygon(Some(1.0 / (d as f64 + 1.0)), Some(1.0 / 3.0));
            let top = poly.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            assert!((top - 1.0 / (d as f64 + 1.0)).abs() < 1e-12);
            // half-width of the flat top
            let flat = poly
                .iter()
                .filter(|p| (p.1 - top).abs() < 1e-12)
                .map(|p| p.0.abs())
                .fold(0.0, f64::max);
            assert!((flat - (d as f64 - 2.0) / (d as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_depolarizing_matches_pauli_band() {
        let dep = band_wedge_polygon(Some(0.4), Some(2.0 * 0.4 / (2.0 - 2.0 * 0.4 + 2.0 * 0.4)));
        let top: Vec<_> = dep.iter().filter(|p| (p.1 - 0.4).abs() < 1e-12).collect();
        assert!(top.iter().all(|p| p.0.abs() < 1e-12));
    }

    #[test]
    fn amp_damp_outline_sits_on_the_closed_form_curve() {
        for lambda in [0.25, 0.36, 0.8] {
            let spec = ChannelSpec::amp_damp(lambda).unwrap();
            let lines = region_boundary(&spec, 200).unwrap();
            for p in &lines[0] {
                let q = from_cartesian(*p).unwrap();
                let stat = crate::compat::amp_damp_statistic(&q);
                let on_edge = (p.x.abs() + p.y.abs() - 1.0).abs() < 1e-9;
                assert!(stat <= lambda + 1e-9);
                assert!(on_edge || (stat - lambda).abs() < 1e-9, "{p:?} {stat}");
            }
            assert!((max_abs_y(&lines) - lambda.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_points_are_tight() {
        let res = 100;
        for spec in specs_two_settings() {
            let lines = region_boundary(&spec, res).unwrap();
            for p in lines.iter().flatten().step_by(7) {
                let inside = crate::compat::max_violation(&spec, &from_cartesian(*p).unwrap(), 1000).unwrap();
                assert!(inside.margin <= 1e-6, "{spec:?} {p:?} {}", inside.margin);
                let r = (p.x * p.x + p.y * p.y).sqrt();
                if r < 1e-12 {
                    continue;
                }
                let scale = 1.0 + 2.0 / res as f64 / r;
                let out = CartesianPoint::new(p.x * scale, p.y * scale);
                if out.in_square(0.0) {
                    assert!(!check(&spec, &from_cartesian(out).unwrap()).unwrap().compatible, "{spec:?} {out:?}");
                }
            }
        }
    }

    #[test]
    fn boundaries_are_orbit_symmetric() {
        for spec in specs_two_settings() {
            let lines = region_boundary(&spec, 50).unwrap();
            let pts: Vec<_> = lines.iter().flatten().copied().collect();
            for p in &pts {
                for q in symmetry_orbit(*p) {
                    let d = pts
                        .iter()
                        .map(|r| ((r.x - q.x).powi(2) + (r.y - q.y).powi(2)).sqrt())
                        .fold(f64::INFINITY, f64::min);
                    assert!(d < 1e-9, "{spec:?} {q:?} {d}");
                }
            }
        }
    }

    #[test]
    fn radial_tracing_for_other_channels() {
        let lines = region_boundary(&ChannelSpec::trace_class(2).unwrap(), 40).unwrap();
        assert!(lines[0].iter().all(|p| p.y.abs() < 1e-8));
        let full = region_boundary(&ChannelSpec::identity(2).unwrap(), 40).unwrap();
        assert!(full[0].iter().all(|p| (p.x.abs() + p.y.abs() - 1.0).abs() < 1e-12));
        let rotated = ChannelSpec::custom_affine(
            [[0.0, 0.6, 0.0], [-0.6, 0.0, 0.0], [0.0, 0.0, 0.36]],
            [0.0, 0.0, 0.64],
        )
        .unwrap();
        let traced = region_boundary(&rotated, 100).unwrap();
        assert!((max_abs_y(&traced) - 0.6).abs() < 1e-3);
    }

    #[test]
    fn exports() {
        let lines = vec![
            vec![CartesianPoint::new(0.0, 0.5), CartesianPoint::new(0.5, 0.0), CartesianPoint::new(0.0, 0.5)],
            vec![CartesianPoint::new(0.1, 0.1), CartesianPoint::new(0.1, 0.1)],
        ];
        let csv = boundary_csv(&lines);
        assert!(csv.starts_with("x,y\n"));
        assert_eq!(csv.split("\n\n").count(), 2);
        let svg = boundary_svg(&lines);
        assert!(svg.contains("viewBox=\"-1 -1 2 2\""));
        assert_eq!(svg.matches("<path").count(), 2);
    }
}
