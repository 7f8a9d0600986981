use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use serde::Serialize;

use super::svg::{ellipse_path, escape, segment_path};
use super::{render_boundary, RenderError, RenderSpec};
use crate::minkgeom::{circle_from_polar, HomPoint, PlanarCircle, PlanarPoint};
use crate::polycurve::{Param, RationalCurve};
use crate::webcore::{solve_web_point, WebSolution};

/// Counts and text of a rendered web picture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderOutput {
    #[serde(skip)]
    pub svg: String,
    pub drawn: usize,
    pub per_foliation: Vec<usize>,
    /// Parameters whose polar point is on or inside the sphere.
    pub imaginary: usize,
    /// Real circles that miss the viewport.
    pub outside: usize,
    pub probe: Option<PlanarPoint>,
    pub boundary_segments: usize,
}

/// Arcs `(start, width)` of the parameter circle, one per foliation, split halfway between
/// the parameters of the leaves through a regular probe point.
pub fn foliation_bands(c: &RationalCurve, spec: &RenderSpec) -> (Vec<(f64, f64)>, Option<PlanarPoint>) {
    let n = c.max_degree();
    let probe_roots = |p: PlanarPoint| match solve_web_point(c, p) {
        Ok(WebSolution::Regular(w)) => Some(w.roots),
        _ => None,
    };
    let found = match spec.probe {
        Some(p) => probe_roots(p).map(|r| (p, r)),
        None => {
            let [x0, x1, y0, y1] = spec.window;
            const N: usize = 33;
            (0..N * N).find_map(|k| {
                let (i, j) = (k % N, k / N);
                let p = PlanarPoint::new(
                    x0 + (x1 - x0) * (i as f64 + 0.5) / N as f64,
                    y1 - (y1 - y0) * (j as f64 + 0.5) / N as f64,
                );
                probe_roots(p).map(|r| (p, r))
            })
        }
    };
    match found {
        Some((p, roots)) => {
            let mut th: Vec<f64> = roots.iter().map(|r| r.angle()).collect();
            th.sort_by(f64::total_cmp);
            let k = th.len();
            let bands = (0..k)
                .map(|i| {
                    let prev = if i == 0 { th[k - 1] - TAU } else { th[i - 1] };
                    let next = if i + 1 == k { th[0] + TAU } else { th[i + 1] };
                    let start = 0.5 * (prev + th[i]);
                    (start, 0.5 * (next + th[i]) - start)
                })
                .collect();
            (bands, Some(p))
        }
        None => ((0..n).map(|i| (-PI + TAU * i as f64 / n as f64, TAU / n as f64)).collect(), None),
    }
}

fn band_of(bands: &[(f64, f64)], t: Param) -> usize {
    let th = t.angle();
    bands
        .iter()
        .position(|&(s, w)| (th - s).rem_euclid(TAU) < w)
        .unwrap_or(0)
}

/// Segment of the line `a x + b y + c = 0` inside the window, if any.
fn clip_line(l: &PlanarCircle, window: [f64; 4]) -> Option<(PlanarPoint, PlanarPoint)> {
    let n = l.a.hypot(l.b);
    let (nx, ny, d) = (l.a / n, l.b / n, l.c / n);
    let foot = (-d * nx, -d * ny);
    let dir = (-ny, nx);
    let [x0, x1, y0, y1] = window;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, dp, a, b) in [(foot.0, dir.0, x0, x1), (foot.1, dir.1, y0, y1)] {
        if dp.abs() < 1e-300 {
            if p < a || p > b {
                return None;
            }
        } else {
            let (s1, s2) = ((a - p) / dp, (b - p) / dp);
            lo = lo.max(s1.min(s2));
            hi = hi.min(s1.max(s2));
        }
    }
    (lo < hi).then(|| {
        let at = |s: f64| PlanarPoint::new(foot.0 + s * dir.0, foot.1 + s * dir.1);
        (at(lo), at(hi))
    })
}

/// Whether the circle crosses the window (rather than missing it or enclosing it).
fn circle_visible(center: PlanarPoint, r: f64, window: [f64; 4]) -> bool {
    let [x0, x1, y0, y1] = window;
    let nx = center.x.clamp(x0, x1);
    let ny = center.y.clamp(y0, y1);
    let near = (center.x - nx).hypot(center.y - ny);
    let far = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
        .iter()
        .map(|&(x, y)| (center.x - x).hypot(center.y - y))
        .fold(0.0_f64, f64::max);
    near <= r && far >= r
}

fn fmt_point(p: &HomPoint) -> String {
    let q = p.normalize();
    format!("{} {} {} {}", q.0[0], q.0[1], q.0[2], q.0[3])
}

/// SVG picture of the web: one path per drawable leaf, grouped by foliation.
pub fn render_web(c: &RationalCurve, spec: &RenderSpec) -> Result<RenderOutput, RenderError> {
    spec.validate()?;
    let (bands, probe) = foliation_bands(c, spec);
    let k = bands.len();
    let params: Vec<(usize, Param)> = match &spec.params {
        Some(list) => list.iter().map(|&t| (band_of(&bands, t), t)).collect(),
        None => bands
            .iter()
            .enumerate()
            .flat_map(|(i, &(s, w))| {
                (0..spec.per_foliation)
                    .map(move |j| (i, Param::from_angle(s + w * (j as f64 + 0.5) / spec.per_foliation as f64)))
            })
            .collect(),
    };
    let (sx, sy) = spec.scales();
    let mut groups = vec![String::new(); k];
    let mut per_foliation = vec![0; k];
    let (mut imaginary, mut outside) = (0, 0);
    for (band, t) in params {
        let Ok(p) = c.eval(t) else {
            imaginary += 1;
            continue;
        };
        let Ok(circle) = circle_from_polar(&p) else {
            imaginary += 1;
            continue;
        };
        let circle = circle.normalized();
        let d = if circle.is_line() {
            clip_line(&circle, spec.window).map(|(a, b)| segment_path(spec.to_pixel(a), spec.to_pixel(b)))
        } else {
            circle.center_radius().filter(|&(ctr, r)| circle_visible(ctr, r, spec.window)).map(|(ctr, r)| {
                let (cx, cy) = spec.to_pixel(ctr);
                ellipse_path(cx, cy, r * sx, r * sy)
            })
        };
        let Some(d) = d else {
            outside += 1;
            continue;
        };
        per_foliation[band] += 1;
        writeln!(groups[band], r#"    <path data-u="{t}" data-polar="{}" d="{d}"/>"#, fmt_point(&p)).expect("write");
    }
    let drawn: usize = per_foliation.iter().sum();
    if drawn == 0 {
        return Err(RenderError::EmptyPicture { imaginary, outside });
    }
    let [w, h] = spec.size;
    let [x0, x1, y0, y1] = spec.window;
    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#).expect("write");
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-window="{x0} {x1} {y0} {y1}">"#
    )
    .expect("write");
    writeln!(svg, r#"  <rect width="{w}" height="{h}" fill="white"/>"#).expect("write");
    for (i, g) in groups.iter().enumerate() {
        writeln!(
            svg,
            r#"  <g id="foliation-{}" fill="none" stroke="{}" stroke-width="{}">"#,
            i + 1,
            escape(&spec.colors[i % 3]),
            spec.stroke_width
        )
        .expect("write");
        svg.push_str(g);
        writeln!(svg, "  </g>").expect("write");
    }
    let mut boundary_segments = 0;
    if spec.boundary {
        let overlay = render_boundary(c, spec)?;
        boundary_segments = overlay.segments.len();
        svg.push_str(&overlay.group);
    }
    if spec.unit_circle {
        let (cx, cy) = spec.to_pixel(PlanarPoint::new(0.0, 0.0));
        writeln!(
            svg,
            r#"  <g id="unit-circle" fill="none" stroke="gray" stroke-width="{}"><path d="{}"/></g>"#,
            spec.stroke_width,
            ellipse_path(cx, cy, sx, sy)
        )
        .expect("write");
    }
    svg.push_str("</svg>\n");
    Ok(RenderOutput { svg, drawn, per_foliation, imaginary, outside, probe, boundary_segments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycurve::CurveFamily;

    fn no_overlay() -> RenderSpec {
        RenderSpec { boundary: false, ..RenderSpec::default() }
    }

    #[test]
    fn counts_add_up() {
        let c = CurveFamily::figure1().curve().unwrap();
        let out = render_web(&c, &no_overlay()).unwrap();
        assert_eq!(out.drawn + out.imaginary + out.outside, 60);
        assert_eq!(out.svg.matches("<path").count(), out.drawn);
        assert_eq!(out.per_foliation.len(), 3);
        assert!(out.probe.is_some());
    }

    #[test]
    fn infinite_parameter_is_the_real_axis() {
        let c = CurveFamily::figure1().curve().unwrap();
        let spec = RenderSpec { params: Some(vec![Param::INFINITY]), ..no_overlay() };
        let out = render_web(&c, &spec).unwrap();
        assert_eq!(out.drawn, 1);
        // the x̄-axis spans the window at mid height
        assert!(out.svg.contains(r#"d="M 0 400 L 800 400""#) || out.svg.contains(r#"d="M 800 400 L 0 400""#), "{}", out.svg);
    }

    #[test]
    fn zero_samples_is_an_empty_picture() {
        let c = CurveFamily::figure1().curve().unwrap();
        let spec = RenderSpec { per_foliation: 0, ..no_overlay() };
        assert_eq!(render_web(&c, &spec), Err(RenderError::EmptyPicture { imaginary: 0, outside: 0 }));
        let spec = RenderSpec { params: Some(vec![]), ..no_overlay() };
        assert!(matches!(render_web(&c, &spec), Err(RenderError::EmptyPicture { .. })));
    }

    #[test]
    fn deterministic() {
        let c = CurveFamily::figure3().curve().unwrap();
        let spec = RenderSpec { boundary_grid: 40, ..RenderSpec::default() };
        assert_eq!(render_web(&c, &spec).unwrap().svg, render_web(&c, &spec).unwrap().svg);
    }

    #[test]
    fn rejects_bad_specs() {
        let c = CurveFamily::figure1().curve().unwrap();
        for spec in [
            RenderSpec { window: [1.0, 1.0, 0.0, 1.0], ..RenderSpec::default() },
            RenderSpec { size: [0, 10], ..RenderSpec::default() },
            RenderSpec { stroke_width: -1.0, ..RenderSpec::default() },
        ] {
            assert!(matches!(render_web(&c, &spec), Err(RenderError::InvalidSpec(_))));
        }
    }

    #[test]
    fn line_clipping() {
        let l = PlanarCircle::new(0.0, 1.0, 1.0, 0.0);
        let (a, b) = clip_line(&l, [-1.0, 1.0, -1.0, 1.0]).unwrap();
        assert!((a.x + a.y).abs() < 1e-15 && (b.x + b.y).abs() < 1e-15);
        assert!((a.dist(&b) - 8f64.sqrt()).abs() < 1e-14);
        assert!(clip_line(&PlanarCircle::new(0.0, 1.0, 0.0, -5.0), [-1.0, 1.0, -1.0, 1.0]).is_none());
    }

    #[test]
    fn visibility() {
        let w = [-1.0, 1.0, -1.0, 1.0];
        assert!(circle_visible(PlanarPoint::new(0.0, 0.0), 0.5, w));
        assert!(!circle_visible(PlanarPoint::new(0.0, 0.0), 5.0, w));
        assert!(!circle_visible(PlanarPoint::new(4.0, 0.0), 1.0, w));
    }
}
