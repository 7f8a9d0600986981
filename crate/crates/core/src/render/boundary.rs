use std::fmt::Write;

use rayon::prelude::*;

use super::{RenderError, RenderSpec};
use crate::minkgeom::PlanarPoint;
use crate::polycurve::RationalCurve;
use crate::webcore::discriminant_sign;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOverlay {
    /// The `<g id="boundary">` element.
    pub group: String,
    /// Contour segments in plane coordinates.
    pub segments: Vec<[PlanarPoint; 2]>,
    /// Grid cell size `(dx, dy)`.
    pub cell: (f64, f64),
}

/// Marching-squares zero contour of the discriminant of the tangency polynomial over the
/// render window, on a `boundary_grid × boundary_grid` grid.
pub fn render_boundary(c: &RationalCurve, spec: &RenderSpec) -> Result<BoundaryOverlay, RenderError> {
    spec.validate()?;
    let n = spec.boundary_grid.max(2);
    let [x0, x1, y0, y1] = spec.window;
    let (dx, dy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
    let node = |i: usize, j: usize| PlanarPoint::new(x0 + dx * i as f64, y0 + dy * j as f64);
    let values: Vec<f64> = (0..(n + 1) * (n + 1))
        .into_par_iter()
        .map(|k| discriminant_sign(c, node(k % (n + 1), k / (n + 1))).unwrap_or(f64::NAN))
        .collect();
    let v = |i: usize, j: usize| values[j * (n + 1) + i];

    let mut segments = Vec::new();
    for j in 0..n {
        for i in 0..n {
            // corners counter-clockwise from the lower left
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let f = corners.map(|(a, b)| v(a, b));
            if f.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let pos = f.map(|x| x > 0.0);
            let crossing = |e: usize| {
                let (a, b) = (e, (e + 1) % 4);
                let s = f[a] / (f[a] - f[b]);
                let (pa, pb) = (node(corners[a].0, corners[a].1), node(corners[b].0, corners[b].1));
                PlanarPoint::new(pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y))
            };
            let edges: Vec<usize> = (0..4).filter(|&e| pos[e] != pos[(e + 1) % 4]).collect();
            match edges.len() {
                2 => segments.push([crossing(edges[0]), crossing(edges[1])]),
                4 => {
                    // saddle: the center value decides which corners connect
                    let center = f.iter().sum::<f64>() / 4.0;
                    if (center > 0.0) == pos[0] {
                        segments.push([crossing(0), crossing(1)]);
                        segments.push([crossing(2), crossing(3)]);
                    } else {
                        segments.push([crossing(3), crossing(0)]);
                        segments.push([crossing(1), crossing(2)]);
                    }
                }
                _ => {}
            }
        }
    }

    let mut group = String::new();
    write!(
        group,
        r#"  <g id="boundary" fill="none" stroke="black" stroke-dasharray="4 2" stroke-width="{}">"#,
        spec.stroke_width
    )
    .expect("write");
    if !segments.is_empty() {
        let mut d = String::new();
        for [a, b] in &segments {
            let (pa, pb) = (spec.to_pixel(*a), spec.to_pixel(*b));
            if !d.is_empty() {
                d.push(' ');
            }
            write!(d, "M {} {} L {} {}", pa.0, pa.1, pb.0, pb.1).expect("write");
        }
        write!(group, r#"<path d="{d}"/>"#).expect("write");
    }
    group.push_str("</g>\n");
    Ok(BoundaryOverlay { group, segments, cell: (dx, dy) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycurve::CurveFamily;
    use crate::webcore::{classify_point, PointClass};

    fn spec(grid: usize) -> RenderSpec {
        RenderSpec { boundary_grid: grid, ..RenderSpec::default() }
    }

    #[test]
    fn contour_separates_root_counts() {
        let c = CurveFamily::figure1().curve().unwrap();
        let o = render_boundary(&c, &spec(60)).unwrap();
        assert!(!o.segments.is_empty());
        let (dx, dy) = o.cell;
        let mut checked = 0;
        for [a, _] in &o.segments {
            let (i, j) = (((a.x + 2.0) / dx).floor(), ((a.y + 2.0) / dy).floor());
            for (di, dj) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                let p = PlanarPoint::new(-2.0 + (i + di) * dx, -2.0 + (j + dj) * dy);
                let d = discriminant_sign(&c, p).unwrap();
                if d.abs() < 1e-10 {
                    continue;
                }
                let deficient = classify_point(&c, p).unwrap() == PointClass::Deficient;
                assert_eq!(d < 0.0, deficient, "{p:?} {d:e}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn contour_hugs_the_positive_real_axis() {
        let c = CurveFamily::figure1().curve().unwrap();
        let o = render_boundary(&c, &spec(60)).unwrap();
        for k in 0..10 {
            let x = 0.6 + 0.13 * k as f64;
            let near = o.segments.iter().flatten().any(|p| (p.x - x).abs() < o.cell.0 && p.y.abs() < o.cell.1);
            assert!(near, "{x}");
        }
    }

    #[test]
    fn refinement_moves_the_contour_less_than_a_cell() {
        let c = CurveFamily::figure1().curve().unwrap();
        let coarse = render_boundary(&c, &spec(40)).unwrap();
        let fine = render_boundary(&c, &spec(80)).unwrap();
        let cell = coarse.cell.0.hypot(coarse.cell.1);
        let dist_to = |p: PlanarPoint, segs: &[[PlanarPoint; 2]]| {
            segs.iter()
                .map(|[a, b]| {
                    let (vx, vy) = (b.x - a.x, b.y - a.y);
                    let l2 = vx * vx + vy * vy;
                    let s = if l2 > 0.0 { (((p.x - a.x) * vx + (p.y - a.y) * vy) / l2).clamp(0.0, 1.0) } else { 0.0 };
                    (p.x - a.x - s * vx).hypot(p.y - a.y - s * vy)
                })
                .fold(f64::INFINITY, f64::min)
        };
        for [a, b] in &fine.segments {
            let m = PlanarPoint::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
            assert!(dist_to(m, &coarse.segments) < cell, "{m:?}");
        }
    }

    #[test]
    fn regular_cap_has_no_overlay() {
        let c = CurveFamily::figure1().curve().unwrap();
        let s = RenderSpec { window: [-0.5, -0.3, 0.5, 0.7], boundary_grid: 20, ..RenderSpec::default() };
        for p in [PlanarPoint::new(-0.5, 0.5), PlanarPoint::new(-0.3, 0.7), PlanarPoint::new(-0.4, 0.6)] {
            assert_eq!(classify_point(&c, p).unwrap(), PointClass::Regular);
        }
        let o = render_boundary(&c, &s).unwrap();
        assert!(o.segments.is_empty());
        assert!(!o.group.contains("<path"));
    }
}
