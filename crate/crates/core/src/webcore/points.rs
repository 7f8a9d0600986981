use nalgebra::DMatrix;
use serde::Serialize;

use crate::minkgeom::{circle_from_polar, stereo_lift, PlanarCircle, PlanarPoint};
use crate::polycurve::{Param, Poly1, RationalCurve};

use super::WebError;

/// Two roots closer than this are treated as a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-7;
/// Relative size below which the leading coefficient counts as a degree drop.
const DEGREE_DROP_TOL: f64 = 1e-12;
/// Complex roots with imaginary part below this (relative) are taken as real.
const IMAG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    /// Distinct real roots and pairwise transverse circles.
    Regular,
    /// A double root, or two leaves tangent at the point.
    TangentPair,
    /// The tangency polynomial drops degree: one leaf is the circle of `Γ(∞)`.
    RootAtInfinity,
    /// Fewer real roots than the curve degree.
    Deficient,
    /// The lifted point lies on the polar curve.
    OnCurve,
}

/// A plane point with the parameters of the web leaves through it and the leaves themselves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WebPoint {
    pub plane: PlanarPoint,
    /// Ascending, with the infinite parameter (if any) last.
    pub roots: Vec<Param>,
    pub circles: Vec<PlanarCircle>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WebSolution {
    Regular(WebPoint),
    Singular { class: PointClass, roots: Vec<Param> },
}

impl WebSolution {
    pub fn class(&self) -> PointClass {
        match self {
            WebSolution::Regular(_) => PointClass::Regular,
            WebSolution::Singular { class, .. } => *class,
        }
    }

    pub fn web_point(&self) -> Option<&WebPoint> {
        match self {
            WebSolution::Regular(w) => Some(w),
            WebSolution::Singular { .. } => None,
        }
    }
}

/// Real roots of the tangency polynomial as points of the projective parameter line,
/// counting a degree drop as roots at infinity.
pub(crate) fn projective_real_roots(p: &Poly1, n: usize) -> (Vec<Param>, usize) {
    let scale = p.max_abs();
    let lead = p.coeff(n);
    if lead.abs() > DEGREE_DROP_TOL * scale {
        return (p.real_roots(IMAG_TOL).into_iter().map(Param::affine).collect(), 0);
    }
    let mut k = n;
    while k > 0 && p.coeff(k).abs() <= DEGREE_DROP_TOL * scale {
        k -= 1;
    }
    let reduced = Poly1::new(p.coeffs()[..=k].to_vec());
    let mut roots: Vec<Param> = reduced.real_roots(IMAG_TOL).into_iter().map(Param::affine).collect();
    let at_infinity = n - k;
    roots.extend(std::iter::repeat_n(Param::INFINITY, at_infinity));
    (roots, at_infinity)
}

/// Distance between parameters measured on the parameter circle.
pub(crate) fn param_gap(a: Param, b: Param) -> f64 {
    let d = (a.angle() - b.angle()).abs();
    d.min(2.0 * std::f64::consts::PI - d)
}

fn transversality(c1: &PlanarCircle, c2: &PlanarCircle, p: PlanarPoint) -> f64 {
    let g = |c: &PlanarCircle| {
        let c = c.normalized();
        (2.0 * c.eps * p.x + c.a, 2.0 * c.eps * p.y + c.b)
    };
    let (a, b) = (g(c1), g(c2));
    let cross = a.0 * b.1 - a.1 * b.0;
    cross.abs() / (a.0.hypot(a.1) * b.0.hypot(b.1))
}

/// Leaves of the web through `p`, or the reason there is no regular web point there.
pub fn solve_web_point(c: &RationalCurve, p: PlanarPoint) -> Result<WebSolution, WebError> {
    if !(p.x.is_finite() && p.y.is_finite()) {
        return Err(WebError::NonFinitePoint);
    }
    let q = stereo_lift(p);
    let poly = c.tangency_poly(q)?;
    let n = c.max_degree();
    let (roots, at_infinity) = projective_real_roots(&poly, n);
    let singular = |class| Ok(WebSolution::Singular { class, roots: roots.clone() });

    let qh = q.homogeneous();
    for &t in &roots {
        if let Ok(g) = c.eval(t) {
            if g.proportional(&qh, 1e-8) {
                return singular(PointClass::OnCurve);
            }
        }
    }
    if roots.len() < n {
        return singular(PointClass::Deficient);
    }
    if at_infinity > 0 {
        return singular(PointClass::RootAtInfinity);
    }
    let doubled = roots.windows(2).any(|w| param_gap(w[0], w[1]) < DOUBLE_ROOT_TOL);
    if doubled {
        return singular(PointClass::TangentPair);
    }
    let mut circles = Vec::with_capacity(n);
    for &t in &roots {
        let g = c.eval(t)?;
        circles.push(circle_from_polar(&g)?);
    }
    for i in 0..circles.len() {
        for j in (i + 1)..circles.len() {
            if transversality(&circles[i], &circles[j], p) < DOUBLE_ROOT_TOL {
                return singular(PointClass::TangentPair);
            }
        }
    }
    Ok(WebSolution::Regular(WebPoint { plane: p, roots, circles }))
}

pub fn classify_point(c: &RationalCurve, p: PlanarPoint) -> Result<PointClass, WebError> {
    solve_web_point(c, p).map(|s| s.class())
}

/// Discriminant of the degree-`n` binary form whose affine coefficients are `coeffs`.
///
/// The form is first rotated so that its leading coefficient is as large as possible; the
/// discriminant is invariant under that substitution. Coefficients are scaled to unit
/// max-norm, which leaves the sign unchanged.
pub fn binary_discriminant(coeffs: &[f64], n: usize) -> f64 {
    let scale = coeffs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || n == 0 {
        return 0.0;
    }
    let a: Vec<f64> = (0..=n).map(|k| coeffs.get(k).copied().unwrap_or(0.0) / scale).collect();
    if n == 1 {
        return 1.0;
    }
    let rotated = |theta: f64| {
        let (s, c) = theta.sin_cos();
        // t0 → c t0 − s t1, t1 → s t0 + c t1 in affine form
        let x = Poly1::new(vec![-s, c]);
        let y = Poly1::new(vec![c, s]);
        let mut acc = Poly1::zero();
        for (k, &ak) in a.iter().enumerate() {
            if ak == 0.0 {
                continue;
            }
            let mut term = Poly1::constant(ak);
            for _ in 0..k {
                term = &term * &x;
            }
            for _ in k..n {
                term = &term * &y;
            }
            acc = &acc + &term;
        }
        (0..=n).map(|k| acc.coeff(k)).collect::<Vec<f64>>()
    };
    let g = (0..12)
        .map(|i| rotated(i as f64 * std::f64::consts::PI / 12.0))
        .max_by(|u, v| u[n].abs().total_cmp(&v[n].abs()))
        .expect("nonempty");
    let gp: Vec<f64> = (1..=n).map(|k| k as f64 * g[k]).collect();
    let res = sylvester_resultant(&g, &gp);
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * res / g[n]
}

/// Resultant of two polynomials given by ascending coefficients, with exact degrees
/// `len − 1`.
fn sylvester_resultant(f: &[f64], g: &[f64]) -> f64 {
    let m = f.len() - 1;
    let k = g.len() - 1;
    let size = m + k;
    let mut s = DMatrix::<f64>::zeros(size, size);
    for row in 0..k {
        for (j, &v) in f.iter().rev().enumerate() {
            s[(row, row + j)] = v;
        }
    }
    for row in 0..m {
        for (j, &v) in g.iter().rev().enumerate() {
            s[(k + row, row + j)] = v;
        }
    }
    s.determinant()
}

/// Discriminant of the tangency polynomial at `p`, taken as a form of the curve's degree so
/// that a degree drop counts as a root at infinity. Positive for three distinct real roots
/// of a cubic, negative for one.
pub fn discriminant_sign(c: &RationalCurve, p: PlanarPoint) -> Result<f64, WebError> {
    let poly = c.tangency_poly(stereo_lift(p))?;
    Ok(binary_discriminant(poly.coeffs(), c.max_degree()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkgeom::{stereo_project, SpherePoint};
    use crate::polycurve::CurveFamily;
    use crate::webcore::web_function;

    fn fig1() -> RationalCurve {
        CurveFamily::figure1().curve().unwrap()
    }

    #[test]
    fn cubic_discriminant_closed_form() {
        // t³ − t: roots −1, 0, 1 → discriminant 4
        assert!((binary_discriminant(&[0.0, -1.0, 0.0, 1.0], 3) - 4.0).abs() < 1e-12);
        // t³ + t: one real root → −4
        assert!((binary_discriminant(&[0.0, 1.0, 0.0, 1.0], 3) + 4.0).abs() < 1e-12);
        // (t − 1)²(t + 2)
        assert!(binary_discriminant(&[2.0, -3.0, 0.0, 1.0], 3).abs() < 1e-12);
        // degree drop: t² − 1 as a cubic form has roots ±1 and ∞, b²(c² − 4bd) = 1·4
        assert!((binary_discriminant(&[-1.0, 0.0, 1.0, 0.0], 3) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn discriminant_matches_root_product() {
        let roots = [-1.3, 0.2, 0.9, 2.5];
        let mut p = Poly1::constant(1.0);
        for r in roots {
            p = &p * &Poly1::new(vec![-r, 1.0]);
        }
        let mut want = 1.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                want *= (roots[i] - roots[j]) * (roots[i] - roots[j]);
            }
        }
        let scale = p.max_abs();
        // homogeneous of degree 2n − 2 = 6 in the coefficients
        let got = binary_discriminant(p.coeffs(), 4) * scale.powi(6);
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    }

    #[test]
    fn regular_point_has_three_leaves_through_it() {
        let c = fig1();
        let p = PlanarPoint::new(-0.4, 0.6);
        let sol = solve_web_point(&c, p).unwrap();
        let wp = sol.web_point().expect("regular");
        assert_eq!(wp.roots.len(), 3);
        assert!(wp.roots.windows(2).all(|w| w[0].value().unwrap() < w[1].value().unwrap()));
        let poly = c.tangency_poly(stereo_lift(p)).unwrap();
        for (t, circle) in wp.roots.iter().zip(&wp.circles) {
            assert!(poly.eval(t.value().unwrap()).abs() <= 1e-8 * poly.max_abs());
            assert!(circle.incidence_residual(p) <= 1e-8);
        }
        assert!(discriminant_sign(&c, p).unwrap() > 0.0);
        let w = web_function(&c);
        let u: [f64; 3] = std::array::from_fn(|i| wp.roots[i].value().unwrap());
        assert!(w.eval(u).abs() <= 1e-8 * w.eval_abs(u));
    }

    #[test]
    fn single_real_root_is_deficient() {
        let c = fig1();
        let p = PlanarPoint::new(0.3, 0.2);
        assert_eq!(classify_point(&c, p).unwrap(), PointClass::Deficient);
        assert!(discriminant_sign(&c, p).unwrap() < 0.0);
    }

    #[test]
    fn real_axis_gives_a_root_at_infinity() {
        let c = fig1();
        let sol = solve_web_point(&c, PlanarPoint::new(0.5, 0.0)).unwrap();
        assert_eq!(sol.class(), PointClass::RootAtInfinity);
        if let WebSolution::Singular { roots, .. } = sol {
            assert_eq!(roots.len(), 3);
            assert!(roots[2].is_infinite());
        }
    }

    #[test]
    fn curve_points_on_the_sphere() {
        let c = fig1();
        let north = stereo_project(SpherePoint { x: 0.0, y: 0.0, z: 1.0 }).unwrap();
        assert_eq!(classify_point(&c, north).unwrap(), PointClass::OnCurve);
    }

    #[test]
    fn imaginary_axis_has_tangent_leaves() {
        // t = 0 is always a root; the other two leaves through the point are tangent there.
        let c = fig1();
        for y in [0.5, -1.3, 1.7] {
            let p = PlanarPoint::new(0.0, y);
            let poly = c.tangency_poly(stereo_lift(p)).unwrap();
            assert!(poly.coeff(0).abs() < 1e-15);
            let sol = solve_web_point(&c, p).unwrap();
            assert_eq!(sol.class(), PointClass::TangentPair, "{y}");
        }
    }
}
