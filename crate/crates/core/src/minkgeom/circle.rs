use serde::{Deserialize, Serialize};

use super::{pair, GeomError, HomPoint, PlanarPoint, TANGENCY_TOL};

/// Circle or line `ε(x² + y²) + A x + B y + C = 0` of the stereographic plane,
/// defined up to a common nonzero factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarCircle {
    pub eps: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PlanarCircle {
    pub const fn new(eps: f64, a: f64, b: f64, c: f64) -> Self {
        PlanarCircle { eps, a, b, c }
    }

    /// Circle with the given center and radius.
    pub fn from_center_radius(center: PlanarPoint, r: f64) -> Self {
        PlanarCircle {
            eps: 1.0,
            a: -2.0 * center.x,
            b: -2.0 * center.y,
            c: center.x * center.x + center.y * center.y - r * r,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.eps, self.a, self.b, self.c]
    }

    fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Same locus scaled to unit max-norm.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            return *self;
        }
        PlanarCircle::new(self.eps / m, self.a / m, self.b / m, self.c / m)
    }

    pub fn eval(&self, p: PlanarPoint) -> f64 {
        self.eps * (p.x * p.x + p.y * p.y) + self.a * p.x + self.b * p.y + self.c
    }

    /// Residual of `p` against the locus, scaled so that it approximates the Euclidean
    /// distance for circles and lines of moderate size.
    pub fn incidence_residual(&self, p: PlanarPoint) -> f64 {
        let gx = 2.0 * self.eps * p.x + self.a;
        let gy = 2.0 * self.eps * p.y + self.b;
        let g = gx.hypot(gy);
        let v = self.eval(p);
        if g > 0.0 {
            (v / g).abs()
        } else {
            v.abs()
        }
    }

    /// `A² + B² − 4εC`; positive iff the real locus is a genuine circle or line.
    pub fn power(&self) -> f64 {
        self.a * self.a + self.b * self.b - 4.0 * self.eps * self.c
    }

    /// Whether the locus is a straight line, judged on the normalized quadruple.
    pub fn is_line(&self) -> bool {
        self.normalized().eps.abs() <= TANGENCY_TOL
    }

    /// Center and radius when the locus is a proper circle.
    pub fn center_radius(&self) -> Option<(PlanarPoint, f64)> {
        if self.eps == 0.0 {
            return None;
        }
        let center = PlanarPoint::new(-self.a / (2.0 * self.eps), -self.b / (2.0 * self.eps));
        let p = self.power();
        if p <= 0.0 {
            return None;
        }
        Some((center, p.sqrt() / (2.0 * self.eps.abs())))
    }

    /// Polar point in tetracyclic coordinates `[A : B : C − ε : −C − ε]`.
    pub fn polar_point(&self) -> HomPoint {
        HomPoint::new(self.a, self.b, self.c - self.eps, -self.c - self.eps)
    }

    /// Whether two quadruples describe the same locus.
    pub fn proportional(&self, other: &PlanarCircle, tol: f64) -> bool {
        let a = self.normalized().as_array();
        let b = other.normalized().as_array();
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in (i + 1)..4 {
                worst = worst.max((a[i] * b[j] - a[j] * b[i]).abs());
            }
        }
        worst <= tol
    }
}

/// Circle cut on the sphere by the plane polar to `p`, in the stereographic plane.
pub fn circle_from_polar(p: &HomPoint) -> Result<PlanarCircle, GeomError> {
    if p.is_zero() {
        return Err(GeomError::ZeroVector);
    }
    let q = p.normalize();
    let s = pair(&q, &q);
    if s <= 1e-12 {
        return Err(GeomError::ImaginaryCircle(s));
    }
    let [x, y, z, u] = q.0;
    Ok(PlanarCircle::new(-(z + u) / 2.0, x, y, (z - u) / 2.0))
}

/// Real intersection of two distinct circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intersection {
    Empty,
    /// Transverse meeting of two lines; their second common point is at infinity.
    One(PlanarPoint),
    Tangent(PlanarPoint),
    Two(PlanarPoint, PlanarPoint),
}

impl Intersection {
    pub fn points(&self) -> Vec<PlanarPoint> {
        match *self {
            Intersection::Empty => vec![],
            Intersection::One(p) | Intersection::Tangent(p) => vec![p],
            Intersection::Two(p, q) => vec![p, q],
        }
    }
}

pub fn circle_circle_intersect(
    c1: &PlanarCircle,
    c2: &PlanarCircle,
) -> Result<Intersection, GeomError> {
    if c1.proportional(c2, TANGENCY_TOL) {
        return Err(GeomError::CoincidentCircles);
    }
    let n1 = c1.normalized();
    let n2 = c2.normalized();
    let lines = (n1.eps.abs() <= TANGENCY_TOL, n2.eps.abs() <= TANGENCY_TOL);
    match lines {
        (true, true) => Ok(line_line(&n1, &n2)),
        (true, false) => Ok(line_circle(&n1, &n2)),
        (false, true) => Ok(line_circle(&n2, &n1)),
        (false, false) => {
            // Radical line of the two monic circles.
            let m1 = PlanarCircle::new(1.0, n1.a / n1.eps, n1.b / n1.eps, n1.c / n1.eps);
            let m2 = PlanarCircle::new(1.0, n2.a / n2.eps, n2.b / n2.eps, n2.c / n2.eps);
            let radical = PlanarCircle::new(0.0, m1.a - m2.a, m1.b - m2.b, m1.c - m2.c);
            let scale = m1.max_abs().max(m2.max_abs());
            if radical.a.hypot(radical.b) <= TANGENCY_TOL * scale {
                // concentric and distinct
                return Ok(Intersection::Empty);
            }
            Ok(line_circle(&radical, &m1))
        }
    }
}

fn line_line(l1: &PlanarCircle, l2: &PlanarCircle) -> Intersection {
    let det = l1.a * l2.b - l1.b * l2.a;
    if det.abs() <= TANGENCY_TOL {
        return Intersection::Empty;
    }
    let x = (l1.b * l2.c - l2.b * l1.c) / det;
    let y = (l2.a * l1.c - l1.a * l2.c) / det;
    Intersection::One(PlanarPoint::new(x, y))
}

/// Intersects the line `a x + b y + c = 0` with a circle that has `ε ≠ 0`.
fn line_circle(line: &PlanarCircle, circ: &PlanarCircle) -> Intersection {
    let n = line.a.hypot(line.b);
    let (nx, ny, d) = (line.a / n, line.b / n, line.c / n);
    // foot of the perpendicular from the origin, unit direction along the line
    let foot = PlanarPoint::new(-d * nx, -d * ny);
    let (dx, dy) = (-ny, nx);
    let e = circ.eps;
    let lin = 2.0 * e * (foot.x * dx + foot.y * dy) + circ.a * dx + circ.b * dy;
    let cst = circ.eval(foot);
    // e s² + lin s + cst = 0
    let disc = lin * lin - 4.0 * e * cst;
    let scale = lin * lin + (4.0 * e * cst).abs();
    let at = |s: f64| PlanarPoint::new(foot.x + s * dx, foot.y + s * dy);
    if disc.abs() <= TANGENCY_TOL * scale.max(e * e) {
        return Intersection::Tangent(at(-lin / (2.0 * e)));
    }
    if disc < 0.0 {
        return Intersection::Empty;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (lin + lin.signum() * sq);
    let (s1, s2) = if q != 0.0 { (q / e, cst / q) } else { (sq / (2.0 * e), -sq / (2.0 * e)) };
    let (s1, s2) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
    Intersection::Two(at(s1), at(s2))
}
