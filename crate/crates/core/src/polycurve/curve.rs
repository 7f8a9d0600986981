use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CurveError, Poly1};
use crate::minkgeom::{tangent_plane, HomPoint, MoebiusMap, SpherePoint};

/// Highest degree accepted for a polar curve.
pub const MAX_CURVE_DEGREE: usize = 4;

/// Point `[t0:t1]` of the projective parameter line; the affine value is `t0/t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Param {
    pub t0: f64,
    pub t1: f64,
}

impl Param {
    pub const INFINITY: Param = Param { t0: 1.0, t1: 0.0 };

    pub const fn affine(t: f64) -> Self {
        Param { t0: t, t1: 1.0 }
    }

    pub fn new(t0: f64, t1: f64) -> Self {
        Param { t0, t1 }
    }

    pub fn is_infinite(&self) -> bool {
        self.t1 == 0.0 && self.t0 != 0.0
    }

    pub fn is_valid(&self) -> bool {
        (self.t0 != 0.0 || self.t1 != 0.0) && self.t0.is_finite() && self.t1.is_finite()
    }

    /// `t0/t1`, or `None` at infinity.
    pub fn value(&self) -> Option<f64> {
        (self.t1 != 0.0).then(|| self.t0 / self.t1)
    }

    /// Representative with `max(|t0|, |t1|) = 1`.
    pub fn normalized(&self) -> Param {
        let m = self.t0.abs().max(self.t1.abs());
        Param { t0: self.t0 / m, t1: self.t1 / m }
    }

    /// Position on the parameter circle, in `(−π, π]`, with infinity at `π`.
    pub fn angle(&self) -> f64 {
        match self.value() {
            None => std::f64::consts::PI,
            Some(t) => 2.0 * t.atan(),
        }
    }

    pub fn from_angle(theta: f64) -> Param {
        let half = theta / 2.0;
        Param::new(half.sin(), half.cos()).normalized()
    }
}

impl From<f64> for Param {
    fn from(t: f64) -> Self {
        if t.is_infinite() {
            Param::INFINITY
        } else {
            Param::affine(t)
        }
    }
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.value() {
            Some(t) => write!(f, "{t}"),
            None => f.write_str("inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ParamRepr {
    Affine(f64),
    Named(String),
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.value() {
            Some(t) => ParamRepr::Affine(t),
            None => ParamRepr::Named("inf".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ParamRepr::deserialize(d)? {
            ParamRepr::Affine(t) => Ok(Param::affine(t)),
            ParamRepr::Named(s) if s == "inf" || s == "infinity" => Ok(Param::INFINITY),
            ParamRepr::Named(s) => Err(serde::de::Error::custom(format!("bad parameter `{s}`"))),
        }
    }
}

/// Rational curve `t ↦ [X(t):Y(t):Z(t):U(t)]` of projective 3-space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalCurve {
    components: [Poly1; 4],
    max_degree: usize,
}

impl RationalCurve {
    pub fn new(components: [Poly1; 4]) -> Result<Self, CurveError> {
        if components.iter().flat_map(|p| p.coeffs()).any(|c| !c.is_finite()) {
            return Err(CurveError::NonFinite);
        }
        let max_degree = components.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        if max_degree == 0 {
            return Err(CurveError::Constant);
        }
        if max_degree > MAX_CURVE_DEGREE {
            return Err(CurveError::DegreeTooHigh(max_degree));
        }
        let g = components
            .iter()
            .filter(|p| !p.is_zero())
            .fold(Poly1::zero(), |acc, p| if acc.is_zero() { p.normalized() } else { acc.gcd(p, 1e-9) });
        if let Some(d) = g.degree().filter(|d| *d >= 1) {
            return Err(CurveError::CommonFactor(d));
        }
        Ok(RationalCurve { components, max_degree })
    }

    /// Builds a curve from four rows of ascending coefficients.
    pub fn from_rows(rows: [Vec<f64>; 4]) -> Result<Self, CurveError> {
        RationalCurve::new(rows.map(Poly1::new))
    }

    pub fn components(&self) -> &[Poly1; 4] {
        &self.components
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Coefficient rows padded to `max_degree + 1` entries.
    pub fn rows(&self) -> [Vec<f64>; 4] {
        std::array::from_fn(|i| (0..=self.max_degree).map(|k| self.components[i].coeff(k)).collect())
    }

    /// The point `c_k` formed by the `t^k` coefficients of the four components.
    pub fn coefficient_point(&self, k: usize) -> HomPoint {
        HomPoint(std::array::from_fn(|i| self.components[i].coeff(k)))
    }

    /// Largest absolute coefficient.
    pub fn coefficient_scale(&self) -> f64 {
        self.components.iter().fold(0.0_f64, |m, p| m.max(p.max_abs()))
    }

    pub fn eval(&self, t: Param) -> Result<HomPoint, CurveError> {
        if !t.is_valid() {
            return Err(CurveError::BadParameter);
        }
        let t = t.normalized();
        let n = self.max_degree;
        let p = HomPoint(std::array::from_fn(|i| self.components[i].eval_homogeneous(t.t0, t.t1, n)));
        if p.max_abs() <= 1e-12 * self.coefficient_scale() {
            return Err(CurveError::BasePoint);
        }
        Ok(p)
    }

    pub fn eval_affine(&self, t: f64) -> Result<HomPoint, CurveError> {
        self.eval(Param::affine(t))
    }

    /// Derivative of the parametrization in the affine chart around `t`: `d/dt` when
    /// `|t| ≤ 1`, `d/ds` with `s = 1/t` otherwise. The tangent line at `Γ(t)` is spanned by
    /// `Γ(t)` and the returned point.
    pub fn tangent(&self, t: Param) -> Result<HomPoint, CurveError> {
        let here = self.eval(t)?;
        let t = t.normalized();
        let n = self.max_degree;
        let d = if t.t1.abs() >= t.t0.abs() {
            let x = t.t0 / t.t1;
            HomPoint(std::array::from_fn(|i| self.components[i].derivative().eval(x)))
        } else {
            let s = t.t1 / t.t0;
            HomPoint(std::array::from_fn(|i| {
                let p = &self.components[i];
                (0..n).map(|k| (n - k) as f64 * p.coeff(k) * s.powi((n - k - 1) as i32)).sum()
            }))
        };
        if d.max_abs() <= 1e-12 * self.coefficient_scale() || d.proportional(&here, 1e-12) {
            return Err(CurveError::SingularParam);
        }
        Ok(d)
    }

    /// Image of the curve under a Möbius map, acting on every coefficient point.
    pub fn transform(&self, map: &MoebiusMap) -> RationalCurve {
        let pts: Vec<HomPoint> = (0..=self.max_degree).map(|k| map.apply(&self.coefficient_point(k))).collect();
        let components = std::array::from_fn(|i| Poly1::new(pts.iter().map(|p| p.0[i]).collect()));
        // Möbius maps are invertible, so no common factor can appear.
        let max_degree = self.max_degree;
        RationalCurve { components, max_degree }
    }

    /// `t ↦ ⟨tangent_plane(q), Γ(t)⟩`: its roots are the parameters of the curve points on
    /// the plane tangent to the sphere at `q`.
    pub fn tangency_poly(&self, q: SpherePoint) -> Result<Poly1, CurveError> {
        let plane = tangent_plane(q);
        let p = Poly1::new((0..=self.max_degree).map(|k| plane.eval(&self.coefficient_point(k))).collect());
        if p.max_abs() <= 1e-12 * self.coefficient_scale() {
            return Err(CurveError::IdenticallyZero);
        }
        Ok(p)
    }
}

impl<'de> Deserialize<'de> for RationalCurve {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            components: [Poly1; 4],
        }
        let raw = Raw::deserialize(d)?;
        RationalCurve::new(raw.components).map_err(serde::de::Error::custom)
    }
}
