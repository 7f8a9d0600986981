use serde::{Deserialize, Serialize};

use super::{CurveError, Poly1, RationalCurve};
use nalgebra::Matrix4;

use crate::minkgeom::{HomPoint, MoebiusMap};

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const U: usize = 3;

/// Named normalizations of the hexagonal twisted-cubic webs, plus arbitrary curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CurveFamily {
    /// `X = m(t²−1), Y = t(t²−1), Z = m x0 t, U = m x0 t²`, with `m, x0 > 0`.
    Cubic { m: f64, x0: f64 },
    /// Normalization with `x0 > y0 > 0`, `x0² + y0² = 1`.
    Cubic1 { m: f64, x0: f64, y0: f64 },
    /// Normalization with `x0, y0 > 0`, `x0² + y0² = 1`.
    Cubic2 { m: f64, x0: f64, y0: f64 },
    /// Four rows of ascending coefficients for X, Y, Z, U.
    Custom { rows: [Vec<f64>; 4] },
}

fn positive(name: &str, v: f64) -> Result<(), CurveError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CurveError::BadParams(format!("{name} must be a positive real (got {v})")))
    }
}

fn on_unit_circle(x0: f64, y0: f64) -> Result<(), CurveError> {
    let d = x0 * x0 + y0 * y0 - 1.0;
    if d.abs() <= 1e-12 {
        Ok(())
    } else {
        Err(CurveError::BadParams(format!("x0^2 + y0^2 must equal 1 (off by {d:e})")))
    }
}

impl CurveFamily {
    /// Parameters of the first figure: `x0 = √3/2`, `m = 1/√3`.
    pub fn figure1() -> Self {
        CurveFamily::Cubic { m: 1.0 / 3f64.sqrt(), x0: 3f64.sqrt() / 2.0 }
    }

    /// `x0 = √3/2`, `y0 = 1/2`, `m = 1/√3`.
    pub fn figure2() -> Self {
        CurveFamily::Cubic1 { m: 1.0 / 3f64.sqrt(), x0: 3f64.sqrt() / 2.0, y0: 0.5 }
    }

    /// `x0 = y0 = 1/√2`, `m = 1/2`.
    pub fn figure3() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        CurveFamily::Cubic2 { m: 0.5, x0: r, y0: r }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            CurveFamily::Cubic { .. } => "cubic",
            CurveFamily::Cubic1 { .. } => "cubic1",
            CurveFamily::Cubic2 { .. } => "cubic2",
            CurveFamily::Custom { .. } => "custom",
        }
    }

    pub fn validate(&self) -> Result<(), CurveError> {
        match *self {
            CurveFamily::Cubic { m, x0 } => {
                positive("m", m)?;
                positive("x0", x0)
            }
            CurveFamily::Cubic1 { m, x0, y0 } => {
                positive("m", m)?;
                positive("y0", y0)?;
                if x0.is_nan() || x0 <= y0 {
                    return Err(CurveError::BadParams(format!("cubic1 requires x0 > y0 (got x0 = {x0}, y0 = {y0})")));
                }
                on_unit_circle(x0, y0)
            }
            CurveFamily::Cubic2 { m, x0, y0 } => {
                positive("m", m)?;
                positive("x0", x0)?;
                positive("y0", y0)?;
                on_unit_circle(x0, y0)
            }
            CurveFamily::Custom { .. } => Ok(()),
        }
    }

    /// Coefficient transcription of the family's parametrization.
    pub fn curve(&self) -> Result<RationalCurve, CurveError> {
        self.validate()?;
        let rows: [Vec<f64>; 4] = match self {
            &CurveFamily::Cubic { m, x0 } => [
                vec![-m, 0.0, m],
                vec![0.0, -1.0, 0.0, 1.0],
                vec![0.0, m * x0],
                vec![0.0, 0.0, m * x0],
            ],
            &CurveFamily::Cubic1 { m, x0, y0 } => {
                let d = (x0 * x0 - y0 * y0) / 4.0;
                [
                    vec![m * y0 * d, 0.0, m * y0],
                    vec![m * x0 * d, 0.0, -m * x0],
                    vec![0.0, -0.25, 0.0, 1.0],
                    vec![0.0, -m * x0 * y0],
                ]
            }
            &CurveFamily::Cubic2 { m, x0, y0 } => [
                vec![0.0, x0 * m],
                vec![m * (y0 * y0 + 1.0) / (2.0 * y0), 0.0, -m * x0 * x0 / (2.0 * y0)],
                vec![0.0, 0.125, 0.0, -0.125],
                vec![m * (y0 * y0 + 1.0) / 2.0, 0.0, m * x0 * x0 / 2.0],
            ],
            CurveFamily::Custom { rows } => rows.clone(),
        };
        RationalCurve::from_rows(rows)
    }

    /// Quadratic generators of the homogeneous ideal of the family's cubic.
    pub fn ideal_generators(&self) -> Result<Vec<QuadraticForm>, CurveError> {
        self.validate()?;
        let gens = match *self {
            CurveFamily::Cubic { m, x0 } => vec![
                QuadraticForm::from_terms("Z^2 - U^2 + x0*X*U", &[(Z, Z, 1.0), (U, U, -1.0), (X, U, x0)]),
                QuadraticForm::from_terms("X*U - m*Y*Z", &[(X, U, 1.0), (Y, Z, -m)]),
                QuadraticForm::from_terms("X*Z + m*Y*(x0*X - U)", &[(X, Z, 1.0), (X, Y, m * x0), (Y, U, -m)]),
            ],
            CurveFamily::Cubic1 { m, x0, y0 } => vec![
                QuadraticForm::from_terms(
                    "X^2/y0^2 - Y^2/x0^2 + (1/x0^2 - 1/y0^2)*U^2",
                    &[(X, X, 1.0 / (y0 * y0)), (Y, Y, -1.0 / (x0 * x0)), (U, U, 1.0 / (x0 * x0) - 1.0 / (y0 * y0))],
                ),
                QuadraticForm::from_terms(
                    "2m*Z*(X/y0 + Y/x0) - U*(X/x0 + Y/y0)",
                    &[(X, Z, 2.0 * m / y0), (Y, Z, 2.0 * m / x0), (X, U, -1.0 / x0), (Y, U, -1.0 / y0)],
                ),
                QuadraticForm::from_terms(
                    "(X/y0 - Y/x0)^2 + 4m/(x0*y0)*Z*U - U^2/(x0^2*y0^2)",
                    &[
                        (X, X, 1.0 / (y0 * y0)),
                        (X, Y, -2.0 / (x0 * y0)),
                        (Y, Y, 1.0 / (x0 * x0)),
                        (Z, U, 4.0 * m / (x0 * y0)),
                        (U, U, -1.0 / (x0 * x0 * y0 * y0)),
                    ],
                ),
            ],
            CurveFamily::Cubic2 { m, x0, y0 } => {
                let k = m * x0 * x0 * x0;
                vec![
                    QuadraticForm::from_terms(
                        "(1 + y0^2)*X^2 + y0^2*Y^2 - U^2",
                        &[(X, X, 1.0 + y0 * y0), (Y, Y, y0 * y0), (U, U, -1.0)],
                    ),
                    QuadraticForm::from_terms(
                        "2y0^2/(m*x0^3)*X*U + 8*Z*U + 8y0*Y*Z - 2y0/(m*x0^3)*X*Y",
                        &[(X, U, 2.0 * y0 * y0 / k), (Z, U, 8.0), (Y, Z, 8.0 * y0), (X, Y, -2.0 * y0 / k)],
                    ),
                    QuadraticForm::from_terms(
                        "x0^2*X^2 - y0^2*Y^2 + 2y0*Y*U - 8m*x0^3*X*Z - U^2",
                        &[(X, X, x0 * x0), (Y, Y, -y0 * y0), (Y, U, 2.0 * y0), (X, Z, -8.0 * k), (U, U, -1.0)],
                    ),
                ]
            }
            CurveFamily::Custom { .. } => return Err(CurveError::NotAvailable),
        };
        Ok(gens)
    }
}

/// Quadratic form `vᵀ Q v` on `(X, Y, Z, U)` with symmetric `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub label: String,
    pub matrix: [[f64; 4]; 4],
}

impl QuadraticForm {
    /// Builds the form from monomials `(i, j, coefficient)` meaning `coefficient · v_i v_j`.
    pub fn from_terms(label: &str, terms: &[(usize, usize, f64)]) -> Self {
        let mut q = [[0.0; 4]; 4];
        for &(i, j, c) in terms {
            if i == j {
                q[i][i] += c;
            } else {
                q[i][j] += c / 2.0;
                q[j][i] += c / 2.0;
            }
        }
        QuadraticForm { label: label.to_string(), matrix: q }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }

    pub fn eval(&self, p: &HomPoint) -> f64 {
        let v = p.0;
        (0..4).map(|i| (0..4).map(|j| self.matrix[i][j] * v[i] * v[j]).sum::<f64>()).sum()
    }

    /// The form `g ∘ map⁻¹`, which vanishes on `map(Γ)` whenever `g` vanishes on `Γ`.
    pub fn transformed(&self, map: &MoebiusMap) -> Self {
        let inv = map.inverse();
        let a = inv.matrix();
        let q = Matrix4::from_fn(|i, j| self.matrix[i][j]);
        let r = a.transpose() * q * a;
        let matrix = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (r[(i, j)] + r[(j, i)])));
        QuadraticForm { label: self.label.clone(), matrix }
    }
}

/// `g(Γ(t))` expanded as a polynomial in `t`.
pub fn compose_ideal(g: &QuadraticForm, c: &RationalCurve) -> Poly1 {
    compose_with(g.matrix, c.components())
}

fn compose_with(q: [[f64; 4]; 4], comps: &[Poly1; 4]) -> Poly1 {
    let mut acc = Poly1::zero();
    for i in 0..4 {
        for j in 0..4 {
            if q[i][j] != 0.0 {
                acc = &acc + &(&comps[i] * &comps[j]).scale(q[i][j]);
            }
        }
    }
    acc
}

/// Vanishing check of a generator along a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealResidual {
    pub label: String,
    pub coefficients: Vec<f64>,
    /// Largest coefficient of the expansion with every term taken in absolute value.
    pub term_scale: f64,
    /// Largest coefficient of the composition relative to `term_scale`.
    pub relative: f64,
}

impl IdealResidual {
    pub fn vanishes(&self, tol: f64) -> bool {
        self.relative <= tol
    }
}

pub fn ideal_residual(g: &QuadraticForm, c: &RationalCurve) -> IdealResidual {
    let poly = compose_ideal(g, c);
    let abs_q = g.matrix.map(|row| row.map(f64::abs));
    let abs_comps = c.components().clone().map(|p| p.abs_coeffs());
    let term_scale = compose_with(abs_q, &abs_comps).max_abs();
    let relative = if term_scale > 0.0 { poly.max_abs() / term_scale } else { 0.0 };
    IdealResidual { label: g.label.clone(), coefficients: poly.coeffs().to_vec(), term_scale, relative }
}
