//! Rational polar curves: univariate polynomial algebra, evaluation on the projective
//! parameter line, the named twisted-cubic families and their ideal generators.

mod curve;
mod family;
mod poly;

pub use curve::{Param, RationalCurve, MAX_CURVE_DEGREE};
pub use family::{compose_ideal, ideal_residual, CurveFamily, IdealResidual, QuadraticForm};
pub use poly::{Poly1, MAX_POLY_DEGREE};

use thiserror::Error;

use crate::minkgeom::{MoebiusMap, SpherePoint};
use crate::minkgeom::HomPoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("invalid family parameters: {0}")]
    BadParams(String),
    #[error("all components vanish at this parameter (base point)")]
    BasePoint,
    #[error("parameter [0:0] is not a point of the projective line")]
    BadParameter,
    #[error("curve derivative is degenerate at this parameter")]
    SingularParam,
    #[error("no ideal generators are listed for custom curves")]
    NotAvailable,
    #[error("tangency polynomial vanishes identically")]
    IdenticallyZero,
    #[error("components share a common factor of degree {0}")]
    CommonFactor(usize),
    #[error("curve degree {0} exceeds the supported maximum of 4")]
    DegreeTooHigh(usize),
    #[error("every component is constant")]
    Constant,
    #[error("coefficients must be finite")]
    NonFinite,
}

pub fn family_curve(f: &CurveFamily) -> Result<RationalCurve, CurveError> {
    f.curve()
}

pub fn eval_curve(c: &RationalCurve, t: Param) -> Result<HomPoint, CurveError> {
    c.eval(t)
}

pub fn curve_tangent(c: &RationalCurve, t: Param) -> Result<HomPoint, CurveError> {
    c.tangent(t)
}

pub fn ideal_generators(f: &CurveFamily) -> Result<Vec<QuadraticForm>, CurveError> {
    f.ideal_generators()
}

pub fn transform_curve(m: &MoebiusMap, c: &RationalCurve) -> RationalCurve {
    c.transform(m)
}

pub fn tangency_poly(c: &RationalCurve, q: SpherePoint) -> Result<Poly1, CurveError> {
    c.tangency_poly(q)
}
