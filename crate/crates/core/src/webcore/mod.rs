//! The web engine: the web function, leaves through a point, point classification,
//! the hexagonality residual, hexagon closure and the Möbius invariants of the cubic family.

mod closure;
mod hex;
mod invariants;
mod points;
mod webfn;

pub use closure::{
    closure_scaling_exponent, closure_survey, sheet_near, thomsen_closure, thomsen_closure_on_sheet, ClosureReport,
};
pub use hex::{hex_certify, hex_residual, hex_residual_at, hex_residual_with, HexReport, HexSample, SampleSpec};
pub use invariants::{invariants, invariants_of_curve, Anchors, InvariantsReport};
pub use points::{
    binary_discriminant, classify_point, discriminant_sign, solve_web_point, PointClass, WebPoint, WebSolution,
    DOUBLE_ROOT_TOL,
};
pub use webfn::{web_function, Jet, WebFunction};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::minkgeom::GeomError;
use crate::polycurve::{CurveError, Poly1, RationalCurve};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WebError {
    #[error("no real solution u3 of the web equation for the given pair")]
    NoSheet,
    #[error("web equation is degenerate here (fold of the implicit function)")]
    FoldPoint,
    #[error("only {usable} of {requested} samples were usable")]
    InsufficientSamples { usable: usize, requested: usize },
    #[error("closure step {step} jumped {distance:e} away from its continuation")]
    SheetJump { step: usize, distance: f64 },
    #[error("closure step {step} did not converge")]
    NoConvergence { step: usize },
    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),
    #[error("invariants are defined for the cubic family only")]
    NotCubicFamily,
    #[error("point is not finite")]
    NonFinitePoint,
    #[error("sample count must be at least 1")]
    EmptySampleSpec,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Adds seeded uniform noise in `[−magnitude, magnitude]·s` to every coefficient below the
/// curve's top degree, where `s` is the largest coefficient of the curve.
pub fn perturb_curve(c: &RationalCurve, magnitude: f64, seed: u64) -> Result<RationalCurve, CurveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = c.coefficient_scale();
    let n = c.max_degree();
    let rows = c.rows().map(|row| {
        row.iter()
            .enumerate()
            .map(|(k, &v)| {
                let noise: f64 = rng.random_range(-1.0..=1.0);
                if k < n {
                    v + magnitude * s * noise
                } else {
                    v
                }
            })
            .collect::<Vec<f64>>()
    });
    RationalCurve::new(rows.map(Poly1::new))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycurve::CurveFamily;

    #[test]
    fn perturbation_is_deterministic() {
        let c = CurveFamily::figure1().curve().unwrap();
        assert_eq!(perturb_curve(&c, 0.0, 3).unwrap(), c);
        let a = perturb_curve(&c, 0.05, 11).unwrap();
        assert_eq!(a, perturb_curve(&c, 0.05, 11).unwrap());
        assert_ne!(a, perturb_curve(&c, 0.05, 12).unwrap());
        assert_ne!(a, c);
        // leading coefficients are untouched
        for i in 0..4 {
            assert_eq!(a.components()[i].coeff(3), c.components()[i].coeff(3));
        }
        let bound = 0.05 * c.coefficient_scale();
        for (ra, rc) in a.rows().iter().zip(c.rows()) {
            for (x, y) in ra.iter().zip(rc) {
                assert!((x - y).abs() <= bound);
            }
        }
    }
}
