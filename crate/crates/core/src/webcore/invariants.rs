use serde::{Deserialize, Serialize};

use super::WebError;
use crate::minkgeom::{pair, HomPoint};
use crate::polycurve::{CurveFamily, Param, RationalCurve};

/// Parameters of the distinguished points: `c1`, `c2`, `p0`, `p̄0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchors {
    pub c1: Param,
    pub c2: Param,
    pub p0: Param,
    pub p0_bar: Param,
}

impl Default for Anchors {
    fn default() -> Self {
        Anchors { c1: Param::affine(1.0), c2: Param::affine(-1.0), p0: Param::INFINITY, p0_bar: Param::affine(0.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsReport {
    #[serde(rename = "S")]
    pub s: i8,
    #[serde(rename = "Sbar")]
    pub s_bar: i8,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "Ibar")]
    pub i_bar: f64,
    pub p0: HomPoint,
    pub p0_bar: HomPoint,
    pub c1: HomPoint,
    pub c2: HomPoint,
    pub p0_prime: HomPoint,
    pub p0_bar_prime: HomPoint,
}

/// Tangent line at `Γ(t)` met with the plane polar to `Γ(t)`.
fn polar_tangent_point(c: &RationalCurve, t: Param) -> Result<(HomPoint, HomPoint), WebError> {
    let p = c.eval(t)?.normalize();
    let d = c.tangent(t)?;
    let hit = p.polar_plane().meet_line(&p, &d);
    if hit.max_abs() <= 1e-12 * d.max_abs() {
        return Err(WebError::DegenerateConfig(format!("tangent line at {t} lies in the polar plane")));
    }
    Ok((p, hit.normalize()))
}

fn cross_ratio_like(a: &HomPoint, b: &HomPoint) -> Result<f64, WebError> {
    let den = pair(a, b);
    if den.abs() <= 1e-12 * a.max_abs() * b.max_abs() {
        return Err(WebError::DegenerateConfig("vanishing pairing in a denominator".into()));
    }
    Ok(pair(a, a) * pair(b, b) / (den * den))
}

fn sign(v: f64) -> Result<i8, WebError> {
    if v == 0.0 || !v.is_finite() {
        Err(WebError::DegenerateConfig("sign invariant is zero".into()))
    } else {
        Ok(if v > 0.0 { 1 } else { -1 })
    }
}

/// Discrete invariants `S`, `S̄` and continuous invariants `I`, `Ī` built from the points at
/// the given parameters. Every point enters each invariant an even number of times, so the
/// values do not depend on homogeneous scalings.
pub fn invariants_of_curve(c: &RationalCurve, at: Anchors) -> Result<InvariantsReport, WebError> {
    let c1 = c.eval(at.c1)?.normalize();
    let c2 = c.eval(at.c2)?.normalize();
    let (p0, p0p) = polar_tangent_point(c, at.p0)?;
    let (pb, pbp) = polar_tangent_point(c, at.p0_bar)?;
    let triple = |x: &HomPoint| pair(&c1, &c2) * pair(&c2, x) * pair(x, &c1);
    Ok(InvariantsReport {
        s: sign(triple(&p0p))?,
        s_bar: sign(triple(&pbp))?,
        i: cross_ratio_like(&p0, &pbp)?,
        i_bar: cross_ratio_like(&pb, &p0p)?,
        p0,
        p0_bar: pb,
        c1,
        c2,
        p0_prime: p0p,
        p0_bar_prime: pbp,
    })
}

/// Invariants of a member of the cubic family; expected `S = −1`, `S̄ = +1`,
/// `I = 1 + m²x0²`, `Ī = 1 − x0²`.
pub fn invariants(f: &CurveFamily) -> Result<InvariantsReport, WebError> {
    if !matches!(f, CurveFamily::Cubic { .. }) {
        return Err(WebError::NotCubicFamily);
    }
    invariants_of_curve(&f.curve()?, Anchors::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkgeom::{moebius_exp, moebius_generator, Generator};

    #[test]
    fn figure_one_values() {
        let r = invariants(&CurveFamily::figure1()).unwrap();
        assert_eq!((r.s, r.s_bar), (-1, 1));
        assert!((r.i - 1.25).abs() < 1e-12);
        assert!((r.i_bar - 0.25).abs() < 1e-12);
    }

    #[test]
    fn normalization_anchors() {
        let (m, x0) = (0.7, 1.3);
        let r = invariants(&CurveFamily::Cubic { m, x0 }).unwrap();
        assert!(r.p0_prime.proportional(&HomPoint::new(1.0, 0.0, 0.0, x0), 1e-12));
        assert!(r.p0_bar_prime.proportional(&HomPoint::new(0.0, -1.0, m * x0, 0.0), 1e-12));
        assert!(r.p0.proportional(&HomPoint::new(0.0, 1.0, 0.0, 0.0), 1e-15));
        assert!(r.p0_bar.proportional(&HomPoint::new(1.0, 0.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn moebius_images_keep_the_invariants() {
        let f = CurveFamily::Cubic { m: 0.9, x0: 0.6 };
        let base = invariants(&f).unwrap();
        let g = moebius_generator(Generator::Bx) * 0.3 + moebius_generator(Generator::Ry) * -0.8;
        let c = f.curve().unwrap().transform(&moebius_exp(&g, 1.1));
        let r = invariants_of_curve(&c, Anchors::default()).unwrap();
        assert_eq!((r.s, r.s_bar), (base.s, base.s_bar));
        assert!((r.i - base.i).abs() < 1e-8);
        assert!((r.i_bar - base.i_bar).abs() < 1e-8);
    }

    #[test]
    fn only_for_the_cubic_family() {
        assert_eq!(invariants(&CurveFamily::figure2()), Err(WebError::NotCubicFamily));
    }
}
