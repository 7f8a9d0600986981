use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{web_function, WebError, WebFunction};
use crate::polycurve::RationalCurve;

/// Candidates drawn per requested sample before giving up.
const ATTEMPTS_PER_SAMPLE: usize = 20;

/// Sampling plan for hexagonality certification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub u1_window: [f64; 2],
    pub u2_window: [f64; 2],
    /// Samples with `|∂W/∂u_i|` below this fraction of its term scale are rejected.
    pub fold_tol: f64,
    /// Minimum distance between any two of the three parameters.
    pub min_separation: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            count: 100,
            seed: 0,
            u1_window: [-2.0, 2.0],
            u2_window: [-2.0, 2.0],
            fold_tol: 1e-6,
            min_separation: 1e-3,
        }
    }
}

/// Residual of the hexagonality equation at one point of the surface `W = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexSample {
    pub u: [f64; 3],
    /// `∂²/∂u1∂u2 ln(F_1/F_2)` for the implicit function `u3 = F(u1, u2)`.
    pub residual: f64,
    /// The residual divided by the sum of the absolute values of its terms.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexReport {
    pub requested: usize,
    pub samples: usize,
    pub rejected: usize,
    pub max_residual: f64,
    pub median_residual: f64,
    pub max_relative: f64,
    pub median_relative: f64,
    pub worst: HexSample,
}

/// Hexagonality residual at a point `u` with `W(u) = 0`.
///
/// With `F_i = −W_i/W_3` and `G = ln|W_1| − ln|W_2|`, the residual is the mixed second
/// derivative of `G(u1, u2, F(u1, u2))`. It is invariant under rescaling `W` and hence
/// under Möbius transformations of the curve.
pub fn hex_residual_at(w: &WebFunction, u: [f64; 3], fold_tol: f64) -> Result<HexSample, WebError> {
    let j = w.jet(u);
    for v in 0..3 {
        if j.d(&[v]).abs() < fold_tol * j.scale(&[v]) || j.d(&[v]) == 0.0 {
            return Err(WebError::FoldPoint);
        }
    }
    let d = |v: &[usize]| j.d(v);
    let (w1, w2, w3) = (d(&[0]), d(&[1]), d(&[2]));
    let f1 = -w1 / w3;
    let f2 = -w2 / w3;
    let f12 = -(d(&[0, 1]) + d(&[1, 2]) * f1 + (d(&[0, 2]) + d(&[2, 2]) * f1) * f2) / w3;
    let g1 = |k: usize| d(&[0, k]) / w1 - d(&[1, k]) / w2;
    let g2 = |a: usize, b: usize| {
        (d(&[0, a, b]) / w1 - d(&[0, a]) * d(&[0, b]) / (w1 * w1))
            - (d(&[1, a, b]) / w2 - d(&[1, a]) * d(&[1, b]) / (w2 * w2))
    };
    let terms = [g2(0, 1), g2(1, 2) * f1, g2(0, 2) * f2, g2(2, 2) * f1 * f2, g1(2) * f12];
    let residual: f64 = terms.iter().sum();
    let size: f64 = terms.iter().map(|t| t.abs()).sum();
    let relative = if size > 0.0 { residual.abs() / size } else { 0.0 };
    Ok(HexSample { u, residual, relative })
}

/// Worst residual over the real sheets `u3` of `W(u1, u2, u3) = 0`.
pub fn hex_residual_with(
    w: &WebFunction,
    u1: f64,
    u2: f64,
    fold_tol: f64,
    min_separation: f64,
) -> Result<HexSample, WebError> {
    if (u1 - u2).abs() < min_separation {
        return Err(WebError::FoldPoint);
    }
    let roots = w.restrict(2, [u1, u2]).real_roots(1e-9);
    if roots.is_empty() {
        return Err(WebError::NoSheet);
    }
    let mut best: Option<HexSample> = None;
    for u3 in roots {
        if (u3 - u1).abs() < min_separation || (u3 - u2).abs() < min_separation {
            continue;
        }
        if let Ok(s) = hex_residual_at(w, [u1, u2, u3], fold_tol) {
            if best.is_none_or(|b| s.residual.abs() > b.residual.abs()) {
                best = Some(s);
            }
        }
    }
    best.ok_or(WebError::FoldPoint)
}

pub fn hex_residual(c: &RationalCurve, u1: f64, u2: f64) -> Result<HexSample, WebError> {
    let d = SampleSpec::default();
    hex_residual_with(&web_function(c), u1, u2, d.fold_tol, d.min_separation)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn draw(rng: &mut ChaCha8Rng, w: [f64; 2]) -> f64 {
    w[0] + (w[1] - w[0]) * rng.random::<f64>()
}

/// Candidate `i` of a seeded plan; independent of how candidates are scheduled.
pub(crate) fn candidate(seed: u64, i: usize, spec: &SampleSpec) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    (draw(&mut rng, spec.u1_window), draw(&mut rng, spec.u2_window))
}

/// Residuals over seeded random samples; candidates are evaluated in parallel and
/// consumed in index order, so the report depends only on the spec.
pub fn hex_certify(c: &RationalCurve, spec: &SampleSpec) -> Result<HexReport, WebError> {
    if spec.count == 0 {
        return Err(WebError::EmptySampleSpec);
    }
    let w = web_function(c);
    let budget = spec.count * ATTEMPTS_PER_SAMPLE;
    let outcomes: Vec<Option<HexSample>> = (0..budget)
        .into_par_iter()
        .map(|i| {
            let (u1, u2) = candidate(spec.seed, i, spec);
            hex_residual_with(&w, u1, u2, spec.fold_tol, spec.min_separation).ok()
        })
        .collect();
    let mut used = Vec::with_capacity(spec.count);
    let mut rejected = 0;
    for o in outcomes {
        if used.len() == spec.count {
            break;
        }
        match o {
            Some(s) => used.push(s),
            None => rejected += 1,
        }
    }
    if used.len() * 2 < spec.count {
        return Err(WebError::InsufficientSamples { usable: used.len(), requested: spec.count });
    }
    let worst = *used
        .iter()
        .max_by(|a, b| a.residual.abs().total_cmp(&b.residual.abs()))
        .expect("nonempty");
    let mut abs: Vec<f64> = used.iter().map(|s| s.residual.abs()).collect();
    let mut rel: Vec<f64> = used.iter().map(|s| s.relative).collect();
    Ok(HexReport {
        requested: spec.count,
        samples: used.len(),
        rejected,
        max_residual: worst.residual.abs(),
        median_residual: median(&mut abs),
        max_relative: rel.iter().copied().fold(0.0, f64::max),
        median_relative: median(&mut rel),
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycurve::CurveFamily;
    use crate::webcore::perturb_curve;

    #[test]
    fn figure_one_is_hexagonal() {
        let c = CurveFamily::figure1().curve().unwrap();
        let r = hex_certify(&c, &SampleSpec::default()).unwrap();
        assert_eq!(r.samples, 100);
        assert!(r.max_residual <= 1e-6, "{r:?}");
    }

    #[test]
    fn perturbed_cubic_is_not() {
        let c = CurveFamily::figure1().curve().unwrap();
        let p = perturb_curve(&c, 0.05, 1).unwrap();
        let r = hex_certify(&p, &SampleSpec::default()).unwrap();
        assert!(r.median_residual > 1e-2, "{r:?}");
    }

    #[test]
    fn z_coefficient_nudge_breaks_hexagonality() {
        let c = CurveFamily::figure1().curve().unwrap();
        let mut rows = c.rows();
        rows[2][1] += 0.05;
        let p = RationalCurve::from_rows(rows).unwrap();
        let r = hex_certify(&p, &SampleSpec::default()).unwrap();
        assert!(r.median_residual > 1e-2, "{r:?}");
    }

    #[test]
    fn empty_window_is_insufficient() {
        let c = CurveFamily::figure1().curve().unwrap();
        let spec = SampleSpec { u1_window: [0.5, 0.5], u2_window: [0.5, 0.5], ..SampleSpec::default() };
        assert!(matches!(hex_certify(&c, &spec), Err(WebError::InsufficientSamples { usable: 0, .. })));
        let spec = SampleSpec { count: 0, ..SampleSpec::default() };
        assert_eq!(hex_certify(&c, &spec), Err(WebError::EmptySampleSpec));
    }

    #[test]
    fn reports_are_reproducible() {
        let c = CurveFamily::figure3().curve().unwrap();
        let spec = SampleSpec { count: 100, seed: 9, ..SampleSpec::default() };
        let r = hex_certify(&c, &spec).unwrap();
        assert_eq!(r.samples, 100);
        assert!(r.max_residual <= 1e-6);
        assert_eq!(r, hex_certify(&c, &spec).unwrap());
    }

    #[test]
    fn single_pair_residual() {
        let c = CurveFamily::figure3().curve().unwrap();
        let s = hex_residual(&c, 0.3, -0.6).unwrap();
        assert!(s.residual.abs() < 1e-8);
        let w = web_function(&c);
        assert!(w.eval(s.u).abs() <= 1e-10 * w.eval_abs(s.u));
    }
}
