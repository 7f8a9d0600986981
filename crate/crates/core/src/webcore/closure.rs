use serde::{Deserialize, Serialize};

use super::hex::candidate;
use super::{hex_residual_with, web_function, SampleSpec, WebError, WebFunction};
use crate::polycurve::RationalCurve;

const SOLVE_TOL: f64 = 1e-12;
const MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    /// Center `(a, b, c)` of the hexagon on the surface `W = 0`.
    pub base: [f64; 3],
    pub eps: f64,
    /// `|u1 − (a + ε)|` after the sixth side.
    pub defect: f64,
    pub iterations: usize,
    /// The six vertices in the `(u1, u2)` chart.
    pub vertices: Vec<[f64; 2]>,
}

/// Solves `W = 0` for the coordinate `free` near `pred`, keeping the other coordinates of
/// `u`. Newton steps confined to `[pred − r, pred + r]`, falling back to bisection on the
/// sign change nearest to `pred`.
fn solve_slot(
    w: &WebFunction,
    u: [f64; 3],
    free: usize,
    pred: f64,
    r: f64,
    step: usize,
) -> Result<(f64, usize), WebError> {
    let others: Vec<f64> = (0..3).filter(|&i| i != free).map(|i| u[i]).collect();
    let p = w.restrict(free, [others[0], others[1]]);
    let dp = p.derivative();
    let (lo, hi) = (pred - r, pred + r);
    let mut x = pred;
    for it in 1..=MAX_ITER {
        let (f, df) = (p.eval(x), dp.eval(x));
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let next = x - f / df;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let done = (next - x).abs() <= SOLVE_TOL * (1.0 + x.abs());
        x = next;
        if done {
            return Ok((x, it));
        }
    }
    // bisection on the nearest bracketing cell
    const CELLS: usize = 64;
    let h = r / CELLS as f64;
    let mut bracket = None;
    'scan: for k in 0..CELLS {
        for (a, b) in [(pred + k as f64 * h, pred + (k + 1) as f64 * h), (pred - (k + 1) as f64 * h, pred - k as f64 * h)] {
            if p.eval(a) * p.eval(b) <= 0.0 {
                bracket = Some((a, b));
                break 'scan;
            }
        }
    }
    let (mut a, mut b) = bracket.ok_or(WebError::SheetJump { step, distance: f64::INFINITY })?;
    let mut fa = p.eval(a);
    for it in 1..=MAX_ITER {
        let m = 0.5 * (a + b);
        if (b - a) <= SOLVE_TOL * (1.0 + m.abs()) {
            return Ok((m, it));
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return Ok((m, it));
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Err(WebError::NoConvergence { step })
}

/// Thomsen hexagon around the surface point `base` with side parameter `eps`.
///
/// Starting at `(a + ε, b)` the traversal alternates: follow the `u3` leaf to `u1 = a`,
/// the `u2` leaf to `u3 = c`, the `u1` leaf to `u2 = b`, twice. For a hexagonal web the
/// figure closes exactly. A vertex where some `∂W/∂u_i` has changed sign since the base lies
/// beyond a fold and is reported as a sheet jump.
pub fn thomsen_closure_on_sheet(w: &WebFunction, base: [f64; 3], eps: f64) -> Result<ClosureReport, WebError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(WebError::DegenerateConfig(format!("closure step must be positive (got {eps})")));
    }
    let [a, b, c] = base;
    let radius = 10.0 * eps;
    let mut u = base;
    let mut iterations = 0;
    let mut vertices = Vec::with_capacity(6);
    // on a regular patch no partial W_i changes sign; a flip means a fold was crossed
    let j0 = w.jet(base);
    let signs = [0, 1, 2].map(|i| j0.d(&[i]).signum());
    // (held, set, target, free)
    let first = (1, 0, a + eps, 2);
    let cycle = [(2, 0, a, 1), (1, 2, c, 0), (0, 1, b, 2)];
    let steps = std::iter::once(first).chain(cycle.iter().copied()).chain(cycle.iter().copied().take(2));
    for (step, (_held, set, target, free)) in steps.enumerate() {
        let j = w.jet(u);
        let slope = j.d(&[set]) / j.d(&[free]);
        let pred = if slope.is_finite() { u[free] - slope * (target - u[set]) } else { u[free] };
        u[set] = target;
        let (x, its) = solve_slot(w, u, free, pred, radius, step)?;
        if (x - pred).abs() > radius {
            return Err(WebError::SheetJump { step, distance: (x - pred).abs() });
        }
        u[free] = x;
        let j = w.jet(u);
        if (0..3).any(|i| j.d(&[i]) * signs[i] <= 0.0) {
            return Err(WebError::SheetJump { step, distance: (x - pred).abs() });
        }
        iterations += its;
        vertices.push([u[0], u[1]]);
    }
    Ok(ClosureReport { base, eps, defect: (u[0] - (a + eps)).abs(), iterations, vertices })
}

/// Closure around `(a, b)` on the most regular real sheet of `W(a, b, ·) = 0`.
pub fn thomsen_closure(c: &RationalCurve, base: (f64, f64), eps: f64) -> Result<ClosureReport, WebError> {
    let w = web_function(c);
    let (a, b) = base;
    let u3 = w
        .restrict(2, [a, b])
        .real_roots(1e-9)
        .into_iter()
        .map(|r| {
            let j = w.jet([a, b, r]);
            (r, j.d(&[2]).abs() / j.scale(&[2]).max(f64::MIN_POSITIVE))
        })
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .ok_or(WebError::NoSheet)?
        .0;
    thomsen_closure_on_sheet(&w, [a, b, u3], eps)
}

/// Real root of `W(a, b, ·) = 0` closest to `target`.
pub fn sheet_near(w: &WebFunction, a: f64, b: f64, target: f64) -> Option<f64> {
    w.restrict(2, [a, b])
        .real_roots(1e-9)
        .into_iter()
        .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
}

/// Closures at the first `count` sampled bases (in seeded sampling order) where the
/// hexagonality residual is defined and every step size in `eps` closes without leaving
/// the sheet. Returns one row of reports per base, ordered like `eps`.
pub fn closure_survey(
    c: &RationalCurve,
    spec: &SampleSpec,
    count: usize,
    eps: &[f64],
) -> Result<Vec<Vec<ClosureReport>>, WebError> {
    let w = web_function(c);
    let budget = count.max(1) * 200;
    let mut rows = Vec::with_capacity(count);
    for i in 0..budget {
        if rows.len() == count {
            break;
        }
        let (a, b) = candidate(spec.seed, i, spec);
        let Ok(s) = hex_residual_with(&w, a, b, spec.fold_tol, spec.min_separation) else {
            continue;
        };
        let row: Result<Vec<_>, _> = eps.iter().map(|&e| thomsen_closure_on_sheet(&w, s.u, e)).collect();
        if let Ok(row) = row {
            rows.push(row);
        }
    }
    if rows.len() < count {
        return Err(WebError::InsufficientSamples { usable: rows.len(), requested: count });
    }
    Ok(rows)
}

/// Observed order `p` in `defect ∝ ε^p` from closures at `ε` and `ε/2`.
pub fn closure_scaling_exponent(w: &WebFunction, base: [f64; 3], eps: f64) -> Result<f64, WebError> {
    let big = thomsen_closure_on_sheet(w, base, eps)?.defect;
    let small = thomsen_closure_on_sheet(w, base, eps / 2.0)?.defect;
    Ok((big / small).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycurve::CurveFamily;
    use crate::webcore::perturb_curve;

    #[test]
    fn hexagons_close_for_the_cubic() {
        let c = CurveFamily::figure1().curve().unwrap();
        for eps in [0.05, 0.1] {
            let r = thomsen_closure(&c, (0.3, -0.6), eps).unwrap();
            assert_eq!(r.vertices.len(), 6);
            assert!(r.defect <= 1e-8, "{r:?}");
        }
    }

    #[test]
    fn perturbed_hexagons_do_not() {
        let c = CurveFamily::figure1().curve().unwrap();
        let p = perturb_curve(&c, 0.05, 2).unwrap();
        let hex = thomsen_closure(&c, (0.3, -0.6), 0.1).unwrap();
        let bad = thomsen_closure(&p, (0.3, -0.6), 0.1).unwrap();
        assert!(bad.defect >= 1e4 * hex.defect.max(1e-16), "{} vs {}", bad.defect, hex.defect);
    }

    #[test]
    fn survey_finds_closing_bases() {
        let c = CurveFamily::figure1().curve().unwrap();
        let rows = closure_survey(&c, &SampleSpec::default(), 4, &[0.02, 0.1]).unwrap();
        assert_eq!(rows.len(), 4);
        for r in rows.iter().flatten() {
            assert!(r.defect <= 1e-8, "{r:?}");
        }
        let w = web_function(&c);
        let base = rows[0][0].base;
        assert_eq!(sheet_near(&w, base[0], base[1], base[2]), Some(base[2]));
    }

    #[test]
    fn defect_order_is_measurable() {
        let c = CurveFamily::figure1().curve().unwrap();
        let p = perturb_curve(&c, 0.05, 2).unwrap();
        let w = web_function(&p);
        let base = thomsen_closure(&p, (0.3, -0.6), 0.05).unwrap().base;
        let k = closure_scaling_exponent(&w, base, 0.05).unwrap();
        assert!(k > 1.5 && k < 6.0, "{k}");
    }

    #[test]
    fn rejects_bad_step() {
        let c = CurveFamily::figure1().curve().unwrap();
        assert!(matches!(thomsen_closure(&c, (0.3, -0.6), 0.0), Err(WebError::DegenerateConfig(_))));
    }

    #[test]
    fn hexagon_across_a_fold_is_a_sheet_jump() {
        // W is even in u1 for this family, so u1 = 0 is a fold
        let c = CurveFamily::figure1().curve().unwrap();
        let w = web_function(&c);
        let base = [-0.05398197649843928, 0.3683845095151268, -1.136020833856776];
        assert!(thomsen_closure_on_sheet(&w, base, 0.05).unwrap().defect <= 1e-12);
        assert!(matches!(thomsen_closure_on_sheet(&w, base, 0.1), Err(WebError::SheetJump { step: 0, .. })));
    }
}
