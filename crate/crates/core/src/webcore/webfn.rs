use serde::Serialize;

use crate::polycurve::{Param, Poly1, RationalCurve};

/// Dense trivariate polynomial with per-variable degree at most `n`.
#[derive(Debug, Clone, PartialEq)]
struct Tri {
    n: usize,
    c: Vec<f64>,
}

impl Tri {
    fn zero(n: usize) -> Self {
        Tri { n, c: vec![0.0; (n + 1).pow(3)] }
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        let s = self.n + 1;
        (i * s + j) * s + k
    }

    fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        if i > self.n || j > self.n || k > self.n {
            0.0
        } else {
            self.c[self.idx(i, j, k)]
        }
    }

    fn add_at(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let at = self.idx(i, j, k);
        self.c[at] += v;
    }

    /// Complete homogeneous symmetric polynomial `h_d(u1, u2, u3)`.
    fn complete(d: usize) -> Self {
        let mut t = Tri::zero(d);
        for i in 0..=d {
            for j in 0..=(d - i) {
                t.add_at(i, j, d - i - j, 1.0);
            }
        }
        t
    }

    fn add(&self, o: &Tri, s: f64) -> Tri {
        let mut out = Tri::zero(self.n.max(o.n));
        for (src, f) in [(self, 1.0), (o, s)] {
            for i in 0..=src.n {
                for j in 0..=src.n {
                    for k in 0..=src.n {
                        let v = src.get(i, j, k);
                        if v != 0.0 {
                            out.add_at(i, j, k, f * v);
                        }
                    }
                }
            }
        }
        out
    }

    fn mul(&self, o: &Tri) -> Tri {
        let mut out = Tri::zero(self.n + o.n);
        for i in 0..=self.n {
            for j in 0..=self.n {
                for k in 0..=self.n {
                    let a = self.get(i, j, k);
                    if a == 0.0 {
                        continue;
                    }
                    for p in 0..=o.n {
                        for q in 0..=o.n {
                            for r in 0..=o.n {
                                let b = o.get(p, q, r);
                                if b != 0.0 {
                                    out.add_at(i + p, j + q, k + r, a * b);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn resized(&self, n: usize) -> Tri {
        let mut out = Tri::zero(n);
        for i in 0..=self.n.min(n) {
            for j in 0..=self.n.min(n) {
                for k in 0..=self.n.min(n) {
                    out.add_at(i, j, k, self.get(i, j, k));
                }
            }
        }
        out
    }
}

/// Schur polynomial in three variables for the partition `(l1 ≥ l2 ≥ l3)`, via Jacobi–Trudi.
fn schur(l: [usize; 3]) -> Tri {
    let h = |d: isize| if d < 0 { Tri::zero(0) } else { Tri::complete(d as usize) };
    let e: Vec<Vec<Tri>> = (0..3)
        .map(|i| (0..3).map(|j| h(l[i] as isize - i as isize + j as isize)).collect())
        .collect();
    const PERMS: [([usize; 3], f64); 6] =
        [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0), ([1, 0, 2], -1.0)];
    let mut acc = Tri::zero(0);
    for (p, s) in PERMS {
        acc = acc.add(&e[0][p[0]].mul(&e[1][p[1]]).mul(&e[2][p[2]]), s);
    }
    acc
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Values `d^r/dx^r x^i` for `r ≤ 3`, `i ≤ n`.
fn power_derivs(x: f64, n: usize) -> [Vec<f64>; 4] {
    let mut pw = vec![1.0; n + 1];
    for i in 1..=n {
        pw[i] = pw[i - 1] * x;
    }
    std::array::from_fn(|r| {
        (0..=n)
            .map(|i| {
                if i < r {
                    0.0
                } else {
                    let falling: f64 = (0..r).map(|s| (i - s) as f64).product();
                    falling * pw[i - r]
                }
            })
            .collect()
    })
}

/// The web function `W(u1, u2, u3)`: the dual-quadric value of the plane through
/// `Γ(u1), Γ(u2), Γ(u3)`, with the square of the Vandermonde factor divided out.
///
/// Three parameters are related by the web equation `W = 0` exactly when their curve points
/// span a plane tangent to the sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WebFunction {
    degree: usize,
    coeffs: Vec<f64>,
}

/// Partial derivatives of `W` up to third order at one point, with the matching
/// absolute-value sums used as rounding scales.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    d: [[[f64; 4]; 4]; 4],
    abs: [[[f64; 4]; 4]; 4],
}

impl Jet {
    /// Partial derivative along the listed variable indices (0, 1, 2), e.g. `d(&[0, 2])` is `W_13`.
    pub fn d(&self, vars: &[usize]) -> f64 {
        let o = Self::orders(vars);
        self.d[o[0]][o[1]][o[2]]
    }

    /// Sum of absolute term contributions to the same derivative.
    pub fn scale(&self, vars: &[usize]) -> f64 {
        let o = Self::orders(vars);
        self.abs[o[0]][o[1]][o[2]]
    }

    pub fn value(&self) -> f64 {
        self.d[0][0][0]
    }

    fn orders(vars: &[usize]) -> [usize; 3] {
        assert!(vars.len() <= 3, "jet holds derivatives up to third order");
        let mut o = [0; 3];
        for &v in vars {
            o[v] += 1;
        }
        o
    }
}

impl WebFunction {
    pub fn new(c: &RationalCurve) -> Self {
        let dmax = c.max_degree();
        let n = 2 * dmax.saturating_sub(2);
        let rows = c.rows();
        let mut subsets = Vec::new();
        for k0 in 0..=dmax {
            for k1 in (k0 + 1)..=dmax {
                for k2 in (k1 + 1)..=dmax {
                    subsets.push([k0, k1, k2]);
                }
            }
        }
        let schurs: Vec<Tri> = subsets.iter().map(|k| schur([k[2] - 2, k[1] - 1, k[0]])).collect();
        let reduced_minor = |deleted: usize| {
            let r: Vec<usize> = (0..4).filter(|&i| i != deleted).collect();
            subsets.iter().zip(&schurs).fold(Tri::zero(0), |acc, (k, s)| {
                let m = std::array::from_fn(|a| std::array::from_fn(|b| rows[r[a]][k[b]]));
                let dk = det3(m);
                if dk == 0.0 {
                    acc
                } else {
                    acc.add(s, dk)
                }
            })
        };
        let mut w = Tri::zero(0);
        for (row, sign) in [(0, 1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
            let m = reduced_minor(row).resized(dmax.saturating_sub(2));
            w = w.add(&m.mul(&m), sign);
        }
        let mut w = w.resized(n);
        // exact permutation symmetry: every permutation takes the value at the sorted index
        for i in 0..=n {
            for j in i..=n {
                for k in j..=n {
                    let v = w.get(i, j, k);
                    for (a, b, cc) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        let at = w.idx(a, b, cc);
                        w.c[at] = v;
                    }
                }
            }
        }
        WebFunction { degree: n, coeffs: w.c }
    }

    /// Degree in each variable separately.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `u1^i u2^j u3^k`.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        let s = self.degree + 1;
        if i >= s || j >= s || k >= s {
            return 0.0;
        }
        self.coeffs[(i * s + j) * s + k]
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Whether the coefficient tensor is invariant under every permutation of the variables.
    pub fn is_symmetric(&self) -> bool {
        let n = self.degree;
        (0..=n).all(|i| {
            (0..=n).all(|j| {
                (0..=n).all(|k| {
                    let v = self.coeff(i, j, k);
                    [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)]
                        .iter()
                        .all(|&(a, b, c)| self.coeff(a, b, c) == v)
                })
            })
        })
    }

    fn contract(&self, b: [&[f64]; 3]) -> f64 {
        let s = self.degree + 1;
        let mut acc = 0.0;
        for i in 0..s {
            if b[0][i] == 0.0 {
                continue;
            }
            for j in 0..s {
                let bij = b[0][i] * b[1][j];
                if bij == 0.0 {
                    continue;
                }
                let base = (i * s + j) * s;
                let mut inner = 0.0;
                for k in 0..s {
                    inner += self.coeffs[base + k] * b[2][k];
                }
                acc += bij * inner;
            }
        }
        acc
    }

    fn contract_abs(&self, b: [&[f64]; 3]) -> f64 {
        let s = self.degree + 1;
        let mut acc = 0.0;
        for i in 0..s {
            for j in 0..s {
                let base = (i * s + j) * s;
                for k in 0..s {
                    acc += (self.coeffs[base + k] * b[0][i] * b[1][j] * b[2][k]).abs();
                }
            }
        }
        acc
    }

    pub fn eval(&self, u: [f64; 3]) -> f64 {
        let b = u.map(|x| power_derivs(x, self.degree));
        self.contract([&b[0][0], &b[1][0], &b[2][0]])
    }

    /// Sum of the absolute values of the terms of `W(u)`, the natural rounding scale.
    pub fn eval_abs(&self, u: [f64; 3]) -> f64 {
        let b = u.map(|x| power_derivs(x, self.degree));
        self.contract_abs([&b[0][0], &b[1][0], &b[2][0]])
    }

    fn homogeneous_basis(&self, t: Param) -> Vec<f64> {
        let t = t.normalized();
        let n = self.degree;
        (0..=n).map(|i| t.t0.powi(i as i32) * t.t1.powi((n - i) as i32)).collect()
    }

    /// Value of the homogenized web function at three projective parameters (each scaled to
    /// unit max-norm), together with its absolute term sum.
    pub fn eval_params(&self, t: [Param; 3]) -> (f64, f64) {
        let b = t.map(|p| self.homogeneous_basis(p));
        let refs = [&b[0][..], &b[1][..], &b[2][..]];
        (self.contract(refs), self.contract_abs(refs))
    }

    /// All partial derivatives up to order three at `u`.
    pub fn jet(&self, u: [f64; 3]) -> Jet {
        let b = u.map(|x| power_derivs(x, self.degree));
        let mut d = [[[0.0; 4]; 4]; 4];
        let mut abs = [[[0.0; 4]; 4]; 4];
        for r1 in 0..4 {
            for r2 in 0..(4 - r1) {
                for r3 in 0..(4 - r1 - r2) {
                    let refs = [&b[0][r1][..], &b[1][r2][..], &b[2][r3][..]];
                    d[r1][r2][r3] = self.contract(refs);
                    abs[r1][r2][r3] = self.contract_abs(refs);
                }
            }
        }
        Jet { d, abs }
    }

    /// The polynomial in the variable at `slot` when the other two variables, in slot order,
    /// take the values `others`.
    pub fn restrict(&self, slot: usize, others: [f64; 2]) -> Poly1 {
        let n = self.degree;
        let pa = power_derivs(others[0], n);
        let pb = power_derivs(others[1], n);
        let coeffs = (0..=n)
            .map(|e| {
                let mut acc = 0.0;
                for x in 0..=n {
                    for y in 0..=n {
                        let (i, j, k) = match slot {
                            0 => (e, x, y),
                            1 => (x, e, y),
                            _ => (x, y, e),
                        };
                        acc += self.coeff(i, j, k) * pa[0][x] * pb[0][y];
                    }
                }
                acc
            })
            .collect();
        Poly1::new(coeffs)
    }
}

pub fn web_function(c: &RationalCurve) -> WebFunction {
    WebFunction::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkgeom::{HomPoint, ETA};
    use crate::polycurve::CurveFamily;
    use proptest::prelude::*;

    fn direct_dual_value(c: &RationalCurve, u: [f64; 3]) -> f64 {
        let pts: Vec<HomPoint> = u.iter().map(|&t| HomPoint(c.components().clone().map(|p| p.eval(t)))).collect();
        let minor = |del: usize| {
            let r: Vec<usize> = (0..4).filter(|&i| i != del).collect();
            det3(std::array::from_fn(|a| std::array::from_fn(|b| pts[b].0[r[a]])))
        };
        let vand = (u[1] - u[0]) * (u[2] - u[0]) * (u[2] - u[1]);
        (0..4).map(|i| ETA[i] * minor(i).powi(2)).sum::<f64>() / (vand * vand)
    }

    #[test]
    fn schur_polynomials() {
        // s_(1,0,0) = u1 + u2 + u3
        let s = schur([1, 0, 0]);
        assert_eq!((s.get(1, 0, 0), s.get(0, 1, 0), s.get(0, 0, 1), s.get(0, 0, 0)), (1.0, 1.0, 1.0, 0.0));
        // s_(1,1,0) = u1u2 + u1u3 + u2u3
        let s = schur([1, 1, 0]);
        assert_eq!((s.get(1, 1, 0), s.get(1, 0, 1), s.get(0, 1, 1), s.get(2, 0, 0)), (1.0, 1.0, 1.0, 0.0));
        // s_(2,1,0) has coefficient 2 on u1u2u3
        assert_eq!(schur([2, 1, 0]).get(1, 1, 1), 2.0);
        assert_eq!(schur([0, 0, 0]).get(0, 0, 0), 1.0);
    }

    #[test]
    fn matches_direct_determinants() {
        let c = CurveFamily::figure1().curve().unwrap();
        let w = web_function(&c);
        for u in [[0.3, -1.2, 2.0], [0.1, 0.7, -0.4], [3.0, -2.5, 0.05]] {
            let want = direct_dual_value(&c, u);
            assert!((w.eval(u) - want).abs() <= 1e-12 * w.eval_abs(u), "{u:?}");
        }
    }

    #[test]
    fn degree_and_symmetry() {
        for f in [CurveFamily::figure1(), CurveFamily::figure2(), CurveFamily::figure3()] {
            let w = web_function(&f.curve().unwrap());
            assert_eq!(w.degree(), 2);
            assert!(w.is_symmetric());
        }
        let quartic =
            RationalCurve::from_rows([vec![1.0, 0.0, 0.5], vec![0.0, 1.0, 0.0, 0.3], vec![0.2, 0.0, 0.0, 0.0, 1.0], vec![2.0, 0.1, 1.0]])
                .unwrap();
        let w = web_function(&quartic);
        assert_eq!(w.degree(), 4);
        assert!(w.is_symmetric());
        let u = [0.4, -0.9, 1.3];
        assert!((w.eval(u) - direct_dual_value(&quartic, u)).abs() <= 1e-12 * w.eval_abs(u));
    }

    #[test]
    fn jet_matches_central_differences() {
        let w = web_function(&CurveFamily::figure2().curve().unwrap());
        let u = [0.3, -0.8, 1.1];
        let j = w.jet(u);
        let h = 1e-5;
        for v in 0..3 {
            let mut up = u;
            let mut dn = u;
            up[v] += h;
            dn[v] -= h;
            let fd = (w.eval(up) - w.eval(dn)) / (2.0 * h);
            assert!((j.d(&[v]) - fd).abs() < 1e-7 * (1.0 + fd.abs()));
            let fd3 = (w.jet(up).d(&[0, 1]) - w.jet(dn).d(&[0, 1])) / (2.0 * h);
            assert!((j.d(&[0, 1, v]) - fd3).abs() < 1e-6 * (1.0 + fd3.abs()));
        }
        assert_eq!(j.value(), w.eval(u));
    }

    #[test]
    fn restriction_agrees_with_evaluation() {
        let w = web_function(&CurveFamily::figure3().curve().unwrap());
        let p = w.restrict(2, [0.2, -0.6]);
        let q = w.restrict(0, [0.2, -0.6]);
        for x in [-1.0, 0.0, 0.5, 2.0] {
            assert!((p.eval(x) - w.eval([0.2, -0.6, x])).abs() < 1e-13);
            assert!((q.eval(x) - w.eval([x, 0.2, -0.6])).abs() < 1e-13);
        }
    }

    #[test]
    fn homogeneous_evaluation_agrees_in_the_affine_chart() {
        let w = web_function(&CurveFamily::figure1().curve().unwrap());
        let u = [0.5, -0.25, 0.75];
        let (v, _) = w.eval_params(u.map(Param::affine));
        assert!((v - w.eval(u)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn symmetric_values(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
            let w = web_function(&CurveFamily::figure1().curve().unwrap());
            let v = w.eval([a, b, c]);
            for p in [[b, a, c], [c, b, a], [a, c, b], [b, c, a], [c, a, b]] {
                prop_assert!((w.eval(p) - v).abs() <= 1e-13 * w.eval_abs([a, b, c]).max(1.0));
            }
        }
    }
}
