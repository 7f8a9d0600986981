use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

/// Highest degree a [`Poly1`] is expected to reach (compositions of quadratic forms with
/// quartic curves).
pub const MAX_POLY_DEGREE: usize = 8;

/// Real univariate polynomial, coefficients in ascending degree. Trailing exact zeros are
/// trimmed, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly1 {
    coeffs: Vec<f64>,
}

impl Poly1 {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly1 { coeffs }
    }

    pub fn zero() -> Self {
        Poly1 { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly1::new(vec![c])
    }

    /// `c · t^k`
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut v = vec![0.0; k + 1];
        v[k] = c;
        Poly1::new(v)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero past the end.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * z + *c)
    }

    /// Value of the binary form `Σ c_k t0^k t1^(n−k)` of nominal degree `n`.
    pub fn eval_homogeneous(&self, t0: f64, t1: f64, n: usize) -> f64 {
        debug_assert!(self.coeffs.len() <= n + 1);
        let mut acc = 0.0;
        let mut p0 = 1.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c * p0 * t1.powi((n - k) as i32);
            p0 *= t0;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly1::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Poly1::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Polynomial with coefficients replaced by their absolute values.
    pub fn abs_coeffs(&self) -> Self {
        Poly1::new(self.coeffs.iter().map(|c| c.abs()).collect())
    }

    /// Scaled to unit max-norm, and the zero polynomial unchanged.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / m)
        }
    }

    /// Drops leading coefficients with magnitude at most `tol · max_abs`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let cut = tol * self.max_abs();
        let mut v = self.coeffs.clone();
        while v.last().is_some_and(|c| c.abs() <= cut) {
            v.pop();
        }
        Poly1::new(v)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly1) -> (Poly1, Poly1) {
        let dn = d.degree().expect("division by the zero polynomial");
        let lead = d.coeffs[dn];
        let mut r = self.coeffs.clone();
        if r.len() <= dn {
            return (Poly1::zero(), self.clone());
        }
        let mut q = vec![0.0; r.len() - dn];
        for i in (0..q.len()).rev() {
            let f = r[i + dn] / lead;
            q[i] = f;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] -= f * dc;
            }
            r[i + dn] = 0.0;
        }
        r.truncate(dn);
        (Poly1::new(q), Poly1::new(r))
    }

    /// Monic greatest common divisor by Euclidean remainders; remainder coefficients below
    /// `cutoff` relative to the dividend are treated as zero.
    pub fn gcd(&self, other: &Poly1, cutoff: f64) -> Poly1 {
        let mut a = self.normalized();
        let mut b = other.normalized();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            let r = if r.max_abs() <= cutoff * a.max_abs().max(b.max_abs()) {
                Poly1::zero()
            } else {
                r.trimmed(cutoff).normalized()
            };
            a = b;
            b = r;
        }
        match a.degree() {
            None => Poly1::zero(),
            Some(n) => a.scale(1.0 / a.coeffs[n]),
        }
    }

    /// All complex roots: eigenvalues of the companion matrix, each polished by Newton
    /// steps on the original polynomial while that reduces the residual.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let n = match self.degree() {
            None | Some(0) => return Vec::new(),
            Some(n) => n,
        };
        let lead = self.coeffs[n];
        if n == 1 {
            return vec![Complex::new(-self.coeffs[0] / lead, 0.0)];
        }
        let mut comp = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            comp[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        let deriv = self.derivative();
        comp.complex_eigenvalues()
            .iter()
            .map(|z| self.polish(*z, &deriv))
            .collect()
    }

    fn polish(&self, mut z: Complex<f64>, deriv: &Poly1) -> Complex<f64> {
        let mut fz = self.eval_complex(z).norm();
        for _ in 0..4 {
            let d = deriv.eval_complex(z);
            if d.norm() == 0.0 {
                break;
            }
            let cand = z - self.eval_complex(z) / d;
            let fc = self.eval_complex(cand).norm();
            if fc < fz {
                z = cand;
                fz = fc;
            } else {
                break;
            }
        }
        z
    }

    /// Real roots in ascending order. A root counts as real when its imaginary part is at
    /// most `imag_tol · (1 + |re|)`.
    pub fn real_roots(&self, imag_tol: f64) -> Vec<f64> {
        let deriv = self.derivative();
        let mut out: Vec<f64> = self
            .roots()
            .into_iter()
            .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.re.abs()))
            .map(|z| self.polish_real(z.re, &deriv))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    fn polish_real(&self, mut x: f64, deriv: &Poly1) -> f64 {
        let mut fx = self.eval(x).abs();
        for _ in 0..4 {
            let d = deriv.eval(x);
            if d == 0.0 {
                break;
            }
            let cand = x - self.eval(x) / d;
            let fc = self.eval(cand).abs();
            if fc < fx {
                x = cand;
                fx = fc;
            } else {
                break;
            }
        }
        x
    }
}

impl Add for &Poly1 {
    type Output = Poly1;

    fn add(self, rhs: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly1::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly1 {
    type Output = Poly1;

    fn sub(self, rhs: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly1::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly1 {
    type Output = Poly1;

    fn mul(self, rhs: &Poly1) -> Poly1 {
        if self.is_zero() || rhs.is_zero() {
            return Poly1::zero();
        }
        let mut v = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly1::new(v)
    }
}

impl Neg for &Poly1 {
    type Output = Poly1;

    fn neg(self) -> Poly1 {
        self.scale(-1.0)
    }
}

impl From<Vec<f64>> for Poly1 {
    fn from(v: Vec<f64>) -> Self {
        Poly1::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trims_and_degrees() {
        assert_eq!(Poly1::new(vec![1.0, 2.0, 0.0, 0.0]).coeffs(), &[1.0, 2.0]);
        assert!(Poly1::new(vec![0.0, 0.0]).is_zero());
        assert_eq!(Poly1::zero().degree(), None);
        assert_eq!(Poly1::monomial(3.0, 4).degree(), Some(4));
    }

    #[test]
    fn homogeneous_evaluation() {
        // t^3 - t  as a cubic form
        let p = Poly1::new(vec![0.0, -1.0, 0.0, 1.0]);
        assert_eq!(p.eval_homogeneous(2.0, 1.0, 3), 6.0);
        assert_eq!(p.eval_homogeneous(1.0, 0.0, 3), 1.0);
        // t^2 seen as a cubic vanishes at infinity
        assert_eq!(Poly1::monomial(1.0, 2).eval_homogeneous(1.0, 0.0, 3), 0.0);
    }

    #[test]
    fn division_and_gcd() {
        let a = &Poly1::new(vec![-1.0, 0.0, 1.0]) * &Poly1::new(vec![2.0, 1.0]);
        let (q, r) = a.div_rem(&Poly1::new(vec![-1.0, 1.0]));
        assert!(r.max_abs() < 1e-15);
        assert_eq!(q.coeffs(), &[2.0, 3.0, 1.0]);
        let b = Poly1::new(vec![0.0, -1.0, 0.0, 1.0]);
        let g = a.gcd(&b, 1e-9);
        assert_eq!(g.degree(), Some(2));
        assert!((&g - &Poly1::new(vec![-1.0, 0.0, 1.0])).max_abs() < 1e-12);
        let coprime = Poly1::new(vec![0.0, 1.0]).gcd(&Poly1::new(vec![-1.0, 0.0, 1.0]), 1e-9);
        assert_eq!(coprime.degree(), Some(0));
    }

    #[test]
    fn companion_roots() {
        // (t - 1)(t + 2)(t - 0.5)
        let p = &(&Poly1::new(vec![-1.0, 1.0]) * &Poly1::new(vec![2.0, 1.0])) * &Poly1::new(vec![-0.5, 1.0]);
        let r = p.real_roots(1e-9);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-2.0, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-14, "{got}");
        }
        // t^2 + 1 has no real roots
        assert!(Poly1::new(vec![1.0, 0.0, 1.0]).real_roots(1e-9).is_empty());
    }

    proptest! {
        #[test]
        fn roots_reproduce_polynomial(r in proptest::collection::vec(-3.0f64..3.0, 1..6)) {
            let p = r.iter().fold(Poly1::constant(1.0), |acc, x| &acc * &Poly1::new(vec![-x, 1.0]));
            for z in p.roots() {
                let scale = p.abs_coeffs().eval(z.norm());
                prop_assert!(p.eval_complex(z).norm() <= 1e-6 * scale.max(1.0));
            }
            prop_assert_eq!(p.roots().len(), r.len());
        }

        #[test]
        fn product_evaluates_pointwise(
            a in proptest::collection::vec(-2.0f64..2.0, 1..5),
            b in proptest::collection::vec(-2.0f64..2.0, 1..5),
            t in -2.0f64..2.0,
        ) {
            let (pa, pb) = (Poly1::new(a), Poly1::new(b));
            let lhs = (&pa * &pb).eval(t);
            let rhs = pa.eval(t) * pb.eval(t);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()) * 100.0);
        }
    }
}
