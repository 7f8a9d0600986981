use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::{HomPoint, ETA};

/// The six infinitesimal generators of the Möbius group acting on `[X:Y:Z:U]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    Rx,
    Ry,
    Rz,
    Bx,
    By,
    Bz,
}

impl Generator {
    pub const ALL: [Generator; 6] =
        [Generator::Rx, Generator::Ry, Generator::Rz, Generator::Bx, Generator::By, Generator::Bz];

    /// `(i, j, sign)`: the vector field is `sign·v_j ∂_i` paired with `v_i ∂_j` (sign chosen
    /// so rotations are antisymmetric and boosts symmetric).
    fn entries(self) -> (usize, usize, f64) {
        const X: usize = 0;
        const Y: usize = 1;
        const Z: usize = 2;
        const U: usize = 3;
        match self {
            // Y∂X − X∂Y
            Generator::Rz => (X, Y, -1.0),
            // Z∂Y − Y∂Z
            Generator::Rx => (Y, Z, -1.0),
            // X∂Z − Z∂X
            Generator::Ry => (Z, X, -1.0),
            // U∂X + X∂U
            Generator::Bx => (X, U, 1.0),
            Generator::By => (Y, U, 1.0),
            Generator::Bz => (Z, U, 1.0),
        }
    }

    pub fn is_boost(self) -> bool {
        matches!(self, Generator::Bx | Generator::By | Generator::Bz)
    }
}

impl std::str::FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Rx" => Ok(Generator::Rx),
            "Ry" => Ok(Generator::Ry),
            "Rz" => Ok(Generator::Rz),
            "Bx" => Ok(Generator::Bx),
            "By" => Ok(Generator::By),
            "Bz" => Ok(Generator::Bz),
            other => Err(format!("unknown generator `{other}` (expected Rx, Ry, Rz, Bx, By or Bz)")),
        }
    }
}

/// Matrix `G` of the generator's linear vector field: `d/ds v = G v`.
pub fn moebius_generator(which: Generator) -> Matrix4<f64> {
    let (i, j, sign) = which.entries();
    let mut g = Matrix4::zeros();
    // d v_i = v_j, d v_j = sign · v_i
    g[(i, j)] = 1.0;
    g[(j, i)] = sign;
    g
}

fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::from(ETA))
}

/// Projective transformation preserving the unit sphere: `mᵀ η m = λ η`, `λ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    m: Matrix4<f64>,
}

impl MoebiusMap {
    pub fn identity() -> Self {
        MoebiusMap { m: Matrix4::identity() }
    }

    /// Accepts `m` if it satisfies the group condition to `1e-10` relative.
    pub fn from_matrix(m: Matrix4<f64>) -> Option<Self> {
        let map = MoebiusMap { m };
        (map.group_defect() <= 1e-10 && map.lambda() > 0.0).then_some(map)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// The factor `λ` with `mᵀ η m = λ η`.
    pub fn lambda(&self) -> f64 {
        let q = self.m.transpose() * eta() * self.m;
        // average of the diagonal against η
        (0..4).map(|i| q[(i, i)] * ETA[i]).sum::<f64>() / 4.0
    }

    /// Relative deviation of `mᵀ η m` from `λ η`.
    pub fn group_defect(&self) -> f64 {
        let q = self.m.transpose() * eta() * self.m;
        let l = self.lambda();
        let scale = l.abs().max(f64::MIN_POSITIVE);
        let diff = q - eta() * l;
        diff.amax() / scale
    }

    pub fn apply(&self, p: &HomPoint) -> HomPoint {
        let v = self.m * Vector4::from(p.0);
        HomPoint([v[0], v[1], v[2], v[3]])
    }

    /// `η mᵀ η / λ`, exact for group elements.
    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap { m: eta() * self.m.transpose() * eta() / self.lambda() }
    }

    pub fn compose(&self, after: &MoebiusMap) -> MoebiusMap {
        MoebiusMap { m: after.m * self.m }
    }

    /// Finite transformation `exp(s·G)` of a single generator, in closed form.
    pub fn from_generator(which: Generator, s: f64) -> Self {
        let (i, j, _) = which.entries();
        let mut m = Matrix4::identity();
        if which.is_boost() {
            let (ch, sh) = (s.cosh(), s.sinh());
            m[(i, i)] = ch;
            m[(j, j)] = ch;
            m[(i, j)] = sh;
            m[(j, i)] = sh;
        } else {
            let (c, sn) = (s.cos(), s.sin());
            m[(i, i)] = c;
            m[(j, j)] = c;
            m[(i, j)] = sn;
            m[(j, i)] = -sn;
        }
        MoebiusMap { m }
    }

    /// Composition of single-generator flows, applied left to right.
    pub fn from_steps(steps: &[(Generator, f64)]) -> Self {
        steps
            .iter()
            .fold(MoebiusMap::identity(), |acc, &(g, s)| acc.compose(&MoebiusMap::from_generator(g, s)))
    }
}

/// `exp(s·G)` for `G` in the span of the generators.
///
/// Uses the closed form when `G` is a multiple of a single generator, and scaling and
/// squaring of the Taylor series otherwise.
pub fn moebius_exp(g: &Matrix4<f64>, s: f64) -> MoebiusMap {
    if let Some((which, k)) = single_generator(g) {
        return MoebiusMap::from_generator(which, k * s);
    }
    MoebiusMap { m: expm(&(g * s)) }
}

fn single_generator(g: &Matrix4<f64>) -> Option<(Generator, f64)> {
    let nonzero = g.iter().filter(|v| **v != 0.0).count();
    if nonzero != 2 {
        return None;
    }
    Generator::ALL.into_iter().find_map(|which| {
        let (i, j, _) = which.entries();
        let k = g[(i, j)];
        (k != 0.0 && *g == moebius_generator(which) * k).then_some((which, k))
    })
}

fn expm(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = a.iter().map(|v| v.abs()).fold(0.0_f64, f64::max) * 4.0;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * scale;
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..30 {
        term = term * b / k as f64;
        sum += term;
        if term.amax() <= 1e-17 * sum.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkgeom::pair;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn generator_matrices() {
        let rz = moebius_generator(Generator::Rz);
        // Y∂X − X∂Y: dX = Y, dY = −X
        let v = rz * Vector4::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(v, Vector4::new(2.0, -1.0, 0.0, 0.0));
        let bz = moebius_generator(Generator::Bz);
        let v = bz * Vector4::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(v, Vector4::new(0.0, 0.0, 4.0, 3.0));
        let rx = moebius_generator(Generator::Rx);
        assert_eq!(rx * Vector4::new(1.0, 2.0, 3.0, 4.0), Vector4::new(0.0, 3.0, -2.0, 0.0));
        let ry = moebius_generator(Generator::Ry);
        assert_eq!(ry * Vector4::new(1.0, 2.0, 3.0, 4.0), Vector4::new(-3.0, 0.0, 1.0, 0.0));
        for g in Generator::ALL {
            let m = moebius_generator(g);
            assert_eq!(m.transpose() * eta() + eta() * m, Matrix4::zeros(), "{g:?}");
        }
    }

    #[test]
    fn boost_fixes_axis_points() {
        let map = moebius_exp(&moebius_generator(Generator::Bz), 0.7);
        for z in [1.0, -1.0] {
            let p = HomPoint::new(0.0, 0.0, z, 1.0);
            let img = map.apply(&p);
            assert!(img.proportional(&p, 1e-15));
            let expect = if z > 0.0 { 0.7f64.exp() } else { (-0.7f64).exp() };
            assert!((img.0[3] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn quarter_turn() {
        let map = moebius_exp(&moebius_generator(Generator::Rz), FRAC_PI_2);
        let img = map.apply(&HomPoint::new(1.0, 0.0, 0.0, 1.0));
        assert!(img.proportional(&HomPoint::new(0.0, -1.0, 0.0, 1.0), 1e-15));
    }

    #[test]
    fn series_matches_closed_form_and_nalgebra() {
        for g in Generator::ALL {
            let gm = moebius_generator(g);
            let closed = MoebiusMap::from_generator(g, 1.3);
            let series = expm(&(gm * 1.3));
            assert!((closed.matrix() - series).amax() < 1e-13, "{g:?}");
            assert!((series - (gm * 1.3).exp()).amax() < 1e-12);
        }
        let mix = moebius_generator(Generator::Rx) * 0.4 + moebius_generator(Generator::By) * -1.1
            + moebius_generator(Generator::Bz) * 0.8;
        let a = moebius_exp(&mix, 1.7);
        assert!((a.matrix() - (mix * 1.7).exp()).amax() < 1e-11 * a.matrix().amax());
        assert!(a.group_defect() < 1e-13);
    }

    #[test]
    fn from_matrix_rejects_non_group_elements() {
        assert!(MoebiusMap::from_matrix(Matrix4::identity() * 2.0).is_some());
        let mut m = Matrix4::identity();
        m[(0, 1)] = 0.5;
        assert!(MoebiusMap::from_matrix(m).is_none());
        assert!(MoebiusMap::from_matrix(-Matrix4::identity()).is_some());
    }

    fn arb_algebra() -> impl Strategy<Value = Matrix4<f64>> {
        proptest::array::uniform6(-1.0f64..1.0).prop_map(|c| {
            Generator::ALL
                .iter()
                .zip(c)
                .fold(Matrix4::zeros(), |acc, (g, k)| acc + moebius_generator(*g) * k)
        })
    }

    proptest! {
        #[test]
        fn exp_preserves_the_form(g in arb_algebra(), s in -2.0f64..2.0) {
            let m = moebius_exp(&g, s);
            let q = m.matrix().transpose() * eta() * m.matrix();
            prop_assert!((q - eta()).amax() <= 1e-10 * m.matrix().amax().powi(2));
            prop_assert!(m.lambda() > 0.0);
        }

        #[test]
        fn pairing_scales_by_lambda(
            g in arb_algebra(),
            s in -2.0f64..2.0,
            k in 0.2f64..3.0,
            u in proptest::array::uniform4(-1.0f64..1.0),
            v in proptest::array::uniform4(-1.0f64..1.0),
        ) {
            let m = MoebiusMap { m: moebius_exp(&g, s).matrix() * k };
            let (u, v) = (HomPoint(u), HomPoint(v));
            let lhs = pair(&m.apply(&u), &m.apply(&v));
            let rhs = m.lambda() * pair(&u, &v);
            let scale = m.lambda() * u.max_abs() * v.max_abs() * m.matrix().amax().powi(2).max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * scale, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn inverse_undoes_the_map() {
        let m = MoebiusMap::from_steps(&[(Generator::Bx, 0.7), (Generator::Rz, 0.2), (Generator::By, -1.3)]);
        let id = m.compose(&m.inverse());
        assert!((id.matrix() - Matrix4::identity()).amax() < 1e-12);
    }
}
