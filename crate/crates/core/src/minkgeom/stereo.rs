use serde::{Deserialize, Serialize};

use super::{GeomError, HomPoint, Plane};

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    /// Projects `(x, y, z)` radially onto the sphere.
    pub fn from_direction(x: f64, y: f64, z: f64) -> Result<Self, GeomError> {
        let n = (x * x + y * y + z * z).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(GeomError::ZeroVector);
        }
        Ok(SpherePoint { x: x / n, y: y / n, z: z / n })
    }

    pub fn norm_defect(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z - 1.0).abs()
    }

    /// Homogeneous lift `[x:y:z:1]`.
    pub fn homogeneous(&self) -> HomPoint {
        HomPoint::affine(self.x, self.y, self.z)
    }
}

/// A point of the stereographic plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        PlanarPoint { x, y }
    }

    pub fn dist(&self, other: &PlanarPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

pub fn stereo_lift(p: PlanarPoint) -> SpherePoint {
    let r2 = p.x * p.x + p.y * p.y;
    let d = 1.0 + r2;
    SpherePoint { x: 2.0 * p.x / d, y: 2.0 * p.y / d, z: (1.0 - r2) / d }
}

pub fn stereo_project(q: SpherePoint) -> Result<PlanarPoint, GeomError> {
    let d = 1.0 + q.z;
    if d.abs() < 1e-12 {
        return Err(GeomError::Pole);
    }
    Ok(PlanarPoint { x: q.x / d, y: q.y / d })
}

pub fn tangent_plane(q: SpherePoint) -> Plane {
    Plane([q.x, q.y, q.z, -1.0])
}

/// Normalized dual-quadric value of a plane: 0 for tangent planes, positive for
/// planes cutting the sphere, negative for planes missing it.
pub fn plane_tangency_residual(p: Plane) -> f64 {
    let [a, b, c, d] = p.0;
    let s = a * a + b * b + c * c;
    (s - d * d) / (s + d * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lift_and_project_examples() {
        let n = stereo_lift(PlanarPoint::new(0.0, 0.0));
        assert_eq!((n.x, n.y, n.z), (0.0, 0.0, 1.0));
        let e = stereo_lift(PlanarPoint::new(1.0, 0.0));
        assert_eq!((e.x, e.y, e.z), (1.0, 0.0, 0.0));
        assert_eq!(stereo_project(n).unwrap(), PlanarPoint::new(0.0, 0.0));
        assert_eq!(stereo_project(e).unwrap(), PlanarPoint::new(1.0, 0.0));
        let south = SpherePoint { x: 0.0, y: 0.0, z: -1.0 };
        assert_eq!(stereo_project(south), Err(GeomError::Pole));
    }

    #[test]
    fn tangent_planes() {
        let n = SpherePoint { x: 0.0, y: 0.0, z: 1.0 };
        assert_eq!(tangent_plane(n).0, [0.0, 0.0, 1.0, -1.0]);
        let e = SpherePoint { x: 1.0, y: 0.0, z: 0.0 };
        assert_eq!(tangent_plane(e).0, [1.0, 0.0, 0.0, -1.0]);
        assert_eq!(tangent_plane(e).eval(&e.homogeneous()), 0.0);
    }

    #[test]
    fn tangency_residual_examples() {
        assert_eq!(plane_tangency_residual(Plane([0.0, 0.0, 1.0, -1.0])), 0.0);
        assert_eq!(plane_tangency_residual(Plane([0.0, 0.0, 1.0, 0.0])), 1.0);
        assert_eq!(plane_tangency_residual(Plane([0.0, 0.0, 0.0, 1.0])), -1.0);
    }

    proptest! {
        #[test]
        fn lift_project_round_trip(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            let p = PlanarPoint::new(x, y);
            let q = stereo_lift(p);
            prop_assert!(q.norm_defect() <= 1e-12);
            let back = stereo_project(q).unwrap();
            let r = 1.0 + x.abs().max(y.abs());
            prop_assert!((back.x - x).abs() <= 1e-12 * r * r);
            prop_assert!((back.y - y).abs() <= 1e-12 * r * r);
        }

        #[test]
        fn tangent_planes_are_tangent(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            prop_assume!(a * a + b * b + c * c > 1e-3);
            let q = SpherePoint::from_direction(a, b, c).unwrap();
            prop_assert!(plane_tangency_residual(tangent_plane(q)).abs() <= 1e-15);
            prop_assert!(tangent_plane(q).eval(&q.homogeneous()).abs() <= 1e-15);
        }
    }
}
