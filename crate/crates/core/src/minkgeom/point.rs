use serde::{Deserialize, Serialize};

/// Diagonal of the signature-(3,1) form.
pub const ETA: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

/// A point of projective 3-space in homogeneous coordinates `[X:Y:Z:U]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomPoint(pub [f64; 4]);

impl HomPoint {
    pub const fn new(x: f64, y: f64, z: f64, u: f64) -> Self {
        HomPoint([x, y, z, u])
    }

    /// Affine point `(x, y, z)` as `[x:y:z:1]`.
    pub fn affine(x: f64, y: f64, z: f64) -> Self {
        HomPoint([x, y, z, 1.0])
    }

    pub fn coords(&self) -> [f64; 4] {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Divides by the coordinate of largest magnitude, so that coordinate becomes exactly 1.
    /// A zero vector is returned unchanged.
    pub fn normalize(&self) -> Self {
        let mut idx = 0;
        for i in 1..4 {
            if self.0[i].abs() > self.0[idx].abs() {
                idx = i;
            }
        }
        let s = self.0[idx];
        if s == 0.0 {
            return *self;
        }
        let mut out = self.0.map(|v| v / s);
        out[idx] = 1.0;
        HomPoint(out)
    }

    /// Scale-free distance between the projective points: the largest 2×2 minor of the
    /// pair after both are scaled to unit max-norm. Zero iff the points coincide.
    pub fn projective_distance(&self, other: &HomPoint) -> f64 {
        let a = self.scaled_unit();
        let b = other.scaled_unit();
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in (i + 1)..4 {
                worst = worst.max((a[i] * b[j] - a[j] * b[i]).abs());
            }
        }
        worst
    }

    pub fn proportional(&self, other: &HomPoint, tol: f64) -> bool {
        self.projective_distance(other) <= tol
    }

    pub(crate) fn scaled_unit(&self) -> [f64; 4] {
        let m = self.max_abs();
        if m == 0.0 {
            self.0
        } else {
            self.0.map(|v| v / m)
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        HomPoint(self.0.map(|v| v * s))
    }

    pub fn add(&self, other: &HomPoint) -> Self {
        HomPoint(std::array::from_fn(|i| self.0[i] + other.0[i]))
    }

    /// Plane polar to this point: `pair(self, ·) = 0`.
    pub fn polar_plane(&self) -> Plane {
        Plane(std::array::from_fn(|i| ETA[i] * self.0[i]))
    }
}

/// The signature-(3,1) pairing.
pub fn pair(u: &HomPoint, v: &HomPoint) -> f64 {
    let (a, b) = (u.0, v.0);
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

/// A plane `aX + bY + cZ + dU = 0`. Incidence uses the plain dot product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane(pub [f64; 4]);

impl Plane {
    pub fn eval(&self, p: &HomPoint) -> f64 {
        self.0.iter().zip(p.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// The pole of this plane with respect to the sphere.
    pub fn pole(&self) -> HomPoint {
        HomPoint(std::array::from_fn(|i| ETA[i] * self.0[i]))
    }

    /// Point where the line through `p` and `q` meets the plane.
    pub fn meet_line(&self, p: &HomPoint, q: &HomPoint) -> HomPoint {
        let fp = self.eval(p);
        let fq = self.eval(q);
        q.scale(fp).add(&p.scale(-fq))
    }
}
