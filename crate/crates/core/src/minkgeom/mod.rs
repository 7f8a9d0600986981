//! Projective model of Möbius geometry on the unit sphere.
//!
//! Points of projective 3-space carry the Lorentzian pairing
//! `X₁X₂ + Y₁Y₂ + Z₁Z₂ − U₁U₂`; the unit sphere is its null quadric and a
//! circle on the sphere is represented by the polar point of its plane.

mod circle;
mod moebius;
mod point;
mod stereo;

pub use circle::{circle_circle_intersect, circle_from_polar, Intersection, PlanarCircle};
pub use moebius::{moebius_exp, moebius_generator, Generator, MoebiusMap};
pub use point::{pair, HomPoint, Plane, ETA};
pub use stereo::{
    plane_tangency_residual, stereo_lift, stereo_project, tangent_plane, PlanarPoint, SpherePoint,
};

use thiserror::Error;

/// Tolerance used for tangency and incidence decisions on normalized data.
pub const TANGENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point lies at the projection pole (0, 0, -1)")]
    Pole,
    #[error("polar point is on or inside the sphere (pairing {0:e}); the circle is not real")]
    ImaginaryCircle(f64),
    #[error("circles are coincident")]
    CoincidentCircles,
    #[error("homogeneous coordinates are all zero")]
    ZeroVector,
}
