//! Circular 3-webs on the unit sphere generated by rational polar curves.
//!
//! The web through a point of the sphere is cut by the three planes that are tangent to the
//! sphere there and pass through points of the polar curve. This crate builds such webs,
//! certifies hexagonality numerically, computes Möbius invariants of the twisted-cubic
//! families and renders stereographic pictures.

pub mod minkgeom;
pub mod polycurve;
pub mod render;
pub mod webcore;

pub use minkgeom::{
    circle_circle_intersect, circle_from_polar, moebius_exp, moebius_generator, pair, stereo_lift,
    stereo_project, tangent_plane, GeomError, Generator, HomPoint, Intersection, MoebiusMap, PlanarCircle,
    PlanarPoint, Plane, SpherePoint,
};
pub use polycurve::{CurveError, CurveFamily, Param, Poly1, QuadraticForm, RationalCurve};
pub use webcore::{PointClass, WebError, WebFunction, WebPoint};
pub use render::{RenderError, RenderSpec};
