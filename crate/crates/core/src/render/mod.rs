//! SVG pictures of a web in the stereographic plane: sampled leaves of the three
//! foliations and an optional overlay of the discriminant locus.

mod boundary;
mod check;
mod svg;
mod web;

pub use boundary::{render_boundary, BoundaryOverlay};
pub use check::{svg_incidence, IncidenceReport};
pub use svg::{parse_path_samples, PathSamples};
pub use web::{foliation_bands, render_web, RenderOutput};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minkgeom::PlanarPoint;
use crate::polycurve::{CurveError, Param};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("invalid render spec: {0}")]
    InvalidSpec(String),
    #[error("nothing to draw ({imaginary} imaginary circles, {outside} outside the viewport)")]
    EmptyPicture { imaginary: usize, outside: usize },
    #[error("malformed picture: {0}")]
    BadSvg(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSpec {
    /// `[x_min, x_max, y_min, y_max]` of the stereographic plane.
    pub window: [f64; 4],
    /// Picture size in pixels, `[width, height]`.
    pub size: [u32; 2],
    /// Evenly spaced parameters drawn in each foliation band.
    pub per_foliation: usize,
    /// Explicit parameters to draw instead; each is colored by the band containing it.
    pub params: Option<Vec<Param>>,
    /// Point whose three leaves fix the foliation bands; found automatically when absent.
    pub probe: Option<PlanarPoint>,
    pub stroke_width: f64,
    pub colors: [String; 3],
    pub boundary: bool,
    /// Cells per side of the grid used for the boundary overlay.
    pub boundary_grid: usize,
    pub unit_circle: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            window: [-2.0, 2.0, -2.0, 2.0],
            size: [800, 800],
            per_foliation: 20,
            params: None,
            probe: None,
            stroke_width: 1.0,
            colors: ["#d62728".into(), "#2ca02c".into(), "#1f77b4".into()],
            boundary: true,
            boundary_grid: 160,
            unit_circle: false,
        }
    }
}

impl RenderSpec {
    pub fn validate(&self) -> Result<(), RenderError> {
        let [x0, x1, y0, y1] = self.window;
        if !(x0 < x1 && y0 < y1) || self.window.iter().any(|v| !v.is_finite()) {
            return Err(RenderError::InvalidSpec(format!("window {:?} is empty", self.window)));
        }
        if self.size[0] == 0 || self.size[1] == 0 {
            return Err(RenderError::InvalidSpec("pixel size must be positive".into()));
        }
        if !(self.stroke_width > 0.0 && self.stroke_width.is_finite()) {
            return Err(RenderError::InvalidSpec("stroke width must be positive".into()));
        }
        if self.boundary && self.boundary_grid < 2 {
            return Err(RenderError::InvalidSpec("boundary grid needs at least 2 cells".into()));
        }
        Ok(())
    }

    pub(crate) fn to_pixel(&self, p: PlanarPoint) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.window;
        let sx = self.size[0] as f64 / (x1 - x0);
        let sy = self.size[1] as f64 / (y1 - y0);
        ((p.x - x0) * sx, (y1 - p.y) * sy)
    }

    pub fn from_pixel(&self, px: f64, py: f64) -> PlanarPoint {
        let [x0, x1, y0, y1] = self.window;
        let sx = self.size[0] as f64 / (x1 - x0);
        let sy = self.size[1] as f64 / (y1 - y0);
        PlanarPoint::new(x0 + px / sx, y1 - py / sy)
    }

    pub(crate) fn scales(&self) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.window;
        (self.size[0] as f64 / (x1 - x0), self.size[1] as f64 / (y1 - y0))
    }
}
