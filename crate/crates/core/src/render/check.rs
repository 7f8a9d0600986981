use serde::Serialize;

use super::svg::parse_path_samples;
use super::{RenderError, RenderSpec};
use crate::minkgeom::{pair, stereo_lift, HomPoint};

/// Incidence of drawn circles with their polar points, recovered from SVG text alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceReport {
    pub circles: usize,
    /// Largest `|⟨lift(q), polar⟩|` over sampled drawn points `q`, with the polar point
    /// scaled to unit max norm.
    pub max_pairing: f64,
    /// `data-u` of the worst circle.
    pub worst: Option<String>,
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, RenderError> {
    let v: Vec<f64> = s.split_whitespace().filter_map(|t| t.parse().ok()).collect();
    if v.len() == n {
        Ok(v)
    } else {
        Err(RenderError::BadSvg(format!("expected {n} numbers in {what}, got `{s}`")))
    }
}

/// Re-parses a rendered picture and checks that `samples` points of every drawn leaf lie on
/// the circle of its `data-polar` point.
pub fn svg_incidence(svg: &str, samples: usize) -> Result<IncidenceReport, RenderError> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| RenderError::BadSvg(e.to_string()))?;
    let root = doc.root_element();
    let attr = |name: &str| root.attribute(name).ok_or_else(|| RenderError::BadSvg(format!("missing `{name}`")));
    let w = numbers(attr("data-window")?, 4, "data-window")?;
    let width: u32 = attr("width")?.parse().map_err(|_| RenderError::BadSvg("bad width".into()))?;
    let height: u32 = attr("height")?.parse().map_err(|_| RenderError::BadSvg("bad height".into()))?;
    let spec = RenderSpec { window: [w[0], w[1], w[2], w[3]], size: [width, height], ..RenderSpec::default() };

    let mut report = IncidenceReport { circles: 0, max_pairing: 0.0, worst: None };
    for node in doc.descendants().filter(|n| n.has_tag_name("path")) {
        let Some(polar) = node.attribute("data-polar") else { continue };
        let p = numbers(polar, 4, "data-polar")?;
        let p = HomPoint::new(p[0], p[1], p[2], p[3]).normalize();
        let d = node.attribute("d").ok_or_else(|| RenderError::BadSvg("path without `d`".into()))?;
        let shape = parse_path_samples(d).ok_or_else(|| RenderError::BadSvg(format!("unrecognized path `{d}`")))?;
        report.circles += 1;
        for (px, py) in shape.points(samples) {
            let v = pair(&stereo_lift(spec.from_pixel(px, py)).homogeneous(), &p).abs();
            if v.is_nan() || v > report.max_pairing {
                report.max_pairing = v;
                report.worst = node.attribute("data-u").map(str::to_string);
            }
        }
    }
    Ok(report)
}
