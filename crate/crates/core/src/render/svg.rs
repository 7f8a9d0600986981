use std::fmt::Write;

/// Geometry recovered from one of our own path elements.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSamples {
    /// Full ellipse (a circle under the pixel map): center and radii in pixels.
    Ellipse { cx: f64, cy: f64, rx: f64, ry: f64 },
    Segment { from: (f64, f64), to: (f64, f64) },
}

impl PathSamples {
    /// `n` points spread along the drawn curve, in pixel coordinates.
    pub fn points(&self, n: usize) -> Vec<(f64, f64)> {
        match *self {
            PathSamples::Ellipse { cx, cy, rx, ry } => (0..n)
                .map(|k| {
                    let th = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64;
                    (cx + rx * th.cos(), cy + ry * th.sin())
                })
                .collect(),
            PathSamples::Segment { from, to } => (0..n)
                .map(|k| {
                    let s = (k as f64 + 0.5) / n as f64;
                    (from.0 + s * (to.0 - from.0), from.1 + s * (to.1 - from.1))
                })
                .collect(),
        }
    }
}

pub(crate) fn ellipse_path(cx: f64, cy: f64, rx: f64, ry: f64) -> String {
    let mut d = String::new();
    write!(d, "M {} {} A {rx} {ry} 0 1 0 {} {} A {rx} {ry} 0 1 0 {} {} Z", cx + rx, cy, cx - rx, cy, cx + rx, cy)
        .expect("write to string");
    d
}

pub(crate) fn segment_path(a: (f64, f64), b: (f64, f64)) -> String {
    format!("M {} {} L {} {}", a.0, a.1, b.0, b.1)
}

/// Parses the `d` attribute of a path written by the renderer.
pub fn parse_path_samples(d: &str) -> Option<PathSamples> {
    let tok: Vec<&str> = d.split_whitespace().collect();
    let num = |i: usize| tok.get(i).and_then(|s| s.parse::<f64>().ok());
    match (tok.first(), tok.get(3)) {
        (Some(&"M"), Some(&"L")) => Some(PathSamples::Segment { from: (num(1)?, num(2)?), to: (num(4)?, num(5)?) }),
        (Some(&"M"), Some(&"A")) => {
            let (x0, y0) = (num(1)?, num(2)?);
            let (rx, ry) = (num(4)?, num(5)?);
            let (x1, y1) = (num(9)?, num(10)?);
            Some(PathSamples::Ellipse { cx: 0.5 * (x0 + x1), cy: 0.5 * (y0 + y1), rx, ry })
        }
        _ => None,
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let d = ellipse_path(10.0, 20.0, 3.0, 4.0);
        assert_eq!(parse_path_samples(&d), Some(PathSamples::Ellipse { cx: 10.0, cy: 20.0, rx: 3.0, ry: 4.0 }));
        for (x, y) in parse_path_samples(&d).unwrap().points(8) {
            assert!((((x - 10.0) / 3.0).powi(2) + ((y - 20.0) / 4.0).powi(2) - 1.0).abs() < 1e-14);
        }
        let d = segment_path((0.5, 1.0), (2.0, -3.0));
        assert_eq!(parse_path_samples(&d), Some(PathSamples::Segment { from: (0.5, 1.0), to: (2.0, -3.0) }));
        assert_eq!(parse_path_samples("Q 1 2"), None);
        assert_eq!(escape("a<\"b\">&"), "a&lt;&quot;b&quot;&gt;&amp;");
    }
}
