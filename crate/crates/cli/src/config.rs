//! The run configuration: one TOML file describing the curve, the command and the knobs of
//! every stage. See the repository README for the full grammar.

use std::path::PathBuf;

use circleweb::minkgeom::Generator;
use circleweb::polycurve::CurveFamily;
use circleweb::render::RenderSpec;
use circleweb::webcore::{perturb_curve, SampleSpec};
use circleweb::{CurveError, MoebiusMap, PlanarPoint, RationalCurve};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Num;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(#[from] toml::de::Error),
    #[error("missing [{0}] block")]
    MissingBlock(&'static str),
    #[error("[curve]: {0}")]
    Curve(String),
    #[error("[curve]: {0}")]
    BadParams(#[from] CurveError),
    #[error("[{block}]: {msg}")]
    Invalid { block: &'static str, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyIdeal,
    VerifyHex,
    Closure,
    Invariants,
    Classify,
    Render,
    All,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::VerifyIdeal => "verify-ideal",
            Command::VerifyHex => "verify-hex",
            Command::Closure => "closure",
            Command::Invariants => "invariants",
            Command::Classify => "classify",
            Command::Render => "render",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub hex: f64,
    pub closure: f64,
    pub ideal: f64,
    pub invariants: f64,
    /// Distance of a point from the leaves through it, and of drawn circles from their
    /// polar points.
    pub incidence: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { hex: 1e-6, closure: 1e-7, ideal: 1e-10, invariants: 1e-10, incidence: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClosureSpec {
    pub bases: usize,
    pub eps: Vec<f64>,
}

impl Default for ClosureSpec {
    fn default() -> Self {
        ClosureSpec { bases: 10, eps: vec![0.02, 0.05, 0.1] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub magnitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoebiusStep {
    pub generator: Generator,
    pub s: f64,
}

/// The curve block after validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSpec {
    pub family: CurveFamily,
    pub perturb: Option<Perturbation>,
    pub moebius: Vec<MoebiusStep>,
}

impl CurveSpec {
    /// Family tag, suffixed when the curve is modified.
    pub fn tag(&self) -> String {
        let mut t = self.family.tag().to_string();
        if self.perturb.is_some() {
            t.push_str("-perturbed");
        }
        if !self.moebius.is_empty() {
            t.push_str("-moebius");
        }
        t
    }

    pub fn map(&self) -> MoebiusMap {
        MoebiusMap::from_steps(&self.moebius.iter().map(|s| (s.generator, s.s)).collect::<Vec<_>>())
    }

    /// Family curve, then the perturbation, then the Möbius steps.
    pub fn build(&self) -> Result<RationalCurve, CurveError> {
        let mut c = self.family.curve()?;
        if let Some(p) = self.perturb {
            c = perturb_curve(&c, p.magnitude, p.seed)?;
        }
        if !self.moebius.is_empty() {
            c = c.transform(&self.map());
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub curve: CurveSpec,
    pub sampling: SampleSpec,
    pub closure: ClosureSpec,
    pub thresholds: Thresholds,
    pub render: RenderSpec,
    pub classify: Vec<PlanarPoint>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.sampling.seed
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.sampling.seed = seed;
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Command,
    seed: Option<u64>,
    curve: Option<RawCurve>,
    #[serde(default)]
    sampling: SampleSpec,
    #[serde(default)]
    closure: ClosureSpec,
    #[serde(default)]
    thresholds: Thresholds,
    #[serde(default)]
    render: RenderSpec,
    #[serde(default)]
    classify: RawClassify,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    family: Option<String>,
    m: Option<Num>,
    x0: Option<Num>,
    y0: Option<Num>,
    rows: Option<Vec<Vec<Num>>>,
    perturb: Option<RawPerturb>,
    #[serde(default)]
    moebius: Vec<RawStep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturb {
    magnitude: Num,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    generator: String,
    s: Num,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RawClassify {
    points: Vec<[Num; 2]>,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

fn curve_spec(raw: RawCurve) -> Result<CurveSpec, ConfigError> {
    let need = |name: &str, v: Option<Num>| v.map(|n| n.0).ok_or_else(|| ConfigError::Curve(format!("missing `{name}`")));
    let unused = |names: &[(&str, bool)]| match names.iter().find(|(_, present)| *present) {
        Some((n, _)) => Err(ConfigError::Curve(format!("`{n}` does not apply to this family"))),
        None => Ok(()),
    };
    let family = match (raw.family.as_deref(), raw.rows) {
        (None, None) => return Err(ConfigError::Curve("give either `family` or a custom `rows` table".into())),
        (Some("custom") | None, Some(rows)) => {
            unused(&[("m", raw.m.is_some()), ("x0", raw.x0.is_some()), ("y0", raw.y0.is_some())])?;
            let rows: [Vec<f64>; 4] = rows
                .into_iter()
                .map(|r| r.into_iter().map(|n| n.0).collect())
                .collect::<Vec<Vec<f64>>>()
                .try_into()
                .map_err(|v: Vec<Vec<f64>>| ConfigError::Curve(format!("`rows` needs 4 rows (X, Y, Z, U), got {}", v.len())))?;
            CurveFamily::Custom { rows }
        }
        (Some(f), Some(_)) => {
            return Err(ConfigError::Curve(format!("ambiguous: both family `{f}` and a custom `rows` table given")))
        }
        (Some("custom"), None) => return Err(ConfigError::Curve("family `custom` needs a `rows` table".into())),
        (Some("cubic"), None) => {
            unused(&[("y0", raw.y0.is_some())])?;
            CurveFamily::Cubic { m: need("m", raw.m)?, x0: need("x0", raw.x0)? }
        }
        (Some("cubic1"), None) => {
            CurveFamily::Cubic1 { m: need("m", raw.m)?, x0: need("x0", raw.x0)?, y0: need("y0", raw.y0)? }
        }
        (Some("cubic2"), None) => {
            CurveFamily::Cubic2 { m: need("m", raw.m)?, x0: need("x0", raw.x0)?, y0: need("y0", raw.y0)? }
        }
        (Some(other), None) => {
            return Err(ConfigError::Curve(format!(
                "unknown family `{other}` (expected cubic, cubic1, cubic2 or custom)"
            )))
        }
    };
    family.validate()?;
    let perturb = match raw.perturb {
        Some(p) if p.magnitude.0 < 0.0 => {
            return Err(ConfigError::Curve(format!("perturbation magnitude must be nonnegative (got {})", p.magnitude.0)))
        }
        Some(p) => Some(Perturbation { magnitude: p.magnitude.0, seed: p.seed }),
        None => None,
    };
    let moebius = raw
        .moebius
        .into_iter()
        .map(|s| Ok(MoebiusStep { generator: s.generator.parse().map_err(ConfigError::Curve)?, s: s.s.0 }))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let spec = CurveSpec { family, perturb, moebius };
    spec.build()?;
    Ok(spec)
}

/// Strict parse: unknown keys, missing blocks and inconsistent curve descriptions are errors.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let curve = curve_spec(raw.curve.ok_or(ConfigError::MissingBlock("curve"))?)?;
    let mut sampling = raw.sampling;
    if let Some(seed) = raw.seed {
        sampling.seed = seed;
    }
    let invalid = |block, msg: String| ConfigError::Invalid { block, msg };
    if sampling.count == 0 {
        return Err(invalid("sampling", "count must be at least 1".into()));
    }
    for (name, [lo, hi]) in [("u1_window", sampling.u1_window), ("u2_window", sampling.u2_window)] {
        if lo > hi || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("sampling", format!("{name} [{lo}, {hi}] is not an interval")));
        }
    }
    if raw.closure.eps.is_empty() || raw.closure.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(invalid("closure", "eps must be a nonempty list of positive steps".into()));
    }
    let t = &raw.thresholds;
    if [t.hex, t.closure, t.ideal, t.invariants, t.incidence].iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(invalid("thresholds", "thresholds must be nonnegative".into()));
    }
    raw.render.validate().map_err(|e| invalid("render", e.to_string()))?;
    let classify: Vec<PlanarPoint> = raw.classify.points.iter().map(|[x, y]| PlanarPoint::new(x.0, y.0)).collect();
    if raw.command == Command::Classify && classify.is_empty() {
        return Err(invalid("classify", "the classify command needs a nonempty `points` list".into()));
    }
    Ok(RunConfig {
        command: raw.command,
        curve,
        sampling,
        closure: raw.closure,
        thresholds: raw.thresholds,
        render: raw.render,
        classify,
        output_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from(".")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"
command = "verify-ideal"
[curve]
family = "cubic"
m = "1/sqrt(3)"
x0 = "sqrt(3)/2"
"#;

    #[test]
    fn expressions_in_parameters() {
        let c = parse_config(FIG1).unwrap();
        assert_eq!(c.curve.family, CurveFamily::figure1());
        assert_eq!(c.command, Command::VerifyIdeal);
        assert_eq!(c.thresholds, Thresholds::default());
        assert_eq!(c.sampling, SampleSpec::default());
    }

    #[test]
    fn missing_curve_block_is_named() {
        let e = parse_config("command = \"all\"\n").unwrap_err();
        assert!(matches!(e, ConfigError::MissingBlock("curve")));
        assert!(e.to_string().contains("[curve]"));
    }

    #[test]
    fn family_and_table_is_ambiguous() {
        let text = format!("{FIG1}rows = [[1], [0, 1], [0, 0, 1], [1, 0, 0, 1]]\n");
        let e = parse_config(&text).unwrap_err();
        assert!(e.to_string().contains("ambiguous"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let e = parse_config(&format!("{FIG1}z0 = 1\n")).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("z0") && msg.contains("line"), "{msg}");
        let e = parse_config(&format!("{FIG1}[sampling]\ncount = 10\nwindow = 3\n")).unwrap_err();
        assert!(e.to_string().contains("window"));
    }

    #[test]
    fn bad_family_parameters_surface() {
        let text = "command = \"verify-hex\"\n[curve]\nfamily = \"cubic1\"\nm = 1\nx0 = \"sqrt(2)/2\"\ny0 = \"sqrt(2)/2\"\n";
        assert!(matches!(parse_config(text), Err(ConfigError::BadParams(CurveError::BadParams(_)))));
    }

    #[test]
    fn seed_and_blocks() {
        let text = format!(
            "seed = 9\n{FIG1}perturb = {{ magnitude = 0.05, seed = 2 }}\nmoebius = [{{ generator = \"Bx\", s = \"1/2\" }}]\n\
             [closure]\neps = [0.1]\n[classify]\npoints = [[\"-0.4\", 0.6]]\n[output]\ndir = \"out\"\n"
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(c.seed(), 9);
        assert_eq!(c.curve.tag(), "cubic-perturbed-moebius");
        assert_eq!(c.curve.moebius, vec![MoebiusStep { generator: Generator::Bx, s: 0.5 }]);
        assert_eq!(c.closure.eps, vec![0.1]);
        assert_eq!(c.classify, vec![PlanarPoint::new(-0.4, 0.6)]);
        assert_eq!(c.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn custom_rows() {
        let text = "command = \"verify-hex\"\n[curve]\nrows = [[-1, 0, 1], [0, -1, 0, 1], [0, 1], [0, 0, 1]]\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.curve.family.tag(), "custom");
        let text = "command = \"verify-hex\"\n[curve]\nrows = [[1], [0, 1]]\n";
        assert!(parse_config(text).unwrap_err().to_string().contains("4 rows"));
    }

    #[test]
    fn invalid_blocks() {
        for extra in ["[sampling]\ncount = 0\n", "[closure]\neps = []\n", "[render]\nsize = [0, 10]\n", "[thresholds]\nhex = -1\n"] {
            assert!(matches!(parse_config(&format!("{FIG1}{extra}")), Err(ConfigError::Invalid { .. })), "{extra}");
        }
        assert!(parse_config(&FIG1.replace("verify-ideal", "classify")).is_err());
        assert!(parse_config(&FIG1.replace("verify-ideal", "verify")).is_err());
    }
}
