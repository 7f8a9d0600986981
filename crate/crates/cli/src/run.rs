use std::fs;
use std::path::PathBuf;

use circleweb::polycurve::{ideal_residual, CurveFamily, IdealResidual};
use circleweb::render::{render_web, svg_incidence, IncidenceReport, RenderOutput};
use circleweb::webcore::{
    closure_scaling_exponent, closure_survey, hex_certify, invariants_of_curve, solve_web_point, web_function,
    Anchors, HexReport, InvariantsReport, WebSolution,
};
use circleweb::{HomPoint, Param, PlanarPoint, PointClass, RationalCurve, RenderError, WebError};
use serde::Serialize;
use thiserror::Error;

use crate::config::{Command, CurveSpec, RunConfig, Thresholds};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

/// Problems with the input itself rather than with the mathematics being checked.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, relation: Relation::AtMost, threshold, passed: value <= threshold }
    }

    fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, relation: Relation::AtLeast, threshold, passed: value >= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveReport {
    pub tag: String,
    #[serde(flatten)]
    pub spec: CurveSpec,
    /// Coefficients of the curve actually used, ascending per component.
    pub rows: [Vec<f64>; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectRecord {
    pub base: [f64; 3],
    pub eps: f64,
    pub defect: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureSection {
    pub bases: usize,
    pub defects: Vec<DefectRecord>,
    pub max_defect: Option<f64>,
    /// Observed `p` in `defect ∝ ε^p` at the first base, between the largest step and half of it.
    pub scaling_exponent: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyEntry {
    pub point: PlanarPoint,
    pub class: PointClass,
    pub roots: Vec<Param>,
    pub discriminant: Option<f64>,
    /// Largest distance from the point to the leaves through it.
    pub incidence: Option<f64>,
    /// `|W|` at the root triple relative to its term scale.
    pub web_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderSection {
    pub file: Option<String>,
    #[serde(flatten)]
    pub output: Option<RenderOutput>,
    pub incidence: Option<IncidenceReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HexSection {
    #[serde(flatten)]
    pub report: Option<HexReport>,
    pub error: Option<String>,
}

/// Everything `report.json` contains. Depends only on the config and the seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: Command,
    pub curve: CurveReport,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<IdealResidual>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hex: Option<HexSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classify: Option<Vec<ClassifyEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub render: Option<RenderSection>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }
}

/// Result of a run before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub report: Report,
    /// `(file name, contents)` of every figure.
    pub figures: Vec<(String, String)>,
}

fn invalid(e: impl std::fmt::Display) -> RunError {
    RunError::Invalid(e.to_string())
}

fn ideal(cfg: &RunConfig, c: &RationalCurve, checks: &mut Vec<Check>) -> Result<Vec<IdealResidual>, RunError> {
    let map = cfg.curve.map();
    let gens = cfg.curve.family.ideal_generators().map_err(invalid)?;
    let out: Vec<IdealResidual> = gens.iter().map(|g| ideal_residual(&g.transformed(&map), c)).collect();
    for r in &out {
        checks.push(Check::at_most(format!("ideal.{}", r.label), r.relative, cfg.thresholds.ideal));
    }
    Ok(out)
}

fn hex(cfg: &RunConfig, c: &RationalCurve, checks: &mut Vec<Check>) -> Result<HexSection, RunError> {
    match hex_certify(c, &cfg.sampling) {
        Ok(r) => {
            checks.push(Check::at_most("hex.max_residual", r.max_residual, cfg.thresholds.hex));
            Ok(HexSection { report: Some(r), error: None })
        }
        Err(e @ WebError::InsufficientSamples { usable, requested }) => {
            checks.push(Check::at_least("hex.usable_samples", usable as f64, requested.div_ceil(2) as f64));
            Ok(HexSection { report: None, error: Some(e.to_string()) })
        }
        Err(e) => Err(invalid(e)),
    }
}

fn closure(cfg: &RunConfig, c: &RationalCurve, checks: &mut Vec<Check>) -> Result<ClosureSection, RunError> {
    let spec = &cfg.closure;
    match closure_survey(c, &cfg.sampling, spec.bases, &spec.eps) {
        Ok(rows) => {
            let defects: Vec<DefectRecord> = rows
                .iter()
                .flatten()
                .map(|r| DefectRecord { base: r.base, eps: r.eps, defect: r.defect, iterations: r.iterations })
                .collect();
            let max = defects.iter().map(|d| d.defect).fold(0.0, f64::max);
            checks.push(Check::at_most("closure.max_defect", max, cfg.thresholds.closure));
            let big = spec.eps.iter().copied().fold(0.0, f64::max);
            let scaling_exponent = rows
                .first()
                .and_then(|row| closure_scaling_exponent(&web_function(c), row[0].base, big).ok())
                .filter(|p| p.is_finite());
            Ok(ClosureSection { bases: rows.len(), defects, max_defect: Some(max), scaling_exponent, error: None })
        }
        Err(e @ WebError::InsufficientSamples { usable, requested }) => {
            checks.push(Check::at_least("closure.usable_bases", usable as f64, requested as f64));
            Ok(ClosureSection {
                bases: usable,
                defects: Vec::new(),
                max_defect: None,
                scaling_exponent: None,
                error: Some(e.to_string()),
            })
        }
        Err(e) => Err(invalid(e)),
    }
}

fn invariants(cfg: &RunConfig, c: &RationalCurve, checks: &mut Vec<Check>) -> Result<InvariantsReport, RunError> {
    let CurveFamily::Cubic { m, x0 } = cfg.curve.family else {
        return Err(invalid(WebError::NotCubicFamily));
    };
    let r = invariants_of_curve(c, Anchors::default()).map_err(invalid)?;
    if cfg.curve.perturb.is_none() {
        let tol = cfg.thresholds.invariants;
        checks.push(Check::at_most("invariants.S", (r.s + 1).abs() as f64, 0.0));
        checks.push(Check::at_most("invariants.Sbar", (r.s_bar - 1).abs() as f64, 0.0));
        checks.push(Check::at_most("invariants.I", (r.i - (1.0 + m * m * x0 * x0)).abs(), tol));
        checks.push(Check::at_most("invariants.Ibar", (r.i_bar - (1.0 - x0 * x0)).abs(), tol));
        if cfg.curve.moebius.is_empty() {
            let d = r.p0_prime.projective_distance(&HomPoint::new(1.0, 0.0, 0.0, x0));
            checks.push(Check::at_most("invariants.p0_prime", d, tol));
            let d = r.p0_bar_prime.projective_distance(&HomPoint::new(0.0, -1.0, m * x0, 0.0));
            checks.push(Check::at_most("invariants.p0_bar_prime", d, tol));
        }
    }
    Ok(r)
}

fn classify(cfg: &RunConfig, c: &RationalCurve, checks: &mut Vec<Check>) -> Result<Vec<ClassifyEntry>, RunError> {
    let w = web_function(c);
    let mut out = Vec::with_capacity(cfg.classify.len());
    for &p in &cfg.classify {
        let sol = solve_web_point(c, p).map_err(invalid)?;
        let discriminant = circleweb::webcore::discriminant_sign(c, p).ok();
        let entry = match &sol {
            WebSolution::Regular(wp) => {
                let incidence = wp.circles.iter().map(|k| k.incidence_residual(p)).fold(0.0, f64::max);
                let (value, scale) = w.eval_params([wp.roots[0], wp.roots[1], wp.roots[2]]);
                let web_value = if scale > 0.0 { value.abs() / scale } else { value.abs() };
                ClassifyEntry {
                    point: p,
                    class: PointClass::Regular,
                    roots: wp.roots.clone(),
                    discriminant,
                    incidence: Some(incidence),
                    web_value: Some(web_value),
                }
            }
            WebSolution::Singular { class, roots } => ClassifyEntry {
                point: p,
                class: *class,
                roots: roots.clone(),
                discriminant,
                incidence: None,
                web_value: None,
            },
        };
        out.push(entry);
    }
    let regular: Vec<&ClassifyEntry> = out.iter().filter(|e| e.class == PointClass::Regular).collect();
    if !regular.is_empty() {
        let tol = cfg.thresholds.incidence;
        let inc = regular.iter().filter_map(|e| e.incidence).fold(0.0, f64::max);
        let val = regular.iter().filter_map(|e| e.web_value).fold(0.0, f64::max);
        checks.push(Check::at_most("classify.incidence", inc, tol));
        checks.push(Check::at_most("classify.web_value", val, tol));
    }
    Ok(out)
}

fn render(
    cfg: &RunConfig,
    c: &RationalCurve,
    checks: &mut Vec<Check>,
    figures: &mut Vec<(String, String)>,
) -> Result<RenderSection, RunError> {
    match render_web(c, &cfg.render) {
        Ok(out) => {
            let inc = svg_incidence(&out.svg, 8).map_err(invalid)?;
            checks.push(Check::at_least("render.drawn", out.drawn as f64, 1.0));
            checks.push(Check::at_most("render.incidence", inc.max_pairing, cfg.thresholds.incidence));
            let name = format!("{}-{}.svg", cfg.command.as_str(), cfg.curve.tag());
            figures.push((name.clone(), out.svg.clone()));
            Ok(RenderSection { file: Some(name), output: Some(out), incidence: Some(inc), error: None })
        }
        Err(e @ RenderError::EmptyPicture { .. }) => {
            checks.push(Check::at_least("render.drawn", 0.0, 1.0));
            Ok(RenderSection { file: None, output: None, incidence: None, error: Some(e.to_string()) })
        }
        Err(e) => Err(invalid(e)),
    }
}

/// Runs the configured command without writing anything.
pub fn execute(cfg: &RunConfig) -> Result<Execution, RunError> {
    let c = cfg.curve.build().map_err(invalid)?;
    let mut checks = Vec::new();
    let mut figures = Vec::new();
    let mut report = Report {
        command: cfg.command,
        curve: CurveReport { tag: cfg.curve.tag(), spec: cfg.curve.clone(), rows: c.rows() },
        seed: cfg.seed(),
        thresholds: cfg.thresholds.clone(),
        passed: false,
        checks: Vec::new(),
        ideal: None,
        hex: None,
        closure: None,
        invariants: None,
        classify: None,
        render: None,
    };
    let named = !matches!(cfg.curve.family, CurveFamily::Custom { .. });
    let cubic = matches!(cfg.curve.family, CurveFamily::Cubic { .. });
    match cfg.command {
        Command::VerifyIdeal => report.ideal = Some(ideal(cfg, &c, &mut checks)?),
        Command::VerifyHex => report.hex = Some(hex(cfg, &c, &mut checks)?),
        Command::Closure => report.closure = Some(closure(cfg, &c, &mut checks)?),
        Command::Invariants => report.invariants = Some(invariants(cfg, &c, &mut checks)?),
        Command::Classify => report.classify = Some(classify(cfg, &c, &mut checks)?),
        Command::Render => report.render = Some(render(cfg, &c, &mut checks, &mut figures)?),
        Command::All => {
            if named {
                report.ideal = Some(ideal(cfg, &c, &mut checks)?);
            }
            report.hex = Some(hex(cfg, &c, &mut checks)?);
            report.closure = Some(closure(cfg, &c, &mut checks)?);
            if cubic {
                report.invariants = Some(invariants(cfg, &c, &mut checks)?);
            }
            if !cfg.classify.is_empty() {
                report.classify = Some(classify(cfg, &c, &mut checks)?);
            }
            report.render = Some(render(cfg, &c, &mut checks, &mut figures)?);
        }
    }
    report.passed = checks.iter().all(|k| k.passed);
    report.checks = checks;
    Ok(Execution { report, figures })
}

/// Files written by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub written: Vec<PathBuf>,
}

/// Runs the command and writes `report.json`, `meta.json` and the figures into the
/// output directory.
pub fn run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let exec = execute(cfg)?;
    let dir = &cfg.output_dir;
    let io = |path: &PathBuf| {
        let path = path.clone();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<(), RunError> {
        let path = dir.join(name);
        fs::write(&path, text).map_err(io(&path))?;
        written.push(path);
        Ok(())
    };
    let json = serde_json::to_string_pretty(&exec.report).expect("report serializes") + "\n";
    put("report.json", &json)?;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "generated_unix": stamp,
        "version": env!("CARGO_PKG_VERSION"),
    });
    put("meta.json", &(serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"))?;
    for (name, svg) in &exec.figures {
        put(name, svg)?;
    }
    Ok(Outcome { report: exec.report, written })
}
