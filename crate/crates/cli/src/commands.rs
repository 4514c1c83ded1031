use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use pseudoform_core::calculus::{Chart, ChartPoint, OneForm, ScalarField};
use pseudoform_core::curves::integrate_geodesic;
use pseudoform_core::formlang::{parse_oneform, parse_scalar};
use pseudoform_core::foucault::{
    centripetal_acceleration, daily_rotation_degrees, foucault_geometry, measure_precession, parallel_transport,
    simulate_pendulum_strided, FoucaultConfig, PendulumState, Trajectory, TransportKind,
};
use pseudoform_core::geometry::{
    adapt_frame, fundamental_forms, shape_and_curvatures, CurvatureReport, GeometryError, MetricSignature, Source,
};
use pseudoform_core::pfaff::{classify, RegionSampler, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};

use crate::config::decode;
use crate::error::{numerical, CliError};
use crate::output::{Report, Table};

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("configs serialize")
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricName {
    Euclidean,
    Galilean,
    Minkowski,
}

fn default_metric() -> MetricName {
    MetricName::Euclidean
}

fn default_light_speed() -> f64 {
    1.0
}

fn default_chart() -> Chart {
    Chart::Spatial
}

fn metric(name: MetricName, c: f64) -> Result<MetricSignature, CliError> {
    Ok(match name {
        MetricName::Euclidean => MetricSignature::Euclidean,
        MetricName::Galilean => MetricSignature::Galilean,
        MetricName::Minkowski => {
            if !(c.is_finite() && c > 0.0) {
                return Err(CliError::Config(format!(
                    "field `light_speed`: must be positive, got {c}"
                )));
            }
            MetricSignature::Minkowski { c }
        }
    })
}

fn oneform(texts: &[String; 3], chart: Chart, field: &str) -> Result<OneForm, CliError> {
    parse_oneform(texts, chart).map_err(|e| CliError::Config(format!("field `{field}`: {e}")))
}

fn scalar(text: &str, chart: Chart, field: &str) -> Result<ScalarField, CliError> {
    parse_scalar(text, chart).map_err(|e| CliError::Config(format!("field `{field}`: {e}")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub pfaffian: [String; 3],
    #[serde(default = "default_chart")]
    pub chart: Chart,
    pub region: Region,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

pub fn classify_cmd(doc: Value, seed: u64) -> Result<Report, CliError> {
    let cfg: ClassifyConfig = decode(doc)?;
    let theta = oneform(&cfg.pfaffian, cfg.chart, "pfaffian")?;
    let region = RegionSampler::new(cfg.region.lo, cfg.region.hi, cfg.samples, seed)
        .map_err(|e| CliError::Config(format!("field `region`: {e}")))?;
    if !(cfg.tolerance.is_finite() && cfg.tolerance > 0.0) {
        return Err(CliError::Config(format!(
            "field `tolerance`: must be positive, got {}",
            cfg.tolerance
        )));
    }
    let report = classify(&theta, &region, cfg.tolerance).map_err(numerical)?;
    let mut table = Table::new(vec!["x1", "x2", "x3", "theta_norm", "d_theta", "frobenius"]);
    for s in &report.samples {
        let p = s.point.0;
        table.push(vec![p[0], p[1], p[2], s.theta_norm, s.d_theta, s.frobenius]);
    }
    let mut metadata = to_value(&cfg);
    metadata["seed"] = json!(seed);
    Ok(Report {
        command: "classify",
        metadata,
        result: json!({
            "class": report.class,
            "tolerance": report.tolerance,
            "max_d_theta": report.max_d_theta,
            "max_frobenius": report.max_frobenius,
            "max_d_theta_normalized": report.max_d_theta_normalized,
            "max_frobenius_normalized": report.max_frobenius_normalized,
            "samples": report.samples,
        }),
        table: Some(table),
    })
}

/// Where a frame field comes from: exactly one of the two must be given.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(default)]
    pub level_set: Option<String>,
    #[serde(default)]
    pub pfaffian: Option<[String; 3]>,
    #[serde(default = "default_chart")]
    pub chart: Chart,
    #[serde(default = "default_metric")]
    pub metric: MetricName,
    #[serde(default = "default_light_speed")]
    pub light_speed: f64,
    pub points: Vec<[f64; 3]>,
}

fn source(level_set: &Option<String>, pfaffian: &Option<[String; 3]>, chart: Chart) -> Result<Source, CliError> {
    match (level_set, pfaffian) {
        (Some(f), None) => Ok(Source::LevelSet(scalar(f, chart, "level_set")?)),
        (None, Some(n)) => Ok(Source::Pfaffian(oneform(n, chart, "pfaffian")?)),
        _ => Err(CliError::Config(
            "exactly one of the fields `level_set` and `pfaffian` must be given".into(),
        )),
    }
}

fn pfaffian_of(src: &Source) -> OneForm {
    match src {
        Source::Pfaffian(n) => n.clone(),
        Source::LevelSet(f) => OneForm::exact(f.clone()),
    }
}

fn curvature_json(c: &CurvatureReport) -> Value {
    json!({
        "kind": c.kind,
        "principal": c.principal.iter().map(|z| json!({"re": z.re, "im": z.im})).collect::<Vec<_>>(),
        "gaussian": c.gaussian,
        "mean": c.mean,
        "shape_operator": c.shape,
    })
}

pub fn surface_cmd(doc: Value) -> Result<Report, CliError> {
    let cfg: SurfaceConfig = decode(doc)?;
    let m = metric(cfg.metric, cfg.light_speed)?;
    let src = source(&cfg.level_set, &cfg.pfaffian, cfg.chart)?;
    if cfg.points.is_empty() {
        return Err(CliError::Config(
            "field `points`: at least one point is required".into(),
        ));
    }
    let frame = adapt_frame(pfaffian_of(&src), m);
    let mut table = Table::new(vec![
        "x1",
        "x2",
        "x3",
        "g00",
        "g01",
        "g11",
        "h00",
        "h01",
        "h11",
        "k1_re",
        "k1_im",
        "k2_re",
        "k2_im",
        "gaussian",
        "mean",
        "route_spread",
    ]);
    let mut results = Vec::new();
    for (k, p) in cfg.points.iter().enumerate() {
        let at = ChartPoint(*p);
        let fail = |e: GeometryError| CliError::Numerical(format!("points[{k}]: {e}"));
        let f = frame.at(&at).map_err(fail)?;
        let ff = fundamental_forms(&src, &f, m).map_err(fail)?;
        let (curv, degeneracy) = match shape_and_curvatures(&ff) {
            Ok(c) => (Some(c), None),
            Err(e @ GeometryError::DegenerateMetric { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(fail(e)),
        };
        let nan = f64::NAN;
        let (k1, k2, kg, km) = curv
            .map(|c| (c.principal[0], c.principal[1], c.gaussian, c.mean))
            .unwrap_or((nan.into(), nan.into(), nan, nan));
        table.push(vec![
            p[0],
            p[1],
            p[2],
            ff.g[0][0],
            ff.g[0][1],
            ff.g[1][1],
            ff.h[0][0],
            ff.h[0][1],
            ff.h[1][1],
            k1.re,
            k1.im,
            k2.re,
            k2.im,
            kg,
            km,
            ff.routes.max_discrepancy(),
        ]);
        results.push(json!({
            "point": p,
            "frame": f.x,
            "g": ff.g,
            "h": ff.h,
            "h_routes": ff.routes,
            "curvature": curv.as_ref().map(curvature_json),
            "degeneracy": degeneracy,
        }));
    }
    Ok(Report {
        command: "surface",
        metadata: to_value(&cfg),
        result: json!({ "points": results }),
        table: Some(table),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    #[serde(default)]
    pub level_set: Option<String>,
    #[serde(default)]
    pub pfaffian: Option<[String; 3]>,
    #[serde(default = "default_chart")]
    pub chart: Chart,
    pub start: [f64; 3],
    /// Initial tangential frame components `ν`.
    pub direction: [f64; 2],
    pub steps: usize,
    pub ds: f64,
}

pub fn geodesic_cmd(doc: Value) -> Result<Report, CliError> {
    let cfg: GeodesicConfig = decode(doc)?;
    let src = source(&cfg.level_set, &cfg.pfaffian, cfg.chart)?;
    let frame = adapt_frame(pfaffian_of(&src), MetricSignature::Euclidean);
    let path =
        integrate_geodesic(&frame, ChartPoint(cfg.start), cfg.direction, cfg.steps, cfg.ds).map_err(|e| match e {
            pseudoform_core::curves::CurveError::InvalidStep(m) => CliError::Config(m),
            other => numerical(other),
        })?;
    let mut table = Table::new(vec!["s", "x1", "x2", "x3", "v1", "v2", "v3"]);
    for k in 0..path.s.len() {
        let (p, v) = (path.points[k], path.tangents[k]);
        table.push(vec![path.s[k], p[0], p[1], p[2], v[0], v[1], v[2]]);
    }
    Ok(Report {
        command: "geodesic",
        metadata: to_value(&cfg),
        result: to_value(&path),
        table: Some(table),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub pendulum: FoucaultConfig,
    #[serde(default = "default_metric")]
    pub metric: MetricName,
    #[serde(default = "default_light_speed")]
    pub light_speed: f64,
}

fn check_pendulum(cfg: &FoucaultConfig) -> Result<(), CliError> {
    cfg.validate().map_err(|e| CliError::Config(format!("pendulum: {e}")))
}

/// The resolved pendulum config with the derived frame rate written out.
fn pendulum_metadata(cfg: &FoucaultConfig) -> Value {
    let mut v = to_value(cfg);
    v["frame_rate"] = json!(cfg.frame_rate());
    v
}

pub fn foucault_geometry_cmd(doc: Value) -> Result<Report, CliError> {
    let cfg: GeometryConfig = decode(doc)?;
    check_pendulum(&cfg.pendulum)?;
    let m = metric(cfg.metric, cfg.light_speed)?;
    let g = foucault_geometry(&cfg.pendulum, m).map_err(numerical)?;
    let p = &cfg.pendulum;
    let mut metadata = to_value(&cfg);
    metadata["pendulum"] = pendulum_metadata(p);
    Ok(Report {
        command: "foucault geometry",
        metadata,
        result: json!({
            "frame_rate": g.frame_rate,
            "frobenius": g.frobenius,
            "g": g.forms.g,
            "h": g.forms.h,
            "h_routes": g.forms.routes,
            "curvature": g.curvature.as_ref().map(curvature_json),
            "degeneracy": g.degeneracy,
            "closed_form_precession_rate": p.vertical_rate(),
            "coriolis_per_unit_speed": 2.0 * p.vertical_rate(),
            "daily_rotation_degrees": daily_rotation_degrees(g.frame_rate),
            "centripetal_acceleration": centripetal_acceleration(p),
        }),
        table: None,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub vx: f64,
    #[serde(default)]
    pub vy: f64,
}

fn default_stride() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub pendulum: FoucaultConfig,
    pub initial: Initial,
    pub dt: f64,
    pub duration: f64,
    /// Record every `stride`-th step.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecessionConfig {
    pub pendulum: FoucaultConfig,
    pub initial: Initial,
    pub dt: f64,
    pub duration: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Window length in seconds; two pendulum periods when absent.
    #[serde(default)]
    pub window: Option<f64>,
}

fn simulate(p: &FoucaultConfig, init: &Initial, dt: f64, duration: f64, stride: usize) -> Result<Trajectory, CliError> {
    check_pendulum(p)?;
    let s0 = PendulumState {
        t: 0.0,
        x: init.x,
        y: init.y,
        vx: init.vx,
        vy: init.vy,
    };
    simulate_pendulum_strided(p, s0, dt, duration, stride).map_err(|e| match e {
        pseudoform_core::foucault::FoucaultError::InvalidStep(m) => CliError::Config(m),
        other => numerical(other),
    })
}

fn trajectory_table(tr: &Trajectory, angle: Option<&dyn Fn(f64) -> f64>) -> Table {
    let mut header = vec!["t", "x", "y", "vx", "vy"];
    if angle.is_some() {
        header.push("plane_angle_rad");
    }
    let mut table = Table::new(header);
    for s in &tr.states {
        let mut row = vec![s.t, s.x, s.y, s.vx, s.vy];
        if let Some(a) = angle {
            row.push(a(s.t));
        }
        table.push(row);
    }
    table
}

pub fn foucault_sim_cmd(doc: Value) -> Result<Report, CliError> {
    let cfg: SimConfig = decode(doc)?;
    let tr = simulate(&cfg.pendulum, &cfg.initial, cfg.dt, cfg.duration, cfg.stride)?;
    let mut metadata = to_value(&cfg);
    metadata["pendulum"] = pendulum_metadata(&cfg.pendulum);
    Ok(Report {
        command: "foucault sim",
        metadata,
        result: json!({ "dt": tr.dt, "states": tr.states }),
        table: Some(trajectory_table(&tr, None)),
    })
}

pub fn foucault_precession_cmd(doc: Value) -> Result<Report, CliError> {
    let mut cfg: PrecessionConfig = decode(doc)?;
    check_pendulum(&cfg.pendulum)?;
    let window = *cfg.window.get_or_insert(2.0 * cfg.pendulum.period());
    let tr = simulate(&cfg.pendulum, &cfg.initial, cfg.dt, cfg.duration, cfg.stride)?;
    let p = measure_precession(&tr, window).map_err(numerical)?;
    let closed = cfg.pendulum.vertical_rate();
    let mut metadata = to_value(&cfg);
    metadata["pendulum"] = pendulum_metadata(&cfg.pendulum);
    let angle = |t: f64| p.angle_at(t);
    Ok(Report {
        command: "foucault precession",
        metadata,
        result: json!({
            "rate": p.rate,
            "intercept": p.intercept,
            "closed_form_rate": closed,
            "relative_deviation": if closed != 0.0 { json!((p.rate - closed) / closed) } else { Value::Null },
            "frame_rate": cfg.pendulum.frame_rate(),
            "daily_rotation_degrees": daily_rotation_degrees(p.rate),
            "windows": p.samples,
        }),
        table: Some(trajectory_table(&tr, Some(&angle))),
    })
}

fn default_t0() -> f64 {
    0.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    pub pendulum: FoucaultConfig,
    pub kind: TransportKind,
    pub init: [f64; 3],
    #[serde(default = "default_t0")]
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

pub fn transport_cmd(doc: Value) -> Result<Report, CliError> {
    let cfg: TransportConfig = decode(doc)?;
    check_pendulum(&cfg.pendulum)?;
    let out = parallel_transport(&cfg.pendulum, cfg.kind, cfg.init, cfg.t0, cfg.t1, cfg.dt).map_err(|e| match e {
        pseudoform_core::foucault::FoucaultError::InvalidStep(m) => CliError::Config(m),
        other => numerical(other),
    })?;
    let moving = out.frame_components(&cfg.pendulum).map_err(numerical)?;
    let mut table = Table::new(vec!["t", "v0", "v1", "v2"]);
    for (t, c) in out.t.iter().zip(&out.components) {
        table.push(vec![*t, c[0], c[1], c[2]]);
    }
    let mut metadata = to_value(&cfg);
    metadata["pendulum"] = pendulum_metadata(&cfg.pendulum);
    Ok(Report {
        command: "transport",
        metadata,
        result: json!({
            "kind": out.kind,
            "t": out.t,
            "components": out.components,
            "frame_components": moving,
        }),
        table: Some(table),
    })
}
