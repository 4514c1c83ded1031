//! The Foucault pendulum on the `(t, x, y)` chart.
//!
//! The constraint planes are spanned by `∂_t` and the swing direction
//! `e[1] = cos φ ∂_x + sin φ ∂_y`, with `φ = φ̇ t`. The Pfaffian
//! `θ² = -sin φ dx + cos φ dy` is not integrable for `φ̇ ≠ 0`.
//!
//! Sign conventions follow from the frame `[∂_t | R(φ)]` directly:
//! `ω^2_{10} = +φ̇`, `θ²∧dθ² = -φ̇ dt∧dx∧dy`, `H_01 = +½φ̇` and the normal
//! acceleration of a swing at speed `v` along `e[1]` is `+φ̇ v`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{CalcError, ChartPoint, Jet1, OneForm, Scalar};
use crate::geometry::{
    fundamental_forms, shape_and_curvatures, CurvatureReport, FrameAt, FrameField, FundamentalForms, GeometryError,
    MetricSignature, Source,
};
use crate::linalg::{matmul, Mat3};
use crate::pfaff::{frobenius_coefficient, PfaffError};
use crate::rk4;

/// Sidereal rotation rate of the Earth (rad/s).
pub const EARTH_RATE: f64 = 7.292e-5;
/// Standard gravity (m/s²).
pub const STANDARD_GRAVITY: f64 = 9.81;
/// Equatorial radius of the Earth (m).
pub const EARTH_RADIUS: f64 = 6.378e6;
/// Seconds per day.
pub const DAY: f64 = 86_400.0;

/// Largest normalized constraint residual accepted for a swing state.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-6;
/// Windows whose second-moment anisotropy falls below this have no plane.
pub const ISOTROPY_THRESHOLD: f64 = 1e-2;

fn default_earth_rate() -> f64 {
    EARTH_RATE
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoucaultConfig {
    /// Latitude ψ (rad).
    pub latitude: f64,
    /// ω_E (rad/s).
    #[serde(default = "default_earth_rate")]
    pub earth_rate: f64,
    /// Pendulum length L (m).
    pub length: f64,
    /// g (m/s²).
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    /// Frame rate φ̇ (rad/s); `2 ω_E sin ψ` when absent.
    #[serde(default)]
    pub frame_rate: Option<f64>,
}

impl FoucaultConfig {
    pub fn new(latitude: f64, length: f64) -> Self {
        Self {
            latitude,
            earth_rate: EARTH_RATE,
            length,
            gravity: STANDARD_GRAVITY,
            frame_rate: None,
        }
    }

    /// Latitude given in degrees.
    pub fn at_degrees(latitude_deg: f64, length: f64) -> Self {
        Self::new(latitude_deg.to_radians(), length)
    }

    pub fn validate(&self) -> Result<(), FoucaultError> {
        let bad = |field: &'static str, reason: String| Err(FoucaultError::InvalidConfig { field, reason });
        if !(self.latitude.is_finite() && self.latitude.abs() <= std::f64::consts::FRAC_PI_2 + 1e-15) {
            return bad(
                "latitude",
                format!("must lie in [-π/2, π/2] radians, got {}", self.latitude),
            );
        }
        if !(self.earth_rate.is_finite() && self.earth_rate >= 0.0) {
            return bad(
                "earth_rate",
                format!("must be finite and non-negative, got {}", self.earth_rate),
            );
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return bad("length", format!("must be finite and positive, got {}", self.length));
        }
        if !(self.gravity.is_finite() && self.gravity > 0.0) {
            return bad("gravity", format!("must be finite and positive, got {}", self.gravity));
        }
        if let Some(r) = self.frame_rate {
            if !r.is_finite() {
                return bad("frame_rate", format!("must be finite, got {r}"));
            }
        }
        Ok(())
    }

    /// φ̇, the rotation rate of the adapted frame.
    pub fn frame_rate(&self) -> f64 {
        self.frame_rate.unwrap_or(2.0 * self.earth_rate * self.latitude.sin())
    }

    /// `Ω = ω_E sin ψ`, the vertical component of the Earth's rotation.
    pub fn vertical_rate(&self) -> f64 {
        self.earth_rate * self.latitude.sin()
    }

    /// `√(g/L)`.
    pub fn natural_frequency(&self) -> f64 {
        (self.gravity / self.length).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.natural_frequency()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoucaultError {
    #[error("invalid configuration field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("swing amplitude {r} m exceeds the pendulum length {length} m at t = {t}")]
    AmplitudeExceedsLength { t: f64, r: f64, length: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("velocity leaves the constraint plane at t = {t}: normalized residual {residual:e}")]
    ConstraintViolation { t: f64, residual: f64 },
    #[error("window {window} s is shorter than two pendulum periods ({period} s)")]
    WindowTooShort { window: f64, period: f64 },
    #[error("trajectory too short: need at least {needed} windows, have {available}")]
    TooFewWindows { needed: usize, available: usize },
    #[error("window starting at t = {t} has no oscillation plane (anisotropy {anisotropy:e})")]
    DegenerateWindow { t: f64, anisotropy: f64 },
    #[error("window starting at t = {t} has zero amplitude")]
    ZeroAmplitude { t: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Pfaff(#[from] PfaffError),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

/// `θ² = -sin(φ̇ t) dx + cos(φ̇ t) dy` on `(t, x, y)`.
pub fn foucault_pfaffian(cfg: &FoucaultConfig) -> OneForm {
    let rate = cfg.frame_rate();
    OneForm::from_jet1_fn(move |v| {
        let phi = v[0].scale(rate);
        [Jet1::constant(0.0), -phi.sin(), phi.cos()]
    })
}

/// The adapted frame `[∂_t | R(φ̇ t)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoucaultFrame {
    pub frame_rate: f64,
    /// Metric recorded on each [`FrameAt`].
    pub metric: MetricSignature,
}

impl FoucaultFrame {
    pub fn new(cfg: &FoucaultConfig) -> Self {
        Self {
            frame_rate: cfg.frame_rate(),
            metric: MetricSignature::Euclidean,
        }
    }

    pub fn with_metric(mut self, metric: MetricSignature) -> Self {
        self.metric = metric;
        self
    }

    pub fn matrix<S: Scalar>(&self, t: S) -> Mat3<S> {
        let phi = t.scale(self.frame_rate);
        let (c, s) = (phi.cos(), phi.sin());
        let (zero, one) = (S::cst(0.0), S::cst(1.0));
        [[one, zero, zero], [zero, c, -s], [zero, s, c]]
    }
}

impl FrameField for FoucaultFrame {
    fn frame_at(&self, p: &ChartPoint) -> Result<FrameAt, GeometryError> {
        if !p.is_finite() {
            return Err(CalcError::NonFinitePoint {
                axis: p.0.iter().position(|c| !c.is_finite()).unwrap_or(0) + 1,
                point: *p,
            }
            .into());
        }
        FrameAt::from_jets(*p, &self.matrix(Jet1::variable(p.0[0], 0)), self.metric)
    }
}

/// The Foucault frame at time `t` (the frame does not depend on `x, y`).
pub fn foucault_frame(cfg: &FoucaultConfig, t: f64) -> Result<FrameAt, GeometryError> {
    FoucaultFrame::new(cfg).frame_at(&ChartPoint::new(t, 0.0, 0.0))
}

/// Result of [`foucault_geometry`]. Exactly one of `curvature` and
/// `degeneracy` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct FoucaultGeometry {
    pub metric: MetricSignature,
    pub frame_rate: f64,
    /// Coefficient of `dt∧dx∧dy` in `θ²∧dθ²`.
    pub frobenius: f64,
    pub forms: FundamentalForms,
    pub curvature: Option<CurvatureReport>,
    pub degeneracy: Option<String>,
}

/// Frobenius coefficient, fundamental forms and curvatures at `t = 0`.
/// Every quantity is independent of the point.
pub fn foucault_geometry(cfg: &FoucaultConfig, metric: MetricSignature) -> Result<FoucaultGeometry, FoucaultError> {
    cfg.validate()?;
    let p = ChartPoint::new(0.0, 0.0, 0.0);
    let theta = foucault_pfaffian(cfg);
    let frame = FoucaultFrame::new(cfg).with_metric(metric).frame_at(&p)?;
    let forms = fundamental_forms(&Source::Pfaffian(theta.clone()), &frame, metric)?;
    let (curvature, degeneracy) = match shape_and_curvatures(&forms) {
        Ok(c) => (Some(c), None),
        Err(e @ GeometryError::DegenerateMetric { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    Ok(FoucaultGeometry {
        metric,
        frame_rate: cfg.frame_rate(),
        frobenius: frobenius_coefficient(&theta, &p)?,
        forms,
        curvature,
        degeneracy,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PendulumState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl PendulumState {
    pub fn at_rest(x: f64, y: f64) -> Self {
        Self {
            t: 0.0,
            x,
            y,
            vx: 0.0,
            vy: 0.0,
        }
    }

    fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.vx, self.vy]
    }

    fn from_array(t: f64, y: [f64; 4]) -> Self {
        Self {
            t,
            x: y[0],
            y: y[1],
            vx: y[2],
            vy: y[3],
        }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    fn is_finite(&self) -> bool {
        [self.t, self.x, self.y, self.vx, self.vy].iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub config: FoucaultConfig,
    /// Spacing of the recorded states.
    pub dt: f64,
    pub states: Vec<PendulumState>,
}

fn pendulum_rhs(cfg: &FoucaultConfig) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    let two_omega = 2.0 * cfg.vertical_rate();
    let w2 = cfg.gravity / cfg.length;
    move |_, s| [s[2], s[3], -two_omega * s[3] - w2 * s[0], two_omega * s[2] - w2 * s[1]]
}

fn check_state(cfg: &FoucaultConfig, s: &PendulumState) -> Result<(), FoucaultError> {
    if !s.is_finite() {
        return Err(FoucaultError::NonFinite { t: s.t });
    }
    let r = s.radius();
    if !(r < cfg.length) {
        return Err(FoucaultError::AmplitudeExceedsLength {
            t: s.t,
            r,
            length: cfg.length,
        });
    }
    Ok(())
}

fn step_count(dt: f64, span: f64) -> Result<usize, FoucaultError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(FoucaultError::InvalidStep(format!(
            "dt must be positive and finite, got {dt}"
        )));
    }
    if !(span.is_finite() && span >= dt) {
        return Err(FoucaultError::InvalidStep(format!(
            "duration {span} must be at least dt = {dt}"
        )));
    }
    let n = (span / dt * (1.0 + 1e-12)).floor();
    if n > 1e10 {
        return Err(FoucaultError::InvalidStep(format!("{n} steps is too many")));
    }
    Ok(n as usize)
}

/// `n` RK4 steps of signed size `dt` from `s`, without recording.
pub fn propagate(cfg: &FoucaultConfig, s: PendulumState, dt: f64, n: usize) -> Result<PendulumState, FoucaultError> {
    cfg.validate()?;
    check_state(cfg, &s)?;
    if !(dt.is_finite() && dt != 0.0) {
        return Err(FoucaultError::InvalidStep(format!(
            "dt must be finite and non-zero, got {dt}"
        )));
    }
    let f = pendulum_rhs(cfg);
    let mut y = s.to_array();
    let mut out = s;
    for k in 0..n {
        y = rk4::step(&f, s.t + k as f64 * dt, &y, dt);
        out = PendulumState::from_array(s.t + (k + 1) as f64 * dt, y);
        check_state(cfg, &out)?;
    }
    Ok(out)
}

/// RK4 on `ẍ = -2Ω ẏ - (g/L) x`, `ÿ = 2Ω ẋ - (g/L) y`, recording every state.
pub fn simulate_pendulum(
    cfg: &FoucaultConfig,
    s0: PendulumState,
    dt: f64,
    duration: f64,
) -> Result<Trajectory, FoucaultError> {
    simulate_pendulum_strided(cfg, s0, dt, duration, 1)
}

/// As [`simulate_pendulum`], recording every `stride`-th state.
pub fn simulate_pendulum_strided(
    cfg: &FoucaultConfig,
    s0: PendulumState,
    dt: f64,
    duration: f64,
    stride: usize,
) -> Result<Trajectory, FoucaultError> {
    cfg.validate()?;
    check_state(cfg, &s0)?;
    let n = step_count(dt, duration)?;
    if stride == 0 {
        return Err(FoucaultError::InvalidStep("stride must be at least 1".into()));
    }
    let f = pendulum_rhs(cfg);
    let mut states = Vec::with_capacity(n / stride + 1);
    states.push(s0);
    let mut y = s0.to_array();
    for k in 0..n {
        let t = s0.t + (k + 1) as f64 * dt;
        y = rk4::step(&f, s0.t + k as f64 * dt, &y, dt);
        let s = PendulumState::from_array(t, y);
        check_state(cfg, &s)?;
        if (k + 1) % stride == 0 {
            states.push(s);
        }
    }
    Ok(Trajectory {
        config: *cfg,
        dt: dt * stride as f64,
        states,
    })
}

/// A swing confined to the constraint planes: the velocity is `v e[1](t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SwingState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Signed speed along `e[1]`.
    pub v: f64,
}

impl SwingState {
    /// Chart velocity `(1, ẋ, ẏ)` and acceleration `(0, ẍ, ÿ)` on `(t, x, y)`.
    pub fn kinematics(&self, cfg: &FoucaultConfig) -> ([f64; 3], [f64; 3]) {
        let rate = cfg.frame_rate();
        let (s, c) = (rate * self.t).sin_cos();
        let vdot = -cfg.gravity / cfg.length * (self.x * c + self.y * s);
        (
            [1.0, self.v * c, self.v * s],
            [0.0, vdot * c - self.v * rate * s, vdot * s + self.v * rate * c],
        )
    }

    pub fn pendulum_state(&self, cfg: &FoucaultConfig) -> PendulumState {
        let (v, _) = self.kinematics(cfg);
        PendulumState {
            t: self.t,
            x: self.x,
            y: self.y,
            vx: v[1],
            vy: v[2],
        }
    }
}

/// RK4 on `ẋ = v cos φ`, `ẏ = v sin φ`, `v̇ = -(g/L)(x cos φ + y sin φ)`.
/// The restoring force is projected onto the swing direction; the
/// constraint supplies the normal part.
pub fn simulate_constrained(
    cfg: &FoucaultConfig,
    s0: SwingState,
    dt: f64,
    duration: f64,
) -> Result<Vec<SwingState>, FoucaultError> {
    cfg.validate()?;
    let n = step_count(dt, duration)?;
    let rate = cfg.frame_rate();
    let w2 = cfg.gravity / cfg.length;
    let f = |t: f64, y: &[f64; 3]| {
        let (s, c) = (rate * t).sin_cos();
        [y[2] * c, y[2] * s, -w2 * (y[0] * c + y[1] * s)]
    };
    let mut out = Vec::with_capacity(n + 1);
    out.push(s0);
    let mut y = [s0.x, s0.y, s0.v];
    for k in 0..n {
        let t = s0.t + k as f64 * dt;
        y = rk4::step(f, t, &y, dt);
        let s = SwingState {
            t: s0.t + (k + 1) as f64 * dt,
            x: y[0],
            y: y[1],
            v: y[2],
        };
        if !(s.x.is_finite() && s.y.is_finite() && s.v.is_finite()) {
            return Err(FoucaultError::NonFinite { t: s.t });
        }
        let r = s.x.hypot(s.y);
        if !(r < cfg.length) {
            return Err(FoucaultError::AmplitudeExceedsLength {
                t: s.t,
                r,
                length: cfg.length,
            });
        }
        out.push(s);
    }
    Ok(out)
}

/// Acceleration components `(a⁰, a¹, a²)` in the adapted frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameAcceleration {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

/// `g sin α` along the swing direction under the small-angle closure.
pub fn restoring_term(cfg: &FoucaultConfig, state: &PendulumState) -> f64 {
    let (s, c) = (cfg.frame_rate() * state.t).sin_cos();
    cfg.gravity / cfg.length * (state.x * c + state.y * s)
}

/// Splits the acceleration of a constrained swing. `restoring` is `g sin α`,
/// so `a¹ = v̇ = -restoring`; `a² = φ̇ v` is supplied by the constraint.
pub fn decompose_acceleration(
    cfg: &FoucaultConfig,
    state: &PendulumState,
    restoring: f64,
) -> Result<FrameAcceleration, FoucaultError> {
    cfg.validate()?;
    let rate = cfg.frame_rate();
    let (s, c) = (rate * state.t).sin_cos();
    let speed = state.vx.hypot(state.vy);
    let across = -s * state.vx + c * state.vy;
    let residual = if speed > 0.0 { across.abs() / speed } else { 0.0 };
    if !(residual <= CONSTRAINT_TOLERANCE) {
        return Err(FoucaultError::ConstraintViolation { t: state.t, residual });
    }
    let v = c * state.vx + s * state.vy;
    Ok(FrameAcceleration {
        a0: 0.0,
        a1: -restoring,
        a2: rate * v,
    })
}

/// Centripetal acceleration `ω_E² R cos ψ` at the laboratory (m/s²).
pub fn centripetal_acceleration(cfg: &FoucaultConfig) -> f64 {
    cfg.earth_rate * cfg.earth_rate * EARTH_RADIUS * cfg.latitude.cos()
}

/// Coriolis magnitude `2 ω_E sin ψ · v` (m/s²).
pub fn coriolis_magnitude(cfg: &FoucaultConfig, speed: f64) -> f64 {
    (2.0 * cfg.vertical_rate() * speed).abs()
}

/// Angle in degrees swept in one day at `rate` rad/s.
pub fn daily_rotation_degrees(rate: f64) -> f64 {
    (rate * DAY).to_degrees()
}

/// Oscillation-plane angle of one window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneSample {
    /// Mid-point of the window.
    pub t: f64,
    /// Unwrapped principal-axis angle (rad).
    pub angle: f64,
    /// `(λ₁ - λ₂)/(λ₁ + λ₂)` of the second-moment matrix.
    pub anisotropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Precession {
    /// Least-squares slope of angle against time (rad/s).
    pub rate: f64,
    pub intercept: f64,
    pub samples: Vec<PlaneSample>,
}

impl Precession {
    /// Plane angle at `t`, interpolated between window mid-points and held
    /// constant beyond the first and last.
    pub fn angle_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        if t <= s[0].t {
            return s[0].angle;
        }
        let k = s.partition_point(|p| p.t <= t);
        if k >= s.len() {
            return s[s.len() - 1].angle;
        }
        let (a, b) = (s[k - 1], s[k]);
        a.angle + (b.angle - a.angle) * (t - a.t) / (b.t - a.t)
    }
}

fn wrap_half_turn(d: f64) -> f64 {
    use std::f64::consts::PI;
    let r = d.rem_euclid(PI);
    if r > 0.5 * PI {
        r - PI
    } else {
        r
    }
}

/// Precession rate of the oscillation plane. Windows of `window` seconds
/// (at least two periods) start one period apart.
pub fn measure_precession(traj: &Trajectory, window: f64) -> Result<Precession, FoucaultError> {
    let period = traj.config.period();
    if !(window >= 2.0 * period * (1.0 - 1e-12)) {
        return Err(FoucaultError::WindowTooShort { window, period });
    }
    let per_window = (window / traj.dt).round() as usize;
    let hop = ((period / traj.dt).round() as usize).max(1);
    let states = &traj.states;
    let available = if states.len() >= per_window {
        (states.len() - per_window) / hop + 1
    } else {
        0
    };
    if available < 2 {
        return Err(FoucaultError::TooFewWindows { needed: 2, available });
    }

    let mut samples: Vec<PlaneSample> = Vec::with_capacity(available);
    for w in 0..available {
        let chunk = &states[w * hop..w * hop + per_window];
        let n = chunk.len() as f64;
        let mx = chunk.iter().map(|s| s.x).sum::<f64>() / n;
        let my = chunk.iter().map(|s| s.y).sum::<f64>() / n;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for s in chunk {
            let (dx, dy) = (s.x - mx, s.y - my);
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        let t0 = chunk[0].t;
        let trace = sxx + syy;
        if !(trace > 0.0) {
            return Err(FoucaultError::ZeroAmplitude { t: t0 });
        }
        let anisotropy = ((sxx - syy).powi(2) + 4.0 * sxy * sxy).sqrt() / trace;
        if !(anisotropy >= ISOTROPY_THRESHOLD) {
            return Err(FoucaultError::DegenerateWindow { t: t0, anisotropy });
        }
        let raw = 0.5 * (2.0 * sxy).atan2(sxx - syy);
        let angle = match samples.last() {
            Some(prev) => prev.angle + wrap_half_turn(raw - prev.angle),
            None => raw,
        };
        let t = 0.5 * (t0 + chunk[chunk.len() - 1].t);
        samples.push(PlaneSample { t, angle, anisotropy });
    }

    let n = samples.len() as f64;
    let tm = samples.iter().map(|s| s.t).sum::<f64>() / n;
    let am = samples.iter().map(|s| s.angle).sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for s in &samples {
        num += (s.t - tm) * (s.angle - am);
        den += (s.t - tm) * (s.t - tm);
    }
    let rate = num / den;
    Ok(Precession {
        rate,
        intercept: am - rate * tm,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportKind {
    Vector,
    Covector,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportState {
    pub kind: TransportKind,
    pub t: Vec<f64>,
    /// Natural-frame components at each time.
    pub components: Vec<[f64; 3]>,
}

impl TransportState {
    /// Components in the moving frame: `θ[i](v)` for vectors, `α(e[i])`
    /// for covectors.
    pub fn frame_components(&self, cfg: &FoucaultConfig) -> Result<Vec<[f64; 3]>, GeometryError> {
        self.t
            .iter()
            .zip(&self.components)
            .map(|(t, c)| {
                let f = foucault_frame(cfg, *t)?;
                Ok(match self.kind {
                    TransportKind::Vector => crate::linalg::matvec(&f.x_inv, c),
                    TransportKind::Covector => std::array::from_fn(|i| (0..3).map(|k| c[k] * f.x[k][i]).sum()),
                })
            })
            .collect()
    }
}

/// Teleparallel transport along the time axis: the frame is declared
/// parallel, so `dv/dt = Ẋ X̃ v` for vectors and `dα/dt = -(Ẋ X̃)ᵀ α`
/// for covectors.
pub fn parallel_transport(
    cfg: &FoucaultConfig,
    kind: TransportKind,
    init: [f64; 3],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<TransportState, FoucaultError> {
    cfg.validate()?;
    if !init.iter().all(|c| c.is_finite()) || !t0.is_finite() {
        return Err(FoucaultError::InvalidStep(
            "initial components and t0 must be finite".into(),
        ));
    }
    let n = step_count(dt, t1 - t0)?;
    let frame = FoucaultFrame::new(cfg);
    let generator = |t: f64| -> Result<Mat3<f64>, GeometryError> {
        let f = frame.frame_at(&ChartPoint::new(t, 0.0, 0.0))?;
        Ok(matmul(&f.dx[0], &f.x_inv))
    };
    let rhs = |t: f64, v: &[f64; 3]| -> Result<[f64; 3], GeometryError> {
        let g = generator(t)?;
        Ok(std::array::from_fn(|i| match kind {
            TransportKind::Vector => (0..3).map(|k| g[i][k] * v[k]).sum(),
            TransportKind::Covector => -(0..3).map(|k| g[k][i] * v[k]).sum::<f64>(),
        }))
    };
    let mut out = TransportState {
        kind,
        t: vec![t0],
        components: vec![init],
    };
    let mut v = init;
    for k in 0..n {
        let t = t0 + k as f64 * dt;
        v = rk4::try_step(rhs, t, &v, dt)?;
        out.t.push(t0 + (k + 1) as f64 * dt);
        out.components.push(v);
    }
    Ok(out)
}
