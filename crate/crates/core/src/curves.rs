//! Curves: Frenet–Serret data, the geodesic/normal split on a (pseudo-)surface,
//! and geodesic integration along an adapted frame field.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::calculus::ChartPoint;
use crate::geometry::{FrameAt, FrameField, FundamentalForms, GeometryError};
use crate::linalg::{cross, dot, inverse3, matvec, norm, scale, sub};
use crate::rk4;

/// Curvature below which a curve is treated as straight (1/m).
pub const STRAIGHT_CURVATURE: f64 = 1e-10;

/// Largest normalized constraint residual accepted by [`curvature_split`].
pub const CONSTRAINT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("curve is straight at s = {s} (κ = {kappa:e}); normal, binormal and torsion are undefined")]
    StraightLine { s: f64, kappa: f64 },
    #[error("curve leaves the constraint planes at s = {s}: normalized residual {residual:e}")]
    ConstraintViolation { s: f64, residual: f64 },
    #[error("parameter {s} is outside the sampled range [{lo}, {hi}] of a sampled curve")]
    OutOfRange { s: f64, lo: f64, hi: f64 },
    #[error("invalid integration request: {0}")]
    InvalidStep(String),
    #[error("frame failed at s = {s}, last good point {last}: {source}")]
    FrameFailure {
        s: f64,
        last: ChartPoint,
        source: GeometryError,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Position and its first three derivatives with respect to the parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveJet {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub acceleration: [f64; 3],
    pub jerk: [f64; 3],
}

pub trait ParamCurve {
    fn jet(&self, s: f64) -> Result<CurveJet, CurveError>;

    /// True when the parameter is Euclidean arc length.
    fn is_arc_length(&self) -> bool;
}

type VecFn = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// A curve given by closed-form position and derivatives.
#[derive(Clone)]
pub struct AnalyticCurve {
    derivs: [VecFn; 4],
    arc_length: bool,
}

impl AnalyticCurve {
    pub fn new(
        position: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        velocity: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        acceleration: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        jerk: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        arc_length: bool,
    ) -> Self {
        Self {
            derivs: [
                Arc::new(position),
                Arc::new(velocity),
                Arc::new(acceleration),
                Arc::new(jerk),
            ],
            arc_length,
        }
    }

    /// Circle of radius `r` about `center` in the plane `z = center[2]`,
    /// parameterized by arc length.
    pub fn circle(center: [f64; 3], r: f64) -> Self {
        Self::new(
            move |s| [center[0] + r * (s / r).cos(), center[1] + r * (s / r).sin(), center[2]],
            move |s| [-(s / r).sin(), (s / r).cos(), 0.0],
            move |s| [-(s / r).cos() / r, -(s / r).sin() / r, 0.0],
            move |s| [(s / r).sin() / (r * r), -(s / r).cos() / (r * r), 0.0],
            true,
        )
    }

    /// Helix `(a cos u, a sin u, b u)` with `u = s / √(a² + b²)`.
    pub fn helix(a: f64, b: f64) -> Self {
        let c = (a * a + b * b).sqrt();
        Self::new(
            move |s| [a * (s / c).cos(), a * (s / c).sin(), b * s / c],
            move |s| [-a / c * (s / c).sin(), a / c * (s / c).cos(), b / c],
            move |s| [-a / (c * c) * (s / c).cos(), -a / (c * c) * (s / c).sin(), 0.0],
            move |s| [a / (c * c * c) * (s / c).sin(), -a / (c * c * c) * (s / c).cos(), 0.0],
            true,
        )
    }

    /// `p + s u` for unit `u`.
    pub fn line(p: [f64; 3], u: [f64; 3]) -> Self {
        Self::new(
            move |s| [p[0] + s * u[0], p[1] + s * u[1], p[2] + s * u[2]],
            move |_| u,
            |_| [0.0; 3],
            |_| [0.0; 3],
            true,
        )
    }
}

impl ParamCurve for AnalyticCurve {
    fn jet(&self, s: f64) -> Result<CurveJet, CurveError> {
        let [p, v, a, j] = &self.derivs;
        Ok(CurveJet {
            position: p(s),
            velocity: v(s),
            acceleration: a(s),
            jerk: j(s),
        })
    }

    fn is_arc_length(&self) -> bool {
        self.arc_length
    }
}

/// Positions at `s0 + k ds`, differentiated with central differences of
/// fourth order. Derivatives are available at samples at least three steps
/// away from either end.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    pub s0: f64,
    pub ds: f64,
    pub points: Vec<[f64; 3]>,
    pub arc_length: bool,
}

impl SampledCurve {
    fn index(&self, s: f64) -> Result<usize, CurveError> {
        let lo = self.s0 + 3.0 * self.ds;
        let hi = self.s0 + (self.points.len() as f64 - 4.0) * self.ds;
        let k = ((s - self.s0) / self.ds).round();
        if self.points.len() < 7 || !(k >= 3.0 && k as usize + 3 < self.points.len()) {
            return Err(CurveError::OutOfRange { s, lo, hi });
        }
        Ok(k as usize)
    }
}

impl ParamCurve for SampledCurve {
    fn jet(&self, s: f64) -> Result<CurveJet, CurveError> {
        let k = self.index(s)?;
        let h = self.ds;
        let f = |o: isize| self.points[(k as isize + o) as usize];
        let comb = |w: &[(isize, f64)], d: f64| -> [f64; 3] {
            std::array::from_fn(|i| w.iter().map(|(o, c)| c * f(*o)[i]).sum::<f64>() / d)
        };
        Ok(CurveJet {
            position: f(0),
            velocity: comb(&[(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)], 12.0 * h),
            acceleration: comb(
                &[(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)],
                12.0 * h * h,
            ),
            jerk: comb(
                &[(-3, 1.0), (-2, -8.0), (-1, 13.0), (1, -13.0), (2, 8.0), (3, -1.0)],
                8.0 * h * h * h,
            ),
        })
    }

    fn is_arc_length(&self) -> bool {
        self.arc_length
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrenetData {
    pub t: [f64; 3],
    pub n: [f64; 3],
    pub b: [f64; 3],
    pub kappa: f64,
    /// Signed torsion, positive for a right-handed helix.
    pub tau: f64,
}

/// Frenet–Serret frame at `s`. The formulas are parameterization-invariant,
/// so time-parameterized curves are accepted as well.
pub fn frenet(curve: &dyn ParamCurve, s: f64) -> Result<FrenetData, CurveError> {
    let j = curve.jet(s)?;
    let v = j.velocity;
    let speed = norm(&v);
    let va = cross(&v, &j.acceleration);
    let vam = norm(&va);
    let kappa = vam / (speed * speed * speed);
    if !(kappa > STRAIGHT_CURVATURE) {
        return Err(CurveError::StraightLine { s, kappa });
    }
    let t = scale(&v, 1.0 / speed);
    let b = scale(&va, 1.0 / vam);
    let n = cross(&b, &t);
    let tau = dot(&va, &j.jerk) / (vam * vam);
    Ok(FrenetData { t, n, b, kappa, tau })
}

/// Tangential and normal parts of a constrained curve's second derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureSplit {
    /// Frame components of the velocity, `ν^a = θ[a](ẋ)`.
    pub nu: [f64; 3],
    /// `dν^a/ds + ω^a_b(ẋ) ν^b` for the tangential legs.
    pub geodesic: [f64; 2],
    /// `ω^2_(ab) ν^a ν^b`.
    pub normal: f64,
}

impl CurvatureSplit {
    pub fn geodesic_norm(&self) -> f64 {
        self.geodesic[0].hypot(self.geodesic[1])
    }
}

fn residual(frame: &FrameAt, v: &[f64; 3]) -> f64 {
    let n = frame.normal();
    dot(&n, v).abs() / (norm(&n) * norm(v) + 1e-30)
}

/// Geodesic and normal curvature at `s`. For an arc-length curve these are
/// curvatures; for a time-parameterized one they are the tangential and
/// normal accelerations.
pub fn curvature_split<F: FrameField>(curve: &dyn ParamCurve, field: &F, s: f64) -> Result<CurvatureSplit, CurveError> {
    let j = curve.jet(s)?;
    let p = ChartPoint(j.position);
    let frame = field.pinned_at(&p)?.frame_at(&p)?;
    let v = j.velocity;
    let r = residual(&frame, &v);
    if !(r <= CONSTRAINT_TOLERANCE) {
        return Err(CurveError::ConstraintViolation { s, residual: r });
    }
    let nu = matvec(&frame.x_inv, &v);
    // d/ds θ[a](ẋ) = (v^k ∂_k θ[a]) · ẋ + θ[a] · ẍ
    let dnu: [f64; 3] = std::array::from_fn(|a| {
        let dtheta: [f64; 3] = std::array::from_fn(|m| (0..3).map(|k| v[k] * frame.dx_inv[k][a][m]).sum());
        dot(&dtheta, &v) + dot(&frame.x_inv[a], &j.acceleration)
    });
    let w = frame.connection();
    let turn = |a: usize| -> f64 {
        let mut s = 0.0;
        for b in 0..3 {
            for k in 0..3 {
                s += w.w[a][b][k] * nu[b] * nu[k];
            }
        }
        s
    };
    let mut normal = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            normal += 0.5 * (w.w[2][a][b] + w.w[2][b][a]) * nu[a] * nu[b];
        }
    }
    Ok(CurvatureSplit {
        nu,
        geodesic: [dnu[0] + turn(0), dnu[1] + turn(1)],
        normal,
    })
}

/// The three expressions for the normal acceleration of a constrained
/// motion: `N(a)`, `H(v, v)` and `ω^2_a(v) v^a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalAcceleration {
    pub n_of_a: f64,
    pub h_vv: f64,
    pub omega: f64,
}

impl NormalAcceleration {
    /// Largest pairwise difference relative to `scale`.
    pub fn max_relative_spread(&self, scale: f64) -> f64 {
        let v = [self.n_of_a, self.h_vv, self.omega];
        let mut worst: f64 = 0.0;
        for a in v {
            for b in v {
                worst = worst.max((a - b).abs());
            }
        }
        worst / scale
    }
}

pub fn normal_acceleration(
    frame: &FrameAt,
    ff: &FundamentalForms,
    velocity: &[f64; 3],
    acceleration: &[f64; 3],
) -> NormalAcceleration {
    let nu = matvec(&frame.x_inv, velocity);
    let w = frame.connection();
    let mut omega = 0.0;
    for a in 0..3 {
        for k in 0..3 {
            omega += w.w[2][a][k] * nu[a] * nu[k];
        }
    }
    NormalAcceleration {
        n_of_a: dot(&frame.normal(), acceleration),
        h_vv: ff.h_quadratic(&[nu[0], nu[1]]),
        omega,
    }
}

/// Output of [`integrate_geodesic`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub s: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    /// Chart components of `dx/ds`.
    pub tangents: Vec<[f64; 3]>,
    /// Tangential frame components `ν^a` of `dx/ds`.
    pub nu: Vec<[f64; 2]>,
}

impl GeodesicPath {
    pub fn as_sampled(&self) -> SampledCurve {
        SampledCurve {
            s0: self.s[0],
            ds: if self.s.len() > 1 { self.s[1] - self.s[0] } else { 1.0 },
            points: self.points.clone(),
            arc_length: false,
        }
    }
}

fn tangent(frame: &FrameAt, nu: &[f64; 2]) -> [f64; 3] {
    std::array::from_fn(|i| frame.x[i][0] * nu[0] + frame.x[i][1] * nu[1])
}

/// RK4 on `dν^a/ds = -ω^a_{bc} ν^b ν^c`, `dx/ds = e[a] ν^a` with `a, b, c`
/// over the tangential legs.
///
/// Discrete completion choices are frozen for the duration of a step; when
/// they change between steps, `ν` is re-expressed in the new frame through
/// the chart tangent.
pub fn integrate_geodesic<F: FrameField>(
    field: &F,
    p0: ChartPoint,
    nu0: [f64; 2],
    steps: usize,
    ds: f64,
) -> Result<GeodesicPath, CurveError> {
    if steps == 0 {
        return Err(CurveError::InvalidStep("steps must be at least 1".into()));
    }
    if !(ds.is_finite() && ds > 0.0) {
        return Err(CurveError::InvalidStep(format!(
            "ds must be positive and finite, got {ds}"
        )));
    }
    if !(nu0[0].is_finite() && nu0[1].is_finite()) || nu0 == [0.0, 0.0] {
        return Err(CurveError::InvalidStep(
            "initial direction must be finite and non-zero".into(),
        ));
    }

    let fail = |s: f64, last: [f64; 3]| {
        move |source: GeometryError| CurveError::FrameFailure {
            s,
            last: ChartPoint(last),
            source,
        }
    };

    let mut pinned = field.pinned_at(&p0).map_err(fail(0.0, p0.0))?;
    let mut x = p0.0;
    let mut nu = nu0;
    let f0 = pinned.frame_at(&p0).map_err(fail(0.0, x))?;
    let mut path = GeodesicPath {
        s: vec![0.0],
        points: vec![x],
        tangents: vec![tangent(&f0, &nu)],
        nu: vec![nu],
    };

    for n in 0..steps {
        let s = n as f64 * ds;
        let here = ChartPoint(x);
        let next = field.pinned_at(&here).map_err(fail(s, x))?;
        let old = pinned.frame_at(&here).map_err(fail(s, x))?;
        let new = next.frame_at(&here).map_err(fail(s, x))?;
        if old.x != new.x {
            let t = tangent(&old, &nu);
            let inv = inverse3(&new.x, 1e-12).ok_or_else(|| {
                fail(s, x)(GeometryError::SingularFrame {
                    point: here,
                    det: crate::linalg::det3(&new.x),
                })
            })?;
            let v = matvec(&inv, &t);
            nu = [v[0], v[1]];
        }
        pinned = next;

        let rhs = |_: f64, y: &[f64; 5]| -> Result<[f64; 5], GeometryError> {
            let fr = pinned.frame_at(&ChartPoint([y[0], y[1], y[2]]))?;
            let w = fr.connection().w;
            let v = [y[3], y[4]];
            let t = tangent(&fr, &v);
            let accel = |a: usize| -> f64 {
                let mut acc = 0.0;
                for b in 0..2 {
                    for c in 0..2 {
                        acc += w[a][b][c] * v[b] * v[c];
                    }
                }
                -acc
            };
            Ok([t[0], t[1], t[2], accel(0), accel(1)])
        };
        let y = [x[0], x[1], x[2], nu[0], nu[1]];
        let y1 = rk4::try_step(rhs, s, &y, ds).map_err(fail(s, x))?;
        x = [y1[0], y1[1], y1[2]];
        nu = [y1[3], y1[4]];
        let s1 = (n + 1) as f64 * ds;
        let fr = pinned.frame_at(&ChartPoint(x)).map_err(fail(s1, path.points[n]))?;
        path.s.push(s1);
        path.points.push(x);
        path.tangents.push(tangent(&fr, &nu));
        path.nu.push(nu);
    }
    Ok(path)
}

/// Normalized constraint residual of each sample of a path against a frame field.
pub fn path_residuals<F: FrameField>(field: &F, path: &GeodesicPath) -> Result<Vec<f64>, CurveError> {
    path.points
        .iter()
        .zip(&path.tangents)
        .map(|(p, t)| {
            let fr = field.frame_at(&ChartPoint(*p))?;
            Ok(residual(&fr, t))
        })
        .collect()
}

/// Distance between two chart points.
pub fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm(&sub(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{Chart, OneForm};
    use crate::formlang::parse_scalar;
    use crate::geometry::{adapt_frame, AdaptedFrame, MetricSignature};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn sphere() -> AdaptedFrame {
        let f = parse_scalar("x^2 + y^2 + z^2", Chart::Spatial).unwrap();
        adapt_frame(OneForm::exact(f), MetricSignature::Euclidean)
    }

    #[test]
    fn circle_frenet() {
        let f = frenet(&AnalyticCurve::circle([0.0; 3], 1.0), 0.3).unwrap();
        assert!((f.kappa - 1.0).abs() < 1e-15);
        assert!(f.tau.abs() < 1e-15);
    }

    #[test]
    fn helix_matches_closed_form() {
        for (a, b) in [(FRAC_1_SQRT_2, FRAC_1_SQRT_2), (1.0, 1.0), (2.0, 0.5)] {
            let f = frenet(&AnalyticCurve::helix(a, b), 0.7).unwrap();
            let c2 = a * a + b * b;
            assert!((f.kappa - a / c2).abs() < 1e-14);
            assert!((f.tau - b / c2).abs() < 1e-14);
            assert!((dot(&f.t, &f.n)).abs() < 1e-12);
            let tn = cross(&f.t, &f.n);
            assert!(distance(&tn, &f.b) < 1e-12);
        }
    }

    #[test]
    fn straight_line_rejected() {
        let e = frenet(&AnalyticCurve::line([1.0, 2.0, 3.0], [0.0, 0.6, 0.8]), 2.0).unwrap_err();
        assert!(matches!(e, CurveError::StraightLine { .. }));
    }

    #[test]
    fn sampled_helix_agrees_with_analytic() {
        let h = AnalyticCurve::helix(1.0, 0.5);
        let ds = 1e-2;
        let points = (0..200).map(|k| h.jet(k as f64 * ds).unwrap().position).collect();
        let sc = SampledCurve {
            s0: 0.0,
            ds,
            points,
            arc_length: true,
        };
        let a = frenet(&h, 1.0).unwrap();
        let b = frenet(&sc, 1.0).unwrap();
        assert!((a.kappa - b.kappa).abs() < 1e-8);
        assert!((a.tau - b.tau).abs() < 1e-6);
        assert!(matches!(sc.jet(0.01), Err(CurveError::OutOfRange { .. })));
    }

    #[test]
    fn great_circle_is_geodesic() {
        let split = curvature_split(&AnalyticCurve::circle([0.0; 3], 1.0), &sphere(), 0.4).unwrap();
        assert!(split.geodesic_norm() < 1e-12);
        assert!((split.normal.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn latitude_circle_geodesic_curvature() {
        let polar = PI / 4.0;
        let r = polar.sin();
        let c = AnalyticCurve::circle([0.0, 0.0, polar.cos()], r);
        let split = curvature_split(&c, &sphere(), 0.2).unwrap();
        assert!((split.geodesic_norm() - 1.0 / polar.tan()).abs() < 1e-12);
        // κ² = κ_g² + κ_N²
        let k2 = split.geodesic_norm().powi(2) + split.normal.powi(2);
        assert!((k2 - 1.0 / (r * r)).abs() < 1e-10);
    }

    #[test]
    fn off_surface_curve_rejected() {
        let line = AnalyticCurve::line([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]);
        assert!(matches!(
            curvature_split(&line, &sphere(), 0.0),
            Err(CurveError::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn plane_geodesics_are_lines() {
        let plane = adapt_frame(OneForm::constant([0.0, 0.0, 1.0]), MetricSignature::Euclidean);
        let path = integrate_geodesic(&plane, ChartPoint::new(1.0, 2.0, 3.0), [0.6, 0.8], 100, 0.05).unwrap();
        let end = path.points[100];
        assert!(distance(&end, &[1.0 + 3.0, 2.0 + 4.0, 3.0]) < 1e-12);
    }

    #[test]
    fn great_circle_closes() {
        let n = 2000;
        let ds = 2.0 * PI / n as f64;
        let path = integrate_geodesic(&sphere(), ChartPoint::new(1.0, 0.0, 0.0), [1.0, 0.0], n, ds).unwrap();
        assert!(distance(&path.points[n], &[1.0, 0.0, 0.0]) < 1e-9);
        let res = path_residuals(&sphere(), &path).unwrap();
        assert!(res.iter().all(|r| *r < 1e-12));
        for v in &path.nu {
            assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn tilted_great_circle_stays_on_sphere() {
        let n = 1000;
        let ds = 2.0 * PI / n as f64;
        let path = integrate_geodesic(&sphere(), ChartPoint::new(0.0, 0.6, 0.8), [0.6, 0.8], n, ds).unwrap();
        for p in &path.points {
            assert!((norm(p) - 1.0).abs() < 1e-9);
        }
        assert!(distance(&path.points[n], &path.points[0]) < 1e-8);
    }

    #[test]
    fn step_validation() {
        let p = ChartPoint::new(1.0, 0.0, 0.0);
        assert!(integrate_geodesic(&sphere(), p, [1.0, 0.0], 0, 0.1).is_err());
        assert!(integrate_geodesic(&sphere(), p, [1.0, 0.0], 5, -0.1).is_err());
        assert!(integrate_geodesic(&sphere(), p, [0.0, 0.0], 5, 0.1).is_err());
    }

    #[test]
    fn frame_failure_reports_last_point() {
        // the Pfaffian 2x dx + 2y dy + 2z dz vanishes at the origin
        let e = integrate_geodesic(&sphere(), ChartPoint::new(0.0, 0.0, 0.0), [1.0, 0.0], 5, 0.1).unwrap_err();
        assert!(matches!(e, CurveError::FrameFailure { s, .. } if s == 0.0));
    }
}
