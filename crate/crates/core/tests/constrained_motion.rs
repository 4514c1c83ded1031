use std::f64::consts::PI;

use pseudoform_core::calculus::{Chart, ChartPoint, OneForm};
use pseudoform_core::curves::{curvature_split, frenet, integrate_geodesic, path_residuals, AnalyticCurve, ParamCurve};
use pseudoform_core::formlang::parse_scalar;
use pseudoform_core::foucault::{foucault_pfaffian, FoucaultConfig, FoucaultFrame};
use pseudoform_core::geometry::{adapt_frame, AdaptedFrame, MetricSignature};
use pseudoform_core::pfaff::constraint_residual;

fn sphere() -> AdaptedFrame {
    let f = parse_scalar("x^2 + y^2 + z^2", Chart::Spatial).unwrap();
    adapt_frame(OneForm::exact(f), MetricSignature::Euclidean)
}

fn fast_frame() -> FoucaultConfig {
    FoucaultConfig {
        frame_rate: Some(0.1),
        ..FoucaultConfig::at_degrees(45.0, 10.0)
    }
}

/// `(t, x, y)` of a swing at constant speed `v` along the rotating direction.
fn uniform_swing(rate: f64, v: f64) -> AnalyticCurve {
    AnalyticCurve::new(
        move |t| [t, v / rate * (rate * t).sin(), v / rate * (1.0 - (rate * t).cos())],
        move |t| [1.0, v * (rate * t).cos(), v * (rate * t).sin()],
        move |t| [0.0, -v * rate * (rate * t).sin(), v * rate * (rate * t).cos()],
        move |t| {
            [
                0.0,
                -v * rate * rate * (rate * t).cos(),
                -v * rate * rate * (rate * t).sin(),
            ]
        },
        false,
    )
}

#[test]
fn uniform_swing_is_a_geodesic_of_the_pseudo_surface() {
    let cfg = fast_frame();
    let frame = FoucaultFrame::new(&cfg);
    let curve = uniform_swing(cfg.frame_rate(), 1.5);
    for t in [0.0, 3.0, 17.5, 40.0] {
        let split = curvature_split(&curve, &frame, t).unwrap();
        assert!(split.geodesic_norm() < 1e-14, "κ_g = {:?}", split.geodesic);
        assert!((split.nu[1] - 1.5).abs() < 1e-14);
        // the whole turning is normal: φ̇ v
        assert!((split.normal - cfg.frame_rate() * 1.5).abs() < 1e-14);
    }
}

#[test]
fn accelerating_swing_is_not_a_geodesic() {
    let cfg = fast_frame();
    let rate = cfg.frame_rate();
    // v = t: the tangential component of acceleration is 1
    let curve = AnalyticCurve::new(
        move |t| [t, 0.0, 0.0],
        move |t| [1.0, t * (rate * t).cos(), t * (rate * t).sin()],
        move |t| {
            let (s, c) = (rate * t).sin_cos();
            [0.0, c - t * rate * s, s + t * rate * c]
        },
        move |_| [0.0; 3],
        false,
    );
    let split = curvature_split(&curve, &FoucaultFrame::new(&cfg), 2.0).unwrap();
    assert!((split.geodesic[1] - 1.0).abs() < 1e-14);
    assert!(split.geodesic[0].abs() < 1e-14);
}

#[test]
fn foucault_geodesic_keeps_its_speed_and_follows_the_frame() {
    let cfg = fast_frame();
    let rate = cfg.frame_rate();
    let v0 = 0.7;
    let n = 4000;
    let ds = 0.01;
    let path = integrate_geodesic(
        &FoucaultFrame::new(&cfg),
        ChartPoint::new(0.0, 0.0, 0.0),
        [1.0, v0],
        n,
        ds,
    )
    .unwrap();
    let exact = uniform_swing(rate, v0);
    for (k, p) in path.points.iter().enumerate() {
        assert!((path.nu[k][0] - 1.0).abs() < 1e-14 && (path.nu[k][1] - v0).abs() < 1e-14);
        let q = exact.jet(path.s[k]).unwrap().position;
        for i in 0..3 {
            assert!((p[i] - q[i]).abs() < 1e-10, "step {k}");
        }
    }
    let theta = foucault_pfaffian(&cfg);
    let samples: Vec<_> = path
        .points
        .iter()
        .zip(&path.tangents)
        .map(|(p, t)| (ChartPoint(*p), *t))
        .collect();
    assert!(constraint_residual(&theta, &samples).unwrap() < 1e-14);
}

#[test]
fn sphere_geodesic_meets_its_error_budget() {
    let field = sphere();
    for ds in [0.05, 0.1] {
        let n = (2.0 * PI / ds) as usize;
        let path = integrate_geodesic(&field, ChartPoint::new(0.0, 0.6, 0.8), [0.8, -0.6], n, ds).unwrap();
        let residual = path_residuals(&field, &path).unwrap().into_iter().fold(0.0, f64::max);
        assert!(residual <= 10.0 * ds.powi(4), "residual {residual}");
        let sampled = path.as_sampled();
        for k in (3..n - 3).step_by(7) {
            let split = curvature_split(&sampled, &field, path.s[k]).unwrap();
            assert!(
                split.geodesic_norm() <= 10.0 * ds.powi(3),
                "κ_g {} at step {k}",
                split.geodesic_norm()
            );
        }
    }
}

#[test]
fn sphere_geodesic_conserves_speed() {
    // |ν| is conserved in an orthonormal frame
    let field = sphere();
    let ds = 1e-2;
    let n = 1000;
    let path = integrate_geodesic(&field, ChartPoint::new(0.0, 0.6, 0.8), [0.8, -0.6], n, ds).unwrap();
    for (s, v) in path.s.iter().zip(&path.nu) {
        let drift = (v[0].hypot(v[1]) - 1.0).abs();
        assert!(drift <= 1e-8 * s.max(ds), "drift {drift} at s = {s}");
    }
}

#[test]
fn integrable_split_is_orthogonal() {
    let field = sphere();
    for polar in [0.3, PI / 4.0, 1.2] {
        let r = f64::sin(polar);
        let c = AnalyticCurve::circle([0.0, 0.0, f64::cos(polar)], r);
        let split = curvature_split(&c, &field, 0.4).unwrap();
        let k = frenet(&c, 0.4).unwrap().kappa;
        let sum = split.geodesic_norm().powi(2) + split.normal.powi(2);
        assert!((sum - k * k).abs() < 1e-6 * k * k);
    }
}

#[test]
fn time_parameterized_circle_gives_accelerations() {
    // a circle of radius 1 traversed at speed 2 on the unit sphere: v²/r = 4
    let field = sphere();
    let w = 2.0;
    let c = AnalyticCurve::new(
        move |t| [(w * t).cos(), (w * t).sin(), 0.0],
        move |t| [-w * (w * t).sin(), w * (w * t).cos(), 0.0],
        move |t| [-w * w * (w * t).cos(), -w * w * (w * t).sin(), 0.0],
        move |t| [w * w * w * (w * t).sin(), -w * w * w * (w * t).cos(), 0.0],
        false,
    );
    let split = curvature_split(&c, &field, 0.3).unwrap();
    assert!(split.geodesic_norm() < 1e-12);
    assert!((split.normal.abs() - 4.0).abs() < 1e-12);
}
