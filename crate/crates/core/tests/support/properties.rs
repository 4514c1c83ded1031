//! Randomized property checks shared by the property and acceptance targets.

use proptest::prelude::*;
use proptest::test_runner::{Config, FileFailurePersistence, RngAlgorithm, TestRng, TestRunner};

use pseudoform_core::calculus::{exterior_derivative, Chart, ChartPoint, OneForm, ScalarField};
use pseudoform_core::curves::{frenet, AnalyticCurve};
use pseudoform_core::formlang::{parse_expression, parse_oneform, parse_scalar};
use pseudoform_core::geometry::{adapt_frame, fundamental_forms, MetricSignature, Source};
use pseudoform_core::linalg::{cross, dot, norm};
use pseudoform_core::pfaff::{classify, IntegrabilityClass::NonIntegrable, RegionSampler};

pub const CASES: u32 = 256;

fn runner(seed: u8) -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

/// Smooth expressions in `x, y, z` that are defined everywhere.
fn smooth_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        Just("z".to_string()),
        (-3.0f64..3.0).prop_map(|c| format!("({c:.3})")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(0.2*{a})")),
            inner.clone().prop_map(|a| format!("({a})^2")),
            inner.clone().prop_map(|a| format!("1/(1 + ({a})^2)")),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0]
}

fn scalar(text: &str) -> ScalarField {
    parse_scalar(text, Chart::Spatial).unwrap()
}

pub fn d_of_d_vanishes() -> Result<(), String> {
    runner(1)
        .run(&(smooth_expr(), point()), |(f, p)| {
            let field = scalar(&f);
            let p = ChartPoint(p);
            let Ok(dd) = exterior_derivative(&OneForm::exact(field.clone()), &p) else {
                return Ok(());
            };
            let h = field.jet(&p).unwrap().h;
            let scale = 1.0 + h.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
            prop_assert!(dd.norm() <= 1e-12 * scale, "{f}: |ddf| = {}", dd.norm());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn leibniz_rule_for_scaled_forms() -> Result<(), String> {
    // d(fθ) = df∧θ + f dθ
    runner(2)
        .run(
            &(smooth_expr(), [smooth_expr(), smooth_expr(), smooth_expr()], point()),
            |(f, th, p)| {
                let f = scalar(&f);
                let theta = parse_oneform(&th, Chart::Spatial).unwrap();
                let p = ChartPoint(p);
                let lhs = exterior_derivative(&OneForm::scaled(f.clone(), theta.clone()), &p).unwrap();
                let j = f.jet(&p).unwrap();
                let t = theta.at(&p).unwrap();
                let dt = exterior_derivative(&theta, &p).unwrap();
                let wedge = cross(&j.g, &t);
                for k in 0..3 {
                    let rhs = wedge[k] + j.v * dt.coeffs[k];
                    let scale = 1.0 + lhs.coeffs[k].abs() + rhs.abs();
                    prop_assert!((lhs.coeffs[k] - rhs).abs() <= 1e-12 * scale);
                }
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

pub fn d_of_exact_two_form_vanishes() -> Result<(), String> {
    // d(dθ) for a 1-form θ: the divergence of the cyclic coefficients is zero
    runner(3)
        .run(&([smooth_expr(), smooth_expr(), smooth_expr()], point()), |(th, p)| {
            let theta = parse_oneform(&th, Chart::Spatial).unwrap();
            let comps = th.map(|s| scalar(&s));
            let p = ChartPoint(p);
            let h: Vec<[[f64; 3]; 3]> = comps.iter().map(|c| c.jet(&p).unwrap().h).collect();
            // coefficient k of dθ is ∂_i θ_j - ∂_j θ_i with (i, j, k) cyclic
            let mut div = 0.0;
            let mut scale: f64 = 1.0;
            for k in 0..3 {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                let term = h[j][k][i] - h[i][k][j];
                div += term;
                scale = scale.max(h[j][k][i].abs()).max(h[i][k][j].abs());
            }
            prop_assert!(div.abs() <= 1e-12 * scale);
            prop_assert!(exterior_derivative(&theta, &p).is_ok());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn nonvanishing_pfaffian() -> impl Strategy<Value = [String; 3]> {
    // a constant offset keeps the form away from zero on the unit box
    ([smooth_expr(), smooth_expr(), smooth_expr()], 0usize..3).prop_map(|(mut c, k)| {
        c[k] = format!("5 + 0.1*sin({})", c[k]);
        c
    })
}

pub fn adapted_frames_are_dual_orthonormal_and_antisymmetric() -> Result<(), String> {
    runner(4)
        .run(&(nonvanishing_pfaffian(), point()), |(th, p)| {
            let theta = parse_oneform(&th, Chart::Spatial).unwrap();
            let f = adapt_frame(theta.clone(), MetricSignature::Euclidean)
                .at(&ChartPoint(p))
                .unwrap();
            prop_assert!(f.duality_error() < 1e-12);
            prop_assert!(f.is_orthonormal());
            let t = theta.at(&ChartPoint(p)).unwrap();
            for a in 0..2 {
                prop_assert!(dot(&t, &f.e(a)).abs() < 1e-12 * norm(&t));
            }
            let w = f.connection();
            let scale = 1.0 + w.w.iter().flatten().flatten().map(|v| v.abs()).fold(0.0, f64::max);
            prop_assert!(w.antisymmetry_error() < 1e-10 * scale);
            // [e_a, e_b] = (ω^k_{ba} - ω^k_{ab}) e_k
            let c = f.structure_functions().c;
            for k in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        let via = w.w[k][b][a] - w.w[k][a][b];
                        prop_assert!((c[k][a][b] - via).abs() < 1e-10 * scale);
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn second_fundamental_form_routes_agree() -> Result<(), String> {
    let quadric = (proptest::array::uniform10(-2.0f64..2.0), point());
    runner(5)
        .run(&quadric, |(c, p)| {
            let text = format!(
                "({})*x^2 + ({})*y^2 + ({})*z^2 + ({})*x*y + ({})*y*z + ({})*x*z + ({})*x + ({})*y + ({})*z + ({})*x^2*y",
                c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8], c[9]
            );
            let f = scalar(&text);
            let p = ChartPoint(p);
            let g = f.jet(&p).unwrap().g;
            prop_assume!(norm(&g) > 0.1);
            let frame = adapt_frame(OneForm::exact(f.clone()), MetricSignature::Euclidean).at(&p).unwrap();
            let ff = fundamental_forms(&Source::LevelSet(f), &frame, MetricSignature::Euclidean).unwrap();
            let scale = 1.0 + ff.h.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
            prop_assert!(ff.routes.max_discrepancy() < 1e-8 * scale, "{text} at {p}");
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn printed_expressions_parse_back_identically() -> Result<(), String> {
    runner(6)
        .run(&smooth_expr(), |text| {
            let e = parse_expression(&text, Chart::Spatial).unwrap();
            let again = parse_expression(&e.to_string(), Chart::Spatial).unwrap();
            prop_assert_eq!(&again, &e);
            prop_assert_eq!(again.to_string(), e.to_string());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn parser_is_total_on_arbitrary_input() -> Result<(), String> {
    let alphabet = "[xyztpie0-9.+*/^() sincoxplqrtab,-]{0,40}";
    runner(7)
        .run(&(alphabet, any::<String>()), |(a, b)| {
            for text in [&a, &b] {
                for chart in [Chart::Spatial, Chart::Spacetime] {
                    match parse_expression(text, chart) {
                        Ok(e) => {
                            let _ = e.eval(&[0.3, -0.2, 0.7]);
                        }
                        Err(err) => prop_assert!(err.column >= 1),
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn jet_derivatives_match_finite_differences() -> Result<(), String> {
    runner(8)
        .run(&(smooth_expr(), point()), |(text, p)| {
            let f = scalar(&text);
            let j = f.jet(&ChartPoint(p)).unwrap();
            let h = 1e-5;
            for k in 0..3 {
                let mut a = p;
                let mut b = p;
                a[k] += h;
                b[k] -= h;
                let fd = (f.value(&ChartPoint(a)).unwrap() - f.value(&ChartPoint(b)).unwrap()) / (2.0 * h);
                let ga = f.jet(&ChartPoint(a)).unwrap().g;
                let gb = f.jet(&ChartPoint(b)).unwrap().g;
                let scale = 1.0 + j.g[k].abs() + j.h[k].iter().map(|v| v.abs()).sum::<f64>();
                prop_assert!((fd - j.g[k]).abs() < 1e-5 * scale, "{text}: d/dx{k}");
                for i in 0..3 {
                    let fdh = (ga[i] - gb[i]) / (2.0 * h);
                    prop_assert!((fdh - j.h[k][i]).abs() < 1e-4 * scale, "{text}: d2/dx{k}dx{i}");
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn class_is_invariant_under_positive_rescaling() -> Result<(), String> {
    let forms = prop_oneof![
        Just(["0", "0", "1"]),
        Just(["y", "0", "0"]),
        Just(["0", "x", "1"]),
        Just(["2*x", "2*y", "2*z"]),
        Just(["y*z", "x*z", "x*y"]),
        Just(["-y", "x", "1"]),
    ];
    runner(9)
        .run(&(forms, smooth_expr(), any::<u64>()), |(th, lam, seed)| {
            let theta = parse_oneform(&th, Chart::Spatial).unwrap();
            let scaled = OneForm::scaled(scalar(&format!("exp(0.3*({lam}))")), theta.clone());
            let region = RegionSampler::new([0.5; 3], [1.5; 3], 20, seed).unwrap();
            let a = classify(&theta, &region, 1e-8).unwrap();
            let b = classify(&scaled, &region, 1e-8).unwrap();
            // rescaling may create or remove dθ, but never θ∧dθ
            prop_assert_eq!(a.class == NonIntegrable, b.class == NonIntegrable);
            prop_assert!((a.max_frobenius_normalized - b.max_frobenius_normalized).abs() < 1e-9);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn frenet_frames_are_orthonormal() -> Result<(), String> {
    runner(10)
        .run(&(0.1f64..3.0, -3.0f64..3.0, -10.0f64..10.0), |(a, b, s)| {
            let f = frenet(&AnalyticCurve::helix(a, b), s).unwrap();
            for (u, v) in [(f.t, f.n), (f.n, f.b), (f.t, f.b)] {
                prop_assert!(dot(&u, &v).abs() < 1e-8);
            }
            for u in [f.t, f.n, f.b] {
                prop_assert!((norm(&u) - 1.0).abs() < 1e-8);
            }
            let tn = cross(&f.t, &f.n);
            prop_assert!((0..3).all(|k| (tn[k] - f.b[k]).abs() < 1e-8));
            prop_assert!(f.kappa >= 0.0);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: &[Suite] = &[
    ("d_of_d_vanishes", d_of_d_vanishes),
    ("leibniz_rule_for_scaled_forms", leibniz_rule_for_scaled_forms),
    ("d_of_exact_two_form_vanishes", d_of_exact_two_form_vanishes),
    (
        "adapted_frames_are_dual_orthonormal_and_antisymmetric",
        adapted_frames_are_dual_orthonormal_and_antisymmetric,
    ),
    (
        "second_fundamental_form_routes_agree",
        second_fundamental_form_routes_agree,
    ),
    (
        "printed_expressions_parse_back_identically",
        printed_expressions_parse_back_identically,
    ),
    ("parser_is_total_on_arbitrary_input", parser_is_total_on_arbitrary_input),
    (
        "jet_derivatives_match_finite_differences",
        jet_derivatives_match_finite_differences,
    ),
    (
        "class_is_invariant_under_positive_rescaling",
        class_is_invariant_under_positive_rescaling,
    ),
    ("frenet_frames_are_orthonormal", frenet_frames_are_orthonormal),
];
