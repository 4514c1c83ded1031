use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::{ChartPoint, Jet1, OneForm, ScalarField};

use super::{FrameAt, GeometryError, MetricSignature};

/// Largest disagreement allowed between θ[2] and the unit Pfaffian.
const MISMATCH_TOLERANCE: f64 = 1e-9;

/// Agreement expected between the independent routes to `H`.
pub const ROUTE_TOLERANCE: f64 = 1e-8;

const DEGENERATE_DET: f64 = 1e-12;

/// What the normal comes from.
#[derive(Clone, Debug)]
pub enum Source {
    /// Any non-vanishing Pfaffian, normalized by the metric.
    Pfaffian(OneForm),
    /// `N = df / |df|` for a level-set function `f`.
    LevelSet(ScalarField),
}

impl Source {
    fn unit_normal(&self, metric: &MetricSignature, p: &ChartPoint) -> Result<[Jet1; 3], GeometryError> {
        let raw = match self {
            Source::Pfaffian(n) => n.jets(p)?,
            Source::LevelSet(f) => {
                let j = f.jet(p)?;
                [0, 1, 2].map(|i| Jet1 { v: j.g[i], g: j.h[i] })
            }
        };
        Ok(metric.normalize(raw, p)?.0)
    }
}

/// `H` computed along each available route.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HRoutes {
    /// `-½(∂_i N_j + ∂_j N_i) x[i][a] x[j][b]`.
    pub symmetric_part: [[f64; 2]; 2],
    /// `N_i e_(a x[i][b])`, symmetrized.
    pub frame_derivative: [[f64; 2]; 2],
    /// `ω^2_(ab)`.
    pub connection: [[f64; 2]; 2],
    /// `-(1/|df|) x[i][a] x[j][b] ∂_i ∂_j f`, level-set sources only.
    pub level_set: Option<[[f64; 2]; 2]>,
}

impl HRoutes {
    /// Largest entry-wise spread between any two routes.
    pub fn max_discrepancy(&self) -> f64 {
        let mut all = vec![self.symmetric_part, self.frame_derivative, self.connection];
        all.extend(self.level_set);
        let mut worst: f64 = 0.0;
        for a in &all {
            for b in &all {
                for i in 0..2 {
                    for j in 0..2 {
                        worst = worst.max((a[i][j] - b[i][j]).abs());
                    }
                }
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalForms {
    pub point: ChartPoint,
    pub metric: MetricSignature,
    /// `g_ab = metric(e[a], e[b])`.
    pub g: [[f64; 2]; 2],
    /// `H_ab`, from the symmetric-part route.
    pub h: [[f64; 2]; 2],
    pub routes: HRoutes,
}

impl FundamentalForms {
    /// `H(v, v)` for tangential frame components `v`.
    pub fn h_quadratic(&self, v: &[f64; 2]) -> f64 {
        let h = &self.h;
        h[0][0] * v[0] * v[0] + 2.0 * h[0][1] * v[0] * v[1] + h[1][1] * v[1] * v[1]
    }
}

fn symmetrize(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let off = 0.5 * (m[0][1] + m[1][0]);
    [[m[0][0], off], [off, m[1][1]]]
}

pub fn fundamental_forms(
    source: &Source,
    frame: &FrameAt,
    metric: MetricSignature,
) -> Result<FundamentalForms, GeometryError> {
    let p = &frame.point;
    let n = source.unit_normal(&metric, p)?;
    let nv = n.map(|c| c.v);
    let theta = frame.normal();
    let discrepancy = (0..3).map(|k| (theta[k] - nv[k]).abs()).fold(0.0, f64::max);
    if !(discrepancy <= MISMATCH_TOLERANCE) {
        return Err(GeometryError::FrameMismatch { point: *p, discrepancy });
    }

    let e = [frame.e(0), frame.e(1)];
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            g[a][b] = metric.inner(&e[a], &e[b]);
        }
    }
    g[1][0] = g[0][1];

    // jac[i][j] = ∂_i N_j
    let jac: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| n[j].g[i]));
    let mut sym = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += 0.5 * (jac[i][j] + jac[j][i]) * e[a][i] * e[b][j];
                }
            }
            sym[a][b] = -s;
        }
    }

    let mut fd = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            // e[a](x[i][b])
            let d: f64 = (0..3)
                .map(|i| nv[i] * (0..3).map(|l| e[a][l] * frame.dx[l][i][b]).sum::<f64>())
                .sum();
            fd[a][b] = d;
        }
    }

    let level_set = match source {
        Source::LevelSet(f) => {
            let j = f.jet(p)?;
            let norm = (j.g[0] * j.g[0] + j.g[1] * j.g[1] + j.g[2] * j.g[2]).sqrt();
            let mut h = [[0.0; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    let mut s = 0.0;
                    for i in 0..3 {
                        for k in 0..3 {
                            s += e[a][i] * e[b][k] * j.h[i][k];
                        }
                    }
                    h[a][b] = -s / norm;
                }
            }
            Some(symmetrize(h))
        }
        Source::Pfaffian(_) => None,
    };

    let routes = HRoutes {
        symmetric_part: symmetrize(sym),
        frame_derivative: symmetrize(fd),
        connection: frame.connection().normal_symmetric(),
        level_set,
    };
    Ok(FundamentalForms {
        point: *p,
        metric,
        g,
        h: routes.symmetric_part,
        routes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenKind {
    Real,
    ComplexPair,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureReport {
    /// `H^a_b = g^{ac} H_cb`.
    pub shape: [[f64; 2]; 2],
    pub principal: [Complex64; 2],
    pub kind: EigenKind,
    /// `det H^a_b`.
    pub gaussian: f64,
    /// `½ tr H^a_b`.
    pub mean: f64,
}

pub fn shape_and_curvatures(ff: &FundamentalForms) -> Result<CurvatureReport, GeometryError> {
    let g = &ff.g;
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(det.abs() >= DEGENERATE_DET) {
        return Err(GeometryError::DegenerateMetric { det });
    }
    let gi = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let h = &ff.h;
    let shape: [[f64; 2]; 2] =
        std::array::from_fn(|a| std::array::from_fn(|b| gi[a][0] * h[0][b] + gi[a][1] * h[1][b]));
    let tr = shape[0][0] + shape[1][1];
    let dt = shape[0][0] * shape[1][1] - shape[0][1] * shape[1][0];
    let half = 0.5 * tr;
    let disc = half * half - dt;
    let (principal, kind) = if disc >= 0.0 {
        let r = disc.sqrt();
        (
            [Complex64::new(half + r, 0.0), Complex64::new(half - r, 0.0)],
            EigenKind::Real,
        )
    } else {
        let r = (-disc).sqrt();
        (
            [Complex64::new(half, r), Complex64::new(half, -r)],
            EigenKind::ComplexPair,
        )
    };
    Ok(CurvatureReport {
        shape,
        principal,
        kind,
        gaussian: dt,
        mean: half,
    })
}
