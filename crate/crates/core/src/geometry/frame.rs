use crate::calculus::{ChartPoint, Jet1, OneForm, Scalar};
use crate::linalg::{cross, dot, inverse3, matmul, max_abs_diff, transpose, Mat3, IDENTITY};

use super::{GeometryError, MetricSignature, ZERO_NORM};

/// How the tangential legs `e[0], e[1]` are completed around the normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Completion {
    /// Gram–Schmidt the coordinate axis on which the normal has the smallest
    /// absolute component (lowest index on ties).
    #[default]
    SmallestComponent,
    /// Gram–Schmidt a fixed coordinate axis. `Axis(0)` on the space-time
    /// chart seeds with `∂_t`.
    Axis(usize),
}

impl Completion {
    pub(crate) fn axis(&self, m: &[f64; 3]) -> usize {
        match *self {
            Completion::Axis(k) => k,
            Completion::SmallestComponent => {
                let mut best = 0;
                for k in 1..3 {
                    if m[k].abs() < m[best].abs() {
                        best = k;
                    }
                }
                best
            }
        }
    }
}

/// A frame field adapted to a Pfaffian: `θ[2]` is the unit Pfaffian and
/// `e[0], e[1]` span its annihilator.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub pfaffian: OneForm,
    pub metric: MetricSignature,
    pub completion: Completion,
}

pub fn adapt_frame(n: OneForm, metric: MetricSignature) -> AdaptedFrame {
    AdaptedFrame {
        pfaffian: n,
        metric,
        completion: Completion::default(),
    }
}

/// Frame matrix (columns `e[j]`) built from the raw Pfaffian components.
pub(crate) fn frame_matrix<S: Scalar>(
    n: [S; 3],
    metric: &MetricSignature,
    seed_axis: usize,
    p: &ChartPoint,
) -> Result<Mat3<S>, GeometryError> {
    let (_, e3) = metric.normalize(n, p)?;
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let m = n.map(|c| c / len);
    let mut a = [S::cst(0.0); 3];
    a[seed_axis] = S::cst(1.0);
    let along = m[seed_axis];
    let r = [a[0] - along * m[0], a[1] - along * m[1], a[2] - along * m[2]];
    let rl = dot(&r, &r).sqrt();
    if !(rl.value() > 1e-8) {
        return Err(GeometryError::DegenerateNormalization {
            point: *p,
            reason: format!("seed axis {} is parallel to the normal", seed_axis + 1),
        });
    }
    let e1 = r.map(|c| c / rl);
    let e2 = cross(&m, &e1);
    Ok([[e1[0], e2[0], e3[0]], [e1[1], e2[1], e3[1]], [e1[2], e2[2], e3[2]]])
}

/// Anything that yields an adapted frame at each chart point.
pub trait FrameField: Clone {
    fn frame_at(&self, p: &ChartPoint) -> Result<FrameAt, GeometryError>;

    /// The same field with every discrete completion choice fixed to the one
    /// made at `p`, so that it is smooth on a neighbourhood of `p`.
    fn pinned_at(&self, _p: &ChartPoint) -> Result<Self, GeometryError> {
        Ok(self.clone())
    }
}

impl FrameField for AdaptedFrame {
    fn frame_at(&self, p: &ChartPoint) -> Result<FrameAt, GeometryError> {
        self.at(p)
    }

    fn pinned_at(&self, p: &ChartPoint) -> Result<Self, GeometryError> {
        let values = self.pfaffian.at(p)?;
        let len = crate::linalg::norm(&values);
        if !(len > ZERO_NORM) {
            return Err(GeometryError::ZeroPfaffian { point: *p, norm: len });
        }
        let axis = self.completion.axis(&values.map(|c| c / len));
        Ok(self.clone().with_completion(Completion::Axis(axis)))
    }
}

impl AdaptedFrame {
    pub fn with_completion(mut self, completion: Completion) -> Self {
        self.completion = completion;
        self
    }

    pub fn at(&self, p: &ChartPoint) -> Result<FrameAt, GeometryError> {
        let n = self.pfaffian.jets(p)?;
        let values = n.map(|j| j.v);
        let len = crate::linalg::norm(&values);
        if !(len > ZERO_NORM) {
            return Err(GeometryError::ZeroPfaffian { point: *p, norm: len });
        }
        let axis = self.completion.axis(&values.map(|c| c / len));
        let x = frame_matrix(n, &self.metric, axis, p)?;
        FrameAt::from_jets(*p, &x, self.metric)
    }
}

/// A frame and its first derivatives at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameAt {
    pub point: ChartPoint,
    pub metric: MetricSignature,
    /// `x[i][j]`: component `i` of `e[j]`.
    pub x: Mat3<f64>,
    /// Inverse; row `i` is the coframe `θ[i]`.
    pub x_inv: Mat3<f64>,
    /// `dx[k][i][j] = ∂_k x[i][j]`.
    pub dx: [Mat3<f64>; 3],
    pub dx_inv: [Mat3<f64>; 3],
}

const SINGULAR_DET: f64 = 1e-12;

impl FrameAt {
    /// Frame from a matrix of first-order jets in the chart coordinates.
    pub fn from_jets(point: ChartPoint, x: &Mat3<Jet1>, metric: MetricSignature) -> Result<Self, GeometryError> {
        let inv = inverse3(x, SINGULAR_DET).ok_or_else(|| GeometryError::SingularFrame {
            point,
            det: crate::linalg::det3(&x.map(|r| r.map(|c| c.v))),
        })?;
        let vals = |m: &Mat3<Jet1>| m.map(|r| r.map(|c| c.v));
        let derivs = |m: &Mat3<Jet1>| -> [Mat3<f64>; 3] { std::array::from_fn(|k| m.map(|r| r.map(|c| c.g[k]))) };
        Ok(Self {
            point,
            metric,
            x: vals(x),
            x_inv: vals(&inv),
            dx: derivs(x),
            dx_inv: derivs(&inv),
        })
    }

    /// The frame vector `e[j]` in chart components.
    pub fn e(&self, j: usize) -> [f64; 3] {
        [self.x[0][j], self.x[1][j], self.x[2][j]]
    }

    /// The coframe covector `θ[i]`.
    pub fn theta(&self, i: usize) -> [f64; 3] {
        self.x_inv[i]
    }

    /// `θ[2]`, the unit Pfaffian the frame is adapted to.
    pub fn normal(&self) -> [f64; 3] {
        self.x_inv[2]
    }

    /// `max |x x̃ - I|`.
    pub fn duality_error(&self) -> f64 {
        max_abs_diff(&matmul(&self.x, &self.x_inv), &IDENTITY)
    }

    /// True when the columns are orthonormal in the Euclidean inner product.
    pub fn is_orthonormal(&self) -> bool {
        max_abs_diff(&matmul(&transpose(&self.x), &self.x), &IDENTITY) < 1e-12
    }

    /// `e[a](x[m][b]) = x[l][a] ∂_l x[m][b]`.
    fn derivative_of_leg(&self, a: usize, b: usize) -> [f64; 3] {
        std::array::from_fn(|m| (0..3).map(|l| self.x[l][a] * self.dx[l][m][b]).sum())
    }

    pub fn connection(&self) -> Connection {
        let mut w = [[[0.0; 3]; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                let d = self.derivative_of_leg(k, j);
                for (i, wi) in w.iter_mut().enumerate() {
                    wi[j][k] = dot(&d, &self.x_inv[i]);
                }
            }
        }
        Connection { w }
    }

    /// Commutators computed directly from `e[a](e[b]) - e[b](e[a])`.
    pub fn structure_functions(&self) -> StructureFunctions {
        let mut c = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let ab = self.derivative_of_leg(a, b);
                let ba = self.derivative_of_leg(b, a);
                let bracket = [ab[0] - ba[0], ab[1] - ba[1], ab[2] - ba[2]];
                for (k, ck) in c.iter_mut().enumerate() {
                    ck[a][b] = dot(&bracket, &self.x_inv[k]);
                }
            }
        }
        StructureFunctions { c }
    }
}

/// `w[i][j][k] = ω^i_{jk}`, defined by `e[k](e[j]) = ω^i_{jk} e[i]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Connection {
    pub w: [[[f64; 3]; 3]; 3],
}

impl Connection {
    /// The matrix `ω^i_j(v)` for frame components `v^k`.
    pub fn along(&self, v: &[f64; 3]) -> Mat3<f64> {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| self.w[i][j][k] * v[k]).sum()))
    }

    /// `max |ω^i_{jk} + ω^j_{ik}|`.
    pub fn antisymmetry_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    e = e.max((self.w[i][j][k] + self.w[j][i][k]).abs());
                }
            }
        }
        e
    }

    /// `ω^2_{(ab)}` for `a, b` in the tangential legs.
    pub fn normal_symmetric(&self) -> [[f64; 2]; 2] {
        let w = &self.w[2];
        let off = 0.5 * (w[0][1] + w[1][0]);
        [[w[0][0], off], [off, w[1][1]]]
    }
}

/// `c[k][a][b]`: component `k` of `[e[a], e[b]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureFunctions {
    pub c: [[[f64; 3]; 3]; 3],
}

impl StructureFunctions {
    /// The normal components `c[2][a][b]` for tangential `a, b`; all zero
    /// exactly when the plane field is involutive at the point.
    pub fn normal(&self) -> [[f64; 2]; 2] {
        let c = &self.c[2];
        [[c[0][0], c[0][1]], [c[1][0], c[1][1]]]
    }
}

pub fn connection_form(frame: &AdaptedFrame, p: &ChartPoint) -> Result<Connection, GeometryError> {
    Ok(frame.at(p)?.connection())
}

pub fn structure_functions(frame: &AdaptedFrame, p: &ChartPoint) -> Result<StructureFunctions, GeometryError> {
    Ok(frame.at(p)?.structure_functions())
}
