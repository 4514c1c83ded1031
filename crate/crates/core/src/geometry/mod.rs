//! Adapted frames, connection forms, fundamental forms and curvatures.
//!
//! Array indices are 0-based throughout: the adapted frame is
//! `(e[0], e[1], e[2])` with `e[2]` dual to the unit Pfaffian, and its
//! coframe rows are `θ[0], θ[1], θ[2] = N`. On the space-time chart this
//! coincides with the `(e₀, e₁, e₂)` numbering used for the Foucault frame.

mod frame;
mod fundamental;

use thiserror::Error;

use crate::calculus::{CalcError, ChartPoint, Scalar};

pub use frame::{
    adapt_frame, connection_form, structure_functions, AdaptedFrame, Completion, Connection, FrameAt, FrameField,
    StructureFunctions,
};
pub use fundamental::{
    fundamental_forms, shape_and_curvatures, CurvatureReport, EigenKind, FundamentalForms, HRoutes, Source,
    ROUTE_TOLERANCE,
};

/// Speed of light in m/s, the default for [`MetricSignature::Minkowski`].
pub const LIGHT_SPEED: f64 = 299_792_458.0;

/// Ambient metric on the chart. The first chart axis plays the role of time
/// for the Galilean and Minkowski signatures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricSignature {
    /// `diag(1, 1, 1)`.
    Euclidean,
    /// `diag(0, 1, 1)`: spatial lengths only.
    Galilean,
    /// `diag(c², -1, -1)` on `(t, x, y)`, that is `diag(1, -1, -1)` in `x⁰ = ct`.
    Minkowski { c: f64 },
}

impl MetricSignature {
    pub fn minkowski() -> Self {
        Self::Minkowski { c: LIGHT_SPEED }
    }

    /// Minkowski with the time leg measured in units of `ct`.
    pub fn minkowski_unit() -> Self {
        Self::Minkowski { c: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Galilean => "galilean",
            Self::Minkowski { .. } => "minkowski",
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Self::Galilean)
    }

    pub fn is_indefinite(&self) -> bool {
        matches!(self, Self::Minkowski { .. })
    }

    /// Diagonal of the metric on vectors.
    pub fn diagonal(&self) -> [f64; 3] {
        match *self {
            Self::Euclidean => [1.0, 1.0, 1.0],
            Self::Galilean => [0.0, 1.0, 1.0],
            Self::Minkowski { c } => [c * c, -1.0, -1.0],
        }
    }

    pub fn inner(&self, v: &[f64; 3], w: &[f64; 3]) -> f64 {
        let d = self.diagonal();
        d[0] * v[0] * w[0] + d[1] * v[1] * w[1] + d[2] * v[2] * w[2]
    }

    /// Scales a covector to unit length and returns the dual vector `e` with
    /// `N(e) = 1`, as `(N, e)`.
    pub(crate) fn normalize<S: Scalar>(&self, n: [S; 3], p: &ChartPoint) -> Result<([S; 3], [S; 3]), GeometryError> {
        let euclid = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).value().sqrt();
        if !(euclid > ZERO_NORM) {
            return Err(GeometryError::ZeroPfaffian {
                point: *p,
                norm: euclid,
            });
        }
        match *self {
            Self::Euclidean => {
                let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                let u = n.map(|c| c / len);
                Ok((u, u))
            }
            Self::Galilean => {
                if n[0].value().abs() > ZERO_NORM * euclid {
                    return Err(GeometryError::DegenerateNormalization {
                        point: *p,
                        reason: format!(
                            "the Galilean metric has no norm for a Pfaffian with time component {:e}",
                            n[0].value()
                        ),
                    });
                }
                let len = (n[1] * n[1] + n[2] * n[2]).sqrt();
                let u = [S::cst(0.0), n[1] / len, n[2] / len];
                Ok((u, u))
            }
            Self::Minkowski { c } => {
                let c2 = S::cst(c * c);
                let q = n[0] * n[0] / c2 - n[1] * n[1] - n[2] * n[2];
                if !(q.value().abs() > ZERO_NORM * euclid * euclid) {
                    return Err(GeometryError::DegenerateNormalization {
                        point: *p,
                        reason: "the Pfaffian is null under the Minkowski metric".into(),
                    });
                }
                let len = q.abs().sqrt();
                let u = n.map(|x| x / len);
                // raise with diag(1/c², -1, -1), then scale so that N(e) = 1
                let raised = [u[0] / c2, -u[1], -u[2]];
                let s = u[0] * raised[0] + u[1] * raised[1] + u[2] * raised[2];
                Ok((u, raised.map(|x| x / s)))
            }
        }
    }
}

pub(crate) const ZERO_NORM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("Pfaffian vanishes at {point} (|N| = {norm:e})")]
    ZeroPfaffian { point: ChartPoint, norm: f64 },
    #[error("cannot normalize the Pfaffian at {point}: {reason}")]
    DegenerateNormalization { point: ChartPoint, reason: String },
    #[error("frame is singular at {point} (det = {det:e})")]
    SingularFrame { point: ChartPoint, det: f64 },
    #[error("frame is not adapted to the Pfaffian at {point}: |θ[2] - N| = {discrepancy:e}")]
    FrameMismatch { point: ChartPoint, discrepancy: f64 },
    #[error(
        "degenerate first fundamental form (det g = {det:e}): the inverse g^ab does not exist, so H cannot be raised"
    )]
    DegenerateMetric { det: f64 },
    #[error(transparent)]
    Calc(#[from] CalcError),
}
