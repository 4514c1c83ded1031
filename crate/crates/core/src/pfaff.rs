//! Integrability class of a Pfaff equation `θ = 0`, decided by sampling.
//!
//! In three dimensions a 1-form is locally `dμ` (closed), `λ dμ`
//! (`θ∧dθ = 0` but `dθ ≠ 0`) or `dϕ + λ dμ` (`θ∧dθ ≠ 0`). Only in the last
//! case does the plane field fail to have integral surfaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::calculus::{exterior_derivative, CalcError, ChartPoint, OneForm};
use crate::linalg::norm;

/// Below this Euclidean norm a Pfaffian is treated as vanishing.
pub const DEGENERATE_NORM: f64 = 1e-12;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PfaffError {
    #[error("Pfaffian vanishes at {point} (|θ| = {norm:e})")]
    Degenerate { point: ChartPoint, norm: f64 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntegrabilityClass {
    /// `dθ = 0`; normal form `dμ`.
    Closed,
    /// `θ∧dθ = 0`, `dθ ≠ 0`; normal form `λ dμ`.
    IntegratingFactor,
    /// `θ∧dθ ≠ 0`; normal form `dϕ + λ dμ`.
    NonIntegrable,
}

impl IntegrabilityClass {
    fn decide(closed_measure: f64, frobenius_measure: f64, tol: f64) -> Self {
        if closed_measure <= tol {
            Self::Closed
        } else if frobenius_measure <= tol {
            Self::IntegratingFactor
        } else {
            Self::NonIntegrable
        }
    }
}

/// Axis-aligned box with a deterministic low-discrepancy sample set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionSampler {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub count: usize,
    pub seed: u64,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

impl RegionSampler {
    pub fn new(lo: [f64; 3], hi: [f64; 3], count: usize, seed: u64) -> Result<Self, PfaffError> {
        if count == 0 {
            return Err(PfaffError::InvalidRegion("sample count must be at least 1".into()));
        }
        for k in 0..3 {
            if !(lo[k].is_finite() && hi[k].is_finite()) {
                return Err(PfaffError::InvalidRegion(format!(
                    "bounds of axis {} are not finite",
                    k + 1
                )));
            }
            if hi[k] <= lo[k] {
                return Err(PfaffError::InvalidRegion(format!(
                    "axis {} is empty: [{}, {}]",
                    k + 1,
                    lo[k],
                    hi[k]
                )));
            }
        }
        Ok(Self { lo, hi, count, seed })
    }

    /// Halton points in bases 2, 3, 5 with a Cranley–Patterson shift drawn
    /// from the seed.
    pub fn points(&self) -> Vec<ChartPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shift: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        (1..=self.count as u64)
            .map(|i| {
                let u = [2u64, 3, 5].map(|b| radical_inverse(i, b));
                ChartPoint(std::array::from_fn(|k| {
                    let s = (u[k] + shift[k]).fract();
                    self.lo[k] + s * (self.hi[k] - self.lo[k])
                }))
            })
            .collect()
    }
}

/// Coefficient of `dx¹∧dx²∧dx³` in `θ∧dθ` at `p`.
pub fn frobenius_coefficient(theta: &OneForm, p: &ChartPoint) -> Result<f64, PfaffError> {
    let t = theta.at(p)?;
    let n = norm(&t);
    if !(n > DEGENERATE_NORM) {
        return Err(PfaffError::Degenerate { point: *p, norm: n });
    }
    Ok(exterior_derivative(theta, p)?.wedge_one(&t))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub point: ChartPoint,
    pub theta_norm: f64,
    /// Euclidean norm of the coefficients of `dθ`.
    pub d_theta: f64,
    /// Signed coefficient of `θ∧dθ`.
    pub frobenius: f64,
    /// `|dθ| / |θ|`.
    pub d_theta_normalized: f64,
    /// `|θ∧dθ| / |θ|²`, which is the Frobenius coefficient of `θ/|θ|`.
    pub frobenius_normalized: f64,
    pub class: IntegrabilityClass,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub class: IntegrabilityClass,
    pub tolerance: f64,
    pub max_d_theta: f64,
    pub max_frobenius: f64,
    pub max_d_theta_normalized: f64,
    pub max_frobenius_normalized: f64,
    pub samples: Vec<SampleReport>,
}

fn sample(theta: &OneForm, p: ChartPoint, tol: f64) -> Result<SampleReport, PfaffError> {
    let t = theta.at(&p)?;
    let n = norm(&t);
    if !(n > DEGENERATE_NORM) {
        return Err(PfaffError::Degenerate { point: p, norm: n });
    }
    let d = exterior_derivative(theta, &p)?;
    let frob = d.wedge_one(&t);
    let dn = d.norm() / n;
    let fnorm = frob.abs() / (n * n);
    Ok(SampleReport {
        point: p,
        theta_norm: n,
        d_theta: d.norm(),
        frobenius: frob,
        d_theta_normalized: dn,
        frobenius_normalized: fnorm,
        class: IntegrabilityClass::decide(dn, fnorm, tol),
    })
}

/// Samples the region and reports the class. The verdict is taken on the
/// normalized measures, so it does not change when `θ` is scaled.
pub fn classify(theta: &OneForm, region: &RegionSampler, tol: f64) -> Result<IntegrabilityReport, PfaffError> {
    let results: Vec<Result<SampleReport, PfaffError>> =
        region.points().into_par_iter().map(|p| sample(theta, p, tol)).collect();
    let samples = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let max = |f: fn(&SampleReport) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let max_d_theta_normalized = max(|s| s.d_theta_normalized);
    let max_frobenius_normalized = max(|s| s.frobenius_normalized);
    Ok(IntegrabilityReport {
        class: IntegrabilityClass::decide(max_d_theta_normalized, max_frobenius_normalized, tol),
        tolerance: tol,
        max_d_theta: max(|s| s.d_theta),
        max_frobenius: max(|s| s.frobenius.abs()),
        max_d_theta_normalized,
        max_frobenius_normalized,
        samples,
    })
}

const RESIDUAL_EPS: f64 = 1e-30;

/// `max |θ(ẋ)| / (|θ| |ẋ| + ε)` over the samples of a curve.
pub fn constraint_residual(theta: &OneForm, samples: &[(ChartPoint, [f64; 3])]) -> Result<f64, PfaffError> {
    let mut worst: f64 = 0.0;
    for (p, v) in samples {
        let t = theta.at(p)?;
        let r = (t[0] * v[0] + t[1] * v[1] + t[2] * v[2]).abs() / (norm(&t) * norm(v) + RESIDUAL_EPS);
        worst = worst.max(r);
    }
    Ok(worst)
}
