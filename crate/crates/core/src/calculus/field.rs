use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::jet::{Jet1, Jet2};
use super::CalcError;

/// Which coordinate system a point or expression lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// `(x, y, z)` in meters.
    Spatial,
    /// `(t, x, y)`: seconds, then meters.
    Spacetime,
}

impl Chart {
    pub fn variable_names(self) -> [&'static str; 3] {
        match self {
            Chart::Spatial => ["x", "y", "z"],
            Chart::Spacetime => ["t", "x", "y"],
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::Spatial => f.write_str("spatial"),
            Chart::Spacetime => f.write_str("spacetime"),
        }
    }
}

/// Three coordinates in chart order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint(pub [f64; 3]);

impl ChartPoint {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self([a, b, c])
    }

    pub fn coords(&self) -> &[f64; 3] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    fn ensure_finite(&self) -> Result<(), CalcError> {
        match self.0.iter().position(|c| !c.is_finite()) {
            None => Ok(()),
            Some(i) => Err(CalcError::NonFinitePoint {
                axis: i + 1,
                point: *self,
            }),
        }
    }
}

impl From<[f64; 3]> for ChartPoint {
    fn from(c: [f64; 3]) -> Self {
        Self(c)
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// `f(p)`, `∂_i f(p)` and `∂_i ∂_j f(p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub gradient: [f64; 3],
    pub hessian: [[f64; 3]; 3],
}

impl From<Jet2> for Derivatives {
    fn from(j: Jet2) -> Self {
        Self {
            value: j.v,
            gradient: j.g,
            hessian: j.h,
        }
    }
}

fn check_jet2(j: Jet2, p: &ChartPoint) -> Result<Jet2, CalcError> {
    if !j.v.is_finite() {
        return Err(CalcError::NonFinite {
            quantity: "value".into(),
            point: *p,
        });
    }
    for i in 0..3 {
        if !j.g[i].is_finite() {
            return Err(CalcError::NonFinite {
                quantity: format!("d/dx^{}", i + 1),
                point: *p,
            });
        }
    }
    for i in 0..3 {
        for k in 0..3 {
            if !j.h[i][k].is_finite() {
                return Err(CalcError::NonFinite {
                    quantity: format!("d2/dx^{}dx^{}", i + 1, k + 1),
                    point: *p,
                });
            }
        }
    }
    Ok(j)
}

/// Anything that can produce a second-order jet at a chart point.
pub trait ScalarEval: Send + Sync + fmt::Debug {
    fn jet(&self, p: &ChartPoint) -> Result<Jet2, CalcError>;

    /// Plain value; evaluators with a cheaper path may override this.
    fn value(&self, p: &ChartPoint) -> Result<f64, CalcError> {
        self.jet(p).map(|j| j.v)
    }
}

/// A smooth real function on the chart, shared and immutable.
#[derive(Clone, Debug)]
pub struct ScalarField(Arc<dyn ScalarEval>);

struct JetFn<F>(F);

impl<F> fmt::Debug for JetFn<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("JetFn")
    }
}

impl<F> ScalarEval for JetFn<F>
where
    F: Fn(&[Jet2; 3]) -> Jet2 + Send + Sync,
{
    fn jet(&self, p: &ChartPoint) -> Result<Jet2, CalcError> {
        Ok((self.0)(&Jet2::seed(&p.0)))
    }
}

/// Central finite differences around an evaluator that only returns values.
struct FiniteDifference<F>(F);

impl<F> fmt::Debug for FiniteDifference<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FiniteDifference")
    }
}

/// Step used by the finite-difference mode along axis `i`.
pub fn fd_step(x: f64) -> f64 {
    1e-6_f64.max(1e-6 * x.abs())
}

impl<F> ScalarEval for FiniteDifference<F>
where
    F: Fn(&[f64; 3]) -> f64 + Send + Sync,
{
    fn jet(&self, p: &ChartPoint) -> Result<Jet2, CalcError> {
        let f = &self.0;
        let x = p.0;
        let shifted = |di: [f64; 3]| {
            let q = [x[0] + di[0], x[1] + di[1], x[2] + di[2]];
            f(&q)
        };
        let h: [f64; 3] = x.map(fd_step);
        let e = |i: usize, s: f64| {
            let mut d = [0.0; 3];
            d[i] = s * h[i];
            d
        };
        let f0 = f(&x);
        let mut g = [0.0; 3];
        let mut hess = [[0.0; 3]; 3];
        for i in 0..3 {
            let fp = shifted(e(i, 1.0));
            let fm = shifted(e(i, -1.0));
            g[i] = (fp - fm) / (2.0 * h[i]);
            hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let corner = |si: f64, sj: f64| {
                    let mut d = [0.0; 3];
                    d[i] = si * h[i];
                    d[j] = sj * h[j];
                    shifted(d)
                };
                let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                    / (4.0 * h[i] * h[j]);
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
        Ok(Jet2 { v: f0, g, h: hess })
    }

    fn value(&self, p: &ChartPoint) -> Result<f64, CalcError> {
        Ok((self.0)(&p.0))
    }
}

#[derive(Debug)]
struct Constant(f64);

impl ScalarEval for Constant {
    fn jet(&self, _p: &ChartPoint) -> Result<Jet2, CalcError> {
        Ok(Jet2::constant(self.0))
    }
}

impl ScalarField {
    pub fn new(eval: impl ScalarEval + 'static) -> Self {
        Self(Arc::new(eval))
    }

    /// A field written directly in jet arithmetic; derivatives are exact.
    pub fn from_jet_fn(f: impl Fn(&[Jet2; 3]) -> Jet2 + Send + Sync + 'static) -> Self {
        Self::new(JetFn(f))
    }

    /// An opaque value-only evaluator, differentiated by central differences.
    pub fn opaque(f: impl Fn(&[f64; 3]) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(FiniteDifference(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Constant(c))
    }

    /// The coordinate function `x^(axis+1)`.
    pub fn coordinate(axis: usize) -> Self {
        assert!(axis < 3, "chart axis out of range");
        Self::from_jet_fn(move |x| x[axis])
    }

    pub fn value(&self, p: &ChartPoint) -> Result<f64, CalcError> {
        p.ensure_finite()?;
        let v = self.0.value(p)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CalcError::NonFinite {
                quantity: "value".into(),
                point: *p,
            })
        }
    }

    pub fn jet(&self, p: &ChartPoint) -> Result<Jet2, CalcError> {
        p.ensure_finite()?;
        check_jet2(self.0.jet(p)?, p)
    }

    /// Value, gradient and Hessian at `p`.
    pub fn differentiate(&self, p: &ChartPoint) -> Result<Derivatives, CalcError> {
        self.jet(p).map(Derivatives::from)
    }
}

/// Anything that can produce the three component jets of a 1-form.
pub trait OneFormEval: Send + Sync + fmt::Debug {
    fn jets(&self, p: &ChartPoint) -> Result<[Jet1; 3], CalcError>;
}

/// `θ = θ_i(x) dx^i`, shared and immutable.
#[derive(Clone, Debug)]
pub struct OneForm(Arc<dyn OneFormEval>);

#[derive(Debug)]
struct Components([ScalarField; 3]);

impl OneFormEval for Components {
    fn jets(&self, p: &ChartPoint) -> Result<[Jet1; 3], CalcError> {
        let [a, b, c] = &self.0;
        Ok([
            a.jet(p)?.first_order(),
            b.jet(p)?.first_order(),
            c.jet(p)?.first_order(),
        ])
    }
}

#[derive(Debug)]
struct Exact(ScalarField);

impl OneFormEval for Exact {
    fn jets(&self, p: &ChartPoint) -> Result<[Jet1; 3], CalcError> {
        let j = self.0.jet(p)?;
        Ok([0, 1, 2].map(|i| Jet1 { v: j.g[i], g: j.h[i] }))
    }
}

#[derive(Debug)]
struct Scaled(ScalarField, OneForm);

impl OneFormEval for Scaled {
    fn jets(&self, p: &ChartPoint) -> Result<[Jet1; 3], CalcError> {
        let f = self.0.jet(p)?.first_order();
        Ok(self.1.jets(p)?.map(|c| f * c))
    }
}

#[derive(Debug)]
struct Sum(OneForm, OneForm);

impl OneFormEval for Sum {
    fn jets(&self, p: &ChartPoint) -> Result<[Jet1; 3], CalcError> {
        let a = self.0.jets(p)?;
        let b = self.1.jets(p)?;
        Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
    }
}

struct Jet1Fn<F>(F);

impl<F> fmt::Debug for Jet1Fn<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Jet1Fn")
    }
}

impl<F> OneFormEval for Jet1Fn<F>
where
    F: Fn(&[Jet1; 3]) -> [Jet1; 3] + Send + Sync,
{
    fn jets(&self, p: &ChartPoint) -> Result<[Jet1; 3], CalcError> {
        let x = [0, 1, 2].map(|i| Jet1::variable(p.0[i], i));
        Ok((self.0)(&x))
    }
}

impl OneForm {
    pub fn new(eval: impl OneFormEval + 'static) -> Self {
        Self(Arc::new(eval))
    }

    pub fn from_components(c: [ScalarField; 3]) -> Self {
        Self::new(Components(c))
    }

    /// `df`, with component derivatives taken from the Hessian of `f`.
    pub fn exact(f: ScalarField) -> Self {
        Self::new(Exact(f))
    }

    /// `f θ`.
    pub fn scaled(f: ScalarField, theta: OneForm) -> Self {
        Self::new(Scaled(f, theta))
    }

    pub fn sum(a: OneForm, b: OneForm) -> Self {
        Self::new(Sum(a, b))
    }

    pub fn constant(c: [f64; 3]) -> Self {
        Self::from_jet1_fn(move |_| c.map(Jet1::constant))
    }

    /// Components written directly in first-order jet arithmetic.
    pub fn from_jet1_fn(f: impl Fn(&[Jet1; 3]) -> [Jet1; 3] + Send + Sync + 'static) -> Self {
        Self::new(Jet1Fn(f))
    }

    /// Component jets at `p`; fails if any value or first derivative is not finite.
    pub fn jets(&self, p: &ChartPoint) -> Result<[Jet1; 3], CalcError> {
        p.ensure_finite()?;
        let jets = self.0.jets(p)?;
        for (k, j) in jets.iter().enumerate() {
            if !j.v.is_finite() {
                return Err(CalcError::NonFinite {
                    quantity: format!("component {}", k + 1),
                    point: *p,
                });
            }
            if let Some(i) = j.g.iter().position(|d| !d.is_finite()) {
                return Err(CalcError::NonFinite {
                    quantity: format!("d/dx^{} of component {}", i + 1, k + 1),
                    point: *p,
                });
            }
        }
        Ok(jets)
    }

    /// Component values `θ_i(p)`.
    pub fn at(&self, p: &ChartPoint) -> Result<[f64; 3], CalcError> {
        Ok(self.jets(p)?.map(|j| j.v))
    }

    /// `θ(v) = θ_i v^i` at `p`.
    pub fn eval(&self, p: &ChartPoint, v: &[f64; 3]) -> Result<f64, CalcError> {
        let t = self.at(p)?;
        Ok(t[0] * v[0] + t[1] * v[1] + t[2] * v[2])
    }

    /// `J[i][j] = ∂_i θ_j` at `p`.
    pub fn jacobian(&self, p: &ChartPoint) -> Result<[[f64; 3]; 3], CalcError> {
        let jets = self.jets(p)?;
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, mij) in row.iter_mut().enumerate() {
                *mij = jets[j].g[i];
            }
        }
        Ok(m)
    }
}

/// Coefficients of `dx²∧dx³`, `dx³∧dx¹`, `dx¹∧dx²` as fields.
#[derive(Clone, Debug)]
pub struct TwoForm(pub [ScalarField; 3]);

impl TwoForm {
    pub fn at(&self, p: &ChartPoint) -> Result<super::TwoFormAt, CalcError> {
        Ok(super::TwoFormAt {
            coeffs: [self.0[0].value(p)?, self.0[1].value(p)?, self.0[2].value(p)?],
        })
    }
}

/// Coefficient of `dx¹∧dx²∧dx³` as a field.
#[derive(Clone, Debug)]
pub struct ThreeForm(pub ScalarField);

impl ThreeForm {
    pub fn at(&self, p: &ChartPoint) -> Result<super::ThreeFormAt, CalcError> {
        Ok(super::ThreeFormAt {
            coeff: self.0.value(p)?,
        })
    }
}
