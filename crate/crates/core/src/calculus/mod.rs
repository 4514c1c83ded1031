//! Differential forms on a three-dimensional chart.
//!
//! Fields are evaluated through forward-mode jets, so first and second
//! derivatives of user-defined fields are exact to rounding. Opaque value-only
//! evaluators fall back to central differences.

mod field;
mod forms;
mod jet;

use thiserror::Error;

pub use field::{
    fd_step, Chart, ChartPoint, Derivatives, OneForm, OneFormEval, ScalarEval, ScalarField, ThreeForm, TwoForm,
};
pub use forms::{exterior_derivative, symmetric_part, wedge_1_2, SymmetricAt, ThreeFormAt, TwoFormAt};
pub use jet::{Jet1, Jet2, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalcError {
    #[error("non-finite {quantity} at {point}")]
    NonFinite { quantity: String, point: ChartPoint },
    #[error("coordinate x^{axis} of {point} is not finite")]
    NonFinitePoint { axis: usize, point: ChartPoint },
    #[error("{function} is undefined for argument {argument} at {point}")]
    Domain {
        function: &'static str,
        argument: f64,
        point: ChartPoint,
    },
}

/// Value, gradient and Hessian of `f` at `p`.
pub fn differentiate(f: &ScalarField, p: &ChartPoint) -> Result<Derivatives, CalcError> {
    f.differentiate(p)
}
