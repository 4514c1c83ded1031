use super::field::{ChartPoint, OneForm, TwoForm};
use super::CalcError;

/// A 2-form at one point, as coefficients of `dx²∧dx³`, `dx³∧dx¹`,
/// `dx¹∧dx²` (cyclic order).
///
/// The coefficient of `dx^i∧dx^j` equals `2 A_ij`, where `A` is the
/// antisymmetric tensor with `B = A_ij dx^i∧dx^j` summed over all `i, j`.
/// With `dx^i∧dx^j (v, w) = v^i w^j − v^j w^i` the evaluation reads
/// `B(v, w) = Σ_ij A_ij (v^i w^j − v^j w^i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoFormAt {
    pub coeffs: [f64; 3],
}

impl TwoFormAt {
    pub const ZERO: TwoFormAt = TwoFormAt { coeffs: [0.0; 3] };

    /// Builds the form from an arbitrary matrix `M` as `M_ij dx^i∧dx^j`.
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        Self {
            coeffs: [m[1][2] - m[2][1], m[2][0] - m[0][2], m[0][1] - m[1][0]],
        }
    }

    /// Coefficient of `dx^i∧dx^j` for any ordered pair (zero on the diagonal).
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        let [c23, c31, c12] = self.coeffs;
        match (i, j) {
            (1, 2) => c23,
            (2, 1) => -c23,
            (2, 0) => c31,
            (0, 2) => -c31,
            (0, 1) => c12,
            (1, 0) => -c12,
            _ => 0.0,
        }
    }

    /// The antisymmetric tensor `A_ij = ½ coefficient(i, j)`.
    pub fn tensor(&self) -> [[f64; 3]; 3] {
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, aij) in row.iter_mut().enumerate() {
                *aij = 0.5 * self.coefficient(i, j);
            }
        }
        a
    }

    pub fn eval(&self, v: &[f64; 3], w: &[f64; 3]) -> f64 {
        let [c23, c31, c12] = self.coeffs;
        c23 * (v[1] * w[2] - v[2] * w[1]) + c31 * (v[2] * w[0] - v[0] * w[2]) + c12 * (v[0] * w[1] - v[1] * w[0])
    }

    pub fn norm(&self) -> f64 {
        let [a, b, c] = self.coeffs;
        (a * a + b * b + c * c).sqrt()
    }

    /// `θ∧B` as a multiple of `dx¹∧dx²∧dx³`.
    pub fn wedge_one(&self, theta: &[f64; 3]) -> f64 {
        theta[0] * self.coeffs[0] + theta[1] * self.coeffs[1] + theta[2] * self.coeffs[2]
    }
}

/// A 3-form at one point, as a multiple of `dx¹∧dx²∧dx³`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeFormAt {
    pub coeff: f64,
}

impl ThreeFormAt {
    pub fn eval(&self, u: &[f64; 3], v: &[f64; 3], w: &[f64; 3]) -> f64 {
        self.coeff * crate::linalg::det3(&[[u[0], v[0], w[0]], [u[1], v[1], w[1]], [u[2], v[2], w[2]]])
    }
}

/// A symmetric bilinear form at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricAt {
    pub m: [[f64; 3]; 3],
}

impl SymmetricAt {
    pub fn eval(&self, v: &[f64; 3], w: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.m[i][j] * v[i] * w[j];
            }
        }
        s
    }
}

/// `dθ` at `p`: coefficient of `dx^i∧dx^j` is `∂_i θ_j − ∂_j θ_i`.
pub fn exterior_derivative(theta: &OneForm, p: &ChartPoint) -> Result<TwoFormAt, CalcError> {
    Ok(TwoFormAt::from_matrix(&theta.jacobian(p)?))
}

/// `½(∂_i θ_j + ∂_j θ_i)` at `p`.
pub fn symmetric_part(theta: &OneForm, p: &ChartPoint) -> Result<SymmetricAt, CalcError> {
    let j = theta.jacobian(p)?;
    let mut m = [[0.0; 3]; 3];
    for (a, row) in m.iter_mut().enumerate() {
        for (b, mab) in row.iter_mut().enumerate() {
            *mab = 0.5 * (j[a][b] + j[b][a]);
        }
    }
    Ok(SymmetricAt { m })
}

/// Coefficient of `dx¹∧dx²∧dx³` in `θ∧B` at `p`.
pub fn wedge_1_2(theta: &OneForm, b: &TwoForm, p: &ChartPoint) -> Result<f64, CalcError> {
    Ok(b.at(p)?.wedge_one(&theta.at(p)?))
}
