use nalgebra::{Matrix2, Matrix4};

use super::{GateError, DEGENERACY_TOL, DET_TOL};

/// Single-step gate matrix
/// `M(θ₊, θ₋) = (1/sin θ₋) [[cos θ₊ + cos θ₋, sin θ₊], [−sin θ₊, cos θ₊ − cos θ₋]]`.
pub fn gate_matrix(theta_plus: f64, theta_minus: f64) -> Result<Matrix2<f64>, GateError> {
    let s = theta_minus.sin();
    if !(s.abs() > DEGENERACY_TOL) {
        return Err(GateError::DegeneratePhases { theta_minus });
    }
    let (sp, cp) = theta_plus.sin_cos();
    let cm = theta_minus.cos();
    Ok(Matrix2::new(cp + cm, sp, -sp, cp - cm) / s)
}

/// The two-mode CZ gate: each X is added to the partner's Y.
#[rustfmt::skip]
pub fn cz_matrix() -> Matrix4<f64> {
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 1.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        1.0, 0.0, 0.0, 1.0,
    )
}

/// The two single-mode gates applied in parallel between the input and
/// output beam splitters of the CZ construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeCoefficients {
    a: Matrix2<f64>,
    b: Matrix2<f64>,
}

impl TwoModeCoefficients {
    pub fn new(a: Matrix2<f64>, b: Matrix2<f64>) -> Result<Self, GateError> {
        for (name, m) in [("a", &a), ("b", &b)] {
            let det = m.determinant();
            if !((det - 1.0).abs() < DET_TOL) {
                return Err(GateError::InvalidBlocks(format!("det({name}) = {det}, expected 1")));
            }
        }
        Ok(Self { a, b })
    }

    /// `a11 = a22 = a21 = b11 = b22 = 1`, `a12 = b12 = 0`, `b21 = −1`.
    pub fn cz_choice() -> Self {
        Self { a: Matrix2::new(1.0, 0.0, 1.0, 1.0), b: Matrix2::new(1.0, 0.0, -1.0, 1.0) }
    }

    pub fn a(&self) -> &Matrix2<f64> {
        &self.a
    }

    pub fn b(&self) -> &Matrix2<f64> {
        &self.b
    }
}

/// `B · blockdiag(a, b) · B` with `B` the symmetric beam splitter on the
/// ordering `(x1, y1, x2, y2)`.
///
/// `B = H/√2` with `H` an integer matrix, so the product is formed as
/// `½ · H · blockdiag(a, b) · H`; integer inputs then give exact results.
pub fn cz_transform(coeffs: &TwoModeCoefficients) -> Matrix4<f64> {
    #[rustfmt::skip]
    let h = Matrix4::new(
        1.0, 0.0,  1.0,  0.0,
        0.0, 1.0,  0.0,  1.0,
        1.0, 0.0, -1.0,  0.0,
        0.0, 1.0,  0.0, -1.0,
    );
    let mut d = Matrix4::zeros();
    d.fixed_view_mut::<2, 2>(0, 0).copy_from(&coeffs.a);
    d.fixed_view_mut::<2, 2>(2, 2).copy_from(&coeffs.b);
    (h * d * h) * 0.5
}
