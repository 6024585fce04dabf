//! Symmetric unscented transform baseline with spread parameter κ.
//!
//! Points sit at `x̄ ± √((n+κ)P)[i]` with weights `1 / (2(n+κ))` and a
//! center weight `κ / (n+κ)`. With `n + κ = 3` the scalar rule matches the
//! fourth moment of a Gaussian, hence the default κ = 3 − n. For `n > 3`
//! the center weight is negative.

use nalgebra::{DMatrix, DVector};

use crate::error::{GenutError, Result};
use crate::linalg;
use crate::sigma::SigmaPointSet;

pub fn default_kappa(n: usize) -> f64 {
    3.0 - n as f64
}

/// Symmetric sigma points. `χ[i] = x̄ + col_i`, `χ[i+n] = x̄ - col_i`, and
/// `u = v = √(n+κ)` is recorded on the set.
pub fn ut_sigma_points(mean: &DVector<f64>, cov: &DMatrix<f64>, kappa: f64) -> Result<SigmaPointSet> {
    let n = mean.len();
    if cov.nrows() != n {
        return Err(GenutError::DimensionMismatch {
            what: "covariance rows",
            expected: n,
            found: cov.nrows(),
        });
    }
    let spread = n as f64 + kappa;
    if spread.is_nan() || spread <= 0.0 {
        return Err(GenutError::ParameterDomain {
            param: "kappa",
            value: kappa,
            domain: "n + kappa > 0",
        });
    }
    let factor = linalg::cholesky_lower(&(cov * spread))?;
    let mut points = DMatrix::zeros(n, 2 * n + 1);
    points.set_column(0, mean);
    for i in 0..n {
        points.set_column(1 + i, &(mean + factor.column(i)));
        points.set_column(1 + n + i, &(mean - factor.column(i)));
    }
    let mut weights = DVector::from_element(2 * n + 1, 0.5 / spread);
    weights[0] = kappa / spread;
    let root = DVector::from_element(n, spread.sqrt());
    Ok(SigmaPointSet::from_parts(points, weights, root.clone(), root))
}
