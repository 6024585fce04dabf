//! Small dense linear algebra used by both sigma-point schemes.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{GenutError, Result};

/// Relative tolerance for accepting a user-supplied matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Which factor `S` with `S Sᵀ = P` to use when placing sigma points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqrtMethod {
    /// Lower-triangular Cholesky factor.
    #[default]
    Cholesky,
    /// Symmetric square root `V diag(√λ) Vᵀ` from the eigendecomposition.
    Symmetric,
}

impl std::str::FromStr for SqrtMethod {
    type Err = GenutError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cholesky" => Ok(SqrtMethod::Cholesky),
            "symmetric" => Ok(SqrtMethod::Symmetric),
            other => Err(GenutError::InvalidArgument(format!(
                "unknown square-root method `{other}` (expected cholesky or symmetric)"
            ))),
        }
    }
}

pub fn ensure_finite_matrix(m: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(GenutError::NonFinite { what })
    }
}

pub fn ensure_finite_vector(v: &DVector<f64>, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(GenutError::NonFinite { what })
    }
}

/// Checks squareness and symmetry within [`SYMMETRY_TOL`] (relative to the
/// largest entry) and returns `(P + Pᵀ) / 2`.
pub fn symmetrized(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !p.is_square() {
        return Err(GenutError::DimensionMismatch {
            what: "square matrix columns",
            expected: p.nrows(),
            found: p.ncols(),
        });
    }
    ensure_finite_matrix(p, "matrix")?;
    let scale = p.amax().max(f64::MIN_POSITIVE);
    let n = p.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (p[(i, j)] - p[(j, i)]).abs();
            if diff > SYMMETRY_TOL * scale {
                return Err(GenutError::NotSymmetric { row: i, col: j, diff });
            }
        }
    }
    Ok((p + p.transpose()) * 0.5)
}

/// Lower-triangular `L` with `L Lᵀ = P`.
///
/// Fails with the index of the first non-positive pivot when `P` is not
/// positive definite.
pub fn cholesky_lower(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = symmetrized(p)?;
    let n = p.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut diag = p[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(GenutError::Factorization { pivot: j, value: diag });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = p[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Symmetric positive-definite square root `V diag(√λ) Vᵀ`.
pub fn symmetric_sqrt(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = symmetrized(p)?;
    let eig = SymmetricEigen::new(p);
    if let Some((idx, &lambda)) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .find(|(_, &l)| l <= 0.0 || !l.is_finite())
    {
        return Err(GenutError::Factorization {
            pivot: idx,
            value: lambda,
        });
    }
    let root = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Ok(&eig.eigenvectors * root * eig.eigenvectors.transpose())
}

pub fn matrix_sqrt(p: &DMatrix<f64>, method: SqrtMethod) -> Result<DMatrix<f64>> {
    match method {
        SqrtMethod::Cholesky => cholesky_lower(p),
        SqrtMethod::Symmetric => symmetric_sqrt(p),
    }
}

/// Element-wise integer power. Negative `k` is the reciprocal of the
/// positive power and requires every entry to be nonzero.
pub fn hadamard_pow(v: &DVector<f64>, k: i32) -> Result<DVector<f64>> {
    if k == 0 {
        return Err(GenutError::InvalidArgument(
            "hadamard_pow exponent must be nonzero".into(),
        ));
    }
    if k < 0 {
        if let Some(index) = v.iter().position(|&x| x == 0.0) {
            return Err(GenutError::DivisionByZero { index });
        }
    }
    Ok(v.map(|x| x.powi(k)))
}

pub fn hadamard_div(a: &DVector<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.len() != b.len() {
        return Err(GenutError::DimensionMismatch {
            what: "hadamard_div operands",
            expected: a.len(),
            found: b.len(),
        });
    }
    if let Some(index) = b.iter().position(|&x| x == 0.0) {
        return Err(GenutError::DivisionByZero { index });
    }
    Ok(a.component_div(b))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use nalgebra::dvector;
    use proptest::prelude::*;

    fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn cholesky_of_diagonal() {
        let p = DMatrix::from_diagonal(&dvector![1.5, 1.0]);
        let l = cholesky_lower(&p).unwrap();
        assert!((l[(0, 0)] - 1.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(l[(1, 1)], 1.0);
        assert_eq!(l[(1, 0)], 0.0);
        assert_eq!(
            cholesky_lower(&DMatrix::identity(3, 3)).unwrap(),
            DMatrix::identity(3, 3)
        );
    }

    #[test]
    fn cholesky_two_by_two() {
        let p = dmatrix![4.0, 2.0; 2.0, 3.0];
        let l = cholesky_lower(&p).unwrap();
        let expected = dmatrix![2.0, 0.0; 1.0, 2f64.sqrt()];
        assert!((&l - &expected).amax() < 1e-15);
        assert!(rel_frobenius(&(&l * l.transpose()), &p) < 1e-12);
    }

    #[test]
    fn cholesky_reports_failing_pivot() {
        let p = dmatrix![1.0, 2.0; 2.0, 1.0];
        match cholesky_lower(&p) {
            Err(GenutError::Factorization { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("unexpected {other:?}"),
        }
        let p = dmatrix![-1.0, 0.0; 0.0, 1.0];
        assert!(matches!(
            cholesky_lower(&p),
            Err(GenutError::Factorization { pivot: 0, .. })
        ));
    }

    #[test]
    fn asymmetric_input_rejected_but_roundoff_tolerated() {
        let p = dmatrix![2.0, 1.0; 1.1, 2.0];
        assert!(matches!(cholesky_lower(&p), Err(GenutError::NotSymmetric { .. })));
        let p = dmatrix![2.0, 1.0; 1.0 + 1e-15, 2.0];
        assert!(cholesky_lower(&p).is_ok());
    }

    #[test]
    fn symmetric_sqrt_reconstructs() {
        let p = dmatrix![4.0, 2.0; 2.0, 3.0];
        let s = symmetric_sqrt(&p).unwrap();
        assert!((&s - s.transpose()).amax() < 1e-14);
        assert!(rel_frobenius(&(&s * s.transpose()), &p) < 1e-12);
    }

    #[test]
    fn hadamard_examples() {
        assert_eq!(hadamard_pow(&dvector![2.0, 3.0], 2).unwrap(), dvector![4.0, 9.0]);
        assert_eq!(hadamard_pow(&dvector![2.0, 4.0], -1).unwrap(), dvector![0.5, 0.25]);
        let cubed = hadamard_pow(&dvector![1.5f64.sqrt(), 1.0], 3).unwrap();
        assert!((cubed[0] - 1.5f64.sqrt().powi(3)).abs() < 1e-15);
        assert!((cubed[0] - 1.837_117_307_087_383_6).abs() < 1e-12);
        assert_eq!(cubed[1], 1.0);
        assert!(matches!(
            hadamard_pow(&dvector![1.0, 0.0], -2),
            Err(GenutError::DivisionByZero { index: 1 })
        ));

        assert_eq!(
            hadamard_div(&dvector![1.0, 1.0], &dvector![2.0, 4.0]).unwrap(),
            dvector![0.5, 0.25]
        );
        assert_eq!(
            hadamard_div(&dvector![0.0, 0.0], &dvector![1.0, 1.0]).unwrap(),
            dvector![0.0, 0.0]
        );
        assert!(matches!(
            hadamard_div(&dvector![1.0, 1.0], &dvector![0.0, 1.0]),
            Err(GenutError::DivisionByZero { index: 0 })
        ));
    }

    #[test]
    fn example_one_first_weights_via_hadamard_chain() {
        // w'' = 1 ⊘ v ⊘ (u + v), w' = w'' ⊙ v ⊘ u
        let u = dvector![1.371_264_751_541_355_4, 1.302_775_637_731_994_6];
        let v = &u + dvector![1.0 / 1.5f64.sqrt(), 1.0];
        let ones = DVector::from_element(2, 1.0);
        let w2 = hadamard_div(&hadamard_div(&ones, &v).unwrap(), &(&u + &v)).unwrap();
        let w1 = hadamard_div(&w2.component_mul(&v), &u).unwrap();
        assert!((w1[0] - 0.2049).abs() < 5e-5);
        assert!((w1[1] - 0.2129).abs() < 5e-5);
    }

    fn spd_strategy(max_n: usize) -> impl Strategy<Value = DMatrix<f64>> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |data| {
                let a = DMatrix::from_vec(n, n, data);
                &a * a.transpose() + DMatrix::identity(n, n) * 0.1
            })
        })
    }

    proptest! {
        #[test]
        fn cholesky_reconstruction(p in spd_strategy(50)) {
            let l = cholesky_lower(&p).unwrap();
            prop_assert!(rel_frobenius(&(&l * l.transpose()), &p) <= 1e-12);
            for i in 0..p.nrows() {
                for j in (i + 1)..p.nrows() {
                    prop_assert_eq!(l[(i, j)], 0.0);
                }
            }
        }

        #[test]
        fn hadamard_pow_inverse_pairs(
            v in proptest::collection::vec(
                prop_oneof![0.01f64..100.0, -100.0f64..-0.01], 1..20),
            k in 1i32..6,
        ) {
            let v = DVector::from_vec(v);
            let prod = hadamard_pow(&v, k).unwrap().component_mul(&hadamard_pow(&v, -k).unwrap());
            for x in prod.iter() {
                prop_assert!((x - 1.0).abs() < 1e-12);
            }
        }
    }
}
