//! Pushing sigma points through a nonlinear map and summarizing the result.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GenutError, Result};
use crate::linalg;
use crate::sigma::SigmaPointSet;
use crate::wire;

/// Eigenvalues of a propagated covariance below this are reported.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

type MapFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A deterministic map `R^n -> R^m`.
#[derive(Clone)]
pub struct TransformFn {
    name: String,
    input_dim: usize,
    output_dim: usize,
    f: Arc<MapFn>,
}

impl TransformFn {
    pub fn new<F>(name: impl Into<String>, input_dim: usize, output_dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        TransformFn {
            name: name.into(),
            input_dim,
            output_dim,
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

impl fmt::Debug for TransformFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformFn")
            .field("name", &self.name)
            .field("input_dim", &self.input_dim)
            .field("output_dim", &self.output_dim)
            .finish()
    }
}

/// Weighted statistics of transformed points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformResult {
    #[serde(serialize_with = "ser_vec")]
    pub mean: DVector<f64>,
    #[serde(serialize_with = "ser_mat")]
    pub covariance: DMatrix<f64>,
    #[serde(serialize_with = "ser_vec")]
    pub skew_diag: DVector<f64>,
    #[serde(serialize_with = "ser_vec")]
    pub kurt_diag: DVector<f64>,
    /// `m × (2n+1)`; empty for Monte Carlo estimates.
    #[serde(serialize_with = "ser_mat", skip_serializing_if = "is_empty_matrix")]
    pub transformed_points: DMatrix<f64>,
    /// Smallest covariance eigenvalue, present only when below
    /// [`EIGENVALUE_FLOOR`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
}

fn ser_vec<S: serde::Serializer>(v: &DVector<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

fn ser_mat<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(wire::matrix_to_rows(m))
}

fn is_empty_matrix(m: &DMatrix<f64>) -> bool {
    m.is_empty()
}

/// `column i = f(χ[i])`.
pub fn transform_points(s: &SigmaPointSet, f: &TransformFn) -> Result<DMatrix<f64>> {
    if f.input_dim() != s.dim() {
        return Err(GenutError::DimensionMismatch {
            what: "transform input dimension",
            expected: s.dim(),
            found: f.input_dim(),
        });
    }
    let m = f.output_dim();
    let mut out = DMatrix::zeros(m, s.len());
    for (i, col) in s.points().column_iter().enumerate() {
        let x: Vec<f64> = col.iter().copied().collect();
        let y = f.eval(&x);
        if y.len() != m {
            return Err(GenutError::DimensionMismatch {
                what: "transform output dimension",
                expected: m,
                found: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GenutError::Evaluation { index: i });
        }
        out.set_column(i, &DVector::from_vec(y));
    }
    Ok(out)
}

fn check_columns(points: &DMatrix<f64>, weights: &DVector<f64>) {
    assert_eq!(points.ncols(), weights.len(), "one weight per point column is required");
}

/// `Σ wᵢ Y[i]`, summed in index order.
pub fn sample_mean(points: &DMatrix<f64>, weights: &DVector<f64>) -> DVector<f64> {
    check_columns(points, weights);
    let mut acc = DVector::zeros(points.nrows());
    for (col, &w) in points.column_iter().zip(weights.iter()) {
        acc += col * w;
    }
    acc
}

/// `Σ wᵢ (Y[i] - ȳ)(Y[i] - ȳ)ᵀ`, symmetrized.
pub fn sample_covariance(points: &DMatrix<f64>, weights: &DVector<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    check_columns(points, weights);
    let m = points.nrows();
    let mut acc = DMatrix::zeros(m, m);
    for (col, &w) in points.column_iter().zip(weights.iter()) {
        let d = col - mean;
        acc += &d * d.transpose() * w;
    }
    (&acc + acc.transpose()) * 0.5
}

fn central_power(points: &DMatrix<f64>, weights: &DVector<f64>, mean: &DVector<f64>, k: i32) -> DVector<f64> {
    check_columns(points, weights);
    let mut acc = DVector::zeros(points.nrows());
    for (col, &w) in points.column_iter().zip(weights.iter()) {
        acc += (col - mean).map(|d| d.powi(k)) * w;
    }
    acc
}

/// `Σ wᵢ (Y[i] - ȳ)ⱼ³` per component.
pub fn sample_skew_diag(points: &DMatrix<f64>, weights: &DVector<f64>, mean: &DVector<f64>) -> DVector<f64> {
    central_power(points, weights, mean, 3)
}

/// `Σ wᵢ (Y[i] - ȳ)ⱼ⁴` per component.
pub fn sample_kurt_diag(points: &DMatrix<f64>, weights: &DVector<f64>, mean: &DVector<f64>) -> DVector<f64> {
    central_power(points, weights, mean, 4)
}

/// Statistics of weighted points (no transform applied).
pub fn summarize(points: DMatrix<f64>, weights: &DVector<f64>) -> TransformResult {
    let mean = sample_mean(&points, weights);
    let covariance = sample_covariance(&points, weights, &mean);
    let skew_diag = sample_skew_diag(&points, weights, &mean);
    let kurt_diag = sample_kurt_diag(&points, weights, &mean);
    let lowest = linalg::min_eigenvalue(&covariance);
    TransformResult {
        mean,
        covariance,
        skew_diag,
        kurt_diag,
        transformed_points: points,
        min_eigenvalue: (lowest < EIGENVALUE_FLOOR).then_some(lowest),
    }
}

pub fn propagate(s: &SigmaPointSet, f: &TransformFn) -> Result<TransformResult> {
    let y = transform_points(s, f)?;
    Ok(summarize(y, s.weights()))
}
