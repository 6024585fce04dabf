#![allow(dead_code)]

use genut::{MomentSpec, SigmaPointSet};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Raw ingredients of a random moment spec.
#[derive(Debug, Clone)]
pub struct SpecParts {
    pub mean: Vec<f64>,
    /// Either standard deviations (diagonal) or a dense factor.
    pub cov: DMatrix<f64>,
    /// standardized skewness
    pub skew: Vec<f64>,
    /// kurtosis margin above the feasibility threshold
    pub excess: Vec<f64>,
}

impl SpecParts {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Feasible spec: `S = s·d³`, `K = (s² + e)·d⁴` with `d` the
    /// Cholesky diagonal.
    pub fn build(&self) -> MomentSpec {
        let n = self.dim();
        let l = self.cov.clone().cholesky().expect("covariance is SPD").l();
        let d = l.diagonal();
        let skew = DVector::from_fn(n, |i, _| self.skew[i] * d[i].powi(3));
        let kurt = DVector::from_fn(n, |i, _| (self.skew[i].powi(2) + self.excess[i]) * d[i].powi(4));
        MomentSpec::new(DVector::from_vec(self.mean.clone()), self.cov.clone(), skew, kurt).unwrap()
    }
}

pub fn random_parts<R: Rng>(rng: &mut R, n: usize, diagonal: bool) -> SpecParts {
    let mean = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let cov = if diagonal {
        DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.random_range(0.2f64..3.0).powi(2)))
    } else {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let cov = &a * a.transpose() + DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.random_range(0.5..2.0)));
        (&cov + cov.transpose()) / 2.0
    };
    SpecParts {
        mean,
        cov,
        skew: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        excess: (0..n).map(|_| rng.random_range(0.05..6.0)).collect(),
    }
}

/// Largest deviations of the set's weighted mean, covariance, diagonal third
/// and fourth central moments from `spec`, each relative to `max(1, |ref|)`.
pub fn moment_deviations(spec: &MomentSpec, set: &SigmaPointSet) -> [f64; 4] {
    let n = spec.dim();
    let x = set.points();
    let w = set.weights();
    let mut mean = DVector::zeros(n);
    for (k, wk) in w.iter().enumerate() {
        mean += x.column(k) * *wk;
    }
    let mut cov = DMatrix::zeros(n, n);
    let mut m3 = DVector::zeros(n);
    let mut m4 = DVector::zeros(n);
    for (k, wk) in w.iter().enumerate() {
        let d = x.column(k) - spec.mean();
        cov += &d * d.transpose() * *wk;
        for i in 0..n {
            m3[i] += wk * d[i].powi(3);
            m4[i] += wk * d[i].powi(4);
        }
    }
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let max_v =
        |a: &DVector<f64>, b: &DVector<f64>| a.iter().zip(b.iter()).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    let cov_dev = cov
        .iter()
        .zip(spec.covariance().iter())
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max);
    [
        max_v(&mean, spec.mean()),
        cov_dev,
        max_v(&m3, spec.skew_diag()),
        max_v(&m4, spec.kurt_diag()),
    ]
}
