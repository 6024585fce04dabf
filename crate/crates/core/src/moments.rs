//! Closed-form central moments for the supported univariate families, and
//! assembly of moment specs for independent random vectors.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GenutError, Result};
use crate::linalg;
use crate::special::gamma;
use crate::wire;

/// A univariate distribution with its parameters.
///
/// JSON form is internally tagged by `kind`:
///
/// | kind                | fields                                   |
/// |---------------------|------------------------------------------|
/// | `gaussian`          | `mu`, `sigma2` (variance)                |
/// | `exponential`       | `lambda` (rate)                          |
/// | `gamma`             | `a` (shape), `b` (scale)                 |
/// | `weibull`           | `a` (scale), `b` (shape)                 |
/// | `rayleigh`          | `sigma`                                  |
/// | `beta`              | `a`, `b`                                 |
/// | `binomial`          | `n` (trials), `p`                        |
/// | `poisson`           | `lambda`                                 |
/// | `geometric`         | `p` (failures before first success)      |
/// | `negative_binomial` | `r`, `p` (failures before `r` successes) |
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Gaussian { mu: f64, sigma2: f64 },
    Exponential { lambda: f64 },
    Gamma { a: f64, b: f64 },
    Weibull { a: f64, b: f64 },
    Rayleigh { sigma: f64 },
    Beta { a: f64, b: f64 },
    Binomial { n: u32, p: f64 },
    Poisson { lambda: f64 },
    Geometric { p: f64 },
    NegativeBinomial { r: f64, p: f64 },
}

fn positive(param: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(GenutError::ParameterDomain {
            param,
            value,
            domain: "> 0",
        })
    }
}

fn finite(param: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(GenutError::ParameterDomain {
            param,
            value,
            domain: "finite",
        })
    }
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        use DistributionSpec::*;
        match *self {
            Gaussian { mu, sigma2 } => {
                finite("mu", mu)?;
                positive("sigma2", sigma2)
            }
            Exponential { lambda } | Poisson { lambda } => positive("lambda", lambda),
            Gamma { a, b } | Weibull { a, b } | Beta { a, b } => {
                positive("a", a)?;
                positive("b", b)
            }
            Rayleigh { sigma } => positive("sigma", sigma),
            Binomial { n, p } => {
                if n < 1 {
                    return Err(GenutError::ParameterDomain {
                        param: "n",
                        value: n as f64,
                        domain: ">= 1",
                    });
                }
                if (0.0..=1.0).contains(&p) {
                    Ok(())
                } else {
                    Err(GenutError::ParameterDomain {
                        param: "p",
                        value: p,
                        domain: "[0, 1]",
                    })
                }
            }
            Geometric { p } => {
                if p > 0.0 && p <= 1.0 {
                    Ok(())
                } else {
                    Err(GenutError::ParameterDomain {
                        param: "p",
                        value: p,
                        domain: "(0, 1]",
                    })
                }
            }
            NegativeBinomial { r, p } => {
                positive("r", r)?;
                if p > 0.0 && p < 1.0 {
                    Ok(())
                } else {
                    Err(GenutError::ParameterDomain {
                        param: "p",
                        value: p,
                        domain: "(0, 1)",
                    })
                }
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            DistributionSpec::Binomial { .. }
                | DistributionSpec::Poisson { .. }
                | DistributionSpec::Geometric { .. }
                | DistributionSpec::NegativeBinomial { .. }
        )
    }

    /// Closed support interval `(lower, upper)`; infinite ends are ±∞.
    pub fn support(&self) -> (f64, f64) {
        use DistributionSpec::*;
        match *self {
            Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Beta { .. } => (0.0, 1.0),
            Binomial { n, .. } => (0.0, n as f64),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Short label such as `P(0.1)` or `NB(4, 0.67)`.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DistributionSpec::*;
        match *self {
            Gaussian { mu, sigma2 } => write!(f, "N({mu}, {sigma2})"),
            Exponential { lambda } => write!(f, "E({lambda})"),
            Gamma { a, b } => write!(f, "G({a}, {b})"),
            Weibull { a, b } => write!(f, "W({a}, {b})"),
            Rayleigh { sigma } => write!(f, "R({sigma})"),
            Beta { a, b } => write!(f, "BE({a}, {b})"),
            Binomial { n, p } => write!(f, "B({n}, {p})"),
            Poisson { lambda } => write!(f, "P({lambda})"),
            Geometric { p } => write!(f, "GE({p})"),
            NegativeBinomial { r, p } => write!(f, "NB({r}, {p})"),
        }
    }
}

/// Mean and second to fourth central moments of a scalar random variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnivariateMoments {
    pub mean: f64,
    pub variance: f64,
    /// E[(x - mean)^3]
    pub skewness: f64,
    /// E[(x - mean)^4]
    pub kurtosis: f64,
}

impl UnivariateMoments {
    /// Raw moments E[x^k] for k = 1..=4.
    pub fn raw(&self) -> [f64; 4] {
        let m = self.mean;
        let (p, s, k) = (self.variance, self.skewness, self.kurtosis);
        [
            m,
            p + m * m,
            s + 3.0 * m * p + m.powi(3),
            k + 4.0 * m * s + 6.0 * m * m * p + m.powi(4),
        ]
    }
}

/// Closed-form central moments of `d`.
pub fn moments_of(d: &DistributionSpec) -> Result<UnivariateMoments> {
    use DistributionSpec::*;
    d.validate()?;
    let (mean, variance, skewness, kurtosis) = match *d {
        Gaussian { mu, sigma2 } => (mu, sigma2, 0.0, 3.0 * sigma2 * sigma2),
        Exponential { lambda } => (
            1.0 / lambda,
            lambda.powi(-2),
            2.0 * lambda.powi(-3),
            9.0 * lambda.powi(-4),
        ),
        Gamma { a, b } => (a * b, a * b * b, 2.0 * a * b.powi(3), 3.0 * a * b.powi(4) * (a + 2.0)),
        Weibull { a, b } => {
            let g = |k: f64| gamma(k / b + 1.0);
            let (g1, g2, g3, g4) = (g(1.0), g(2.0), g(3.0), g(4.0));
            (
                a * g1,
                a * a * (g2 - g1 * g1),
                a.powi(3) * (g3 + 2.0 * g1.powi(3) - 3.0 * g1 * g2),
                a.powi(4) * (g4 - 3.0 * g1.powi(4) - 4.0 * g1 * g3 + 6.0 * g1 * g1 * g2),
            )
        }
        Rayleigh { sigma } => (
            sigma * (PI / 2.0).sqrt(),
            sigma * sigma * (2.0 - PI / 2.0),
            sigma.powi(3) * (PI - 3.0) * (PI / 2.0).sqrt(),
            sigma.powi(4) * (32.0 - 3.0 * PI * PI) / 4.0,
        ),
        Beta { a, b } => {
            let z = |k: f64| a + b + k;
            (
                a / z(0.0),
                a * b / (z(0.0).powi(2) * z(1.0)),
                2.0 * a * b * (b - a) / (z(0.0).powi(3) * z(1.0) * z(2.0)),
                3.0 * a * b * (2.0 * (b - a).powi(2) + a * b * z(2.0)) / (z(0.0).powi(4) * z(1.0) * z(2.0) * z(3.0)),
            )
        }
        Binomial { n, p } => {
            let n = n as f64;
            let var = n * p * (1.0 - p);
            (
                n * p,
                var,
                var * (1.0 - 2.0 * p),
                var * (1.0 + p * (1.0 - p) * (3.0 * n - 6.0)),
            )
        }
        Poisson { lambda } => (lambda, lambda, lambda, 3.0 * lambda * lambda + lambda),
        Geometric { p } => {
            let q = 1.0 - p;
            (
                q / p,
                q / (p * p),
                (p - 1.0) * (p - 2.0) / p.powi(3),
                q * (p * p - 9.0 * p + 9.0) / p.powi(4),
            )
        }
        NegativeBinomial { r, p } => {
            let q = 1.0 - p;
            (
                r * q / p,
                r * q / (p * p),
                r * (p - 1.0) * (p - 2.0) / p.powi(3),
                // The printed table divides by p^-4; p^4 is the consistent form.
                r * q * (p * p - 6.0 * p - 3.0 * p * r + 3.0 * r + 6.0) / p.powi(4),
            )
        }
    };
    Ok(UnivariateMoments {
        mean,
        variance,
        skewness,
        kurtosis,
    })
}

/// Mean, covariance, and the diagonal third/fourth central moment
/// components `S_iii`, `K_iiii` of a random vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MomentSpecWire", into = "MomentSpecWire")]
pub struct MomentSpec {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    skew_diag: DVector<f64>,
    kurt_diag: DVector<f64>,
}

impl MomentSpec {
    /// Validates dimensions, finiteness and symmetry; the stored covariance
    /// is symmetrized. Positive definiteness is checked when the covariance
    /// is factorized.
    pub fn new(
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
        skew_diag: DVector<f64>,
        kurt_diag: DVector<f64>,
    ) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(GenutError::InvalidArgument("empty moment spec".into()));
        }
        for (what, found) in [
            ("covariance rows", covariance.nrows()),
            ("covariance columns", covariance.ncols()),
            ("skew_diag length", skew_diag.len()),
            ("kurt_diag length", kurt_diag.len()),
        ] {
            if found != n {
                return Err(GenutError::DimensionMismatch {
                    what,
                    expected: n,
                    found,
                });
            }
        }
        linalg::ensure_finite_vector(&mean, "mean")?;
        linalg::ensure_finite_vector(&skew_diag, "skew_diag")?;
        linalg::ensure_finite_vector(&kurt_diag, "kurt_diag")?;
        let covariance = linalg::symmetrized(&covariance)?;
        Ok(MomentSpec {
            mean,
            covariance,
            skew_diag,
            kurt_diag,
        })
    }

    /// Spec for a scalar random variable.
    pub fn scalar(mean: f64, variance: f64, skewness: f64, kurtosis: f64) -> Result<Self> {
        MomentSpec::new(
            DVector::from_element(1, mean),
            DMatrix::from_element(1, 1, variance),
            DVector::from_element(1, skewness),
            DVector::from_element(1, kurtosis),
        )
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn skew_diag(&self) -> &DVector<f64> {
        &self.skew_diag
    }

    pub fn kurt_diag(&self) -> &DVector<f64> {
        &self.kurt_diag
    }

    /// True when all off-diagonal covariance entries are exactly zero.
    pub fn has_diagonal_covariance(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.covariance[(i, j)] == 0.0))
    }
}

#[derive(Serialize, Deserialize)]
struct MomentSpecWire {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
    skew_diag: Vec<f64>,
    kurt_diag: Vec<f64>,
}

impl TryFrom<MomentSpecWire> for MomentSpec {
    type Error = GenutError;

    fn try_from(w: MomentSpecWire) -> Result<Self> {
        MomentSpec::new(
            DVector::from_vec(w.mean),
            wire::rows_to_matrix(&w.covariance, "covariance rows")?,
            DVector::from_vec(w.skew_diag),
            DVector::from_vec(w.kurt_diag),
        )
    }
}

impl From<MomentSpec> for MomentSpecWire {
    fn from(s: MomentSpec) -> Self {
        MomentSpecWire {
            mean: wire::vector_to_vec(&s.mean),
            covariance: wire::matrix_to_rows(&s.covariance),
            skew_diag: wire::vector_to_vec(&s.skew_diag),
            kurt_diag: wire::vector_to_vec(&s.kurt_diag),
        }
    }
}

/// Moment spec of a vector whose components are independent draws from `ds`.
pub fn independent_joint(ds: &[DistributionSpec]) -> Result<MomentSpec> {
    if ds.is_empty() {
        return Err(GenutError::InvalidArgument(
            "independent_joint needs at least one distribution".into(),
        ));
    }
    let n = ds.len();
    let mut mean = DVector::zeros(n);
    let mut cov = DMatrix::zeros(n, n);
    let mut skew = DVector::zeros(n);
    let mut kurt = DVector::zeros(n);
    for (i, d) in ds.iter().enumerate() {
        let m = moments_of(d)?;
        if m.variance <= 0.0 {
            return Err(GenutError::DegenerateVariance { index: i });
        }
        mean[i] = m.mean;
        cov[(i, i)] = m.variance;
        skew[i] = m.skewness;
        kurt[i] = m.kurtosis;
    }
    MomentSpec::new(mean, cov, skew, kurt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use DistributionSpec::*;

    #[test]
    fn poisson_and_gaussian_rows() {
        let m = moments_of(&Poisson { lambda: 1.5 }).unwrap();
        assert_eq!((m.mean, m.variance, m.skewness, m.kurtosis), (1.5, 1.5, 1.5, 8.25));
        let m = moments_of(&Gaussian { mu: 0.0, sigma2: 1.0 }).unwrap();
        assert_eq!((m.mean, m.variance, m.skewness, m.kurtosis), (0.0, 1.0, 0.0, 3.0));
    }

    #[test]
    fn geometric_half() {
        let m = moments_of(&Geometric { p: 0.5 }).unwrap();
        assert!((m.mean - 1.0).abs() < 1e-15);
        assert!((m.variance - 2.0).abs() < 1e-15);
        assert!((m.skewness - 6.0).abs() < 1e-14);
        // (1-p)(p^2 - 9p + 9)/p^4 = 0.5 * 4.75 / 0.0625
        assert!((m.kurtosis - 38.0).abs() < 1e-13);
    }

    #[test]
    fn weibull_shape_two_uses_gamma_of_half_integers() {
        let m = moments_of(&Weibull { a: 1.0, b: 2.0 }).unwrap();
        let g15 = PI.sqrt() / 2.0;
        assert!((m.mean - g15).abs() < 1e-14);
        assert!((m.variance - (1.0 - g15 * g15)).abs() < 1e-14);
    }

    #[test]
    fn domain_errors_name_parameter() {
        let cases = [
            (Poisson { lambda: 0.0 }, "lambda"),
            (Gaussian { mu: 0.0, sigma2: -1.0 }, "sigma2"),
            (Gamma { a: 1.0, b: 0.0 }, "b"),
            (Binomial { n: 0, p: 0.5 }, "n"),
            (Binomial { n: 3, p: 1.5 }, "p"),
            (Geometric { p: 0.0 }, "p"),
            (NegativeBinomial { r: 2.0, p: 1.0 }, "p"),
            (NegativeBinomial { r: -1.0, p: 0.5 }, "r"),
        ];
        for (d, name) in cases {
            match moments_of(&d) {
                Err(GenutError::ParameterDomain { param, .. }) => assert_eq!(param, name, "{d}"),
                other => panic!("{d}: {other:?}"),
            }
        }
        assert!(moments_of(&Geometric { p: 1.0 }).is_ok());
        assert!(moments_of(&Binomial { n: 2, p: 0.0 }).is_ok());
    }

    #[test]
    fn joint_of_poisson_pair() {
        let spec = independent_joint(&[Poisson { lambda: 1.5 }, Poisson { lambda: 1.0 }]).unwrap();
        assert_eq!(spec.mean().as_slice(), &[1.5, 1.0]);
        assert_eq!(spec.covariance()[(0, 0)], 1.5);
        assert_eq!(spec.covariance()[(1, 1)], 1.0);
        assert_eq!(spec.covariance()[(0, 1)], 0.0);
        assert_eq!(spec.skew_diag().as_slice(), &[1.5, 1.0]);
        assert_eq!(spec.kurt_diag().as_slice(), &[8.25, 4.0]);

        let g = independent_joint(&[Gaussian { mu: 0.0, sigma2: 1.0 }]).unwrap();
        assert_eq!(g.kurt_diag()[0], 3.0);
    }

    #[test]
    fn joint_rejects_degenerate_and_empty() {
        assert!(matches!(
            independent_joint(&[Poisson { lambda: 1.0 }, Binomial { n: 4, p: 1.0 }]),
            Err(GenutError::DegenerateVariance { index: 1 })
        ));
        assert!(matches!(
            independent_joint(&[Geometric { p: 1.0 }]),
            Err(GenutError::DegenerateVariance { index: 0 })
        ));
        assert!(independent_joint(&[]).is_err());
        assert!(matches!(
            independent_joint(&[Poisson { lambda: -1.0 }]),
            Err(GenutError::ParameterDomain { .. })
        ));
    }

    #[test]
    fn json_field_names() {
        let d: DistributionSpec = serde_json::from_str(r#"{"kind":"poisson","lambda":1.5}"#).unwrap();
        assert_eq!(d, Poisson { lambda: 1.5 });
        let d: DistributionSpec = serde_json::from_str(r#"{"kind":"negative_binomial","r":4,"p":0.67}"#).unwrap();
        assert_eq!(d, NegativeBinomial { r: 4.0, p: 0.67 });
        assert!(serde_json::from_str::<DistributionSpec>(r#"{"kind":"poisson","mu":1}"#).is_err());
        let s = serde_json::to_string(&Gaussian { mu: 1.0, sigma2: 4.0 }).unwrap();
        assert_eq!(s, r#"{"kind":"gaussian","mu":1.0,"sigma2":4.0}"#);
    }

    #[test]
    fn moment_spec_json_roundtrip_and_validation() {
        let spec = independent_joint(&[Poisson { lambda: 1.5 }, Rayleigh { sigma: 1.0 }]).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: MomentSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let bad = r#"{"mean":[0,0],"covariance":[[1,0],[0,1]],"skew_diag":[0],"kurt_diag":[3,3]}"#;
        assert!(serde_json::from_str::<MomentSpec>(bad).is_err());
        let bad = r#"{"mean":[0,0],"covariance":[[1,0.5],[0,1]],"skew_diag":[0,0],"kurt_diag":[3,3]}"#;
        assert!(serde_json::from_str::<MomentSpec>(bad).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(Poisson { lambda: 0.1 }.label(), "P(0.1)");
        assert_eq!(NegativeBinomial { r: 4.0, p: 0.67 }.label(), "NB(4, 0.67)");
        assert_eq!(Gaussian { mu: 1.0, sigma2: 4.0 }.label(), "N(1, 4)");
    }
}
