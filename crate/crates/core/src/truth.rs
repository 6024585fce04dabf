//! Reference expectations: characteristic functions and exact moments of
//! simple transforms, used as truth for the reproduction tables.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::moments::{moments_of, DistributionSpec};
use crate::quadrature;

const QUAD_TOL: f64 = 1e-13;

/// Density of a continuous distribution; `None` for discrete ones.
pub fn density(d: &DistributionSpec, x: f64) -> Option<f64> {
    use DistributionSpec::*;
    let v = match *d {
        Gaussian { mu, sigma2 } => (-(x - mu).powi(2) / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2).sqrt(),
        Exponential { lambda } => {
            if x < 0.0 {
                0.0
            } else {
                lambda * (-lambda * x).exp()
            }
        }
        Gamma { a, b } => {
            if x <= 0.0 {
                0.0
            } else {
                ((a - 1.0) * x.ln() - x / b - a * b.ln()).exp() / crate::special::gamma(a)
            }
        }
        Weibull { a, b } => {
            if x < 0.0 {
                0.0
            } else {
                b / a * (x / a).powf(b - 1.0) * (-(x / a).powf(b)).exp()
            }
        }
        Rayleigh { sigma } => {
            if x < 0.0 {
                0.0
            } else {
                x / (sigma * sigma) * (-x * x / (2.0 * sigma * sigma)).exp()
            }
        }
        Beta { a, b } => {
            if x <= 0.0 || x >= 1.0 {
                0.0
            } else {
                use crate::special::gamma;
                gamma(a + b) / (gamma(a) * gamma(b)) * x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0)
            }
        }
        _ => return None,
    };
    Some(v)
}

/// Kummer's series `₁F₁(a; c; z)` for moderate `|z|`.
fn hypergeometric_1f1(a: f64, c: f64, z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..10_000 {
        let k = k as f64;
        term *= z * ((a + k) / ((c + k) * (k + 1.0)));
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `E[e^{itX}]`. Closed forms where they exist, Kummer's series for Beta,
/// and adaptive quadrature of the density for Weibull and Rayleigh.
pub fn characteristic_function(d: &DistributionSpec, t: f64) -> Result<Complex64> {
    use DistributionSpec::*;
    d.validate()?;
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let eit = (i * t).exp();
    Ok(match *d {
        Gaussian { mu, sigma2 } => (i * mu * t - sigma2 * t * t / 2.0).exp(),
        Exponential { lambda } => lambda / (lambda - i * t),
        Gamma { a, b } => (one - i * b * t).powf(-a),
        Poisson { lambda } => (lambda * (eit - 1.0)).exp(),
        Geometric { p } => p / (one - (1.0 - p) * eit),
        NegativeBinomial { r, p } => (p / (one - (1.0 - p) * eit)).powf(r),
        Binomial { n, p } => (one * (1.0 - p) + p * eit).powu(n),
        Beta { a, b } => hypergeometric_1f1(a, a + b, i * t),
        Weibull { .. } | Rayleigh { .. } => {
            let pdf = |x: f64| density(d, x).unwrap_or(0.0);
            let re = quadrature::integrate_to_infinity(|x| pdf(x) * (t * x).cos(), 0.0, QUAD_TOL);
            let im = quadrature::integrate_to_infinity(|x| pdf(x) * (t * x).sin(), 0.0, QUAD_TOL);
            Complex64::new(re, im)
        }
    })
}

/// Exact mean and variance of a scalar statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarTruth {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of `sin X`:
/// `E[sin X] = Im φ(1)`, `Var = (1 - Re φ(2)) / 2 - E[sin X]²`.
pub fn sin_truth(d: &DistributionSpec) -> Result<ScalarTruth> {
    let mean = characteristic_function(d, 1.0)?.im;
    let second = (1.0 - characteristic_function(d, 2.0)?.re) / 2.0;
    Ok(ScalarTruth {
        mean,
        variance: second - mean * mean,
    })
}

/// Mean and variance of `αX + βX²` from raw moments up to order four.
pub fn quadratic_truth(d: &DistributionSpec, alpha: f64, beta: f64) -> Result<ScalarTruth> {
    let [m1, m2, m3, m4] = moments_of(d)?.raw();
    let mean = alpha * m1 + beta * m2;
    let second = alpha * alpha * m2 + 2.0 * alpha * beta * m3 + beta * beta * m4;
    Ok(ScalarTruth {
        mean,
        variance: second - mean * mean,
    })
}

/// Poisson probabilities `P(0), P(1), …`, truncated once the remaining tail
/// mass is provably below `tail`.
pub fn poisson_pmf_table(lambda: f64, tail: f64) -> Vec<f64> {
    let mut pmf = vec![(-lambda).exp()];
    let mut k = 0.0;
    loop {
        let p = *pmf.last().expect("non-empty");
        // for k + 1 > λ the mass beyond k is at most p·λ / (k + 1 − λ)
        if k + 1.0 > lambda && p * lambda / (k + 1.0 - lambda) < tail {
            break;
        }
        k += 1.0;
        pmf.push(p * lambda / k);
    }
    pmf
}

/// Mean and covariance of `f(X₁, X₂)` for independent Poisson components by
/// direct summation over the joint pmf.
pub fn independent_poisson_pair_moments<F>(lambda: [f64; 2], f: F) -> ([f64; 2], [[f64; 2]; 2])
where
    F: Fn(f64, f64) -> [f64; 2],
{
    let p1 = poisson_pmf_table(lambda[0], 1e-16);
    let p2 = poisson_pmf_table(lambda[1], 1e-16);
    let mut mean = [0.0; 2];
    for (k1, &a) in p1.iter().enumerate() {
        for (k2, &b) in p2.iter().enumerate() {
            let y = f(k1 as f64, k2 as f64);
            mean[0] += a * b * y[0];
            mean[1] += a * b * y[1];
        }
    }
    let mut cov = [[0.0; 2]; 2];
    for (k1, &a) in p1.iter().enumerate() {
        for (k2, &b) in p2.iter().enumerate() {
            let y = f(k1 as f64, k2 as f64);
            let d = [y[0] - mean[0], y[1] - mean[1]];
            for r in 0..2 {
                for c in 0..2 {
                    cov[r][c] += a * b * d[r] * d[c];
                }
            }
        }
    }
    (mean, cov)
}

/// Mean and covariance of `(sin(XR), cos(XR))` with `X ~ Poisson(λ)` and
/// `R ~ Rayleigh(σ)` independent: a Poisson sum of Rayleigh quadratures.
pub fn poisson_rayleigh_sin_cos(lambda: f64, sigma: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let pmf = poisson_pmf_table(lambda, 1e-16);
    let ray = DistributionSpec::Rayleigh { sigma };
    let expect = |g: &dyn Fn(f64) -> f64| -> f64 {
        pmf.iter()
            .enumerate()
            .map(|(k, &p)| {
                let k = k as f64;
                p * quadrature::integrate_to_infinity(|r| density(&ray, r).unwrap_or(0.0) * g(k * r), 0.0, QUAD_TOL)
            })
            .sum()
    };
    let es = expect(&|z| z.sin());
    let ec = expect(&|z| z.cos());
    let ess = expect(&|z| z.sin() * z.sin());
    let ecc = expect(&|z| z.cos() * z.cos());
    let esc = expect(&|z| z.sin() * z.cos());
    let cross = esc - es * ec;
    ([es, ec], [[ess - es * es, cross], [cross, ecc - ec * ec]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use DistributionSpec::*;

    #[test]
    fn characteristic_function_at_zero_is_one() {
        for d in [
            Gaussian { mu: 1.0, sigma2: 4.0 },
            Exponential { lambda: 2.0 },
            Gamma { a: 0.5, b: 0.5 },
            Weibull { a: 1.0, b: 2.0 },
            Rayleigh { sigma: 1.0 },
            Beta { a: 3.0, b: 4.0 },
            Binomial { n: 3, p: 0.3 },
            Poisson { lambda: 0.1 },
            Geometric { p: 0.7 },
            NegativeBinomial { r: 0.4, p: 0.67 },
        ] {
            let phi = characteristic_function(&d, 0.0).unwrap();
            assert!((phi - Complex64::new(1.0, 0.0)).norm() < 1e-10, "{d}: {phi}");
        }
    }

    #[test]
    fn beta_series_agrees_with_quadrature() {
        let d = Beta { a: 3.0, b: 4.0 };
        let phi = characteristic_function(&d, 2.0).unwrap();
        let re = quadrature::integrate(|x| density(&d, x).unwrap() * (2.0 * x).cos(), 0.0, 1.0, 1e-14);
        let im = quadrature::integrate(|x| density(&d, x).unwrap() * (2.0 * x).sin(), 0.0, 1.0, 1e-14);
        assert!((phi.re - re).abs() < 1e-12 && (phi.im - im).abs() < 1e-12);
    }

    #[test]
    fn poisson_sin_mean_matches_series() {
        let lambda = 0.1f64;
        let series: f64 = poisson_pmf_table(lambda, 1e-16)
            .iter()
            .enumerate()
            .map(|(k, p)| p * (k as f64).sin())
            .sum();
        let t = sin_truth(&Poisson { lambda }).unwrap();
        assert!((t.mean - series).abs() < 1e-15);
    }

    #[test]
    fn pmf_table_is_short_and_complete() {
        let t = poisson_pmf_table(0.1, 1e-16);
        assert!(t.len() < 15, "{}", t.len());
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let t = poisson_pmf_table(10.0, 1e-16);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_truth_poisson_two() {
        let t = quadratic_truth(&Poisson { lambda: 2.0 }, 3.0, 2.0).unwrap();
        assert!((t.mean - 18.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_pair_identity_moments() {
        let (m, c) = independent_poisson_pair_moments([10.0, 2.0], |a, b| [a, b]);
        assert!((m[0] - 10.0).abs() < 1e-12 && (m[1] - 2.0).abs() < 1e-12);
        assert!((c[0][0] - 10.0).abs() < 1e-10 && (c[1][1] - 2.0).abs() < 1e-12);
        assert!(c[0][1].abs() < 1e-12);
    }

    #[test]
    fn poisson_rayleigh_pair_reference_values() {
        let (m, c) = poisson_rayleigh_sin_cos(0.1, 1.0);
        assert!((m[0] - 0.070_324_41).abs() < 1e-7 && (m[1] - 0.928_446_45).abs() < 1e-7);
        assert!((c[0][0] - 0.055_489_3).abs() < 1e-6);
        assert!((c[0][1] + 0.049_941).abs() < 1e-6);
        assert!((c[1][1] - 0.077_552_37).abs() < 1e-7);
    }
}
