//! Closed-form moments checked against direct numerical integration and
//! brute-force pmf sums computed independently of the library.

use std::f64::consts::PI;

use genut::{moments_of, DistributionSpec, UnivariateMoments};
use proptest::prelude::*;
use DistributionSpec::*;

/// Central moments `[mean, m2, m3, m4]` of a weighted point set.
fn central(points: impl Iterator<Item = (f64, f64)> + Clone) -> [f64; 4] {
    let mass: f64 = points.clone().map(|(_, w)| w).sum();
    let mean = points.clone().map(|(x, w)| w * x).sum::<f64>() / mass;
    let m = |k: i32| points.clone().map(|(x, w)| w * (x - mean).powi(k)).sum::<f64>() / mass;
    [mean, m(2), m(3), m(4)]
}

/// Composite Simpson nodes for `∫_0^upper h(x) dx` after `x = t²`.
fn simpson_sq(pdf: impl Fn(f64) -> f64 + Copy, upper: f64, steps: usize) -> impl Iterator<Item = (f64, f64)> + Clone {
    let t_max = upper.sqrt();
    let h = t_max / steps as f64;
    (0..=steps).map(move |i| {
        let t = i as f64 * h;
        let c = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let x = t * t;
        // the transformed integrand has a finite limit at t = 0
        let te = t.max(1e-150);
        let d = pdf(te * te) * 2.0 * te;
        (x, c * h / 3.0 * d)
    })
}

fn simpson_line(
    pdf: impl Fn(f64) -> f64 + Copy,
    lo: f64,
    hi: f64,
    steps: usize,
) -> impl Iterator<Item = (f64, f64)> + Clone {
    let h = (hi - lo) / steps as f64;
    (0..=steps).map(move |i| {
        let x = lo + i as f64 * h;
        let c = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        (x, c * h / 3.0 * pdf(x))
    })
}

fn pmf_points(pmf: Vec<f64>) -> impl Iterator<Item = (f64, f64)> + Clone {
    pmf.into_iter().enumerate().map(|(k, p)| (k as f64, p))
}

fn assert_moments(d: &DistributionSpec, oracle: [f64; 4], tol: f64) {
    let UnivariateMoments {
        mean,
        variance,
        skewness,
        kurtosis,
    } = moments_of(d).unwrap();
    let got = [mean, variance, skewness, kurtosis];
    for (k, (g, o)) in got.iter().zip(oracle).enumerate() {
        let scale = o.abs().max(1.0);
        assert!(
            (g - o).abs() <= tol * scale,
            "{d} moment {k}: closed form {g}, oracle {o}"
        );
    }
}

type Pdf = Box<dyn Fn(f64) -> f64>;

#[test]
fn continuous_rows_match_integration() {
    let steps = 400_000;
    let cases: Vec<(DistributionSpec, Pdf)> = vec![
        (Exponential { lambda: 2.0 }, Box::new(|x| 2.0 * (-2.0 * x).exp())),
        (Gamma { a: 1.0, b: 2.0 }, Box::new(|x| (-x / 2.0).exp() / 2.0)),
        (
            Gamma { a: 0.5, b: 0.5 },
            Box::new(|x| x.powf(-0.5) * (-2.0 * x).exp() / (PI.sqrt() * 0.5f64.sqrt())),
        ),
        (Weibull { a: 1.0, b: 2.0 }, Box::new(|x| 2.0 * x * (-x * x).exp())),
        (
            Weibull { a: 2.0, b: 1.5 },
            Box::new(|x| 0.75 * (x / 2.0).sqrt() * (-(x / 2.0).powf(1.5)).exp()),
        ),
        (Rayleigh { sigma: 1.0 }, Box::new(|x| x * (-x * x / 2.0).exp())),
        (Rayleigh { sigma: 0.7 }, Box::new(|x| x / 0.49 * (-x * x / 0.98).exp())),
    ];
    for (d, pdf) in &cases {
        let oracle = central(simpson_sq(pdf, 400.0, steps));
        assert_moments(d, oracle, 1e-8);
    }

    let beta = |x: f64| 60.0 * x * x * (1.0 - x).powi(3);
    assert_moments(
        &Beta { a: 3.0, b: 4.0 },
        central(simpson_line(beta, 0.0, 1.0, 20_000)),
        1e-10,
    );

    for (mu, s2) in [(1.0, 4.0), (1.57, 0.1)] {
        let sd = f64::sqrt(s2);
        let pdf = move |x: f64| (-(x - mu).powi(2) / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt();
        let oracle = central(simpson_line(pdf, mu - 40.0 * sd, mu + 40.0 * sd, 200_000));
        assert_moments(&Gaussian { mu, sigma2: s2 }, oracle, 1e-10);
    }
}

fn poisson_pmf(lambda: f64, len: usize) -> Vec<f64> {
    let mut p = vec![(-lambda).exp()];
    for k in 1..len {
        let prev = p[k - 1];
        p.push(prev * lambda / k as f64);
    }
    p
}

fn binomial_pmf(n: u32, q: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let choose: f64 = (1..=k).map(|i| (n - k + i) as f64 / i as f64).product();
            choose * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32)
        })
        .collect()
}

fn negative_binomial_pmf(r: f64, q: f64, len: usize) -> Vec<f64> {
    let mut p = vec![q.powf(r)];
    for k in 1..len {
        let prev = p[k - 1];
        p.push(prev * (k as f64 - 1.0 + r) / k as f64 * (1.0 - q));
    }
    p
}

#[test]
fn discrete_rows_match_pmf_sums() {
    for lambda in [0.1, 2.0, 10.0] {
        assert_moments(
            &Poisson { lambda },
            central(pmf_points(poisson_pmf(lambda, 200))),
            1e-10,
        );
    }
    for (n, q) in [(3, 0.3), (10, 0.8)] {
        assert_moments(&Binomial { n, p: q }, central(pmf_points(binomial_pmf(n, q))), 1e-10);
    }
    for q in [0.5f64, 0.7] {
        let pmf: Vec<f64> = (0..2000).map(|k| q * (1.0 - q).powi(k)).collect();
        assert_moments(&Geometric { p: q }, central(pmf_points(pmf)), 1e-10);
    }
    for (r, q) in [(4.0, 0.67), (0.4, 0.67), (2.5, 0.3)] {
        assert_moments(
            &NegativeBinomial { r, p: q },
            central(pmf_points(negative_binomial_pmf(r, q, 5000))),
            1e-9,
        );
    }
}

fn any_distribution() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (-10.0..10.0f64, 0.01..20.0f64).prop_map(|(mu, sigma2)| Gaussian { mu, sigma2 }),
        (0.05..20.0f64).prop_map(|lambda| Exponential { lambda }),
        (0.05..20.0f64, 0.05..5.0f64).prop_map(|(a, b)| Gamma { a, b }),
        (0.1..5.0f64, 0.3..8.0f64).prop_map(|(a, b)| Weibull { a, b }),
        (0.05..5.0f64).prop_map(|sigma| Rayleigh { sigma }),
        (0.1..20.0f64, 0.1..20.0f64).prop_map(|(a, b)| Beta { a, b }),
        (1u32..50, 0.01..0.99f64).prop_map(|(n, p)| Binomial { n, p }),
        (0.01..50.0f64).prop_map(|lambda| Poisson { lambda }),
        (0.01..0.99f64).prop_map(|p| Geometric { p }),
        (0.1..20.0f64, 0.01..0.99f64).prop_map(|(r, p)| NegativeBinomial { r, p }),
    ]
}

proptest! {
    // standardized kurtosis is at least squared standardized skewness plus one
    #[test]
    fn pearson_inequality(d in any_distribution()) {
        let m = moments_of(&d).unwrap();
        let beta2 = m.kurtosis / m.variance.powi(2);
        let gamma1 = m.skewness / m.variance.powf(1.5);
        prop_assert!(m.variance > 0.0);
        prop_assert!(beta2 >= gamma1 * gamma1 + 1.0 - 1e-9 * beta2.max(1.0), "{d}: {beta2} vs {gamma1}");
    }

    #[test]
    fn raw_moments_reconstruct_central(d in any_distribution()) {
        let m = moments_of(&d).unwrap();
        let [m1, m2, m3, m4] = m.raw();
        let c2 = m2 - m1 * m1;
        let c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);
        prop_assert!((c2 - m.variance).abs() <= 1e-8 * m2.abs().max(1.0));
        prop_assert!((c3 - m.skewness).abs() <= 1e-7 * m3.abs().max(1.0));
        prop_assert_eq!(m1, m.mean);
        let _ = m4;
    }
}

#[test]
fn out_of_domain_parameters_are_rejected() {
    for d in [
        Gaussian { mu: 0.0, sigma2: 0.0 },
        Exponential { lambda: -1.0 },
        Gamma { a: 0.0, b: 1.0 },
        Weibull { a: 1.0, b: f64::NAN },
        Rayleigh { sigma: 0.0 },
        Beta { a: 1.0, b: -2.0 },
        Binomial { n: 3, p: 1.5 },
        Poisson { lambda: 0.0 },
        Geometric { p: 0.0 },
        NegativeBinomial { r: 1.0, p: 1.2 },
    ] {
        assert!(moments_of(&d).is_err(), "{d:?}");
    }
}

#[test]
fn sampled_rayleigh_and_poisson_moments_agree() {
    let n = 1_000_000;
    for d in [Rayleigh { sigma: 1.0 }, Poisson { lambda: 0.1 }] {
        let batch = genut::sample(&d, n, 42).unwrap();
        let xs: Vec<f64> = batch.draws.row(0).iter().copied().collect();
        let m = moments_of(&d).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let se_mean = (m.variance / n as f64).sqrt();
        let se_var = ((m.kurtosis - m.variance.powi(2)) / n as f64).sqrt();
        assert!((mean - m.mean).abs() < 3.0 * se_mean, "{d}: mean {mean}");
        assert!((var - m.variance).abs() < 3.0 * se_var, "{d}: variance {var}");
    }
}
