//! Seeded Monte Carlo sampling and empirical truth estimates.
//!
//! Draws are produced in fixed-size chunks. Chunk `c` of coordinate `j` uses
//! a ChaCha8 generator keyed by `derive_seed(seed, j)` on stream `c`, so the
//! output does not depend on how chunks are scheduled across threads.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GenutError, Result};
use crate::moments::DistributionSpec;
use crate::propagation::{TransformFn, TransformResult, EIGENVALUE_FLOOR};
use crate::wire;

/// Identifier of the generator and stream layout recorded in outputs.
pub const GENERATOR_ID: &str = "chacha8-stream-chunk65536";

/// Draws per independent stream.
pub const CHUNK: usize = 65_536;

/// Default draw count for truth estimates.
pub const DEFAULT_TRUTH_DRAWS: usize = 10_000_000;

/// Default draw count for comparison columns.
pub const DEFAULT_COMPARISON_DRAWS: usize = 100_000;

/// SplitMix64 finalizer applied to `seed` and an index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_rng(seed: u64, coord: usize, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, coord as u64));
    rng.set_stream(chunk as u64);
    rng
}

enum Sampler {
    Normal(rand_distr::Normal<f64>),
    Exponential(f64),
    Gamma(rand_distr::Gamma<f64>),
    Weibull { scale: f64, shape: f64 },
    Rayleigh(f64),
    Beta(rand_distr::Beta<f64>),
    Binomial(rand_distr::Binomial),
    Poisson(f64),
    Geometric(f64),
    NegativeBinomial(rand_distr::Gamma<f64>),
}

fn distr_err(param: &'static str, value: f64, domain: &'static str) -> GenutError {
    GenutError::ParameterDomain { param, value, domain }
}

// Poisson draws by sequential inversion below 30, library sampler above.
fn poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    if lambda < 30.0 {
        let u: f64 = rng.random();
        let mut k = 0.0;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u > cdf {
            k += 1.0;
            p *= lambda / k;
            let next = cdf + p;
            if next == cdf {
                break;
            }
            cdf = next;
        }
        k
    } else {
        rand_distr::Poisson::new(lambda)
            .map(|d| d.sample(rng))
            .unwrap_or(lambda)
    }
}

impl Sampler {
    fn new(d: &DistributionSpec) -> Result<Self> {
        use DistributionSpec::*;
        d.validate()?;
        Ok(match *d {
            Gaussian { mu, sigma2 } => Sampler::Normal(
                rand_distr::Normal::new(mu, sigma2.sqrt()).map_err(|_| distr_err("sigma2", sigma2, "> 0"))?,
            ),
            Exponential { lambda } => Sampler::Exponential(lambda),
            Gamma { a, b } => Sampler::Gamma(rand_distr::Gamma::new(a, b).map_err(|_| distr_err("a", a, "> 0"))?),
            Weibull { a, b } => Sampler::Weibull { scale: a, shape: b },
            Rayleigh { sigma } => Sampler::Rayleigh(sigma),
            Beta { a, b } => Sampler::Beta(rand_distr::Beta::new(a, b).map_err(|_| distr_err("a", a, "> 0"))?),
            Binomial { n, p } => {
                Sampler::Binomial(rand_distr::Binomial::new(n as u64, p).map_err(|_| distr_err("p", p, "[0, 1]"))?)
            }
            Poisson { lambda } => Sampler::Poisson(lambda),
            Geometric { p } => Sampler::Geometric(p),
            NegativeBinomial { r, p } => Sampler::NegativeBinomial(
                rand_distr::Gamma::new(r, (1.0 - p) / p).map_err(|_| distr_err("r", r, "> 0"))?,
            ),
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // 1 - U lies in (0, 1], so the logarithms below are finite.
        let tail = |rng: &mut R| -> f64 { -(1.0 - rng.random::<f64>()).ln() };
        match self {
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Exponential(lambda) => tail(rng) / lambda,
            Sampler::Gamma(d) => d.sample(rng),
            Sampler::Weibull { scale, shape } => scale * tail(rng).powf(1.0 / shape),
            Sampler::Rayleigh(sigma) => sigma * (2.0 * tail(rng)).sqrt(),
            Sampler::Beta(d) => d.sample(rng),
            Sampler::Binomial(d) => d.sample(rng) as f64,
            Sampler::Poisson(lambda) => poisson(*lambda, rng),
            Sampler::Geometric(p) => {
                if *p >= 1.0 {
                    0.0
                } else {
                    (tail(rng) / -(1.0 - p).ln()).floor()
                }
            }
            Sampler::NegativeBinomial(g) => {
                let rate = g.sample(rng);
                poisson(rate, rng)
            }
        }
    }
}

/// Draws from one or more independent distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    /// `n × N`, one column per joint draw.
    #[serde(serialize_with = "ser_mat")]
    pub draws: DMatrix<f64>,
    pub seed: u64,
    pub generator_id: String,
}

fn ser_mat<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(wire::matrix_to_rows(m))
}

fn ser_vec<S: serde::Serializer>(v: &DVector<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(GenutError::InvalidArgument("draw count must be at least 1".into()));
    }
    Ok(())
}

fn chunk_bounds(total: usize, chunk: usize) -> (usize, usize) {
    let start = chunk * CHUNK;
    (start, (start + CHUNK).min(total))
}

/// `N` i.i.d. draws from `d`.
pub fn sample(d: &DistributionSpec, n: usize, seed: u64) -> Result<SampleBatch> {
    sample_joint(std::slice::from_ref(d), n, seed)
}

/// `N` joint draws with independent coordinates; coordinate 0 matches
/// [`sample`] with the same seed.
pub fn sample_joint(ds: &[DistributionSpec], n: usize, seed: u64) -> Result<SampleBatch> {
    check_count(n)?;
    if ds.is_empty() {
        return Err(GenutError::InvalidArgument(
            "at least one distribution is required".into(),
        ));
    }
    let samplers = ds.iter().map(Sampler::new).collect::<Result<Vec<_>>>()?;
    let dim = ds.len();
    let mut draws = DMatrix::zeros(dim, n);
    let chunks = n.div_ceil(CHUNK);
    let blocks: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| fill_chunk(&samplers, seed, c, n))
        .collect();
    for (c, block) in blocks.into_iter().enumerate() {
        let (start, end) = chunk_bounds(n, c);
        for (k, col) in (start..end).enumerate() {
            for j in 0..dim {
                draws[(j, col)] = block[k * dim + j];
            }
        }
    }
    Ok(SampleBatch {
        draws,
        seed,
        generator_id: GENERATOR_ID.to_string(),
    })
}

// Column-major block of draws `dim × len` for one chunk.
fn fill_chunk(samplers: &[Sampler], seed: u64, chunk: usize, total: usize) -> Vec<f64> {
    let (start, end) = chunk_bounds(total, chunk);
    let len = end - start;
    let dim = samplers.len();
    let mut out = vec![0.0; dim * len];
    for (j, s) in samplers.iter().enumerate() {
        let mut rng = chunk_rng(seed, j, chunk);
        for k in 0..len {
            out[k * dim + j] = s.draw(&mut rng);
        }
    }
    out
}

/// Monte Carlo estimate of the statistics of `f(x)` together with standard
/// errors of the mean and covariance entries.
#[derive(Debug, Clone, Serialize)]
pub struct McTruth {
    #[serde(flatten)]
    pub result: TransformResult,
    #[serde(serialize_with = "ser_vec")]
    pub mean_se: DVector<f64>,
    #[serde(serialize_with = "ser_mat")]
    pub covariance_se: DMatrix<f64>,
    pub draws: usize,
    pub seed: u64,
    pub generator_id: String,
}

struct Moments {
    count: f64,
    sum: DVector<f64>,
    // central sums about a supplied centre
    m2: DMatrix<f64>,
    m22: DMatrix<f64>,
    m3: DVector<f64>,
}

impl Moments {
    fn zeros(m: usize) -> Self {
        Moments {
            count: 0.0,
            sum: DVector::zeros(m),
            m2: DMatrix::zeros(m, m),
            m22: DMatrix::zeros(m, m),
            m3: DVector::zeros(m),
        }
    }

    fn add(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += &other.sum;
        self.m2 += &other.m2;
        self.m22 += &other.m22;
        self.m3 += &other.m3;
    }
}

fn eval_chunk(
    samplers: &[Sampler],
    f: &TransformFn,
    seed: u64,
    chunk: usize,
    total: usize,
    centre: Option<&DVector<f64>>,
) -> Result<Moments> {
    let dim = samplers.len();
    let m = f.output_dim();
    let block = fill_chunk(samplers, seed, chunk, total);
    let (start, _) = chunk_bounds(total, chunk);
    let mut acc = Moments::zeros(m);
    let mut d = vec![0.0; m];
    for (k, x) in block.chunks_exact(dim).enumerate() {
        let y = f.eval(x);
        if y.len() != m {
            return Err(GenutError::DimensionMismatch {
                what: "transform output",
                expected: m,
                found: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GenutError::Evaluation { index: start + k });
        }
        acc.count += 1.0;
        match centre {
            None => {
                for (s, v) in acc.sum.iter_mut().zip(&y) {
                    *s += v;
                }
            }
            Some(c) => {
                for i in 0..m {
                    d[i] = y[i] - c[i];
                }
                for i in 0..m {
                    acc.m3[i] += d[i] * d[i] * d[i];
                    for j in 0..m {
                        let p = d[i] * d[j];
                        acc.m2[(i, j)] += p;
                        acc.m22[(i, j)] += p * p;
                    }
                }
            }
        }
    }
    Ok(acc)
}

fn reduce(
    samplers: &[Sampler],
    f: &TransformFn,
    seed: u64,
    n: usize,
    centre: Option<&DVector<f64>>,
) -> Result<Moments> {
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| eval_chunk(samplers, f, seed, c, n, centre))
        .collect();
    let mut total = Moments::zeros(f.output_dim());
    for p in parts {
        total.add(&p?);
    }
    Ok(total)
}

/// Empirical mean, covariance, and diagonal third/fourth central moments of
/// `f` over `N` joint draws of independent coordinates `ds`.
///
/// Two passes over the same deterministic streams: the first for the mean,
/// the second for central sums about it.
pub fn mc_truth(ds: &[DistributionSpec], f: &TransformFn, n: usize, seed: u64) -> Result<McTruth> {
    check_count(n)?;
    if ds.len() != f.input_dim() {
        return Err(GenutError::DimensionMismatch {
            what: "transform input dimension",
            expected: f.input_dim(),
            found: ds.len(),
        });
    }
    let samplers = ds.iter().map(Sampler::new).collect::<Result<Vec<_>>>()?;
    let first = reduce(&samplers, f, seed, n, None)?;
    let count = first.count;
    let mean = first.sum / count;
    let second = reduce(&samplers, f, seed, n, Some(&mean))?;

    let covariance = &second.m2 / count;
    let m22 = &second.m22 / count;
    let skew_diag = &second.m3 / count;
    let kurt_diag = m22.diagonal();
    let m = mean.len();
    let mean_se = DVector::from_fn(m, |i, _| (covariance[(i, i)].max(0.0) / count).sqrt());
    let covariance_se = DMatrix::from_fn(m, m, |i, j| {
        ((m22[(i, j)] - covariance[(i, j)].powi(2)).max(0.0) / count).sqrt()
    });
    let lowest = crate::linalg::min_eigenvalue(&covariance);
    let result = TransformResult {
        mean,
        covariance,
        skew_diag,
        kurt_diag,
        transformed_points: DMatrix::zeros(0, 0),
        min_eigenvalue: (lowest < EIGENVALUE_FLOOR).then_some(lowest),
    };
    Ok(McTruth {
        result,
        mean_se,
        covariance_se,
        draws: n,
        seed,
        generator_id: GENERATOR_ID.to_string(),
    })
}
