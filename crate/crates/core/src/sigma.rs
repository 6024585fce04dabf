//! Moment-matched sigma points and their box-constrained variant.
//!
//! A set holds `2n + 1` weighted points:
//!
//! ```text
//! χ[0]     = x̄                 w0 = 1 - Σ w'ᵢ - Σ w''ᵢ
//! χ[i]     = x̄ - uᵢ·√P[i]       w'ᵢ  = w''ᵢ vᵢ / uᵢ
//! χ[i + n] = x̄ + vᵢ·√P[i]       w''ᵢ = 1 / (vᵢ (uᵢ + vᵢ))
//! ```
//!
//! with `v = u + s` where `s = d^{⊙-3} ⊙ S̆` is the standardized diagonal
//! skewness and `d` is the diagonal of the square-root factor. For a
//! diagonal covariance `d` holds the marginal standard deviations and every
//! diagonal skewness/kurtosis component is matched exactly. For a correlated
//! covariance only the mean and covariance are exact; the diagonal
//! higher-order components are matched only along the first axis.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GenutError, Result};
use crate::linalg::{self, SqrtMethod};
use crate::moments::MomentSpec;
use crate::wire;

/// Tolerance on `Σ w = 1` accepted when loading a set from JSON.
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// `2n + 1` weighted sigma points. Column `i` of `points` is `χ[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SigmaPointSetWire", into = "SigmaPointSetWire")]
pub struct SigmaPointSet {
    points: DMatrix<f64>,
    weights: DVector<f64>,
    u: DVector<f64>,
    v: DVector<f64>,
}

impl SigmaPointSet {
    /// Builds a set from the mean, a square-root factor and the free
    /// parameters, computing the weights as in the table above.
    pub(crate) fn assemble(
        mean: &DVector<f64>,
        sqrt_factor: &DMatrix<f64>,
        u: DVector<f64>,
        v: DVector<f64>,
    ) -> Result<Self> {
        let n = mean.len();
        check_positive(&u, &v)?;
        let ones = DVector::from_element(n, 1.0);
        let w2 = linalg::hadamard_div(&linalg::hadamard_div(&ones, &v)?, &(&u + &v))?;
        let w1 = linalg::hadamard_div(&w2.component_mul(&v), &u)?;

        let mut weights = DVector::zeros(2 * n + 1);
        let mut points = DMatrix::zeros(n, 2 * n + 1);
        points.set_column(0, mean);
        for i in 0..n {
            let col = sqrt_factor.column(i);
            points.set_column(1 + i, &(mean - col * u[i]));
            points.set_column(1 + n + i, &(mean + col * v[i]));
            weights[1 + i] = w1[i];
            weights[1 + n + i] = w2[i];
        }
        let tail: f64 = weights.iter().skip(1).sum();
        weights[0] = 1.0 - tail;
        Ok(SigmaPointSet { points, weights, u, v })
    }

    /// Builds a set from explicit points and weights, as used by the
    /// symmetric baseline transform.
    pub(crate) fn from_parts(points: DMatrix<f64>, weights: DVector<f64>, u: DVector<f64>, v: DVector<f64>) -> Self {
        SigmaPointSet { points, weights, u, v }
    }

    /// State dimension `n`.
    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    /// Number of points, `2n + 1`.
    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    /// `n × (2n + 1)` matrix of points.
    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.column(i).into_owned()
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }

    /// Column `i` of the square-root factor the points were placed along,
    /// recovered from the opposing pair of points.
    fn factor_column(&self, i: usize) -> DVector<f64> {
        let n = self.dim();
        (self.points.column(1 + n + i) - self.points.column(1 + i)) / (self.u[i] + self.v[i])
    }

    pub(crate) fn sqrt_factor(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut f = DMatrix::zeros(n, n);
        for i in 0..n {
            f.set_column(i, &self.factor_column(i));
        }
        f
    }
}

fn check_positive(u: &DVector<f64>, v: &DVector<f64>) -> Result<()> {
    if let Some((index, &value)) = u.iter().enumerate().find(|(_, &x)| !(x > 0.0 && x.is_finite())) {
        return Err(GenutError::NonPositiveU { index, value });
    }
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, &x)| !(x > 0.0 && x.is_finite())) {
        return Err(GenutError::InfeasibleV { index, value });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SigmaPointSetWire {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl TryFrom<SigmaPointSetWire> for SigmaPointSet {
    type Error = GenutError;

    fn try_from(w: SigmaPointSetWire) -> Result<Self> {
        let points = wire::rows_to_matrix(&w.points, "points rows")?;
        let n = points.nrows();
        for (what, expected, found) in [
            ("points columns", 2 * n + 1, points.ncols()),
            ("weights length", 2 * n + 1, w.weights.len()),
            ("u length", n, w.u.len()),
            ("v length", n, w.v.len()),
        ] {
            if expected != found {
                return Err(GenutError::DimensionMismatch { what, expected, found });
            }
        }
        let weights = DVector::from_vec(w.weights);
        linalg::ensure_finite_matrix(&points, "points")?;
        linalg::ensure_finite_vector(&weights, "weights")?;
        let sum: f64 = weights.sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(GenutError::InvalidArgument(format!("weights sum to {sum}, expected 1")));
        }
        let (u, v) = (DVector::from_vec(w.u), DVector::from_vec(w.v));
        check_positive(&u, &v)?;
        Ok(SigmaPointSet { points, weights, u, v })
    }
}

impl From<SigmaPointSet> for SigmaPointSetWire {
    fn from(s: SigmaPointSet) -> Self {
        SigmaPointSetWire {
            points: wire::matrix_to_rows(&s.points),
            weights: wire::vector_to_vec(&s.weights),
            u: wire::vector_to_vec(&s.u),
            v: wire::vector_to_vec(&s.v),
        }
    }
}

/// How the free parameter `u` is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum UChoice {
    /// Solve for `u` so the diagonal kurtosis is matched; fails if infeasible.
    MatchKurtosis,
    /// Match kurtosis where feasible, otherwise `uᵢ = max(0, -sᵢ) + 1`.
    Default,
    /// Caller-supplied `u`.
    Explicit(DVector<f64>),
}

impl std::str::FromStr for UChoice {
    type Err = GenutError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "match-kurtosis" => Ok(UChoice::MatchKurtosis),
            "default" => Ok(UChoice::Default),
            list => {
                let values = list
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| GenutError::InvalidArgument(format!("bad u list `{list}`: {e}")))?;
                Ok(UChoice::Explicit(DVector::from_vec(values)))
            }
        }
    }
}

/// Per-component outcome of the kurtosis feasibility inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: Vec<bool>,
    /// `K̆ᵢ - dᵢ⁴ sᵢ²`; strictly positive iff component `i` is feasible.
    pub margin: Vec<f64>,
}

impl Feasibility {
    pub fn all(&self) -> bool {
        self.feasible.iter().all(|&f| f)
    }
}

/// Diagonal of the factor and the standardized skewness `s = d^{⊙-3} ⊙ S̆`.
fn standardized_skew(spec: &MomentSpec, factor: &DMatrix<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
    let d = factor.diagonal();
    let s = linalg::hadamard_pow(&d, -3)?.component_mul(spec.skew_diag());
    Ok((d, s))
}

fn feasibility_with(spec: &MomentSpec, factor: &DMatrix<f64>) -> Result<Feasibility> {
    let (d, s) = standardized_skew(spec, factor)?;
    let rhs = linalg::hadamard_pow(&d, 4)?.component_mul(&linalg::hadamard_pow(&s, 2)?);
    let margin: Vec<f64> = (spec.kurt_diag() - rhs).iter().copied().collect();
    Ok(Feasibility {
        feasible: margin.iter().map(|&m| m > 0.0).collect(),
        margin,
    })
}

/// Evaluates `K̆ > d^{⊙4} ⊙ (d^{⊙-3} ⊙ S̆)^{⊙2}` per component, using the
/// Cholesky factor.
pub fn check_feasibility(spec: &MomentSpec) -> Result<Feasibility> {
    check_feasibility_with(spec, SqrtMethod::Cholesky)
}

pub fn check_feasibility_with(spec: &MomentSpec, method: SqrtMethod) -> Result<Feasibility> {
    let factor = linalg::matrix_sqrt(spec.covariance(), method)?;
    feasibility_with(spec, &factor)
}

/// Positive root of `u² + s u + s² - k = 0` for standardized skewness `s`
/// and kurtosis `k`.
fn kurtosis_root(s: f64, k: f64) -> f64 {
    0.5 * (-s + (4.0 * k - 3.0 * s * s).sqrt())
}

fn matching_u_with(spec: &MomentSpec, factor: &DMatrix<f64>) -> Result<DVector<f64>> {
    let feas = feasibility_with(spec, factor)?;
    if !feas.all() {
        return Err(GenutError::Infeasible { margins: feas.margin });
    }
    let (d, s) = standardized_skew(spec, factor)?;
    let k = linalg::hadamard_pow(&d, -4)?.component_mul(spec.kurt_diag());
    Ok(DVector::from_fn(spec.dim(), |i, _| kurtosis_root(s[i], k[i])))
}

/// `u = ½(-s + √(4 d^{⊙-4} ⊙ K̆ - 3 s^{⊙2}))`, the choice that matches the
/// diagonal kurtosis.
pub fn kurtosis_matching_u(spec: &MomentSpec) -> Result<DVector<f64>> {
    let factor = linalg::cholesky_lower(spec.covariance())?;
    matching_u_with(spec, &factor)
}

/// Sigma points using the Cholesky factor.
pub fn generate(spec: &MomentSpec, choice: &UChoice) -> Result<SigmaPointSet> {
    generate_with(spec, choice, SqrtMethod::Cholesky)
}

pub fn generate_with(spec: &MomentSpec, choice: &UChoice, method: SqrtMethod) -> Result<SigmaPointSet> {
    let n = spec.dim();
    let factor = linalg::matrix_sqrt(spec.covariance(), method)?;
    let (_, s) = standardized_skew(spec, &factor)?;
    let u = match choice {
        UChoice::MatchKurtosis => matching_u_with(spec, &factor)?,
        UChoice::Default => {
            let feas = feasibility_with(spec, &factor)?;
            let d = factor.diagonal();
            DVector::from_fn(n, |i, _| {
                if feas.feasible[i] {
                    kurtosis_root(s[i], spec.kurt_diag()[i] / d[i].powi(4))
                } else {
                    (-s[i]).max(0.0) + 1.0
                }
            })
        }
        UChoice::Explicit(u) => {
            if u.len() != n {
                return Err(GenutError::DimensionMismatch {
                    what: "explicit u length",
                    expected: n,
                    found: u.len(),
                });
            }
            u.clone()
        }
    };
    let v = &u + &s;
    SigmaPointSet::assemble(spec.mean(), &factor, u, v)
}

/// Box bounds `a < χ < b` and the slack `θ ∈ (0, 1)`.
///
/// Infinite bounds mean the side is unconstrained; in JSON they appear as
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxConstraintWire", into = "BoxConstraintWire")]
pub struct BoxConstraint {
    lower: DVector<f64>,
    upper: DVector<f64>,
    theta: f64,
}

/// Slack used when none is given.
pub const DEFAULT_THETA: f64 = 0.9;

impl BoxConstraint {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>, theta: f64) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(GenutError::DimensionMismatch {
                what: "upper bound length",
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(GenutError::ParameterDomain {
                param: "theta",
                value: theta,
                domain: "(0, 1)",
            });
        }
        if lower.iter().chain(upper.iter()).any(|x| x.is_nan()) {
            return Err(GenutError::NonFinite { what: "bounds" });
        }
        Ok(BoxConstraint { lower, upper, theta })
    }

    /// Only a lower bound; the upper side is unbounded.
    pub fn lower_only(lower: DVector<f64>, theta: f64) -> Result<Self> {
        let upper = DVector::from_element(lower.len(), f64::INFINITY);
        BoxConstraint::new(lower, upper, theta)
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(&x, (&a, &b))| a <= x && x <= b)
    }
}

#[derive(Serialize, Deserialize)]
struct BoxConstraintWire {
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
    #[serde(default = "default_theta")]
    theta: f64,
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

impl TryFrom<BoxConstraintWire> for BoxConstraint {
    type Error = GenutError;

    fn try_from(w: BoxConstraintWire) -> Result<Self> {
        let lower = DVector::from_iterator(w.lower.len(), w.lower.iter().map(|x| x.unwrap_or(f64::NEG_INFINITY)));
        let upper = DVector::from_iterator(w.upper.len(), w.upper.iter().map(|x| x.unwrap_or(f64::INFINITY)));
        BoxConstraint::new(lower, upper, w.theta)
    }
}

impl From<BoxConstraint> for BoxConstraintWire {
    fn from(c: BoxConstraint) -> Self {
        BoxConstraintWire {
            lower: wire::bounds_to_vec(&c.lower),
            upper: wire::bounds_to_vec(&c.upper),
            theta: c.theta,
        }
    }
}

/// Which free parameters the constraint repair redefined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairLog {
    pub u_redefined: Vec<bool>,
    pub v_redefined: Vec<bool>,
}

impl RepairLog {
    pub fn any_u(&self) -> bool {
        self.u_redefined.iter().any(|&x| x)
    }

    pub fn any_v(&self) -> bool {
        self.v_redefined.iter().any(|&x| x)
    }

    pub fn is_noop(&self) -> bool {
        !self.any_u() && !self.any_v()
    }
}

/// `θ · min_j |num_j / col_j|` over entries with a nonzero divisor and a
/// finite quotient.
fn scaled_min_ratio(num: &DVector<f64>, col: &DVector<f64>, theta: f64) -> Option<f64> {
    num.iter()
        .zip(col.iter())
        .filter(|(_, &c)| c != 0.0)
        .map(|(&a, &c)| (a / c).abs())
        .filter(|q| q.is_finite())
        .min_by(f64::total_cmp)
        .map(|m| theta * m)
}

/// Pulls violating sigma points of `base` strictly inside the box.
pub fn constrain(spec: &MomentSpec, base: &SigmaPointSet, c: &BoxConstraint) -> Result<SigmaPointSet> {
    constrain_detailed(spec, base, c).map(|(set, _)| set)
}

/// As [`constrain`], also reporting which of `u`, `v` were redefined.
///
/// Repairs run lower bound first, then upper bound. A `uᵢ` or `vᵢ` that is
/// redefined keeps its value afterwards; every other `vᵢ` is recomputed as
/// `uᵢ + sᵢ` so the diagonal skewness stays matched along that axis. When
/// both passes touch the same parameter the smaller value is kept so the
/// point satisfies both bounds.
pub fn constrain_detailed(
    spec: &MomentSpec,
    base: &SigmaPointSet,
    c: &BoxConstraint,
) -> Result<(SigmaPointSet, RepairLog)> {
    let n = spec.dim();
    if base.dim() != n {
        return Err(GenutError::DimensionMismatch {
            what: "sigma point set dimension",
            expected: n,
            found: base.dim(),
        });
    }
    if c.lower.len() != n {
        return Err(GenutError::DimensionMismatch {
            what: "bound length",
            expected: n,
            found: c.lower.len(),
        });
    }
    let mean = spec.mean();
    for i in 0..n {
        let (a, b) = (c.lower[i], c.upper[i]);
        if !(a < mean[i] && mean[i] < b) {
            return Err(GenutError::MeanOutsideBounds {
                index: i,
                mean: mean[i],
                lower: a,
                upper: b,
            });
        }
    }

    let factor = base.sqrt_factor();
    let skew = base.v() - base.u();
    let mut u = base.u().clone();
    let mut v = base.v().clone();
    let mut log = RepairLog {
        u_redefined: vec![false; n],
        v_redefined: vec![false; n],
    };

    let below = |p: &DVector<f64>| p.iter().zip(c.lower.iter()).any(|(x, a)| x < a);
    let above = |p: &DVector<f64>| p.iter().zip(c.upper.iter()).any(|(x, b)| x > b);
    let dist_lower = mean - &c.lower;
    let dist_upper = &c.upper - mean;

    let mut set = base.clone();
    for (violates, dist) in [
        (&below as &dyn Fn(&DVector<f64>) -> bool, &dist_lower),
        (&above as &dyn Fn(&DVector<f64>) -> bool, &dist_upper),
    ] {
        let mut changed = false;
        for i in 0..n {
            let col = factor.column(i).into_owned();
            if violates(&set.point(1 + i)) {
                if let Some(new_u) = scaled_min_ratio(dist, &col, c.theta) {
                    u[i] = if log.u_redefined[i] { u[i].min(new_u) } else { new_u };
                    log.u_redefined[i] = true;
                    changed = true;
                }
            }
            if violates(&set.point(1 + n + i)) {
                if let Some(new_v) = scaled_min_ratio(dist, &col, c.theta) {
                    v[i] = if log.v_redefined[i] { v[i].min(new_v) } else { new_v };
                    log.v_redefined[i] = true;
                    changed = true;
                }
            }
        }
        if changed {
            for i in 0..n {
                if !log.v_redefined[i] {
                    v[i] = u[i] + skew[i];
                }
            }
            set = SigmaPointSet::assemble(mean, &factor, u.clone(), v.clone())?;
        }
    }

    if let Some(point) = (0..set.len()).find(|&j| !c.contains(&set.point(j))) {
        return Err(GenutError::ConstraintUnsatisfied { point });
    }
    Ok((set, log))
}
