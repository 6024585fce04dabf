//! Generalized unscented transform.
//!
//! Sigma points matching the mean, covariance, and the diagonal third and
//! fourth central moments of a random vector, optional box-constraint repair,
//! the symmetric unscented transform for comparison, propagation through
//! nonlinear maps, and Monte Carlo and analytic references.

pub mod error;
pub mod linalg;
pub mod mc;
pub mod moments;
pub mod propagation;
pub mod quadrature;
pub mod report;
pub mod sigma;
pub mod special;
pub mod transforms;
pub mod truth;
pub mod ut;
mod wire;

pub use error::{GenutError, Result};
pub use linalg::SqrtMethod;
pub use mc::{mc_truth, sample, sample_joint, McTruth, SampleBatch};
pub use moments::{independent_joint, moments_of, DistributionSpec, MomentSpec, UnivariateMoments};
pub use propagation::{propagate, TransformFn, TransformResult};
pub use report::{percentage_error, reproduce, Report, Selector};
pub use sigma::{
    check_feasibility, constrain, constrain_detailed, generate, generate_with, kurtosis_matching_u, BoxConstraint,
    Feasibility, RepairLog, SigmaPointSet, UChoice,
};
pub use transforms::{sir_map, NamedTransform, SirState};
pub use ut::{default_kappa, ut_sigma_points};
