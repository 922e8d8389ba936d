//! Running and attacking protocols: group-product simulations, seeded coin
//! flips, exact biases under adversarial coalitions, and robust composition
//! along majority trees.
//!
//! All sampling is reproducible: trial `i` draws from
//! [`crate::rng::trial_rng`]`(seed, i)`, so results do not depend on the order
//! in which trials are run.

pub mod adversary;
pub mod compose;
pub mod group;
pub mod sampling;

use crate::arith::ArithError;
use crate::hypermatrix::HypermatrixError;
use crate::majority::MajorityError;

pub use adversary::{
    coalition_is_robust, exact_bias_basis, exact_bias_joint, exact_bias_under_adversary, AdversaryConfig,
    JointDistribution,
};
pub use compose::{compose_robust, CompositeProtocol, CompositionalCertificate};
pub use group::{group_simulate, independence_check, subsets_independent, GroupProtocol, GroupSample};
pub use sampling::{flip_sample, flip_sample_with, AxisSampler, FlipReport, DEFAULT_SAMPLING_BITS};

/// Default cap on enumerated outcomes or materialized entries.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("enumeration of {0} outcomes exceeds the cap")]
    EnumerationCapExceeded(u128),
    #[error("invalid adversary: {0}")]
    InvalidAdversary(String),
    #[error("invalid group protocol: {0}")]
    InvalidGroup(String),
    #[error("cannot sample: {0}")]
    NotSampleable(String),
    #[error("tree is not a majority gate for p = {0}")]
    NotAMajorityGate(usize),
    #[error("node protocol is not certified 1-robust")]
    NodeNotRobust,
    #[error("node protocol must be a 3-axis {{0,1}} protocol whose inputs are coins of its own bias")]
    NodeNotComposable,
    #[error("r = {r} must be below p/2 = {p}/2")]
    PreconditionViolation { r: usize, p: usize },
    #[error("joint-contraction and basis-enumeration biases disagree")]
    PathsDisagree,
    #[error(transparent)]
    Hypermatrix(#[from] HypermatrixError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Majority(#[from] MajorityError),
}

/// Product of `xs`, saturating at `u128::MAX`.
pub(crate) fn product_u128(xs: impl IntoIterator<Item = usize>) -> u128 {
    xs.into_iter()
        .try_fold(1u128, |acc, x| acc.checked_mul(x as u128))
        .unwrap_or(u128::MAX)
}
