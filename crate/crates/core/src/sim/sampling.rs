//! Seeded coin flips of a certified protocol.
//!
//! Each axis is drawn independently from its beta; rational betas are
//! sampled exactly (integer weights over a common denominator). Irrational
//! betas are rounded to a `2^-k` grid and the resulting total-variation error
//! is reported: sampling is diagnostic, never part of a certificate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::RngCore;
use serde::Serialize;

use super::adversary::{exact_bias_joint, AdversaryConfig};
use super::SimError;
use crate::arith::rational::{dyadic, format_rational, round_dyadic, to_decimal_string};
use crate::arith::{FieldElement, Rational};
use crate::hypermatrix::{is_stochastic, Hypermatrix, MysteryCertificate};
use crate::rng::{trial_rng, uniform_below};

/// Grid precision for irrational betas.
pub const DEFAULT_SAMPLING_BITS: u32 = 53;

/// Draws an index with probability proportional to integer weights.
#[derive(Clone, Debug)]
pub struct AxisSampler {
    cumulative: Vec<u64>,
    /// Upper bound on the total-variation distance to the target.
    error: Rational,
}

impl AxisSampler {
    /// Exact sampler for rational weights (need not be normalized).
    pub fn from_rationals(weights: &[Rational]) -> Result<Self, SimError> {
        let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let ints: Option<Vec<u64>> = weights
            .iter()
            .map(|w| (w.numer() * (&denom / w.denom())).to_u64())
            .collect();
        match ints {
            Some(ints) => Self::from_weights(&ints, Rational::zero()),
            None => Err(SimError::NotSampleable("weights do not fit in 64 bits".into())),
        }
    }

    /// Sampler for a probability vector; exact when every coordinate is
    /// rational with a small common denominator, else rounded to `2^-bits`.
    pub fn new(beta: &[FieldElement], bits: u32) -> Result<Self, SimError> {
        if !is_stochastic(beta) {
            return Err(SimError::NotSampleable("beta is not a probability vector".into()));
        }
        if let Some(rs) = beta.iter().map(FieldElement::as_rational).collect::<Option<Vec<_>>>() {
            if let Ok(s) = Self::from_rationals(&rs) {
                return Ok(s);
            }
        }
        // |w_i/2^k − β_i| ≤ 2^-k per coordinate gives TV ≤ n·2^-k after
        // renormalizing.
        let grid = dyadic(bits);
        let scale = Rational::from_integer(BigInt::one() << bits);
        let ints: Option<Vec<u64>> = beta
            .iter()
            .map(|b| {
                let (lo, hi) = b.bound(&(&grid / Rational::from_integer(4.into())));
                let mid = (lo + hi) / Rational::from_integer(2.into());
                (round_dyadic(&mid, bits) * &scale).to_integer().to_u64()
            })
            .collect();
        let ints = ints.ok_or_else(|| SimError::NotSampleable("grid weights overflow".into()))?;
        let error = grid * Rational::from_integer(beta.len().into());
        Self::from_weights(&ints, error)
    }

    fn from_weights(weights: &[u64], error: Rational) -> Result<Self, SimError> {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0u64;
        for &w in weights {
            acc = acc
                .checked_add(w)
                .ok_or_else(|| SimError::NotSampleable("total weight overflows".into()))?;
            cumulative.push(acc);
        }
        if acc == 0 {
            return Err(SimError::NotSampleable("zero total weight".into()));
        }
        Ok(AxisSampler { cumulative, error })
    }

    pub fn is_exact(&self) -> bool {
        self.error.is_zero()
    }

    pub fn error_bound(&self) -> &Rational {
        &self.error
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> usize {
        let total = *self.cumulative.last().expect("nonempty");
        let u = uniform_below(rng, total);
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// How an entry turns into a bit: constant, or an extra coin `a/b`.
#[derive(Clone, Copy, Debug)]
enum EntryCoin {
    Const(bool),
    Frac(u64, u64),
}

impl EntryCoin {
    fn flip(self, rng: &mut impl RngCore) -> bool {
        match self {
            EntryCoin::Const(b) => b,
            EntryCoin::Frac(a, b) => uniform_below(rng, b) < a,
        }
    }
}

fn entry_coins(a: &Hypermatrix) -> Result<Vec<EntryCoin>, SimError> {
    a.entries()
        .iter()
        .map(|e| {
            if e.is_zero() || e.is_one() {
                return Ok(EntryCoin::Const(e.is_one()));
            }
            let r = e
                .as_rational()
                .filter(|r| *r > Rational::zero() && *r < Rational::one())
                .ok_or_else(|| SimError::NotSampleable(format!("entry {e} is not a rational in [0, 1]")))?;
            match (r.numer().to_u64(), r.denom().to_u64()) {
                (Some(n), Some(d)) => Ok(EntryCoin::Frac(n, d)),
                _ => Err(SimError::NotSampleable(format!("entry {e} has a huge denominator"))),
            }
        })
        .collect()
}

/// Outcome of a batch of seeded flips. `expected` is the exact bias of the
/// sampled process (α, or the adversarial bias when a coalition deviates).
#[derive(Clone, Debug, Serialize)]
pub struct FlipReport {
    pub count: u64,
    pub heads: u64,
    pub seed: u64,
    pub empirical: String,
    pub expected: String,
    pub expected_approx: String,
    pub sigma: String,
    pub deviation_sigmas: String,
    /// Bound on the bias error from rounding irrational betas.
    pub sampling_error_bound: String,
    pub within_4_sigma: bool,
    #[serde(skip)]
    pub expected_exact: Option<FieldElement>,
}

impl FlipReport {
    pub fn frequency(&self) -> f64 {
        self.heads as f64 / self.count.max(1) as f64
    }

    pub(crate) fn build(count: u64, heads: u64, seed: u64, expected: FieldElement, error: &Rational) -> Self {
        let e = expected.approx_f64();
        let freq = heads as f64 / count.max(1) as f64;
        let sigma = (e * (1.0 - e) / count.max(1) as f64).sqrt();
        let slack = crate::arith::rational::to_f64(error);
        let dev = (freq - e).abs();
        let deviation_sigmas = if sigma > 0.0 { dev / sigma } else if dev <= slack { 0.0 } else { f64::INFINITY };
        FlipReport {
            count,
            heads,
            seed,
            empirical: to_decimal_string(
                &Rational::new(BigInt::from(heads), BigInt::from(count.max(1))),
                8,
            ),
            expected: exact_string(&expected),
            expected_approx: format!("{e:.10}"),
            sigma: format!("{sigma:.3e}"),
            deviation_sigmas: format!("{deviation_sigmas:.3}"),
            sampling_error_bound: format_rational(error),
            within_4_sigma: dev <= 4.0 * sigma + slack,
            expected_exact: Some(expected),
        }
    }
}

/// A rational as `a/b`; otherwise the element as a polynomial in the field
/// generator `x`.
pub fn exact_string(e: &FieldElement) -> String {
    match e.as_rational() {
        Some(r) => format_rational(&r),
        None => e.to_string(),
    }
}

/// [`flip_sample_with`] without an adversary.
pub fn flip_sample(a: &Hypermatrix, cert: &MysteryCertificate, count: u64, seed: u64) -> Result<FlipReport, SimError> {
    flip_sample_with(a, cert, None, count, seed, DEFAULT_SAMPLING_BITS)
}

/// `count` flips; in trial `t` (stream `t`), the coalition's joint outcome is
/// drawn first, then each honest axis in increasing order, then the entry's
/// extra coin if the entry is not 0 or 1.
pub fn flip_sample_with(
    a: &Hypermatrix,
    cert: &MysteryCertificate,
    adversary: Option<&AdversaryConfig>,
    count: u64,
    seed: u64,
    bits: u32,
) -> Result<FlipReport, SimError> {
    if cert.format() != a.format() {
        return Err(SimError::Hypermatrix(crate::hypermatrix::HypermatrixError::FormatMismatch(
            "certificate betas do not match the hypermatrix format".into(),
        )));
    }
    let coins = entry_coins(a)?;
    let coalition: Vec<usize> = adversary.map(|adv| adv.coalition.clone()).unwrap_or_default();
    let joint = match adversary {
        Some(adv) => {
            adv.validate(a.format())?;
            Some(AxisSampler::from_rationals(&adv.joint.masses)?)
        }
        None => None,
    };
    let honest: Vec<usize> = (0..a.arity()).filter(|ax| !coalition.contains(ax)).collect();
    let samplers: Vec<AxisSampler> = honest
        .iter()
        .map(|&ax| AxisSampler::new(&cert.betas[ax], bits))
        .collect::<Result<_, _>>()?;
    let error: Rational = samplers.iter().map(|s| s.error_bound().clone()).sum();
    let expected = match adversary {
        Some(adv) => exact_bias_joint(a, cert, adv)?,
        None => cert.alpha.clone(),
    };

    let strides = a.strides();
    let mut heads = 0u64;
    for trial in 0..count {
        let mut rng = trial_rng(seed, trial);
        let mut flat = 0usize;
        if let (Some(adv), Some(js)) = (adversary, &joint) {
            let o = &adv.joint.outcomes[js.sample(&mut rng)];
            for (&ax, &i) in adv.coalition.iter().zip(o) {
                flat += strides[ax] * i;
            }
        }
        for (&ax, s) in honest.iter().zip(&samplers) {
            flat += strides[ax] * s.sample(&mut rng);
        }
        heads += coins[flat].flip(&mut rng) as u64;
    }
    Ok(FlipReport::build(count, heads, seed, expected, &error))
}
