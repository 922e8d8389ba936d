//! The cyclic-group protocol: each player draws `gᵢ` uniformly from `ℤ/d`;
//! the simulated die shows `g₁ + … + g_p`, and the coin is heads when the
//! roll lands in a fixed subset.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;

use super::{product_u128, SimError};
use crate::arith::{FieldElement, NumberField, Rational};
use crate::construction::Realization;
use crate::hypermatrix::{uniform_vector, Hypermatrix, MysteryCertificate};
use crate::rng::{trial_rng, uniform_below};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupProtocol {
    pub d: u64,
    pub p: usize,
    pub heads: BTreeSet<u64>,
}

impl GroupProtocol {
    pub fn new(d: u64, p: usize, heads: impl IntoIterator<Item = u64>) -> Result<Self, SimError> {
        if d == 0 || p == 0 {
            return Err(SimError::InvalidGroup("d and p must be at least 1".into()));
        }
        let heads: BTreeSet<u64> = heads.into_iter().collect();
        if let Some(h) = heads.iter().find(|&&h| h >= d) {
            return Err(SimError::InvalidGroup(format!("heads element {h} outside ℤ/{d}")));
        }
        Ok(GroupProtocol { d, p, heads })
    }

    pub fn exact_bias(&self) -> Rational {
        Rational::new(BigInt::from(self.heads.len()), BigInt::from(self.d))
    }

    /// The `d×…×d` {0,1} hypermatrix with uniform certificate.
    pub fn realize(&self, cap: u128) -> Result<Realization, SimError> {
        let size = product_u128(std::iter::repeat_n(self.d as usize, self.p));
        if size > cap {
            return Err(SimError::EnumerationCapExceeded(size));
        }
        let q = NumberField::rationals();
        let (zero, one) = (FieldElement::zero(&q), FieldElement::one(&q));
        let a = Hypermatrix::from_fn(vec![self.d as usize; self.p], &q, |idx| {
            let s = idx.iter().map(|&i| i as u64).sum::<u64>() % self.d;
            if self.heads.contains(&s) {
                one.clone()
            } else {
                zero.clone()
            }
        })?;
        let cert = MysteryCertificate::new(
            FieldElement::from_rational(&q, self.exact_bias()),
            vec![uniform_vector(&q, self.d as usize); self.p],
        )?;
        Ok(Realization { a, cert })
    }
}

/// Empirical counts of a group simulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSample {
    pub d: u64,
    pub count: u64,
    /// `product_counts[g]`: trials whose product was `g`.
    pub product_counts: Vec<u64>,
    /// `marginal_counts[i][g]`: trials where player `i` drew `g`.
    pub marginal_counts: Vec<Vec<u64>>,
}

impl GroupSample {
    /// Number of trials whose product fell in `heads`.
    pub fn heads(&self, heads: &BTreeSet<u64>) -> u64 {
        heads.iter().map(|&h| self.product_counts.get(h as usize).copied().unwrap_or(0)).sum()
    }
}

/// `count` seeded trials; in trial `t` player `i` draws the `i`-th value of
/// stream `t`.
pub fn group_simulate(d: u64, p: usize, count: u64, seed: u64) -> GroupSample {
    assert!(d >= 1 && p >= 1, "d and p must be at least 1");
    let mut product_counts = vec![0u64; d as usize];
    let mut marginal_counts = vec![vec![0u64; d as usize]; p];
    for trial in 0..count {
        let mut rng = trial_rng(seed, trial);
        let mut sum = 0u64;
        for m in marginal_counts.iter_mut() {
            let g = uniform_below(&mut rng, d);
            m[g as usize] += 1;
            sum = (sum + g) % d;
        }
        product_counts[sum as usize] += 1;
    }
    GroupSample { d, count, product_counts, marginal_counts }
}

/// For equally likely `outcomes` (rows of variable values), whether every
/// `k`-subset of the variables is mutually independent: each joint count
/// times `Nᵏ⁻¹` equals the product of the marginal counts.
pub fn subsets_independent(outcomes: &[Vec<u64>], k: usize) -> bool {
    let Some(first) = outcomes.first() else {
        return true;
    };
    let vars = first.len();
    let n = BigInt::from(outcomes.len());
    let marginals: Vec<HashMap<u64, u64>> = (0..vars)
        .map(|v| {
            let mut m = HashMap::new();
            for o in outcomes {
                *m.entry(o[v]).or_insert(0) += 1;
            }
            m
        })
        .collect();
    let scale = num_traits::pow(n, k.saturating_sub(1));
    subsets(vars, k).all(|subset| {
        let mut joint: HashMap<Vec<u64>, u64> = HashMap::new();
        for o in outcomes {
            *joint.entry(subset.iter().map(|&v| o[v]).collect()).or_insert(0) += 1;
        }
        // Every combination of observed marginal values must appear with the
        // product frequency, including those that never occur jointly.
        let combos: u128 = product_u128(subset.iter().map(|&v| marginals[v].len()));
        if combos != joint.len() as u128 {
            return false;
        }
        joint.iter().all(|(vals, &c)| {
            let prod = subset
                .iter()
                .zip(vals)
                .fold(BigInt::from(1), |acc, (&v, x)| acc * marginals[v][x]);
            BigInt::from(c) * &scale == prod
        })
    })
}

fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).filter(move |m| m.count_ones() as usize == k).map(move |m| {
        (0..n).filter(|&i| m >> i & 1 == 1).collect()
    })
}

/// Enumerates all `dᵖ` draws and checks that every `p`-subset of
/// `{g₁, …, g_p, g₁ + … + g_p}` is mutually independent.
pub fn independence_check(d: u64, p: usize, cap: u128) -> Result<bool, SimError> {
    if d == 0 || p == 0 {
        return Err(SimError::InvalidGroup("d and p must be at least 1".into()));
    }
    let size = product_u128(std::iter::repeat_n(d as usize, p));
    if size > cap {
        return Err(SimError::EnumerationCapExceeded(size));
    }
    let mut outcomes = Vec::with_capacity(size as usize);
    let mut g = vec![0u64; p];
    loop {
        let mut row = g.clone();
        row.push(g.iter().sum::<u64>() % d);
        outcomes.push(row);
        let Some(i) = g.iter().rposition(|&x| x + 1 < d) else {
            break;
        };
        g[i] += 1;
        g[i + 1..].iter_mut().for_each(|x| *x = 0);
    }
    Ok(subsets_independent(&outcomes, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use crate::hypermatrix::{check_mystery, check_robust_binary};

    #[test]
    fn trivial_group() {
        let s = group_simulate(1, 3, 100, 5);
        assert_eq!(s.product_counts, vec![100]);
    }

    #[test]
    fn independence_examples() {
        assert!(independence_check(2, 2, 1000).unwrap());
        assert!(independence_check(5, 2, 1000).unwrap());
        assert!(independence_check(3, 3, 1000).unwrap());
        assert!(matches!(independence_check(10, 7, 1000), Err(SimError::EnumerationCapExceeded(_))));
    }

    #[test]
    fn broken_independence() {
        // ℤ/4 with g₂ restricted to even values: g₁ and g₁ + g₂ are dependent.
        let mut rows = Vec::new();
        for g1 in 0..4u64 {
            for g2 in [0u64, 2] {
                rows.push(vec![g1, g2, (g1 + g2) % 4]);
            }
        }
        assert!(!subsets_independent(&rows, 2));
        // A single variable is trivially independent of itself.
        assert!(subsets_independent(&rows, 1));
    }

    #[test]
    fn missing_combination_is_dependent() {
        // X = Y, both uniform on {0,1}: the pairs (0,1), (1,0) never occur.
        let rows = vec![vec![0, 0], vec![1, 1]];
        assert!(!subsets_independent(&rows, 2));
    }

    #[test]
    fn two_fifths_protocol() {
        let g = GroupProtocol::new(5, 2, [0, 1]).unwrap();
        assert_eq!(g.exact_bias(), rat(2, 5));
        let r = g.realize(1000).unwrap();
        assert!(check_mystery(&r.a, &r.cert).unwrap().is_valid());
        assert!(check_robust_binary(&r.a, &r.cert).unwrap());
        assert!(GroupProtocol::new(5, 2, [5]).is_err());
    }

    #[test]
    fn xor_of_three_bits_is_fair() {
        let s = group_simulate(2, 3, 20_000, 3);
        let heads = s.heads(&BTreeSet::from([1]));
        assert!((heads as f64 / 20_000.0 - 0.5).abs() < 4.0 * (0.25f64 / 20_000.0).sqrt());
        assert!(s.marginal_counts.iter().all(|m| m.iter().sum::<u64>() == 20_000));
    }
}
