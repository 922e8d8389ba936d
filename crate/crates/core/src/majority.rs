//! p-ary majority gates wired from ternary majority gates.
//!
//! A gate is a balanced ternary tree of depth `n` whose `3ⁿ` leaves are
//! colored by player indices. Colorings are sampled at random and accepted
//! once they return 1 on every input with exactly `⌊p/2⌋ + 1` ones; by
//! monotonicity and self-duality of ternary majority this makes the tree a
//! majority gate.
//!
//! Inputs are evaluated 64 at a time: each player contributes a `u64` whose
//! lanes are independent inputs.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::rng::{trial_rng, uniform_below};

/// Default number of random colorings tried per depth.
pub const DEFAULT_MAX_TRIALS: u64 = 4096;
/// Inputs up to this arity are additionally checked exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MajorityError {
    #[error("arity must be at least 1")]
    InvalidArity,
    #[error("no majority gate for p = {p} at depth {depth} within {trials} trials")]
    TrialsExhausted { p: usize, depth: usize, trials: u64 },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("census over {0} colorings exceeds the enumeration cap")]
    EnumerationCapExceeded(u128),
}

/// Balanced ternary tree; `coloring[ℓ] ∈ 1..=p` is the player read at leaf
/// `ℓ` (leaves in breadth-first, i.e. left-to-right, order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TreeJson")]
pub struct MajorityTree {
    pub p: usize,
    pub depth: usize,
    pub coloring: Vec<usize>,
}

#[derive(Deserialize)]
struct TreeJson {
    p: usize,
    depth: usize,
    coloring: Vec<usize>,
}

impl TryFrom<TreeJson> for MajorityTree {
    type Error = MajorityError;
    fn try_from(j: TreeJson) -> Result<Self, MajorityError> {
        MajorityTree::new(j.p, j.depth, j.coloring)
    }
}

fn leaves(depth: usize) -> Result<usize, MajorityError> {
    u32::try_from(depth)
        .ok()
        .and_then(|d| 3usize.checked_pow(d))
        .ok_or_else(|| MajorityError::InvalidTree(format!("depth {depth} too large")))
}

impl MajorityTree {
    pub fn new(p: usize, depth: usize, coloring: Vec<usize>) -> Result<Self, MajorityError> {
        if p == 0 {
            return Err(MajorityError::InvalidArity);
        }
        let n = leaves(depth)?;
        if coloring.len() != n {
            return Err(MajorityError::InvalidTree(format!(
                "depth {depth} needs {n} leaves, got {}",
                coloring.len()
            )));
        }
        if let Some(bad) = coloring.iter().find(|&&c| c == 0 || c > p) {
            return Err(MajorityError::InvalidTree(format!("player {bad} outside 1..={p}")));
        }
        Ok(MajorityTree { p, depth, coloring })
    }

    pub fn leaves(&self) -> usize {
        self.coloring.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tree serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, MajorityError> {
        serde_json::from_str(s).map_err(|e| MajorityError::InvalidTree(e.to_string()))
    }
}

#[inline]
fn maj(a: u64, b: u64, c: u64) -> u64 {
    (a & b) | (a & c) | (b & c)
}

/// Reduces a level of words three at a time until one remains.
fn reduce(mut level: Vec<u64>) -> u64 {
    while level.len() > 1 {
        level = level.chunks_exact(3).map(|c| maj(c[0], c[1], c[2])).collect();
    }
    level[0]
}

/// 64 evaluations at once: `words[i]` holds player `i + 1`'s input bits.
pub fn evaluate_words(tree: &MajorityTree, words: &[u64]) -> u64 {
    assert_eq!(words.len(), tree.p, "one input word per player");
    reduce(tree.coloring.iter().map(|&c| words[c - 1]).collect())
}

/// Output of the gate on a single input of length `p`.
pub fn evaluate_tree(tree: &MajorityTree, input: &[bool]) -> bool {
    assert_eq!(input.len(), tree.p, "input must have one bit per player");
    let words: Vec<u64> = input.iter().map(|&b| b as u64).collect();
    evaluate_words(tree, &words) & 1 == 1
}

/// Number of ones on critical inputs: `⌊p/2⌋ + 1`.
pub fn critical_weight(p: usize) -> usize {
    p / 2 + 1
}

/// Calls `f` with batches of up to 64 inputs of exactly `k` ones among `p`
/// players, as per-player words plus a lane mask.
fn for_each_weight_batch(p: usize, k: usize, mut f: impl FnMut(&[u64], u64) -> bool) -> bool {
    let mut words = vec![0u64; p];
    let mut lanes = 0usize;
    let mut combo: Vec<usize> = (0..k).collect();
    if k > p {
        return true;
    }
    loop {
        for &i in &combo {
            words[i] |= 1 << lanes;
        }
        lanes += 1;
        if lanes == 64 {
            if !f(&words, u64::MAX) {
                return false;
            }
            words.iter_mut().for_each(|w| *w = 0);
            lanes = 0;
        }
        // Next k-subset in lexicographic order.
        let Some(i) = (0..k).rev().find(|&i| combo[i] != i + p - k) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
    lanes == 0 || f(&words, (1u64 << lanes) - 1)
}

/// Every input with exactly `⌊p/2⌋ + 1` ones yields 1.
pub fn verify_critical(tree: &MajorityTree, p: usize) -> bool {
    tree.p == p && for_each_weight_batch(p, critical_weight(p), |w, mask| evaluate_words(tree, w) & mask == mask)
}

/// Checks all `2ᵖ` inputs; ties (even `p`, exactly `p/2` ones) are skipped.
pub fn verify_exhaustive(tree: &MajorityTree, p: usize) -> bool {
    assert!(p <= 63, "exhaustive check needs p < 64");
    if tree.p != p {
        return false;
    }
    let total: u64 = 1 << p;
    let mut words = vec![0u64; p];
    let mut base = 0u64;
    while base < total {
        let lanes = (total - base).min(64);
        let mut want = 0u64;
        let mut care = 0u64;
        words.iter_mut().for_each(|w| *w = 0);
        for lane in 0..lanes {
            let x = base + lane;
            for (i, w) in words.iter_mut().enumerate() {
                *w |= ((x >> i) & 1) << lane;
            }
            let ones = x.count_ones() as usize;
            if 2 * ones != p {
                care |= 1 << lane;
                if 2 * ones > p {
                    want |= 1 << lane;
                }
            }
        }
        if (evaluate_words(tree, &words) ^ want) & care != 0 {
            return false;
        }
        base += lanes;
    }
    true
}

/// Critical-set check, plus the exhaustive check when `p ≤ 20`.
pub fn verify_majority(tree: &MajorityTree, p: usize) -> bool {
    let critical = verify_critical(tree, p);
    if p <= EXHAUSTIVE_LIMIT {
        let full = verify_exhaustive(tree, p);
        debug_assert_eq!(critical, full, "critical and exhaustive checks disagree");
        critical && full
    } else {
        critical
    }
}

/// `f(x) = x²(3 − 2x)`: probability that a ternary majority of three
/// independent bits with `P(1) = x` returns 1.
pub fn ternary_amplify(x: &Rational) -> Rational {
    let three = Rational::from_integer(3.into());
    let two = Rational::from_integer(2.into());
    x * x * (three - two * x)
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Odd arity actually wired: even `p` ignores its last input.
pub fn effective_arity(p: usize) -> usize {
    if p % 2 == 0 {
        p - 1
    } else {
        p
    }
}

/// `fⁿ((p+1)/(2p))`: chance that a uniformly colored depth-`n` tree returns
/// 1 on a fixed critical input (odd `p`).
pub fn success_probability(p: usize, n: usize) -> Rational {
    let mut x = Rational::new((p + 1).into(), (2 * p).into());
    for _ in 0..n {
        x = ternary_amplify(&x);
    }
    x
}

/// Smallest `n` with `fⁿ((p+1)/(2p)) > 1 − 1/C(p, (p+1)/2)`, exactly.
/// Even `p` uses `p − 1`.
pub fn required_depth(p: usize) -> usize {
    assert!(p >= 1, "arity must be at least 1");
    let p = effective_arity(p);
    let t = binomial(p, p.div_ceil(2));
    let threshold = Rational::one() - Rational::new(BigInt::one(), t);
    let mut x = Rational::new((p + 1).into(), (2 * p).into());
    let mut n = 0;
    while x <= threshold {
        x = ternary_amplify(&x);
        n += 1;
    }
    n
}

fn random_tree(p: usize, wired: usize, depth: usize, seed: u64, trial: u64) -> Result<MajorityTree, MajorityError> {
    let mut rng = trial_rng(seed, trial);
    let coloring = (0..leaves(depth)?)
        .map(|_| uniform_below(&mut rng, wired as u64) as usize + 1)
        .collect();
    MajorityTree::new(p, depth, coloring)
}

/// Samples colorings of a depth-`depth` tree (trial `i` uses stream `i`)
/// and returns the first that passes [`verify_majority`].
pub fn synthesize_at_depth(p: usize, depth: usize, seed: u64, max_trials: u64) -> Result<MajorityTree, MajorityError> {
    if p == 0 {
        return Err(MajorityError::InvalidArity);
    }
    let wired = effective_arity(p);
    if wired == 1 {
        return MajorityTree::new(p, 0, vec![1]);
    }
    for trial in 0..max_trials {
        let tree = random_tree(p, wired, depth, seed, trial)?;
        if verify_majority(&tree, p) {
            return Ok(tree);
        }
    }
    Err(MajorityError::TrialsExhausted { p, depth, trials: max_trials })
}

/// Majority gate of depth [`required_depth`]`(p)`.
pub fn synthesize_majority(p: usize, seed: u64, max_trials: u64) -> Result<MajorityTree, MajorityError> {
    if p == 0 {
        return Err(MajorityError::InvalidArity);
    }
    synthesize_at_depth(p, required_depth(p), seed, max_trials)
}

/// As [`synthesize_majority`], adding one level after each exhausted budget
/// (success probability only grows with depth), up to `extra_levels` times.
pub fn synthesize_with_deepening(
    p: usize,
    seed: u64,
    max_trials: u64,
    extra_levels: usize,
) -> Result<MajorityTree, MajorityError> {
    if p == 0 {
        return Err(MajorityError::InvalidArity);
    }
    let base = required_depth(p);
    let mut last = None;
    for depth in base..=base + extra_levels {
        match synthesize_at_depth(p, depth, seed, max_trials) {
            Ok(t) => return Ok(t),
            Err(e @ MajorityError::TrialsExhausted { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one depth tried"))
}

/// Exact fraction of all `p^(3ⁿ)` colorings at depth `n` that return 1 on
/// `input`.
pub fn coloring_census(p: usize, depth: usize, input: &[bool], cap: u128) -> Result<Rational, MajorityError> {
    if p == 0 || input.len() != p {
        return Err(MajorityError::InvalidArity);
    }
    let n = leaves(depth)?;
    let total = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap {
        return Err(MajorityError::EnumerationCapExceeded(total));
    }
    let words: Vec<u64> = input.iter().map(|&b| b as u64).collect();
    let mut coloring = vec![1usize; n];
    let mut hits = 0u128;
    loop {
        let tree = MajorityTree { p, depth, coloring: coloring.clone() };
        hits += (evaluate_words(&tree, &words) & 1) as u128;
        // Odometer over colorings.
        let Some(i) = coloring.iter().rposition(|&c| c < p) else {
            break;
        };
        coloring[i] += 1;
        coloring[i + 1..].iter_mut().for_each(|c| *c = 1);
    }
    Ok(Rational::new(BigInt::from(hits), BigInt::from(total)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    fn bits(x: u32, p: usize) -> Vec<bool> {
        (0..p).map(|i| (x >> i) & 1 == 1).collect()
    }

    /// Recursive oracle, independent of the word-parallel reducer.
    fn eval_slow(c: &[usize], input: &[bool]) -> bool {
        if c.len() == 1 {
            return input[c[0] - 1];
        }
        let k = c.len() / 3;
        let votes = (0..3).filter(|&i| eval_slow(&c[i * k..(i + 1) * k], input)).count();
        votes >= 2
    }

    #[test]
    fn amplifier_fixed_points() {
        assert_eq!(ternary_amplify(&rat(1, 2)), rat(1, 2));
        assert_eq!(ternary_amplify(&rat(1, 1)), rat(1, 1));
        assert_eq!(ternary_amplify(&rat(0, 1)), rat(0, 1));
        assert_eq!(ternary_amplify(&rat(2, 3)), rat(20, 27));
        assert_eq!(ternary_amplify(&rat(3, 5)), rat(81, 125));
    }

    #[test]
    fn depths() {
        assert_eq!(required_depth(1), 0);
        assert_eq!(required_depth(3), 1);
        assert_eq!(required_depth(5), 5);
        assert_eq!(required_depth(4), required_depth(3));
        // The fifth iterate is the first above 9/10.
        assert!(success_probability(5, 4) <= rat(9, 10));
        assert!(success_probability(5, 5) > rat(9, 10));
        let ds: Vec<usize> = (1..=15).step_by(2).map(required_depth).collect();
        assert!(ds.windows(2).all(|w| w[0] <= w[1]), "{ds:?}");
    }

    #[test]
    fn single_gate() {
        let t = MajorityTree::new(3, 1, vec![1, 2, 3]).unwrap();
        assert!(evaluate_tree(&t, &[true, true, false]));
        assert!(!evaluate_tree(&t, &[false, false, true]));
        assert!(verify_majority(&t, 3));
        let bad = MajorityTree::new(3, 1, vec![1, 1, 1]).unwrap();
        assert!(!evaluate_tree(&bad, &[false, true, true]));
        assert!(!verify_majority(&bad, 3));
    }

    #[test]
    fn word_evaluation_matches_oracle() {
        let t = random_tree(5, 5, 3, 11, 0).unwrap();
        for x in 0..32u32 {
            let input = bits(x, 5);
            let fast = evaluate_tree(&t, &input);
            assert_eq!(fast, eval_slow(&t.coloring, &input));
            let neg: Vec<bool> = input.iter().map(|b| !b).collect();
            assert_eq!(evaluate_tree(&t, &neg), !fast);
        }
        assert!(!evaluate_tree(&t, &[false; 5]));
        assert!(evaluate_tree(&t, &[true; 5]));
    }

    #[test]
    fn critical_batches_cover_all_subsets() {
        let mut count = 0;
        for_each_weight_batch(12, 7, |w, mask| {
            count += mask.count_ones();
            for lane in 0..64 {
                if mask >> lane & 1 == 1 {
                    assert_eq!(w.iter().filter(|&&x| x >> lane & 1 == 1).count(), 7);
                }
            }
            true
        });
        assert_eq!(count, 792);
    }

    #[test]
    fn p3_synthesis_is_a_permutation() {
        let t = synthesize_majority(3, 0, DEFAULT_MAX_TRIALS).unwrap();
        let mut c = t.coloring.clone();
        c.sort();
        assert_eq!(c, vec![1, 2, 3]);
    }

    #[test]
    fn p5_synthesis_and_exhaustive_oracle() {
        let t = synthesize_majority(5, 2024, DEFAULT_MAX_TRIALS).unwrap();
        assert_eq!(t.depth, 5);
        assert!((0..32u32).all(|x| {
            let input = bits(x, 5);
            let ones = input.iter().filter(|&&b| b).count();
            eval_slow(&t.coloring, &input) == (ones >= 3)
        }));
    }

    #[test]
    fn degenerate_and_even() {
        let t = synthesize_majority(1, 0, 1).unwrap();
        assert_eq!(t.coloring, vec![1]);
        assert!(verify_majority(&t, 1));
        let t = synthesize_majority(4, 9, DEFAULT_MAX_TRIALS).unwrap();
        assert!(t.coloring.iter().all(|&c| c <= 3));
        for x in 0..16u32 {
            let input = bits(x, 4);
            let ones = input.iter().filter(|&&b| b).count();
            if ones != 2 {
                assert_eq!(evaluate_tree(&t, &input), ones > 2);
            }
        }
    }

    #[test]
    fn census_depth_one() {
        let f = coloring_census(3, 1, &[true, true, false], 1000).unwrap();
        assert_eq!(f, rat(20, 27));
        assert_eq!(f, success_probability(3, 1));
    }

    #[test]
    fn exhaustion_and_json() {
        // Depth 0 for p = 3 can never work.
        assert_eq!(
            synthesize_at_depth(3, 0, 1, 10).unwrap_err(),
            MajorityError::TrialsExhausted { p: 3, depth: 0, trials: 10 }
        );
        let t = synthesize_with_deepening(3, 1, 50, 2).unwrap();
        assert!(verify_majority(&t, 3));
        let back = MajorityTree::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(MajorityTree::from_json(r#"{"p":3,"depth":1,"coloring":[1,2,4]}"#).is_err());
        assert!(MajorityTree::from_json(r#"{"p":3,"depth":1,"coloring":[1,2]}"#).is_err());
    }
}
