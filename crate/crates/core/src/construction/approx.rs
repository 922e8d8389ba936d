//! Approximation: refine the mystery-vectors until they are nearly uniform,
//! duplicate slices to match, then conjugate by the shrink map
//! `S_δ = (1−δ)(J/n) + δI` so every entry lands within ε of α.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::trilinear::require_valid;
use super::ConstructionError;
use crate::arith::linalg::Matrix;
use crate::arith::{FieldElement, Rational};
use crate::hypermatrix::{mass, Hypermatrix, MysteryCertificate, Vector};

/// Default cap on the common denominator searched by [`refine_vector`].
pub const DEFAULT_REFINE_CAP: usize = 1_000_000;

/// Group counts: coordinate `i` is split into `groups[i]` equal pieces.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Refinement {
    pub groups: Vec<usize>,
}

impl Refinement {
    pub fn trivial(n: usize) -> Self {
        Refinement { groups: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.groups.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn apply(&self, beta: &[FieldElement]) -> Vector {
        beta.iter()
            .zip(&self.groups)
            .flat_map(|(b, &n)| {
                let piece = b.scale(&Rational::new(1.into(), n.into()));
                std::iter::repeat(piece).take(n)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkParams {
    pub epsilon: Rational,
    pub delta: Rational,
}

impl ShrinkParams {
    /// `δ = ε/(2p)` for arity `p`.
    pub fn new(epsilon: Rational, arity: usize) -> Self {
        let delta = &epsilon / Rational::from_integer((2 * arity).into());
        ShrinkParams { epsilon, delta }
    }
}

/// `min β ≥ (1−δ)/n`, decided exactly.
pub fn satisfies_refinement_bound(beta: &[FieldElement], delta: &Rational) -> bool {
    let bound = (Rational::one() - delta) / Rational::from_integer(beta.len().into());
    beta.iter().all(|b| b.cmp_rational(&bound) != Ordering::Less)
}

/// Splits coordinates into equal pieces so that the refined vector has
/// minimum coordinate at least `(1−δ)/n'`.
///
/// For each candidate total `N` (increasing from `#β`), coordinate `i` gets
/// `nᵢ = ⌊βᵢN/(1−δ)⌋` pieces, which guarantees `βᵢ/nᵢ ≥ (1−δ)/N`. If these
/// sum to at least `N` (reducing the largest counts down to exactly `N` only
/// raises the ratios) the refinement is accepted.
pub fn refine_vector(
    beta: &[FieldElement],
    delta: &Rational,
    cap: usize,
) -> Result<(Vector, Refinement), ConstructionError> {
    if !(delta.is_positive_fraction()) {
        return Err(ConstructionError::InvalidDelta);
    }
    if beta.is_empty() || beta.iter().any(|b| b.sign() != Ordering::Greater) {
        return Err(ConstructionError::NotPositive);
    }
    let k = beta.len();
    let shrink = (Rational::one() - delta).recip();
    for total in k..=cap.max(k) {
        let scale = &shrink * Rational::from_integer(total.into());
        let mut groups = Vec::with_capacity(k);
        for b in beta {
            let n = b.scale(&scale).floor();
            match n.to_usize() {
                Some(n) if n >= 1 => groups.push(n),
                Some(_) => break,
                None => return Err(ConstructionError::SearchBudgetExceeded),
            }
        }
        if groups.len() < k || groups.iter().sum::<usize>() < total {
            continue;
        }
        while groups.iter().sum::<usize>() > total {
            let (i, _) = groups
                .iter()
                .enumerate()
                .max_by_key(|&(i, &g)| (g, std::cmp::Reverse(i)))
                .expect("nonempty");
            groups[i] -= 1;
        }
        let refinement = Refinement { groups };
        let refined = refinement.apply(beta);
        debug_assert!(satisfies_refinement_bound(&refined, delta));
        if satisfies_refinement_bound(&refined, delta) {
            return Ok((refined, refinement));
        }
    }
    Err(ConstructionError::SearchBudgetExceeded)
}

trait Fraction {
    fn is_positive_fraction(&self) -> bool;
}

impl Fraction for Rational {
    fn is_positive_fraction(&self) -> bool {
        *self > Rational::zero() && *self < Rational::one()
    }
}

/// Duplicates slices along every axis according to the refinements.
pub fn expand_axes(a: &Hypermatrix, refinements: &[Refinement]) -> Result<Hypermatrix, ConstructionError> {
    if refinements.len() != a.arity() {
        return Err(ConstructionError::FormatMismatch);
    }
    let mut out = a.clone();
    for (axis, r) in refinements.iter().enumerate() {
        if r.groups.len() != a.format()[axis] {
            return Err(ConstructionError::FormatMismatch);
        }
        if r.groups.iter().any(|&g| g != 1) {
            out = out.duplicate_slices(axis, &r.groups)?;
        }
    }
    Ok(out)
}

/// `(1−δ)(J/n) + δI`.
pub fn shrink_matrix(n: usize, delta: &Rational) -> Matrix<Rational> {
    let off = (Rational::one() - delta) / Rational::from_integer(n.into());
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { &off + delta } else { off.clone() }).collect())
        .collect()
}

/// `(1−1/δ)(J/n) + (1/δ)I`.
pub fn shrink_inverse_matrix(n: usize, delta: &Rational) -> Matrix<Rational> {
    let inv = delta.recip();
    let off = (Rational::one() - &inv) / Rational::from_integer(n.into());
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { &off + &inv } else { off.clone() }).collect())
        .collect()
}

/// `S_δ⁻¹ β` without forming the matrix.
pub fn apply_shrink_inverse(beta: &[FieldElement], delta: &Rational) -> Vector {
    let inv = delta.recip();
    let n = Rational::from_integer(beta.len().into());
    let shift = mass(beta).scale(&((Rational::one() - &inv) / n));
    beta.iter().map(|b| &b.scale(&inv) + &shift).collect()
}

fn entries_in_unit_interval(a: &Hypermatrix) -> bool {
    a.rational_entries()
        .is_some_and(|e| e.iter().all(|x| *x >= Rational::zero() && *x <= Rational::one()))
}

/// `A′(x⁽¹⁾, …) = A(S_δx⁽¹⁾, …)` with certificate `(α, S_δ⁻¹β⁽ⁱ⁾)`.
pub fn shrink_conjugate(
    a: &Hypermatrix,
    cert: &MysteryCertificate,
    epsilon: &Rational,
) -> Result<(Hypermatrix, MysteryCertificate, ShrinkParams), ConstructionError> {
    if !entries_in_unit_interval(a) {
        return Err(ConstructionError::EntryOutOfRange);
    }
    let params = ShrinkParams::new(epsilon.clone(), a.arity());
    if !params.delta.is_positive_fraction() {
        return Err(ConstructionError::InvalidDelta);
    }
    for (axis, b) in cert.betas.iter().enumerate() {
        if !satisfies_refinement_bound(b, &params.delta) {
            return Err(ConstructionError::RefinementBoundViolated { axis });
        }
    }
    let mut out = a.clone();
    for axis in 0..a.arity() {
        let n = Rational::from_integer(a.format()[axis].into());
        let spread = (Rational::one() - &params.delta) / n;
        out = out.mix_axis(axis, &params.delta, &spread);
    }
    let betas: Vec<Vector> = cert.betas.iter().map(|b| apply_shrink_inverse(b, &params.delta)).collect();
    for b in &betas {
        if b.iter().any(|x| x.sign() == Ordering::Less) {
            return Err(ConstructionError::NotPositive);
        }
    }
    let new_cert = MysteryCertificate::new(cert.alpha.clone(), betas)?;
    require_valid("shrink_conjugate", &out, &new_cert)?;
    Ok((out, new_cert, params))
}

#[derive(Clone, Debug)]
pub struct Approximation {
    pub a: Hypermatrix,
    pub cert: MysteryCertificate,
    pub refinements: Vec<Refinement>,
    pub params: ShrinkParams,
}

/// Whether every entry is within `eps` of `alpha`, decided exactly.
pub fn entries_within(a: &Hypermatrix, alpha: &FieldElement, eps: &Rational) -> bool {
    let Some(entries) = a.rational_entries() else {
        return false;
    };
    let distinct: BTreeSet<Rational> = entries.into_iter().collect();
    distinct.iter().all(|e| {
        alpha.cmp_rational(&(e - eps)) != Ordering::Less && alpha.cmp_rational(&(e + eps)) != Ordering::Greater
    })
}

/// Refine → expand → shrink-conjugate. Entries of the result lie within ε
/// of α and the certificate is exact.
pub fn approximate_hypermatrix(
    a: &Hypermatrix,
    cert: &MysteryCertificate,
    epsilon: &Rational,
    refine_cap: usize,
) -> Result<Approximation, ConstructionError> {
    if !entries_in_unit_interval(a) {
        return Err(ConstructionError::EntryOutOfRange);
    }
    if cert.betas.len() != a.arity() {
        return Err(ConstructionError::FormatMismatch);
    }
    let delta = ShrinkParams::new(epsilon.clone(), a.arity()).delta;
    let mut refined = Vec::with_capacity(a.arity());
    let mut refinements = Vec::with_capacity(a.arity());
    for b in &cert.betas {
        let (r, g) = refine_vector(b, &delta, refine_cap)?;
        refined.push(r);
        refinements.push(g);
    }
    let expanded = expand_axes(a, &refinements)?;
    let expanded_cert = MysteryCertificate::new(cert.alpha.clone(), refined)?;
    require_valid("expand_axes", &expanded, &expanded_cert)?;
    let (out, out_cert, params) = shrink_conjugate(&expanded, &expanded_cert, epsilon)?;
    if !entries_within(&out, &out_cert.alpha, epsilon) {
        return Err(ConstructionError::ApproximationFailed);
    }
    Ok(Approximation { a: out, cert: out_cert, refinements, params })
}

/// Largest `1/2ᵏ` not exceeding `min(α, 1−α)/s`.
pub fn dyadic_epsilon(alpha: &FieldElement, s: &BigInt) -> Rational {
    let one = FieldElement::one(alpha.field());
    let gap = if alpha.cmp_rational(&Rational::new(1.into(), 2.into())) == Ordering::Greater {
        &one - alpha
    } else {
        alpha.clone()
    };
    let s = Rational::from_integer(s.clone());
    let mut eps = Rational::one();
    while gap.cmp_rational(&(&eps * &s)) == Ordering::Less {
        eps /= Rational::from_integer(2.into());
    }
    eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::linalg::mat_mul;
    use crate::arith::rational::{int, rat};
    use crate::arith::{FieldRef, NumberField};
    use crate::hypermatrix::{check_mystery, rational_vector, uniform_vector};

    fn q() -> FieldRef {
        NumberField::rationals()
    }

    fn rv(v: &[Rational]) -> Vector {
        rational_vector(&q(), v)
    }

    #[test]
    fn refinement_examples() {
        let (b, r) = refine_vector(&rv(&[rat(1, 3), rat(2, 3)]), &rat(1, 2), 100).unwrap();
        assert_eq!(r.groups, vec![1, 1]);
        assert_eq!(b, rv(&[rat(1, 3), rat(2, 3)]));

        for n in 1..6 {
            let (b, r) = refine_vector(&uniform_vector(&q(), n), &rat(1, 7), 100).unwrap();
            assert_eq!(r, Refinement::trivial(n));
            assert_eq!(b, uniform_vector(&q(), n));
        }

        let (b, r) = refine_vector(&rv(&[rat(1, 10), rat(9, 10)]), &rat(1, 2), 100).unwrap();
        // Direct check of the bound: min ≥ (1/2)/#β′.
        let min = b.iter().map(|x| x.as_rational().unwrap()).min().unwrap();
        assert!(min * Rational::from_integer(b.len().into()) >= rat(1, 2));
        assert_eq!(r.groups.iter().sum::<usize>(), b.len());
        let back: Vec<Rational> = {
            let mut i = 0;
            r.groups
                .iter()
                .map(|&g| {
                    let s = b[i..i + g].iter().map(|x| x.as_rational().unwrap()).sum();
                    i += g;
                    s
                })
                .collect()
        };
        assert_eq!(back, vec![rat(1, 10), rat(9, 10)]);
    }

    #[test]
    fn refinement_budget() {
        let err = refine_vector(&rv(&[rat(1, 1000), rat(999, 1000)]), &rat(1, 1000), 50).unwrap_err();
        assert_eq!(err, ConstructionError::SearchBudgetExceeded);
    }

    #[test]
    fn expansion_examples() {
        let a = Hypermatrix::from_ints(vec![1, 2], &[4, 7]).unwrap();
        let r = vec![Refinement::trivial(1), Refinement { groups: vec![1, 2] }];
        assert_eq!(expand_axes(&a, &r).unwrap(), Hypermatrix::from_ints(vec![1, 3], &[4, 7, 7]).unwrap());
        let trivial = vec![Refinement::trivial(1), Refinement::trivial(2)];
        assert_eq!(expand_axes(&a, &trivial).unwrap(), a);
    }

    #[test]
    fn shrink_maps() {
        let s = shrink_matrix(2, &rat(1, 2));
        assert_eq!(s, vec![vec![rat(3, 4), rat(1, 4)], vec![rat(1, 4), rat(3, 4)]]);
        let si = shrink_inverse_matrix(2, &rat(1, 2));
        assert_eq!(si, vec![vec![rat(3, 2), rat(-1, 2)], vec![rat(-1, 2), rat(3, 2)]]);
        assert_eq!(mat_mul(&si, &s), crate::arith::linalg::identity(2, &int(0)));
        let u = uniform_vector(&q(), 3);
        assert_eq!(apply_shrink_inverse(&u, &rat(1, 5)), u);
    }

    #[test]
    fn shrink_conjugate_bound_violation() {
        let a = Hypermatrix::from_ints(vec![2, 2], &[1, 0, 0, 1]).unwrap();
        let cert = MysteryCertificate::new(
            FieldElement::from_rational(&q(), rat(1, 2)),
            vec![rv(&[rat(1, 2), rat(1, 2)]), rv(&[rat(1, 10), rat(9, 10)])],
        )
        .unwrap();
        let err = shrink_conjugate(&a, &cert, &rat(1, 2)).unwrap_err();
        assert_eq!(err, ConstructionError::RefinementBoundViolated { axis: 1 });
    }

    #[test]
    fn constant_protocol_stays_put() {
        let a = Hypermatrix::constant(vec![2, 3, 2], FieldElement::from_rational(&q(), rat(1, 3))).unwrap();
        let cert = MysteryCertificate::new(
            FieldElement::from_rational(&q(), rat(1, 3)),
            vec![uniform_vector(&q(), 2), uniform_vector(&q(), 3), uniform_vector(&q(), 2)],
        )
        .unwrap();
        let out = approximate_hypermatrix(&a, &cert, &rat(1, 100), 1000).unwrap();
        assert_eq!(out.a, a);
        assert!(check_mystery(&out.a, &out.cert).unwrap().is_valid());
    }

    #[test]
    fn epsilon_choice() {
        let half = FieldElement::from_rational(&q(), rat(1, 2));
        assert_eq!(dyadic_epsilon(&half, &BigInt::from(3)), rat(1, 8));
        let a = FieldElement::from_rational(&q(), rat(3, 5));
        assert_eq!(dyadic_epsilon(&a, &BigInt::from(4)), rat(1, 16));
    }
}
