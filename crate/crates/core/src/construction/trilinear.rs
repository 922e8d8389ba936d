//! The 2×(n+1)×(n+1) block hypermatrix with mystery-value λ, and the affine
//! shift/scale that moves its entries into [0, 1].

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ConstructionError;
use crate::arith::rational::ceil_int;
use crate::arith::{FieldElement, FieldRef, Rational};
use crate::hypermatrix::{check_mystery, mass, Hypermatrix, MysteryCertificate, MysteryCheck, Vector};

#[derive(Clone, Debug)]
pub struct TrilinearBuild {
    pub a: Hypermatrix,
    pub q: BigInt,
    pub cert: MysteryCertificate,
}

#[derive(Clone, Debug)]
pub struct ShiftScale {
    /// `(A + rJ)/s`.
    pub a: Hypermatrix,
    pub r: BigInt,
    pub s: BigInt,
    /// Mystery-value `(λ + r)/s`, same betas.
    pub cert: MysteryCertificate,
}

/// Smallest integer strictly above both masses.
pub fn minimal_q(v: &[FieldElement], w: &[FieldElement]) -> BigInt {
    let a = mass(v).floor();
    let b = mass(w).floor();
    a.max(b) + 1
}

pub(crate) fn require_valid(
    stage: &'static str,
    a: &Hypermatrix,
    cert: &MysteryCertificate,
) -> Result<(), ConstructionError> {
    match check_mystery(a, cert)? {
        MysteryCheck::Valid => Ok(()),
        MysteryCheck::Invalid { axis, .. } => Err(ConstructionError::CertificateRejected { stage, axis }),
    }
}

/// Axis 0 indexes metacolumns, axis 1 rows, axis 2 columns:
///
/// ```text
/// A[0] = | 0  0    |      A[1] = J + | 0  0          |
///        | 0  q²M  |                 | 0  q²(M − I)  |
/// ```
///
/// with `β⁽¹⁾ = (1−λ, λ)`, `β⁽²⁾ = (1 − J(v)/q, v/q)`, `β⁽³⁾ = (1 − J(w)/q, w/q)`.
pub fn build_trilinear(
    m: &[Vec<Rational>],
    field: &FieldRef,
    v: &[FieldElement],
    w: &[FieldElement],
    q: &BigInt,
) -> Result<TrilinearBuild, ConstructionError> {
    let lambda = FieldElement::generator(field);
    let one = FieldElement::one(field);
    if lambda.sign() != Ordering::Greater || lambda.cmp_value(&one) != Ordering::Less {
        return Err(ConstructionError::LambdaOutOfRange);
    }
    if v.iter().chain(w).any(|x| x.sign() != Ordering::Greater) {
        return Err(ConstructionError::NotPositive);
    }
    if !crate::arith::linalg::dot(v, w).is_one() {
        return Err(ConstructionError::PerpendicularEigenvectors);
    }
    let qr = Rational::from_integer(q.clone());
    if !q.is_positive() || mass(v).cmp_rational(&qr) != Ordering::Less || mass(w).cmp_rational(&qr) != Ordering::Less {
        return Err(ConstructionError::QTooSmall);
    }
    let n = m.len();
    let q2 = &qr * &qr;
    let a = Hypermatrix::from_fn(vec![2, n + 1, n + 1], field, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let block = if i >= 1 && j >= 1 {
            let mut x = m[i - 1][j - 1].clone();
            if k == 1 && i == j {
                x -= Rational::one();
            }
            &q2 * x
        } else {
            Rational::zero()
        };
        let base = if k == 1 { Rational::one() } else { Rational::zero() };
        FieldElement::from_rational(field, base + block)
    })?;
    let qinv = qr.recip();
    let scaled = |x: &[FieldElement]| -> Vector {
        let mut out = vec![&one - &mass(x).scale(&qinv)];
        out.extend(x.iter().map(|e| e.scale(&qinv)));
        out
    };
    let cert = MysteryCertificate::new(
        lambda.clone(),
        vec![vec![&one - &lambda, lambda.clone()], scaled(v), scaled(w)],
    )?;
    require_valid("trilinear", &a, &cert)?;
    Ok(TrilinearBuild { a, q: q.clone(), cert })
}

/// Minimal `r ≥ 0` with `A + rJ ≥ 0` and minimal `s ≥ 1` with `(A + rJ)/s ≤ 1`.
pub fn shift_scale(a: &Hypermatrix, cert: &MysteryCertificate) -> Result<ShiftScale, ConstructionError> {
    let entries = a.rational_entries().ok_or(ConstructionError::EntryOutOfRange)?;
    let min = entries.iter().min().expect("nonempty").clone();
    let max = entries.iter().max().expect("nonempty").clone();
    let r = ceil_int(&-min).max(BigInt::zero());
    let top = max + Rational::from_integer(r.clone());
    let s = ceil_int(&top).max(BigInt::one());
    let rr = Rational::from_integer(r.clone());
    let inv_s = Rational::from_integer(s.clone()).recip();
    let shifted = a.affine(&inv_s, &(&rr * &inv_s));
    let alpha = cert.alpha.add_rational(&rr).scale(&inv_s);
    let new_cert = MysteryCertificate::new(alpha, cert.betas.clone())?;
    require_valid("shift_scale", &shifted, &new_cert)?;
    Ok(ShiftScale { a: shifted, r, s, cert: new_cert })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};
    use crate::arith::{AlgebraicNumber, NumberField};
    use crate::hypermatrix::rational_vector;

    fn two_fifths() -> FieldRef {
        NumberField::new(&AlgebraicNumber::from_rational(rat(2, 5)))
    }

    pub(crate) fn build_two_fifths() -> TrilinearBuild {
        let k = two_fifths();
        let one = vec![FieldElement::one(&k)];
        build_trilinear(&[vec![rat(2, 5)]], &k, &one, &one, &BigInt::from(2)).unwrap()
    }

    #[test]
    fn two_fifths_blocks() {
        let b = build_two_fifths();
        let e = b.a.rational_entries().unwrap();
        // Substituting into the block formula by hand.
        let expected = [int(0), int(0), int(0), rat(8, 5), int(1), int(1), int(1), rat(-7, 5)];
        assert_eq!(e, expected);
        let k = two_fifths();
        assert_eq!(b.cert.betas[0], rational_vector(&k, &[rat(3, 5), rat(2, 5)]));
        assert_eq!(b.cert.betas[1], rational_vector(&k, &[rat(1, 2), rat(1, 2)]));
        assert_eq!(b.cert.betas[2], rational_vector(&k, &[rat(1, 2), rat(1, 2)]));
        let value = b.a.evaluate(&b.cert.betas).unwrap();
        assert_eq!(value.as_rational(), Some(rat(2, 5)));
    }

    #[test]
    fn q_too_small() {
        let k = two_fifths();
        let one = vec![FieldElement::one(&k)];
        let err = build_trilinear(&[vec![rat(2, 5)]], &k, &one, &one, &BigInt::from(1)).unwrap_err();
        assert_eq!(err, ConstructionError::QTooSmall);
        assert_eq!(minimal_q(&one, &one), BigInt::from(2));
    }

    #[test]
    fn lambda_out_of_range() {
        let k = NumberField::new(&AlgebraicNumber::from_rational(rat(3, 2)));
        let one = vec![FieldElement::one(&k)];
        let err = build_trilinear(&[vec![rat(3, 2)]], &k, &one, &one, &BigInt::from(2)).unwrap_err();
        assert_eq!(err, ConstructionError::LambdaOutOfRange);
    }

    #[test]
    fn two_fifths_shift_scale() {
        let b = build_two_fifths();
        let s = shift_scale(&b.a, &b.cert).unwrap();
        assert_eq!((s.r.clone(), s.s.clone()), (BigInt::from(2), BigInt::from(4)));
        assert_eq!(s.cert.alpha.as_rational(), Some(rat(3, 5)));
        let e = s.a.rational_entries().unwrap();
        assert!(e.iter().all(|x| *x >= int(0) && *x <= int(1)));
    }

    #[test]
    fn already_in_range() {
        let a = Hypermatrix::from_ints(vec![2, 2], &[1, 0, 0, 1]).unwrap();
        let q = NumberField::rationals();
        let cert = MysteryCertificate::new(
            FieldElement::from_rational(&q, rat(1, 2)),
            vec![rational_vector(&q, &[rat(1, 2), rat(1, 2)]); 2],
        )
        .unwrap();
        let s = shift_scale(&a, &cert).unwrap();
        assert_eq!((s.r, s.s), (BigInt::zero(), BigInt::one()));
        assert_eq!(s.a, a);
    }
}
