//! Expansion of rational-entry protocols into {0,1} protocols.

use num_traits::{One, Signed, ToPrimitive};

use super::trilinear::require_valid;
use super::ConstructionError;
use crate::arith::{FieldElement, NumberField, Rational};
use crate::hypermatrix::{kron_vec, uniform_vector, Hypermatrix, MysteryCertificate, Vector};

/// Default cap on the number of entries of a binary expansion.
pub const DEFAULT_BINARY_CAP: u128 = 100_000_000;

/// A {0,1} protocol together with its certificate.
#[derive(Clone, Debug)]
pub struct Realization {
    pub a: Hypermatrix,
    pub cert: MysteryCertificate,
}

/// `b×…×b` protocol, heads iff `(i₁ + … + i_p) mod b < a`, uniform betas.
pub fn rational_to_binary(a: u64, b: u64, p: usize) -> Result<Realization, ConstructionError> {
    if b == 0 || a > b || p == 0 {
        return Err(ConstructionError::InvalidFraction);
    }
    let size = (b as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if size > DEFAULT_BINARY_CAP {
        return Err(ConstructionError::SizeCapExceeded { entries: size, cap: DEFAULT_BINARY_CAP });
    }
    let q = NumberField::rationals();
    let zero = FieldElement::zero(&q);
    let one = FieldElement::one(&q);
    let h = Hypermatrix::from_fn(vec![b as usize; p], &q, |idx| {
        let s: u64 = idx.iter().map(|&i| i as u64).sum();
        if s % b < a {
            one.clone()
        } else {
            zero.clone()
        }
    })?;
    let cert = MysteryCertificate::new(
        FieldElement::from_rational(&q, Rational::new(a.into(), b.into())),
        vec![uniform_vector(&q, b as usize); p],
    )?;
    Ok(Realization { a: h, cert })
}

/// `rational_to_binary` for a rational in [0, 1].
pub fn realize_rational(w: &Rational, p: usize) -> Result<Realization, ConstructionError> {
    if w.is_negative() || *w > Rational::one() {
        return Err(ConstructionError::EntryOutOfRange);
    }
    let (a, b) = (w.numer().to_u64(), w.denom().to_u64());
    match (a, b) {
        (Some(a), Some(b)) => rational_to_binary(a, b, p),
        _ => Err(ConstructionError::SizeCapExceeded { entries: u128::MAX, cap: DEFAULT_BINARY_CAP }),
    }
}

fn checked_product(xs: impl IntoIterator<Item = usize>) -> u128 {
    xs.into_iter()
        .try_fold(1u128, |acc, x| acc.checked_mul(x as u128))
        .unwrap_or(u128::MAX)
}

/// Replaces entry `w_I` (flat index `I`) by `J ⊗ … ⊗ R_I ⊗ … ⊗ J`, where
/// `R_I` realizes `w_I` as a {0,1} protocol. The result has mystery-vectors
/// `β⁽ᵃ⁾ ⊗ β₁⁽ᵃ⁾ ⊗ … ⊗ β_N⁽ᵃ⁾` and the same mystery-value.
///
/// With `realizations = None`, each entry uses [`rational_to_binary`].
pub fn cooperative_substitution(
    a: &Hypermatrix,
    cert: &MysteryCertificate,
    realizations: Option<Vec<Realization>>,
    cap: u128,
) -> Result<(Hypermatrix, MysteryCertificate), ConstructionError> {
    let p = a.arity();
    let entries = a.rational_entries().ok_or(ConstructionError::EntryOutOfRange)?;
    if entries.iter().any(|w| w.is_negative() || *w > Rational::one()) {
        return Err(ConstructionError::EntryOutOfRange);
    }
    // Cheap size check before building anything: default realizations of
    // `a/b` have axis length `b`.
    let lens: Vec<Vec<usize>> = match &realizations {
        Some(rs) => rs.iter().map(|r| r.a.format().to_vec()).collect(),
        None => entries
            .iter()
            .map(|w| vec![w.denom().to_usize().unwrap_or(usize::MAX); p])
            .collect(),
    };
    if lens.len() != entries.len() {
        return Err(ConstructionError::FormatMismatch);
    }
    let axis_len: Vec<u128> = (0..p)
        .map(|ax| {
            checked_product(lens.iter().map(|l| l.get(ax).copied().unwrap_or(1)))
                .saturating_mul(a.format()[ax] as u128)
        })
        .collect();
    let total = axis_len.iter().try_fold(1u128, |acc, &x| acc.checked_mul(x)).unwrap_or(u128::MAX);
    if total > cap {
        return Err(ConstructionError::SizeCapExceeded { entries: total, cap });
    }
    let realizations = match realizations {
        Some(rs) => rs,
        None => entries.iter().map(|w| realize_rational(w, p)).collect::<Result<_, _>>()?,
    };
    for (r, w) in realizations.iter().zip(&entries) {
        if r.a.arity() != p {
            return Err(ConstructionError::ArityMismatch);
        }
        if !r.a.is_binary() || r.cert.alpha.as_rational().as_ref() != Some(w) || !r.cert.is_stochastic() {
            return Err(ConstructionError::InvalidRealization);
        }
    }

    // strides[ax][I]: weight of factor I's coordinate inside the inner index.
    let inner_len: Vec<usize> = (0..p)
        .map(|ax| realizations.iter().map(|r| r.a.format()[ax]).product())
        .collect();
    let strides: Vec<Vec<usize>> = (0..p)
        .map(|ax| {
            let mut s = vec![1usize; realizations.len()];
            for i in (0..realizations.len().saturating_sub(1)).rev() {
                s[i] = s[i + 1] * realizations[i + 1].a.format()[ax];
            }
            s
        })
        .collect();
    let format: Vec<usize> = (0..p).map(|ax| a.format()[ax] * inner_len[ax]).collect();
    let field = cert.field().clone();
    let zero = FieldElement::zero(&field);
    let one = FieldElement::one(&field);
    let mut outer = vec![0usize; p];
    let mut coords = vec![0usize; p];
    let out = Hypermatrix::from_fn(format, &field, |idx| {
        for ax in 0..p {
            outer[ax] = idx[ax] / inner_len[ax];
        }
        let flat = a.flat_index(&outer);
        let r = &realizations[flat];
        for ax in 0..p {
            let inner = idx[ax] % inner_len[ax];
            coords[ax] = (inner / strides[ax][flat]) % r.a.format()[ax];
        }
        if r.a.get(&coords).is_one() {
            one.clone()
        } else {
            zero.clone()
        }
    })?;
    let betas: Vec<Vector> = (0..p)
        .map(|ax| {
            realizations
                .iter()
                .fold(cert.betas[ax].clone(), |acc, r| kron_vec(&acc, &r.cert.betas[ax]))
        })
        .collect();
    let new_cert = MysteryCertificate::new(cert.alpha.clone(), betas)?;
    require_valid("cooperative_substitution", &out, &new_cert)?;
    Ok((out, new_cert))
}
