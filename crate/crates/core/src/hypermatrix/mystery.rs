//! Mystery-value certificates and their exact verification.
//!
//! `α` is a mystery-value of `A` with mystery-vectors `β⁽ⁱ⁾` when, for every
//! axis `j`, the linear functional `(αJ − A)(β⁽¹⁾, …, ·, …, β⁽ᵖ⁾)` left in slot
//! `j` is identically zero and every `J(β⁽ⁱ⁾)` is nonzero.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::{
    basis_vector, common_field, lift_all, mass, rational_vector, Hypermatrix, HypermatrixError,
    Vector,
};
use crate::arith::linalg::solve;
use crate::arith::{FieldElement, FieldRef, NumberField, Rational};

/// Nonnegative coordinates summing exactly to one.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticVector(Vector);

impl StochasticVector {
    pub fn new(coords: Vector) -> Result<Self, HypermatrixError> {
        if coords.is_empty() {
            return Err(HypermatrixError::NotStochastic("empty vector".into()));
        }
        if let Some(k) = coords.iter().position(|c| c.sign() == Ordering::Less) {
            return Err(HypermatrixError::NotStochastic(format!("coordinate {k} is negative")));
        }
        if !mass(&coords).is_one() {
            return Err(HypermatrixError::NotStochastic("mass is not 1".into()));
        }
        Ok(StochasticVector(coords))
    }

    pub fn uniform(field: &FieldRef, n: usize) -> Self {
        StochasticVector(super::uniform_vector(field, n))
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn into_inner(self) -> Vector {
        self.0
    }
}

pub fn is_stochastic(v: &[FieldElement]) -> bool {
    !v.is_empty() && v.iter().all(FieldElement::is_nonnegative) && mass(v).is_one()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MysteryCertificate {
    pub alpha: FieldElement,
    pub betas: Vec<Vector>,
}

impl MysteryCertificate {
    pub fn new(alpha: FieldElement, betas: Vec<Vector>) -> Result<Self, HypermatrixError> {
        let field = common_field(alpha.field(), betas.iter().flatten())?;
        Ok(MysteryCertificate {
            alpha: alpha.in_field(&field)?,
            betas: betas
                .iter()
                .map(|b| lift_all(b, &field))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn field(&self) -> &FieldRef {
        self.alpha.field()
    }

    pub fn is_stochastic(&self) -> bool {
        self.betas.iter().all(|b| is_stochastic(b))
    }

    pub fn stochastic_betas(&self) -> Result<Vec<StochasticVector>, HypermatrixError> {
        self.betas.iter().cloned().map(StochasticVector::new).collect()
    }

    pub fn format(&self) -> Vec<usize> {
        self.betas.iter().map(Vec::len).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MysteryCheck {
    Valid,
    /// First axis whose residual functional is nonzero, with that functional.
    Invalid { axis: usize, residual: Vector },
}

impl MysteryCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, MysteryCheck::Valid)
    }
}

fn check_shapes(a: &Hypermatrix, cert: &MysteryCertificate) -> Result<FieldRef, HypermatrixError> {
    if cert.betas.len() != a.arity() {
        return Err(HypermatrixError::ArityMismatch(a.arity(), cert.betas.len()));
    }
    for (axis, (b, &n)) in cert.betas.iter().zip(a.format()).enumerate() {
        if b.len() != n {
            return Err(HypermatrixError::FormatMismatch(format!(
                "beta on axis {axis} has length {}, axis has {n}",
                b.len()
            )));
        }
    }
    Ok(common_field(a.field(), std::iter::once(&cert.alpha).chain(cert.betas.iter().flatten()))?)
}

/// Exact check of the mystery-value equations, axis by axis.
///
/// The residual on axis `j` is `α·Π_{i≠j} J(β⁽ⁱ⁾) − A(β, …, ·, …, β)`, which
/// is the functional of `αJ − A` without materializing `αJ`.
pub fn check_mystery(a: &Hypermatrix, cert: &MysteryCertificate) -> Result<MysteryCheck, HypermatrixError> {
    let field = check_shapes(a, cert)?;
    let masses: Vec<FieldElement> = cert.betas.iter().map(|b| mass(b)).collect();
    if let Some(axis) = masses.iter().position(FieldElement::is_zero) {
        return Err(HypermatrixError::ZeroMass { axis });
    }
    let alpha = cert.alpha.in_field(&field)?;
    for j in 0..a.arity() {
        let mut scale = alpha.clone();
        for (i, m) in masses.iter().enumerate() {
            if i != j {
                scale = &scale * m;
            }
        }
        let functional = a.contract_all_except(&cert.betas, j)?;
        let residual: Vector = functional.iter().map(|f| &scale - f).collect();
        if residual.iter().any(|r| !r.is_zero()) {
            return Ok(MysteryCheck::Invalid { axis: j, residual });
        }
    }
    Ok(MysteryCheck::Valid)
}

/// Robustness of a {0,1} protocol by direct substitution: every single-axis
/// basis vector, with the betas elsewhere, must evaluate to the bias.
pub fn check_robust_binary(a: &Hypermatrix, cert: &MysteryCertificate) -> Result<bool, HypermatrixError> {
    if !a.is_binary() {
        return Err(HypermatrixError::NonBinaryEntries);
    }
    let field = check_shapes(a, cert)?;
    let masses: Vec<FieldElement> = cert.betas.iter().map(|b| mass(b)).collect();
    for j in 0..a.arity() {
        let mut expected = cert.alpha.in_field(&field)?;
        for (i, m) in masses.iter().enumerate() {
            if i != j {
                expected = &expected * m;
            }
        }
        for k in 0..a.format()[j] {
            let mut xs = cert.betas.clone();
            xs[j] = basis_vector(&field, a.format()[j], k);
            if a.evaluate(&xs)? != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A mystery-value of a square rational matrix with mass-one vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MysteryPair {
    pub alpha: Rational,
    /// Row-side vector `β⁽¹⁾` with `β⁽¹⁾ᵀA = α·1ᵀ`.
    pub left: Vec<Rational>,
    /// Column-side vector `β⁽²⁾` with `Aβ⁽²⁾ = α·1`.
    pub right: Vec<Rational>,
}

impl MysteryPair {
    pub fn certificate(&self) -> MysteryCertificate {
        let q = NumberField::rationals();
        MysteryCertificate {
            alpha: FieldElement::from_rational(&q, self.alpha.clone()),
            betas: vec![rational_vector(&q, &self.left), rational_vector(&q, &self.right)],
        }
    }
}

/// Affine solution set of `{(x, α) : M x = α·1, Σx = 1}` in the unknowns
/// `(x₁…xₙ, α)`.
type Affine = (Vec<Rational>, Vec<Vec<Rational>>);

fn one_sided(m: &[Vec<Rational>]) -> Option<Affine> {
    let n = m.len();
    let mut rows: Vec<Vec<Rational>> = m
        .iter()
        .map(|r| {
            let mut row = r.clone();
            row.push(-Rational::one());
            row
        })
        .collect();
    let mut mass_row = vec![Rational::one(); n];
    mass_row.push(Rational::zero());
    rows.push(mass_row);
    let mut rhs = vec![Rational::zero(); n];
    rhs.push(Rational::one());
    solve(&rows, &rhs, n + 1, &Rational::zero()).expect("rational pivots are invertible")
}

/// `Some(α)` when the α-coordinate is the same across the solution set.
fn pinned_alpha(sol: &Affine, n: usize) -> Option<Rational> {
    let (x, kernel) = sol;
    kernel.iter().all(|k| k[n].is_zero()).then(|| x[n].clone())
}

fn at_alpha(m: &[Vec<Rational>], alpha: &Rational) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut rows: Vec<Vec<Rational>> = m.to_vec();
    rows.push(vec![Rational::one(); n]);
    let mut rhs = vec![alpha.clone(); n];
    rhs.push(Rational::one());
    solve(&rows, &rhs, n, &Rational::zero())
        .expect("rational pivots are invertible")
        .map(|(x, _)| x)
}

/// Finds the (unique, necessarily rational) mystery-value of a square
/// rational bilinear form, together with mass-one mystery-vectors.
pub fn find_mystery_value_2d(a: &[Vec<Rational>]) -> Option<MysteryPair> {
    let n = a.len();
    assert!(n > 0 && a.iter().all(|r| r.len() == n), "square nonempty matrix");
    let at = crate::arith::linalg::transpose(a);
    let right = one_sided(a)?;
    let left = one_sided(&at)?;
    let alpha = match (pinned_alpha(&right, n), pinned_alpha(&left, n)) {
        (Some(x), Some(y)) => (x == y).then_some(x)?,
        (Some(x), None) | (None, Some(x)) => x,
        // Both projections free would give two mystery-values, which the
        // uniqueness argument rules out.
        (None, None) => unreachable!("bilinear form with two mystery-values"),
    };
    let right = at_alpha(a, &alpha)?;
    let left = at_alpha(&at, &alpha)?;
    Some(MysteryPair { alpha, left, right })
}
