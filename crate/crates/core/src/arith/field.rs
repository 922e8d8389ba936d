//! The real number field ℚ(λ) = ℚ[x]/(f) with the embedding fixed by an
//! isolating interval for λ.
//!
//! Elements are residues of polynomials modulo `f`. Internally coefficient
//! vectors are trimmed (no trailing zeros), so rational elements have at most
//! one coefficient and multiplying by them never needs a reduction step. The
//! canonical external form is padded to exactly `deg f` coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::algebraic::AlgebraicNumber;
use super::poly::Polynomial;
use super::rational::{floor_int, Rational};
use super::ArithError;

/// Bits of precision the root is refined to when a field is created. Most
/// sign decisions then succeed without any further bisection.
const ROOT_PRECISION_BITS: u32 = 64;

#[derive(Debug)]
pub struct NumberField {
    minpoly: Polynomial,
    root: AlgebraicNumber,
}

pub type FieldRef = Arc<NumberField>;

impl NumberField {
    pub fn new(root: &AlgebraicNumber) -> FieldRef {
        Arc::new(NumberField {
            minpoly: root.minpoly().clone(),
            root: root.refined_bits(ROOT_PRECISION_BITS),
        })
    }

    /// ℚ itself, presented as ℚ[x]/(x).
    pub fn rationals() -> FieldRef {
        Self::new(&AlgebraicNumber::from_rational(Rational::zero()))
    }

    pub fn minpoly(&self) -> &Polynomial {
        &self.minpoly
    }

    pub fn root(&self) -> &AlgebraicNumber {
        &self.root
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(1)
    }

    /// Whether elements of the two fields may be combined. ℚ (any degree-one
    /// presentation) embeds in every field.
    pub fn same_field(&self, other: &NumberField) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.degree() == 1 || other.degree() == 1 {
            return true;
        }
        self.root.same_root(&other.root)
    }
}

#[derive(Clone)]
pub struct FieldElement {
    field: FieldRef,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Polynomial::new(self.coeffs.clone()))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field.same_field(&other.field)
    }
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Reduces a coefficient vector modulo the monic polynomial `f`.
fn reduce(mut v: Vec<Rational>, f: &Polynomial) -> Vec<Rational> {
    let d = f.degree().unwrap_or(1);
    let fc = f.coeffs();
    while v.len() > d {
        let top = v.pop().expect("nonempty");
        if top.is_zero() {
            continue;
        }
        let shift = v.len() - d;
        for j in 0..d {
            if !fc[j].is_zero() {
                v[shift + j] -= &top * &fc[j];
            }
        }
    }
    trim(v)
}

impl FieldElement {
    /// Reduces an arbitrary coefficient vector into the field.
    pub fn new(field: &FieldRef, coeffs: Vec<Rational>) -> Self {
        FieldElement {
            coeffs: reduce(coeffs, &field.minpoly),
            field: field.clone(),
        }
    }

    /// Canonical constructor from exactly `deg f` coefficients.
    pub fn from_coeffs(field: &FieldRef, coeffs: Vec<Rational>) -> Result<Self, ArithError> {
        if coeffs.len() != field.degree() {
            return Err(ArithError::CoefficientLength {
                expected: field.degree(),
                found: coeffs.len(),
            });
        }
        Ok(Self::new(field, coeffs))
    }

    pub fn from_rational(field: &FieldRef, r: Rational) -> Self {
        FieldElement {
            field: field.clone(),
            coeffs: trim(vec![r]),
        }
    }

    pub fn from_int(field: &FieldRef, n: i64) -> Self {
        Self::from_rational(field, Rational::from_integer(BigInt::from(n)))
    }

    pub fn zero(field: &FieldRef) -> Self {
        FieldElement {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &FieldRef) -> Self {
        Self::from_rational(field, Rational::one())
    }

    /// The class of `x`, i.e. λ itself.
    pub fn generator(field: &FieldRef) -> Self {
        Self::new(field, vec![Rational::zero(), Rational::one()])
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    /// Trimmed internal representation.
    pub fn raw_coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Canonical representation: exactly `deg f` coefficients.
    pub fn coeffs(&self) -> Vec<Rational> {
        let mut v = self.coeffs.clone();
        v.resize(self.field.degree(), Rational::zero());
        v
    }

    pub fn as_polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `Some` when the representative is a constant.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Same value viewed in another (compatible) field.
    pub fn in_field(&self, field: &FieldRef) -> Result<Self, ArithError> {
        let ok = self.as_rational().is_some()
            || (field.degree() > 1 && self.field.root().same_root(field.root()));
        if !ok {
            return Err(ArithError::MixedFields);
        }
        Ok(FieldElement {
            field: field.clone(),
            coeffs: self.coeffs.clone(),
        })
    }

    /// Rational constant moved into `field` regardless of its current field.
    pub fn embed_rational(&self, field: &FieldRef) -> Option<Self> {
        self.as_rational().map(|r| Self::from_rational(field, r))
    }

    fn check(&self, other: &Self) -> Result<(), ArithError> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.same_field(&other.field) {
            Ok(())
        } else {
            Err(ArithError::MixedFields)
        }
    }

    /// Field of the result when combining with `other`: prefer the larger one.
    fn join_field(&self, other: &Self) -> FieldRef {
        if self.field.degree() >= other.field.degree() {
            self.field.clone()
        } else {
            other.field.clone()
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        Ok(self.add_unchecked(&-other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero)
            })
            .collect();
        FieldElement {
            field: self.join_field(other),
            coeffs: trim(coeffs),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let field = self.join_field(other);
        if self.is_zero() || other.is_zero() {
            return FieldElement::zero(&field);
        }
        if self.coeffs.len() == 1 {
            return other.scale_in(&self.coeffs[0], field);
        }
        if other.coeffs.len() == 1 {
            return self.scale_in(&other.coeffs[0], field);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        FieldElement {
            coeffs: reduce(out, &field.minpoly),
            field,
        }
    }

    fn scale_in(&self, c: &Rational, field: FieldRef) -> Self {
        if c.is_zero() {
            return FieldElement::zero(&field);
        }
        FieldElement {
            field,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.scale_in(c, self.field.clone())
    }

    pub fn add_rational(&self, c: &Rational) -> Self {
        self.add_unchecked(&FieldElement::from_rational(&self.field, c.clone()))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(FieldElement::from_rational(&self.field, r.recip()));
        }
        let (g, s, _) = self.as_polynomial().ext_gcd(&self.field.minpoly);
        if g.degree() != Some(0) {
            return Err(ArithError::NotInvertible);
        }
        Ok(FieldElement::new(&self.field, s.into_coeffs()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    /// Rational interval containing the real value, for the given root interval.
    fn enclosure(&self, root: &AlgebraicNumber) -> (Rational, Rational) {
        if let Some(r) = self.as_rational() {
            return (r.clone(), r);
        }
        let (lo, hi) = root.interval();
        self.as_polynomial().eval_interval(lo, hi)
    }

    /// Exact sign of the real number `self(λ)` for the field's embedding.
    pub fn sign(&self) -> Ordering {
        sign_of(self, self.field.root())
    }

    /// A rational interval of width at most `eps` containing the real value.
    pub fn bound(&self, eps: &Rational) -> (Rational, Rational) {
        bound(self, self.field.root(), eps)
    }

    /// Exact floor of the real value.
    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return floor_int(&r);
        }
        let (lo, _) = self.bound(&Rational::new(1.into(), 2.into()));
        let k = floor_int(&lo);
        let next = self.add_rational(&-Rational::from_integer(&k + 1));
        if next.sign() == Ordering::Less {
            k
        } else {
            k + 1
        }
    }

    /// Exact comparison of real values.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        (self - other).sign()
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.add_rational(&-r.clone()).sign()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.sign() != Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    /// Characteristic polynomial of multiplication by `self` on ℚ(λ), via
    /// Faddeev–LeVerrier. Monic of degree `deg f`; `self(λ)` is a root.
    pub fn charpoly(&self) -> Polynomial {
        let n = self.field.degree();
        // Column j holds the coordinates of self·x^j.
        let mut cols = Vec::with_capacity(n);
        let mut basis = FieldElement::one(&self.field);
        let x = FieldElement::generator(&self.field);
        for _ in 0..n {
            cols.push((self * &basis).coeffs());
            basis = &basis * &x;
        }
        let a: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for k in 1..=n {
            let mut next = vec![vec![Rational::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = if i == j { c[n - k + 1].clone() } else { Rational::zero() };
                    for (l, row) in m.iter().enumerate() {
                        if !a[i][l].is_zero() && !row[j].is_zero() {
                            acc += &a[i][l] * &row[j];
                        }
                    }
                    next[i][j] = acc;
                }
            }
            m = next;
            let mut trace = Rational::zero();
            for i in 0..n {
                for l in 0..n {
                    trace += &a[i][l] * &m[l][i];
                }
            }
            c[n - k] = -trace / Rational::from_integer(BigInt::from(k));
        }
        Polynomial::new(c)
    }

    /// The real number `self(λ)` as a standalone algebraic number: the
    /// squarefree part of its characteristic polynomial with an isolating
    /// interval obtained by refinement.
    pub fn as_algebraic(&self) -> AlgebraicNumber {
        if let Some(r) = self.as_rational() {
            return AlgebraicNumber::from_rational(r);
        }
        let f = self.charpoly();
        let g = f.div_rem(&f.gcd(&f.derivative())).0.monic();
        let mut eps = Rational::new(BigInt::one(), BigInt::from(1024));
        loop {
            let (lo, hi) = self.bound(&eps);
            if lo == hi {
                return AlgebraicNumber::from_rational(lo);
            }
            if g.count_roots(&lo, &hi) == 1 {
                return AlgebraicNumber::new(g, lo, hi).expect("isolated root of a squarefree polynomial");
            }
            eps /= Rational::from_integer(BigInt::from(16));
        }
    }

    /// Diagnostic floating approximation.
    pub fn approx_f64(&self) -> f64 {
        let (lo, hi) = self.bound(&super::rational::dyadic(60));
        super::rational::to_f64(&((lo + hi) / Rational::from_integer(2.into())))
    }
}

/// Exact sign of `a(λ)`.
///
/// The value is zero exactly when λ is a root of `gcd(rep(a), f)`; otherwise
/// λ's interval is bisected until interval evaluation excludes zero.
pub fn sign_of(a: &FieldElement, root: &AlgebraicNumber) -> Ordering {
    if let Some(r) = a.as_rational() {
        return r.cmp(&Rational::zero());
    }
    let rep = a.as_polynomial();
    let mut cur = root.clone();
    let mut checked_gcd = false;
    loop {
        let (lo, hi) = a.enclosure(&cur);
        if lo.is_positive() {
            return Ordering::Greater;
        }
        if hi.is_negative() {
            return Ordering::Less;
        }
        if !checked_gcd {
            checked_gcd = true;
            let g = rep.gcd(root.minpoly());
            if g.degree().unwrap_or(0) > 0 && vanishes_at(&g, &cur) {
                return Ordering::Equal;
            }
        }
        if let Some(r) = cur.as_rational() {
            return rep.eval(r).cmp(&Rational::zero());
        }
        cur = cur.bisect();
    }
}

/// Whether λ (isolated by `root`) is a root of the divisor `g` of its minpoly.
fn vanishes_at(g: &Polynomial, root: &AlgebraicNumber) -> bool {
    let (lo, hi) = root.interval();
    if lo == hi {
        return g.eval(lo).is_zero();
    }
    // g divides a squarefree f, and [lo, hi] isolates exactly one root of f,
    // which is simple; so g vanishes there iff g changes sign.
    let a = g.sign_at(lo);
    let b = g.sign_at(hi);
    a * b < 0
}

/// Rational interval of width at most `eps` containing `a(λ)`.
pub fn bound(a: &FieldElement, root: &AlgebraicNumber, eps: &Rational) -> (Rational, Rational) {
    if let Some(r) = a.as_rational() {
        return (r.clone(), r);
    }
    let mut cur = root.clone();
    loop {
        let (lo, hi) = a.enclosure(&cur);
        if &hi - &lo <= *eps {
            return (lo, hi);
        }
        if let Some(r) = cur.as_rational() {
            let v = a.as_polynomial().eval(r);
            return (v.clone(), v);
        }
        cur = cur.bisect();
    }
}

pub fn nf_add(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, ArithError> {
    a.checked_add(b)
}

pub fn nf_mul(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, ArithError> {
    a.checked_mul(b)
}

pub fn nf_inv(a: &FieldElement) -> Result<FieldElement, ArithError> {
    a.inv()
}

/// Operator forms panic on mixed fields; use the `checked_*` methods where the
/// operands are not already known to share a field.
impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("mixed number fields")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_sub(rhs).expect("mixed number fields")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("mixed number fields")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
