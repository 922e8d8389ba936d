//! Real algebraic numbers as a squarefree polynomial plus an isolating
//! rational interval. All refinement is exact bisection.

use std::fmt;

use num_traits::{One, Zero};

use super::poly::Polynomial;
use super::rational::{dyadic, format_rational, to_f64, Rational};
use super::ArithError;

/// A real root of a monic squarefree rational polynomial.
///
/// Invariant: `minpoly` has exactly one real root in `[lo, hi]`. Either
/// `lo == hi` is that root, or `minpoly(lo) * minpoly(hi) < 0`.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    minpoly: Polynomial,
    lo: Rational,
    hi: Rational,
}

impl AlgebraicNumber {
    /// Validates and normalizes `(f, [lo, hi])`.
    pub fn new(f: Polynomial, lo: Rational, hi: Rational) -> Result<Self, ArithError> {
        if f.degree().unwrap_or(0) == 0 {
            return Err(ArithError::ConstantPolynomial);
        }
        if !f.is_squarefree() {
            return Err(ArithError::NotSquarefree);
        }
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let f = f.monic();
        match f.count_roots(&lo, &hi) {
            0 => return Err(ArithError::NoRootInInterval),
            1 => {}
            _ => return Err(ArithError::MultipleRootsInInterval),
        }
        Ok(Self::normalized(f, lo, hi))
    }

    pub fn from_rational(r: Rational) -> Self {
        AlgebraicNumber {
            minpoly: Polynomial::linear_root(r.clone()),
            lo: r.clone(),
            hi: r,
        }
    }

    fn normalized(f: Polynomial, lo: Rational, hi: Rational) -> Self {
        if f.degree() == Some(1) {
            let root = -f.coeff(0);
            return Self::from_rational_with(f, root);
        }
        if f.eval(&lo).is_zero() {
            return Self::from_rational_with(f, lo);
        }
        if f.eval(&hi).is_zero() {
            return Self::from_rational_with(f, hi);
        }
        AlgebraicNumber { minpoly: f, lo, hi }
    }

    fn from_rational_with(f: Polynomial, root: Rational) -> Self {
        AlgebraicNumber {
            minpoly: f,
            lo: root.clone(),
            hi: root,
        }
    }

    pub fn minpoly(&self) -> &Polynomial {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// The exact value when the isolating interval has collapsed to a point.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.lo == self.hi).then_some(&self.lo)
    }

    /// One bisection step.
    pub fn bisect(&self) -> Self {
        if self.lo == self.hi {
            return self.clone();
        }
        let mid = (&self.lo + &self.hi) / Rational::from_integer(2.into());
        let at_mid = self.minpoly.sign_at(&mid);
        if at_mid == 0 {
            return Self::from_rational_with(self.minpoly.clone(), mid);
        }
        if self.minpoly.sign_at(&self.lo) == at_mid {
            AlgebraicNumber {
                minpoly: self.minpoly.clone(),
                lo: mid,
                hi: self.hi.clone(),
            }
        } else {
            AlgebraicNumber {
                minpoly: self.minpoly.clone(),
                lo: self.lo.clone(),
                hi: mid,
            }
        }
    }

    /// Bisects until the interval width is at most `width`.
    pub fn refined_to(&self, width: &Rational) -> Self {
        let mut cur = self.clone();
        while cur.width() > *width {
            cur = cur.bisect();
        }
        cur
    }

    /// Bisects until the width is at most `2^-bits`.
    pub fn refined_bits(&self, bits: u32) -> Self {
        self.refined_to(&dyadic(bits))
    }

    /// True iff both numbers are the same real root of the same polynomial.
    pub fn same_root(&self, other: &AlgebraicNumber) -> bool {
        if self.minpoly != other.minpoly {
            return false;
        }
        let lo = if self.lo < other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi > other.hi { &self.hi } else { &other.hi };
        let overlap = self.lo <= other.hi && other.lo <= self.hi;
        overlap && self.minpoly.count_roots(lo, hi) == 1
    }

    /// Diagnostic floating approximation.
    pub fn approx_f64(&self) -> f64 {
        let r = self.refined_bits(60);
        to_f64(&((&r.lo + &r.hi) / Rational::from_integer(2.into())))
    }

    pub fn is_in_unit_interval_open(&self) -> bool {
        let zero = Rational::zero();
        let one = Rational::one();
        let mut cur = self.clone();
        loop {
            if cur.lo > zero && cur.hi < one {
                return true;
            }
            if cur.hi <= zero || cur.lo >= one {
                return false;
            }
            if cur.lo == cur.hi {
                return cur.lo > zero && cur.lo < one;
            }
            cur = cur.bisect();
        }
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.same_root(other)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{}", format_rational(r)),
            None => write!(
                f,
                "root of {} in [{}, {}]",
                self.minpoly,
                format_rational(&self.lo),
                format_rational(&self.hi)
            ),
        }
    }
}

/// Builds the real algebraic number isolated by `[lo, hi]`.
pub fn make_algebraic(f: Polynomial, lo: Rational, hi: Rational) -> Result<AlgebraicNumber, ArithError> {
    AlgebraicNumber::new(f, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    /// Independent oracle: scan a fine grid for sign changes.
    fn grid_sign_changes(f: &Polynomial, lo: i64, hi: i64, steps: i64) -> usize {
        let mut count = 0;
        let mut prev = f.eval(&int(lo));
        for k in 1..=steps {
            let x = int(lo) + Rational::new(((hi - lo) * k).into(), steps.into());
            let y = f.eval(&x);
            if (prev < Rational::zero()) != (y < Rational::zero()) {
                count += 1;
            }
            prev = y;
        }
        count
    }

    #[test]
    fn linear_is_rational() {
        let a = make_algebraic(Polynomial::linear_root(rat(1, 2)), int(0), int(1)).unwrap();
        assert_eq!(a.as_rational(), Some(&rat(1, 2)));
        assert_eq!(a.degree(), 1);
    }

    #[test]
    fn golden_conjugate() {
        let f = Polynomial::from_ints(&[-1, 1, 1]);
        assert_eq!(grid_sign_changes(&f, 0, 1, 1000), 1);
        let a = make_algebraic(f, int(0), int(1)).unwrap();
        assert!(a.as_rational().is_none());
        let r = a.refined_to(&rat(1, 1000));
        let (lo, hi) = r.interval();
        assert!(*lo >= rat(617, 1000) && *hi <= rat(619, 1000));
    }

    #[test]
    fn errors() {
        let f = Polynomial::from_ints(&[-2, 0, 1]);
        assert_eq!(make_algebraic(f.clone(), int(0), int(1)).unwrap_err(), ArithError::NoRootInInterval);
        assert_eq!(
            make_algebraic(f, int(-2), int(2)).unwrap_err(),
            ArithError::MultipleRootsInInterval
        );
        let sq = Polynomial::from_ints(&[1, -2, 1]);
        assert_eq!(make_algebraic(sq, int(0), int(2)).unwrap_err(), ArithError::NotSquarefree);
        assert_eq!(
            make_algebraic(Polynomial::constant(int(3)), int(0), int(1)).unwrap_err(),
            ArithError::ConstantPolynomial
        );
    }

    #[test]
    fn normalizes_monic_and_endpoint_roots() {
        let f = Polynomial::from_ints(&[-2, 0, 2]); // 2x^2 - 2, root at 1
        let a = make_algebraic(f, rat(1, 2), int(1)).unwrap();
        assert!(a.minpoly().is_monic());
        assert_eq!(a.as_rational(), Some(&int(1)));
    }

    #[test]
    fn idempotent_rewrap() {
        let f = Polynomial::from_ints(&[-2, 0, 1]);
        let a = make_algebraic(f, int(1), int(2)).unwrap();
        let (lo, hi) = a.interval();
        let b = make_algebraic(a.minpoly().clone(), lo.clone(), hi.clone()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.minpoly(), b.minpoly());
        let c = a.refined_bits(20);
        assert_eq!(a, c);
        let other = make_algebraic(a.minpoly().clone(), int(-2), int(-1)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn bisection_can_hit_rational_root_of_reducible_input() {
        // (x - 1/2)(x^2 - 3): roots 1/2 and ±sqrt(3); isolate 1/2 in [0, 1].
        let f = &Polynomial::linear_root(rat(1, 2)) * &Polynomial::from_ints(&[-3, 0, 1]);
        let a = make_algebraic(f, int(0), int(1)).unwrap();
        assert_eq!(a.refined_bits(4).as_rational(), Some(&rat(1, 2)));
    }
}
