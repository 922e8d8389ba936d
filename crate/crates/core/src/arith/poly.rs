//! Dense univariate polynomials over ℚ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, parse_rational, Rational};
use super::ArithError;

/// Coefficients are stored lowest degree first and trimmed, so the zero
/// polynomial has no coefficients and the last coefficient is never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `x - c`
    pub fn linear_root(c: Rational) -> Self {
        Self::new(vec![-c, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        self.scale(&lead.recip())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of the value at `x`: -1, 0 or 1.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        sign(&self.eval(x))
    }

    /// Interval Horner evaluation: an enclosure of `{ p(t) : lo <= t <= hi }`.
    pub fn eval_interval(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut acc_lo = Rational::zero();
        let mut acc_hi = Rational::zero();
        for c in self.coeffs.iter().rev() {
            let products = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
            let mut min = products[0].clone();
            let mut max = products[0].clone();
            for p in &products[1..] {
                if *p < min {
                    min = p.clone();
                }
                if *p > max {
                    max = p.clone();
                }
            }
            acc_lo = min + c;
            acc_hi = max + c;
        }
        (acc_lo, acc_hi)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.leading().recip();
        let mut rem = self.coeffs.clone();
        let quot_len = rem.len().saturating_sub(dd);
        let mut quot = vec![Rational::zero(); quot_len];
        for k in (0..quot_len).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let factor = top * &lead_inv;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &factor * d;
            }
            quot[k] = factor;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    pub fn rem(&self, divisor: &Polynomial) -> Polynomial {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Polynomial) -> (Polynomial, Polynomial, Polynomial) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Polynomial::one(), Polynomial::zero());
        let (mut t0, mut t1) = (Polynomial::zero(), Polynomial::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Sturm chain `f, f', -rem(f, f'), ...`.
    pub fn sturm_chain(&self) -> Vec<Polynomial> {
        let mut chain = vec![self.clone()];
        if self.degree().unwrap_or(0) == 0 {
            return chain;
        }
        chain.push(self.derivative());
        loop {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        chain
    }

    /// Number of distinct real roots in the closed interval `[lo, hi]`.
    pub fn count_roots(&self, lo: &Rational, hi: &Rational) -> usize {
        if self.is_zero() || lo > hi {
            return 0;
        }
        let chain = self.sturm_chain();
        let v_lo = sign_variations(&chain, lo);
        let v_hi = sign_variations(&chain, hi);
        let at_lo = usize::from(self.eval(lo).is_zero());
        (v_lo - v_hi) + at_lo
    }

    /// Cauchy bound: every real root lies in `[-B, B]`.
    pub fn root_bound(&self) -> Rational {
        if self.degree().unwrap_or(0) == 0 {
            return Rational::one();
        }
        let lead = self.leading().abs();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        max + Rational::one()
    }
}

fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn sign_variations(chain: &[Polynomial], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = p.sign_at(x);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag: BigRational = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{}", format_rational(&mag))?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Parses either a coefficient list (`"-1, 1, 1"`, lowest degree first,
/// optionally as a JSON array of strings) or a sum of terms such as
/// `"x^2 + x - 1"` or `"2x^3 - 1/2*x + 3"`.
impl std::str::FromStr for Polynomial {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.starts_with('[') {
            let items: Vec<serde_json::Value> =
                serde_json::from_str(t).map_err(|_| ArithError::Parse(s.to_string()))?;
            let coeffs = items
                .iter()
                .map(|v| match v {
                    serde_json::Value::String(x) => parse_rational(x),
                    serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                    _ => Err(ArithError::Parse(s.to_string())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Polynomial::new(coeffs));
        }
        if !t.contains('x') {
            let coeffs = t
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Polynomial::new(coeffs));
        }
        parse_terms(t).ok_or_else(|| ArithError::Parse(s.to_string()))
    }
}

fn parse_terms(s: &str) -> Option<Polynomial> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut current = String::new();
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !current.ends_with('^') {
            terms.push(std::mem::take(&mut current));
        }
        current.push(ch);
    }
    terms.push(current);

    let mut coeffs: Vec<Rational> = Vec::new();
    for term in terms {
        let (negative, body) = match term.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, term.strip_prefix('+').unwrap_or(&term)),
        };
        if body.is_empty() {
            return None;
        }
        let (coeff, power) = match body.find('x') {
            None => (parse_rational(body).ok()?, 0usize),
            Some(pos) => {
                let head = body[..pos].trim_end_matches('*');
                let coeff = if head.is_empty() {
                    Rational::one()
                } else {
                    parse_rational(head).ok()?
                };
                let tail = &body[pos + 1..];
                let power = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^')?.parse::<usize>().ok()?
                };
                (coeff, power)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, Rational::zero());
        }
        coeffs[power] += if negative { -coeff } else { coeff };
    }
    Some(Polynomial::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn parse_forms_agree() {
        let a: Polynomial = "x^2 + x - 1".parse().unwrap();
        let b: Polynomial = "-1, 1, 1".parse().unwrap();
        let c: Polynomial = r#"["-1", "1", "1"]"#.parse().unwrap();
        assert_eq!(a, Polynomial::from_ints(&[-1, 1, 1]));
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d: Polynomial = "2x^3 - 1/2*x + 3".parse().unwrap();
        assert_eq!(d.coeffs(), &[int(3), rat(-1, 2), int(0), int(2)]);
        assert_eq!("x - 1/2".parse::<Polynomial>().unwrap(), Polynomial::linear_root(rat(1, 2)));
        assert!("x^".parse::<Polynomial>().is_err());
        assert!("y + 1".parse::<Polynomial>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["x^2 + x - 1", "2x^3 - 1/2x + 3", "-x", "5"] {
            let p: Polynomial = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<Polynomial>().unwrap(), p);
        }
        assert_eq!(Polynomial::from_ints(&[-1, 1, 1]).to_string(), "x^2 + x - 1");
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)(x+2) and (x-1)(x-3)
        let a = Polynomial::from_ints(&[-2, 1, 1]);
        let b = Polynomial::from_ints(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), Polynomial::from_ints(&[-1, 1]));
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn squarefree_detection() {
        assert!(Polynomial::from_ints(&[-1, 1, 1]).is_squarefree());
        // (x-1)^2
        assert!(!Polynomial::from_ints(&[1, -2, 1]).is_squarefree());
        assert!(!Polynomial::zero().is_squarefree());
    }

    #[test]
    fn sturm_counts() {
        let f = Polynomial::from_ints(&[-2, 0, 1]); // x^2 - 2
        assert_eq!(f.count_roots(&int(-2), &int(2)), 2);
        assert_eq!(f.count_roots(&int(0), &int(1)), 0);
        assert_eq!(f.count_roots(&int(1), &int(2)), 1);
        let g = Polynomial::from_ints(&[0, -1, 0, 1]); // x^3 - x, roots -1, 0, 1
        assert_eq!(g.count_roots(&int(0), &int(1)), 2);
        assert_eq!(g.count_roots(&int(-1), &int(-1)), 1);
        assert_eq!(g.count_roots(&rat(1, 2), &rat(3, 4)), 0);
    }

    #[test]
    fn interval_enclosure_contains_values() {
        let f = Polynomial::from_ints(&[-1, 1, 1]);
        let (lo, hi) = f.eval_interval(&rat(1, 2), &rat(3, 4));
        for k in 0..=4 {
            let x = rat(1, 2) + rat(k, 16);
            let y = f.eval(&x);
            assert!(lo <= y && y <= hi);
        }
    }
}
