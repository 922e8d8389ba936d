//! Dense exact linear algebra over ℚ or ℚ(λ): Gaussian elimination,
//! kernels, determinants and inverses. Matrices are `Vec<Vec<T>>`, row-major.

use num_traits::{One, Zero};

use super::field::FieldElement;
use super::rational::Rational;
use super::ArithError;

/// Minimal field interface used by the elimination routines.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_value(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Result<Self, ArithError>;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            Err(ArithError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
}

impl Scalar for FieldElement {
    fn zero_like(&self) -> Self {
        FieldElement::zero(self.field())
    }
    fn one_like(&self) -> Self {
        FieldElement::one(self.field())
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Result<Self, ArithError> {
        self.inv()
    }
}

pub type Matrix<T> = Vec<Vec<T>>;

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Matrix<T> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = row[0].zero_like();
                    for k in 0..inner {
                        if !row[k].is_zero_value() && !b[k][j].is_zero_value() {
                            acc = acc.plus(&row[k].times(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `M x` for a column vector `x`.
pub fn mat_vec<T: Scalar>(m: &[Vec<T>], x: &[T]) -> Vec<T> {
    m.iter().map(|row| dot(row, x)).collect()
}

/// `x M` for a row vector `x`.
pub fn vec_mat<T: Scalar>(x: &[T], m: &[Vec<T>]) -> Vec<T> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    (0..cols)
        .map(|j| {
            let mut acc = x[0].zero_like();
            for (i, xi) in x.iter().enumerate() {
                if !xi.is_zero_value() && !m[i][j].is_zero_value() {
                    acc = acc.plus(&xi.times(&m[i][j]));
                }
            }
            acc
        })
        .collect()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = a[0].zero_like();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero_value() && !y.is_zero_value() {
            acc = acc.plus(&x.times(y));
        }
    }
    acc
}

pub fn identity<T: Scalar>(n: usize, like: &T) -> Matrix<T> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { like.one_like() } else { like.zero_like() })
                .collect()
        })
        .collect()
}

/// Reduced row echelon form. Returns the pivot columns. Fails only when a
/// nonzero pivot is a zero divisor (possible for reducible moduli).
pub fn rref<T: Scalar>(m: &mut [Vec<T>]) -> Result<Vec<usize>, ArithError> {
    let rows = m.len();
    if rows == 0 {
        return Ok(Vec::new());
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero_value()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inverse()?;
        for j in c..cols {
            m[r][j] = m[r][j].times(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero_value() {
                let factor = m[i][c].clone();
                for j in c..cols {
                    if !m[r][j].is_zero_value() {
                        let t = factor.times(&m[r][j]);
                        m[i][j] = m[i][j].minus(&t);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

/// Basis of the right null space `{x : M x = 0}`; `like` supplies the field
/// when the matrix has no rows.
pub fn kernel<T: Scalar>(m: &[Vec<T>], cols: usize, like: &T) -> Result<Vec<Vec<T>>, ArithError> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a)?;
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut x = vec![like.zero_like(); cols];
            x[f] = like.one_like();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = a[row][f].negated();
            }
            x
        })
        .collect();
    Ok(basis)
}

/// Basis of the left null space `{y : y M = 0}`.
pub fn left_kernel<T: Scalar>(m: &[Vec<T>], like: &T) -> Result<Vec<Vec<T>>, ArithError> {
    kernel(&transpose(m), m.len(), like)
}

pub fn determinant<T: Scalar>(m: &[Vec<T>]) -> Result<T, ArithError> {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square nonempty matrix");
    let mut a = m.to_vec();
    let mut det = a[0][0].one_like();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero_value()) else {
            return Ok(det.zero_like());
        };
        if p != c {
            a.swap(p, c);
            det = det.negated();
        }
        det = det.times(&a[c][c]);
        let inv = a[c][c].inverse()?;
        for i in c + 1..n {
            if a[i][c].is_zero_value() {
                continue;
            }
            let factor = a[i][c].times(&inv);
            for j in c..n {
                let t = factor.times(&a[c][j]);
                a[i][j] = a[i][j].minus(&t);
            }
        }
    }
    Ok(det)
}

/// `None` when singular.
pub fn inverse<T: Scalar>(m: &[Vec<T>]) -> Result<Option<Matrix<T>>, ArithError> {
    let n = m.len();
    let like = &m[0][0];
    let mut aug: Matrix<T> = m
        .iter()
        .zip(identity(n, like))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug)?;
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Ok(None);
    }
    Ok(Some(aug.into_iter().map(|row| row[n..].to_vec()).collect()))
}

/// All solutions of `M x = b` as (particular, kernel basis), or `None`.
pub fn solve<T: Scalar>(
    m: &[Vec<T>],
    b: &[T],
    cols: usize,
    like: &T,
) -> Result<Option<(Vec<T>, Vec<Vec<T>>)>, ArithError> {
    let mut aug: Matrix<T> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect())
        .collect();
    let pivots = rref(&mut aug)?;
    if pivots.last() == Some(&cols) {
        return Ok(None);
    }
    let mut x = vec![like.zero_like(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols].clone();
    }
    Ok(Some((x, kernel(m, cols, like)?)))
}
