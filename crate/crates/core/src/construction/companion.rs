//! Companion matrix of the minimal polynomial, its λ-eigenvectors, and a
//! rational change of basis making both eigenvectors positive.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::ConstructionError;
use crate::arith::linalg::{self, determinant, inverse, mat_mul, Matrix};
use crate::arith::rational::{dyadic, round_dyadic};
use crate::arith::{FieldElement, FieldRef, Polynomial, Rational};
use crate::hypermatrix::Vector;

/// Rational precisions `2^-k`, `k = 0..=POSITIVIZE_BUDGET`, tried when rounding
/// the change of basis.
pub const POSITIVIZE_BUDGET: u32 = 32;

#[derive(Clone, Debug)]
pub struct CompanionData {
    pub l: Matrix<Rational>,
    pub field: FieldRef,
    /// Left eigenvector, scaled so that `v·w = 1`.
    pub v: Vector,
    /// Right eigenvector.
    pub w: Vector,
}

#[derive(Clone, Debug)]
pub struct Positivized {
    /// `P L P⁻¹`.
    pub m: Matrix<Rational>,
    pub p: Matrix<Rational>,
    pub v: Vector,
    pub w: Vector,
}

/// Subdiagonal of ones, last column `−a₀, …, −a_{n−1}`.
pub fn companion_matrix(f: &Polynomial) -> Result<Matrix<Rational>, ConstructionError> {
    let n = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(ConstructionError::NotMonic),
    };
    if !f.is_monic() {
        return Err(ConstructionError::NotMonic);
    }
    let mut l = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        if i > 0 {
            l[i][i - 1] = Rational::one();
        }
        l[i][n - 1] = -f.coeff(i);
    }
    Ok(l)
}

pub fn lift_matrix(m: &[Vec<Rational>], field: &FieldRef) -> Matrix<FieldElement> {
    m.iter()
        .map(|row| row.iter().map(|x| FieldElement::from_rational(field, x.clone())).collect())
        .collect()
}

/// Exact left and right eigenvectors of `L` for the field generator λ.
pub fn eigenpair(l: &[Vec<Rational>], field: &FieldRef) -> Result<CompanionData, ConstructionError> {
    let n = l.len();
    let lambda = FieldElement::generator(field);
    let mut shifted = lift_matrix(l, field);
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] = &row[i] - &lambda;
    }
    let zero = FieldElement::zero(field);
    let right = linalg::kernel(&shifted, n, &zero)?;
    let left = linalg::left_kernel(&shifted, &zero)?;
    if right.len() != 1 || left.len() != 1 {
        return Err(ConstructionError::NotAnEigenvalue);
    }
    let w = right.into_iter().next().expect("one vector");
    let v = left.into_iter().next().expect("one vector");
    let vw = linalg::dot(&v, &w);
    if vw.is_zero() {
        return Err(ConstructionError::PerpendicularEigenvectors);
    }
    let inv = vw.inv()?;
    let v = v.iter().map(|x| x * &inv).collect();
    Ok(CompanionData { l: l.to_vec(), field: field.clone(), v, w })
}

fn all_positive(v: &[FieldElement]) -> bool {
    v.iter().all(|x| x.sign() == Ordering::Greater)
}

fn midpoint(x: &FieldElement) -> Rational {
    let (lo, hi) = x.bound(&dyadic(48));
    (lo + hi) / Rational::from_integer(2.into())
}

/// Largest `c = k/100` with `c ≤ 1/√n`; balances `J(w′) ≈ cn` against
/// `J(v′) ≈ 1/c`, which keeps `q` small.
fn balance_constant(n: usize) -> Rational {
    let mut k: i64 = 100;
    while k * k * n as i64 > 10_000 {
        k -= 1;
    }
    Rational::new(k.into(), 100.into())
}

/// Rescales `w ↦ tw`, `v ↦ v/t` with a dyadic `t ≈ √(J(v)/J(w))`, so the
/// two masses (and hence `q`) are roughly balanced. `v·w` is unchanged.
fn balance(v: Vector, w: Vector) -> (Vector, Vector) {
    let jv = midpoint(&crate::hypermatrix::mass(&v));
    let jw = midpoint(&crate::hypermatrix::mass(&w));
    let ratio = crate::arith::rational::to_f64(&(jv / jw));
    let t = round_dyadic(&Rational::from_float(ratio.sqrt()).unwrap_or_else(Rational::one), 6);
    if t.is_zero() || t.is_one() {
        return (v, w);
    }
    let inv = t.recip();
    (v.iter().map(|x| x.scale(&inv)).collect(), w.iter().map(|x| x.scale(&t)).collect())
}

fn try_basis(data: &CompanionData, p: Matrix<Rational>) -> Result<Option<Positivized>, ConstructionError> {
    if determinant(&p)?.is_zero() {
        return Ok(None);
    }
    let p_inv = inverse(&p)?.expect("nonzero determinant");
    let field = &data.field;
    let w = linalg::mat_vec(&lift_matrix(&p, field), &data.w);
    let v = linalg::vec_mat(&data.v, &lift_matrix(&p_inv, field));
    if !all_positive(&v) || !all_positive(&w) {
        return Ok(None);
    }
    let m = mat_mul(&mat_mul(&p, &data.l), &p_inv);
    let (v, w) = balance(v, w);
    Ok(Some(Positivized { m, p, v, w }))
}

/// Finds rational invertible `P` with `vP⁻¹` and `Pw` strictly positive.
///
/// With targets `t = c·1` and `u = 1/(cn)·1` (so `u·t = 1`), the matrix
/// `P = I + (t − w)vᵀ + t((u·w)v − u)ᵀ` satisfies `Pw = t` and `uP = v`
/// whenever `v·w = 1`. It is built from rational approximations of `v`, `w`
/// and rounded to successively finer dyadic grids until the exact check
/// passes. The identity and its negative are tried first.
pub fn positivize(data: &CompanionData) -> Result<Positivized, ConstructionError> {
    let n = data.l.len();
    let id = linalg::identity(n, &Rational::zero());
    if let Some(p) = try_basis(data, id.clone())? {
        return Ok(p);
    }
    let neg: Matrix<Rational> = id.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    if let Some(p) = try_basis(data, neg)? {
        return Ok(p);
    }
    let v: Vec<Rational> = data.v.iter().map(midpoint).collect();
    let w: Vec<Rational> = data.w.iter().map(midpoint).collect();
    let c = balance_constant(n);
    let t = vec![c.clone(); n];
    let u = vec![(&c * Rational::from_integer(n.into())).recip(); n];
    let uw = linalg::dot(&u, &w);
    let mut real = id;
    for i in 0..n {
        for j in 0..n {
            real[i][j] += (&t[i] - &w[i]) * &v[j] + &t[i] * (&uw * &v[j] - &u[j]);
        }
    }
    for k in 0..=POSITIVIZE_BUDGET {
        let p: Matrix<Rational> = real
            .iter()
            .map(|r| r.iter().map(|x| round_dyadic(x, k)).collect())
            .collect();
        if let Some(found) = try_basis(data, p)? {
            return Ok(found);
        }
    }
    Err(ConstructionError::SearchExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};
    use crate::arith::{make_algebraic, AlgebraicNumber, NumberField};

    fn golden() -> FieldRef {
        let root = make_algebraic(Polynomial::from_ints(&[-1, 1, 1]), int(0), int(1)).unwrap();
        NumberField::new(&root)
    }

    /// Independent residual oracle: `(L − λI)w` and `v(L − λI)` by hand.
    fn residuals(l: &[Vec<Rational>], field: &FieldRef, v: &[FieldElement], w: &[FieldElement]) -> bool {
        let lam = FieldElement::generator(field);
        let n = l.len();
        (0..n).all(|i| {
            let mut r = FieldElement::zero(field);
            let mut s = FieldElement::zero(field);
            for j in 0..n {
                r = &r + &w[j].scale(&l[i][j]);
                s = &s + &v[j].scale(&l[j][i]);
            }
            (&r - &(&lam * &w[i])).is_zero() && (&s - &(&lam * &v[i])).is_zero()
        })
    }

    #[test]
    fn companion_examples() {
        assert_eq!(
            companion_matrix(&Polynomial::from_ints(&[-1, 1, 1])).unwrap(),
            vec![vec![int(0), int(1)], vec![int(1), int(-1)]]
        );
        assert_eq!(
            companion_matrix(&Polynomial::linear_root(rat(2, 5))).unwrap(),
            vec![vec![rat(2, 5)]]
        );
        let c = companion_matrix(&Polynomial::from_ints(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(c.iter().map(|r| r[2].clone()).collect::<Vec<_>>(), vec![int(2), int(0), int(0)]);
        assert_eq!(c[1][0], int(1));
        assert_eq!(
            companion_matrix(&Polynomial::from_ints(&[1, 2])).unwrap_err(),
            ConstructionError::NotMonic
        );
    }

    #[test]
    fn eigenpairs() {
        let q = NumberField::new(&AlgebraicNumber::from_rational(rat(2, 5)));
        let d = eigenpair(&[vec![rat(2, 5)]], &q).unwrap();
        assert!(d.v[0].is_one() && d.w[0].is_one());

        let k = golden();
        let l = companion_matrix(&Polynomial::from_ints(&[-1, 1, 1])).unwrap();
        let d = eigenpair(&l, &k).unwrap();
        assert!(residuals(&l, &k, &d.v, &d.w));
        assert!(linalg::dot(&d.v, &d.w).is_one());
    }

    #[test]
    fn golden_needs_no_change_of_basis() {
        let k = golden();
        let l = companion_matrix(&Polynomial::from_ints(&[-1, 1, 1])).unwrap();
        let p = positivize(&eigenpair(&l, &k).unwrap()).unwrap();
        assert_eq!(p.m, l);
        assert!(all_positive(&p.v) && all_positive(&p.w));
    }

    #[test]
    fn cubic_positivized() {
        // x^3 - 2x + 1/2 has a root near 0.2586 in (0, 1/2); its companion
        // eigenvectors have mixed signs.
        let f = Polynomial::new(vec![rat(1, 2), int(-2), int(0), int(1)]);
        let root = make_algebraic(f.clone(), int(0), rat(1, 2)).unwrap();
        let k = NumberField::new(&root);
        let l = companion_matrix(&f).unwrap();
        let d = eigenpair(&l, &k).unwrap();
        assert!(!all_positive(&d.w) || !all_positive(&d.v));
        let p = positivize(&d).unwrap();
        assert!(residuals(&p.m, &k, &p.v, &p.w));
        assert!(all_positive(&p.v) && all_positive(&p.w));
        assert!(linalg::dot(&p.v, &p.w).is_one());
        assert!(!determinant(&p.p).unwrap().is_zero());
    }

    #[test]
    fn singular_candidates_rejected() {
        let k = golden();
        let l = companion_matrix(&Polynomial::from_ints(&[-1, 1, 1])).unwrap();
        let d = eigenpair(&l, &k).unwrap();
        let singular = vec![vec![int(1), int(1)], vec![int(1), int(1)]];
        assert!(try_basis(&d, singular).unwrap().is_none());
    }
}
