//! Hypermatrices (multilinear forms) over ℚ or ℚ(λ).
//!
//! Storage is row-major: the last axis varies fastest. Axis order matters;
//! for the trilinear construction axis 0 indexes metacolumns, axis 1 rows and
//! axis 2 columns.

pub mod json;
pub mod mystery;

use num_traits::Zero;

use crate::arith::{ArithError, FieldElement, FieldRef, NumberField, Rational};

pub use mystery::{
    check_mystery, check_robust_binary, find_mystery_value_2d, is_stochastic, MysteryCertificate, MysteryCheck,
    MysteryPair, StochasticVector,
};

pub type Vector = Vec<FieldElement>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HypermatrixError {
    #[error("format mismatch: {0}")]
    FormatMismatch(String),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("entries are not all 0 or 1")]
    NonBinaryEntries,
    #[error("vector on axis {axis} has zero total mass")]
    ZeroMass { axis: usize },
    #[error("not a stochastic vector: {0}")]
    NotStochastic(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Debug)]
pub struct Hypermatrix {
    format: Vec<usize>,
    field: FieldRef,
    entries: Vec<FieldElement>,
}

impl PartialEq for Hypermatrix {
    fn eq(&self, other: &Self) -> bool {
        self.format == other.format && self.entries == other.entries
    }
}

fn check_format(format: &[usize]) -> Result<usize, HypermatrixError> {
    if format.is_empty() {
        return Err(HypermatrixError::FormatMismatch("arity must be at least 1".into()));
    }
    if format.contains(&0) {
        return Err(HypermatrixError::FormatMismatch(format!("empty axis in {format:?}")));
    }
    format
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| HypermatrixError::FormatMismatch(format!("{format:?} overflows")))
}

/// The larger of the fields the elements live in; errors on incompatible ones.
pub fn common_field<'a>(
    start: &FieldRef,
    elems: impl IntoIterator<Item = &'a FieldElement>,
) -> Result<FieldRef, ArithError> {
    let mut field = start.clone();
    for e in elems {
        if !field.same_field(e.field()) {
            return Err(ArithError::MixedFields);
        }
        if e.field().degree() > field.degree() {
            field = e.field().clone();
        }
    }
    Ok(field)
}

pub fn lift_all(v: &[FieldElement], field: &FieldRef) -> Result<Vector, ArithError> {
    v.iter().map(|e| e.in_field(field)).collect()
}

pub fn rational_vector(field: &FieldRef, v: &[Rational]) -> Vector {
    v.iter().map(|r| FieldElement::from_rational(field, r.clone())).collect()
}

pub fn uniform_vector(field: &FieldRef, n: usize) -> Vector {
    vec![FieldElement::from_rational(field, Rational::new(1.into(), n.into())); n]
}

pub fn basis_vector(field: &FieldRef, n: usize, k: usize) -> Vector {
    (0..n)
        .map(|i| if i == k { FieldElement::one(field) } else { FieldElement::zero(field) })
        .collect()
}

/// Total mass `J(x)`.
pub fn mass(v: &[FieldElement]) -> FieldElement {
    let mut acc = FieldElement::zero(v[0].field());
    for x in v {
        acc = &acc + x;
    }
    acc
}

/// `a ⊗ b` with `a`'s index most significant.
pub fn kron_vec(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Contracts `axis` of a raw row-major array against `x`.
fn contract_raw(
    format: &[usize],
    entries: &[FieldElement],
    axis: usize,
    x: &[FieldElement],
    zero: &FieldElement,
) -> (Vec<usize>, Vector) {
    let n = format[axis];
    let inner: usize = format[axis + 1..].iter().product();
    let outer: usize = format[..axis].iter().product();
    let mut out = Vec::with_capacity(outer * inner);
    for o in 0..outer {
        for i in 0..inner {
            let mut acc = zero.clone();
            for (k, xk) in x.iter().enumerate() {
                if xk.is_zero() {
                    continue;
                }
                let e = &entries[(o * n + k) * inner + i];
                if !e.is_zero() {
                    acc = &acc + &(e * xk);
                }
            }
            out.push(acc);
        }
    }
    let mut f = format.to_vec();
    f.remove(axis);
    (f, out)
}

impl Hypermatrix {
    /// Entries may come from compatible fields; they are lifted into the
    /// largest one.
    pub fn new(format: Vec<usize>, entries: Vec<FieldElement>) -> Result<Self, HypermatrixError> {
        let len = check_format(&format)?;
        if entries.len() != len {
            return Err(HypermatrixError::FormatMismatch(format!(
                "format {format:?} needs {len} entries, got {}",
                entries.len()
            )));
        }
        let field = common_field(entries[0].field(), &entries)?;
        let entries = lift_all(&entries, &field)?;
        Ok(Hypermatrix { format, field, entries })
    }

    pub fn with_field(
        format: Vec<usize>,
        field: &FieldRef,
        entries: Vec<FieldElement>,
    ) -> Result<Self, HypermatrixError> {
        let mut h = Self::new(format, entries)?;
        if h.field.degree() < field.degree() {
            h = h.lift_to(field)?;
        }
        Ok(h)
    }

    pub fn from_rationals(format: Vec<usize>, entries: Vec<Rational>) -> Result<Self, HypermatrixError> {
        let field = NumberField::rationals();
        Self::new(format, rational_vector(&field, &entries))
    }

    pub fn from_ints(format: Vec<usize>, entries: &[i64]) -> Result<Self, HypermatrixError> {
        Self::from_rationals(format, entries.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    /// Builds entries from a function of the multi-index.
    pub fn from_fn(
        format: Vec<usize>,
        field: &FieldRef,
        mut f: impl FnMut(&[usize]) -> FieldElement,
    ) -> Result<Self, HypermatrixError> {
        let len = check_format(&format)?;
        let mut idx = vec![0; format.len()];
        let mut entries = Vec::with_capacity(len);
        for _ in 0..len {
            entries.push(f(&idx));
            for a in (0..format.len()).rev() {
                idx[a] += 1;
                if idx[a] < format[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Self::with_field(format, field, entries)
    }

    pub fn constant(format: Vec<usize>, value: FieldElement) -> Result<Self, HypermatrixError> {
        let len = check_format(&format)?;
        Self::new(format, vec![value; len])
    }

    pub fn zeros(format: Vec<usize>, field: &FieldRef) -> Result<Self, HypermatrixError> {
        Self::constant(format, FieldElement::zero(field))
    }

    /// The all-ones tensor `J`.
    pub fn ones(format: Vec<usize>, field: &FieldRef) -> Result<Self, HypermatrixError> {
        Self::constant(format, FieldElement::one(field))
    }

    pub fn format(&self) -> &[usize] {
        &self.format
    }

    pub fn arity(&self) -> usize {
        self.format.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn into_entries(self) -> Vector {
        self.entries
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.format.len()];
        for a in (0..self.format.len().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.format[a + 1];
        }
        s
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.format)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.format.len()];
        for a in (0..self.format.len()).rev() {
            idx[a] = flat % self.format[a];
            flat /= self.format[a];
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> &FieldElement {
        &self.entries[self.flat_index(idx)]
    }

    /// Re-homes every entry in `field` (e.g. rational entries into ℚ(λ)).
    pub fn lift_to(&self, field: &FieldRef) -> Result<Self, HypermatrixError> {
        Ok(Hypermatrix {
            format: self.format.clone(),
            field: field.clone(),
            entries: lift_all(&self.entries, field)?,
        })
    }

    pub fn map(&self, f: impl FnMut(&FieldElement) -> FieldElement) -> Result<Self, HypermatrixError> {
        Self::with_field(self.format.clone(), &self.field, self.entries.iter().map(f).collect())
    }

    /// `s·A + c·J`.
    pub fn affine(&self, s: &Rational, c: &Rational) -> Self {
        Hypermatrix {
            format: self.format.clone(),
            field: self.field.clone(),
            entries: self.entries.iter().map(|e| e.scale(s).add_rational(c)).collect(),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, HypermatrixError> {
        if self.format != other.format {
            return Err(HypermatrixError::FormatMismatch(format!(
                "{:?} vs {:?}",
                self.format, other.format
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.format.clone(), entries)
    }

    /// Entries as rationals, if they all are.
    pub fn rational_entries(&self) -> Option<Vec<Rational>> {
        self.entries.iter().map(FieldElement::as_rational).collect()
    }

    pub fn is_binary(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero() || e.is_one())
    }

    fn check_vectors(&self, xs: &[&[FieldElement]], axes: &[usize]) -> Result<(), HypermatrixError> {
        for (x, &a) in xs.iter().zip(axes) {
            if x.len() != self.format[a] {
                return Err(HypermatrixError::FormatMismatch(format!(
                    "axis {a} has length {}, vector has {}",
                    self.format[a],
                    x.len()
                )));
            }
            common_field(&self.field, x.iter())?;
        }
        Ok(())
    }

    /// Contracts the listed axes (in any order) and returns the remaining
    /// hypermatrix as (format, entries).
    fn contract_axes(&self, pairs: &mut [(usize, &[FieldElement])]) -> (Vec<usize>, Vector) {
        // Contract from the highest axis down so lower indices stay valid.
        pairs.sort_by(|a, b| b.0.cmp(&a.0));
        let zero = FieldElement::zero(&self.field);
        let mut format = self.format.clone();
        let mut entries: Option<Vector> = None;
        for (axis, x) in pairs.iter() {
            let cur = entries.as_deref().unwrap_or(&self.entries);
            let (f, e) = contract_raw(&format, cur, *axis, x, &zero);
            format = f;
            entries = Some(e);
        }
        (format, entries.unwrap_or_else(|| self.entries.clone()))
    }

    /// Contracts a single axis, returning a hypermatrix of arity one less.
    pub fn contract_axis(&self, axis: usize, x: &[FieldElement]) -> Result<Self, HypermatrixError> {
        if axis >= self.arity() {
            return Err(HypermatrixError::FormatMismatch(format!("no axis {axis}")));
        }
        if self.arity() == 1 {
            return Err(HypermatrixError::FormatMismatch(
                "contracting the only axis; use evaluate".into(),
            ));
        }
        self.check_vectors(&[x], &[axis])?;
        let (format, entries) = self.contract_axes(&mut [(axis, x)]);
        Self::with_field(format, &self.field, entries)
    }

    /// The multilinear value `A(x⁽¹⁾, …, x⁽ᵖ⁾)`.
    pub fn evaluate(&self, xs: &[Vector]) -> Result<FieldElement, HypermatrixError> {
        if xs.len() != self.arity() {
            return Err(HypermatrixError::ArityMismatch(self.arity(), xs.len()));
        }
        let refs: Vec<&[FieldElement]> = xs.iter().map(|v| v.as_slice()).collect();
        let axes: Vec<usize> = (0..xs.len()).collect();
        self.check_vectors(&refs, &axes)?;
        let mut pairs: Vec<_> = axes.into_iter().zip(refs).collect();
        let (_, e) = self.contract_axes(&mut pairs);
        Ok(e.into_iter().next().expect("scalar"))
    }

    /// Coefficients of the linear functional left in slot `j` after
    /// contracting every other axis; `others` lists the vectors for the
    /// remaining axes in order.
    pub fn contract_free_slot(&self, others: &[Vector], j: usize) -> Result<Vector, HypermatrixError> {
        if j >= self.arity() || others.len() + 1 != self.arity() {
            return Err(HypermatrixError::FormatMismatch(format!(
                "expected {} vectors around free slot {j}",
                self.arity().saturating_sub(1)
            )));
        }
        let axes: Vec<usize> = (0..self.arity()).filter(|&a| a != j).collect();
        let refs: Vec<&[FieldElement]> = others.iter().map(|v| v.as_slice()).collect();
        self.check_vectors(&refs, &axes)?;
        let mut pairs: Vec<_> = axes.into_iter().zip(refs).collect();
        Ok(self.contract_axes(&mut pairs).1)
    }

    /// Like [`contract_free_slot`](Self::contract_free_slot) but takes a full
    /// list of vectors and ignores the one at `j`.
    pub fn contract_all_except(&self, xs: &[Vector], j: usize) -> Result<Vector, HypermatrixError> {
        let others: Vec<Vector> = xs
            .iter()
            .enumerate()
            .filter(|&(a, _)| a != j)
            .map(|(_, v)| v.clone())
            .collect();
        self.contract_free_slot(&others, j)
    }

    /// Axis-wise Kronecker product; `self`'s index is the more significant.
    pub fn kronecker(&self, other: &Self) -> Result<Self, HypermatrixError> {
        if self.arity() != other.arity() {
            return Err(HypermatrixError::ArityMismatch(self.arity(), other.arity()));
        }
        let field = common_field(&self.field, [&other.entries[0]])?;
        let format: Vec<usize> = self.format.iter().zip(&other.format).map(|(a, b)| a * b).collect();
        Self::from_fn(format, &field, |idx| {
            let (ia, ib): (Vec<usize>, Vec<usize>) = idx
                .iter()
                .zip(&other.format)
                .map(|(&i, &m)| (i / m, i % m))
                .unzip();
            self.get(&ia) * other.get(&ib)
        })
    }

    /// Duplicates slices: slice `i` of axis `axis` appears `counts[i]` times.
    pub fn duplicate_slices(&self, axis: usize, counts: &[usize]) -> Result<Self, HypermatrixError> {
        if counts.len() != self.format[axis] {
            return Err(HypermatrixError::FormatMismatch(format!(
                "{} group counts for axis of length {}",
                counts.len(),
                self.format[axis]
            )));
        }
        let source: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat(i).take(c))
            .collect();
        let inner: usize = self.format[axis + 1..].iter().product();
        let outer: usize = self.format[..axis].iter().product();
        let n = self.format[axis];
        let mut entries = Vec::with_capacity(outer * source.len() * inner);
        for o in 0..outer {
            for &k in &source {
                let base = (o * n + k) * inner;
                entries.extend_from_slice(&self.entries[base..base + inner]);
            }
        }
        let mut format = self.format.clone();
        format[axis] = source.len();
        Self::with_field(format, &self.field, entries)
    }

    /// `A'[.., j, ..] = keep·A[.., j, ..] + spread·Σ_k A[.., k, ..]`, i.e. the
    /// substitution `x ↦ (keep·I + spread·J) x` on that axis, in linear time.
    pub fn mix_axis(&self, axis: usize, keep: &Rational, spread: &Rational) -> Self {
        let n = self.format[axis];
        let inner: usize = self.format[axis + 1..].iter().product();
        let outer: usize = self.format[..axis].iter().product();
        let zero = FieldElement::zero(&self.field);
        let mut entries = Vec::with_capacity(self.entries.len());
        let mut sums = vec![zero; inner];
        for o in 0..outer {
            for (i, s) in sums.iter_mut().enumerate() {
                let mut acc = FieldElement::zero(&self.field);
                for k in 0..n {
                    let e = &self.entries[(o * n + k) * inner + i];
                    if !e.is_zero() {
                        acc = &acc + e;
                    }
                }
                *s = acc.scale(spread);
            }
            for k in 0..n {
                for (i, s) in sums.iter().enumerate() {
                    entries.push(&self.entries[(o * n + k) * inner + i].scale(keep) + s);
                }
            }
        }
        Hypermatrix {
            format: self.format.clone(),
            field: self.field.clone(),
            entries,
        }
    }

    /// Replaces axis `axis` by `T x` for a square matrix `T` acting on that
    /// slot: the result `A'` satisfies `A'(.., x, ..) = A(.., T x, ..)`.
    pub fn transform_axis(&self, axis: usize, t: &[Vec<Rational>]) -> Result<Self, HypermatrixError> {
        let n = self.format[axis];
        if t.len() != n || t.iter().any(|r| r.len() != n) {
            return Err(HypermatrixError::FormatMismatch("transform must be square".into()));
        }
        let inner: usize = self.format[axis + 1..].iter().product();
        let outer: usize = self.format[..axis].iter().product();
        let zero = FieldElement::zero(&self.field);
        let mut entries = vec![zero.clone(); self.entries.len()];
        for o in 0..outer {
            for j in 0..n {
                for i in 0..inner {
                    // A'[.., j, ..] = Σ_k T[k][j] A[.., k, ..]
                    let mut acc = zero.clone();
                    for (k, row) in t.iter().enumerate() {
                        if row[j].is_zero() {
                            continue;
                        }
                        let e = &self.entries[(o * n + k) * inner + i];
                        if !e.is_zero() {
                            acc = &acc + &e.scale(&row[j]);
                        }
                    }
                    entries[(o * n + j) * inner + i] = acc;
                }
            }
        }
        Ok(Hypermatrix {
            format: self.format.clone(),
            field: self.field.clone(),
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    fn q() -> FieldRef {
        NumberField::rationals()
    }

    fn qv(v: &[Rational]) -> Vector {
        rational_vector(&q(), v)
    }

    /// 6×2 die×coin matrix: heads iff die parity matches the coin.
    pub(crate) fn die_coin() -> Hypermatrix {
        let e: Vec<i64> = (0..6).flat_map(|d| (0..2).map(move |c| ((d + c) % 2 == 0) as i64)).collect();
        Hypermatrix::from_ints(vec![6, 2], &e).unwrap()
    }

    #[test]
    fn die_coin_evaluations() {
        let a = die_coin();
        let half = qv(&[rat(1, 2), rat(1, 2)]);
        assert_eq!(
            a.evaluate(&[uniform_vector(&q(), 6), half.clone()]).unwrap().as_rational(),
            Some(rat(1, 2))
        );
        let skew = qv(&[rat(1, 12), rat(1, 10), rat(1, 6), rat(1, 4), rat(1, 15), rat(1, 3)]);
        assert_eq!(a.evaluate(&[skew, half]).unwrap().as_rational(), Some(rat(1, 2)));
    }

    #[test]
    fn free_slot_contractions() {
        let a = die_coin();
        let coin = a.contract_free_slot(&[uniform_vector(&q(), 6)], 1).unwrap();
        assert_eq!(coin, qv(&[rat(1, 2), rat(1, 2)]));
        let j = Hypermatrix::ones(vec![2, 2], &q()).unwrap();
        assert_eq!(j.contract_free_slot(&[qv(&[rat(1, 2), rat(1, 2)])], 0).unwrap(), qv(&[int(1), int(1)]));
        let z = Hypermatrix::zeros(vec![2, 3, 2], &q()).unwrap();
        let v = z.contract_free_slot(&[uniform_vector(&q(), 2), uniform_vector(&q(), 2)], 1).unwrap();
        assert!(v.iter().all(FieldElement::is_zero) && v.len() == 3);
    }

    #[test]
    fn format_errors() {
        let a = die_coin();
        assert!(matches!(
            a.evaluate(&[uniform_vector(&q(), 5), uniform_vector(&q(), 2)]),
            Err(HypermatrixError::FormatMismatch(_))
        ));
        assert!(matches!(
            a.evaluate(&[uniform_vector(&q(), 6)]),
            Err(HypermatrixError::ArityMismatch(2, 1))
        ));
        assert!(Hypermatrix::from_ints(vec![2, 2], &[1, 2, 3]).is_err());
    }

    #[test]
    fn kronecker_examples() {
        let j2 = Hypermatrix::ones(vec![2, 2], &q()).unwrap();
        let j3 = Hypermatrix::ones(vec![3, 3], &q()).unwrap();
        let k = j2.kronecker(&j3).unwrap();
        assert_eq!(k.format(), &[6, 6]);
        assert!(k.entries().iter().all(FieldElement::is_one));
        let id = Hypermatrix::from_ints(vec![2, 2], &[1, 0, 0, 1]).unwrap();
        let one = Hypermatrix::from_ints(vec![1, 1], &[1]).unwrap();
        assert_eq!(id.kronecker(&one).unwrap(), id);
        let a = Hypermatrix::from_ints(vec![1, 1, 1], &[3]).unwrap();
        let b = Hypermatrix::from_ints(vec![1, 1, 1], &[5]).unwrap();
        assert_eq!(a.kronecker(&b).unwrap().entries()[0].as_rational(), Some(int(15)));
        assert!(matches!(id.kronecker(&a), Err(HypermatrixError::ArityMismatch(2, 3))));
    }

    #[test]
    fn slice_duplication() {
        let a = Hypermatrix::from_ints(vec![1, 2], &[4, 7]).unwrap();
        let b = a.duplicate_slices(1, &[1, 2]).unwrap();
        assert_eq!(b, Hypermatrix::from_ints(vec![1, 3], &[4, 7, 7]).unwrap());
        assert_eq!(a.duplicate_slices(1, &[1, 1]).unwrap(), a);
    }

    #[test]
    fn transform_axis_matches_substitution() {
        let a = Hypermatrix::from_ints(vec![2, 2], &[1, 2, 3, 4]).unwrap();
        let t = vec![vec![int(1), int(1)], vec![int(0), int(2)]];
        let b = a.transform_axis(0, &t).unwrap();
        let x = qv(&[rat(1, 3), rat(2, 3)]);
        let y = qv(&[rat(1, 5), rat(4, 5)]);
        let tx = qv(&[&x[0].as_rational().unwrap() + &x[1].as_rational().unwrap(), x[1].as_rational().unwrap() * int(2)]);
        assert_eq!(b.evaluate(&[x, y.clone()]).unwrap(), a.evaluate(&[tx, y]).unwrap());
    }
}
