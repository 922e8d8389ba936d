//! Exact arithmetic substrate: rationals, polynomials, real algebraic numbers
//! and the number field ℚ(λ).

pub mod algebraic;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod rational;

pub use algebraic::{make_algebraic, AlgebraicNumber};
pub use field::{nf_add, nf_inv, nf_mul, sign_of, FieldElement, FieldRef, NumberField};
pub use poly::Polynomial;
pub use rational::{format_rational, parse_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("no root in interval")]
    NoRootInInterval,
    #[error("more than one root in interval")]
    MultipleRootsInInterval,
    #[error("operands belong to different number fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is a zero divisor modulo the defining polynomial")]
    NotInvertible,
    #[error("expected {expected} coefficients, found {found}")]
    CoefficientLength { expected: usize, found: usize },
}
