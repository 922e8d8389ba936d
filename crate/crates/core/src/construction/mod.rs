//! From a real algebraic α ∈ (0,1) to a certified protocol.
//!
//! companion matrix → eigenpair → positivize → trilinear block build →
//! shift/scale → refine/expand/shrink-conjugate → `sA′ − rJ`, optionally
//! followed by block-Kronecker substitution down to {0,1} entries. Every
//! stage re-verifies its certificate exactly.

pub mod approx;
pub mod binary;
pub mod companion;
pub mod sequential;
pub mod trilinear;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::rational::format_rational;
use crate::arith::{AlgebraicNumber, ArithError, FieldElement, NumberField, Rational};
use crate::hypermatrix::{check_mystery, Hypermatrix, HypermatrixError, MysteryCertificate};

pub use approx::{
    apply_shrink_inverse, approximate_hypermatrix, dyadic_epsilon, entries_within, expand_axes,
    refine_vector, shrink_conjugate, shrink_inverse_matrix, shrink_matrix, Approximation, Refinement,
    ShrinkParams, DEFAULT_REFINE_CAP,
};
pub use binary::{cooperative_substitution, rational_to_binary, Realization, DEFAULT_BINARY_CAP};
pub use companion::{companion_matrix, eigenpair, positivize, CompanionData, Positivized};
pub use trilinear::{build_trilinear, minimal_q, shift_scale, ShiftScale, TrilinearBuild};

/// Saturated counts mean the true size overflowed `u128`.
fn entry_count(n: &u128) -> String {
    if *n == u128::MAX { "more than 2^128".into() } else { n.to_string() }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructionError {
    #[error("polynomial is not monic of degree >= 1")]
    NotMonic,
    #[error("λ is not a simple eigenvalue of the matrix")]
    NotAnEigenvalue,
    #[error("left and right eigenvectors are perpendicular")]
    PerpendicularEigenvectors,
    #[error("no positivizing change of basis found within the precision budget")]
    SearchExhausted,
    #[error("q must exceed the masses of both eigenvectors")]
    QTooSmall,
    #[error("λ must lie strictly between 0 and 1")]
    LambdaOutOfRange,
    #[error("vector is not strictly positive")]
    NotPositive,
    #[error("δ must lie strictly between 0 and 1")]
    InvalidDelta,
    #[error("refinement search exceeded its denominator cap")]
    SearchBudgetExceeded,
    #[error("mystery-vector on axis {axis} violates the refinement bound")]
    RefinementBoundViolated { axis: usize },
    #[error("approximated entries are not within ε of α")]
    ApproximationFailed,
    #[error("fraction must satisfy 0 <= a <= b, b >= 1")]
    InvalidFraction,
    #[error("format mismatch")]
    FormatMismatch,
    #[error("arity mismatch")]
    ArityMismatch,
    #[error("entries must be rationals in [0, 1]")]
    EntryOutOfRange,
    #[error("realization is not a certified {{0,1}} protocol for its entry")]
    InvalidRealization,
    #[error("output would have {} entries, cap is {cap}", entry_count(.entries))]
    SizeCapExceeded { entries: u128, cap: u128 },
    #[error("certificate rejected after stage {stage} on axis {axis}")]
    CertificateRejected { stage: &'static str, axis: usize },
    #[error(transparent)]
    Hypermatrix(#[from] HypermatrixError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    RationalEntries,
    Binary,
}

impl FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rational_entries" | "rational-entries" => Ok(Stage::RationalEntries),
            "binary" => Ok(Stage::Binary),
            _ => Err(format!("unknown stage {s:?} (expected rational_entries or binary)")),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::RationalEntries => "rational_entries",
            Stage::Binary => "binary",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConstructOptions {
    pub refine_cap: usize,
    pub binary_cap: u128,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            refine_cap: DEFAULT_REFINE_CAP,
            binary_cap: DEFAULT_BINARY_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    pub format: Vec<usize>,
    pub entries: usize,
    pub certificate_valid: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PipelineReport {
    pub alpha: String,
    pub stop_stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    pub change_of_basis_is_identity: Option<bool>,
    pub refinements: Vec<Refinement>,
    pub stages: Vec<StageReport>,
}

impl PipelineReport {
    fn record(&mut self, stage: &'static str, a: &Hypermatrix, cert: &MysteryCertificate) -> Result<(), ConstructionError> {
        let valid = check_mystery(a, cert)?.is_valid();
        self.stages.push(StageReport {
            stage,
            format: a.format().to_vec(),
            entries: a.len(),
            certificate_valid: valid,
        });
        if valid {
            Ok(())
        } else {
            Err(ConstructionError::CertificateRejected { stage, axis: 0 })
        }
    }
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub a: Hypermatrix,
    pub cert: MysteryCertificate,
    pub report: PipelineReport,
}

fn constant_protocol(value: FieldElement, report: &mut PipelineReport) -> Result<Construction, ConstructionError> {
    let field = value.field().clone();
    let a = Hypermatrix::constant(vec![1, 1, 1], value.clone())?;
    let cert = MysteryCertificate::new(value, vec![vec![FieldElement::one(&field)]; 3])?;
    report.record("constant", &a, &cert)?;
    Ok(Construction { a, cert, report: std::mem::take(report) })
}

/// Builds a 3-axis protocol whose certified mystery-value is `alpha`.
pub fn construct_for_algebraic(
    alpha: &AlgebraicNumber,
    stop: Stage,
    opts: &ConstructOptions,
) -> Result<Construction, ConstructionError> {
    let field = NumberField::new(alpha);
    let lam = FieldElement::generator(&field);
    let one = FieldElement::one(&field);
    let mut report = PipelineReport {
        alpha: alpha.to_string(),
        stop_stage: stop.to_string(),
        ..Default::default()
    };
    match (lam.sign(), lam.cmp_value(&one)) {
        (Ordering::Less, _) | (_, Ordering::Greater) => return Err(ConstructionError::LambdaOutOfRange),
        (Ordering::Equal, _) => return constant_protocol(FieldElement::zero(&field), &mut report),
        (_, Ordering::Equal) => return constant_protocol(one, &mut report),
        _ => {}
    }
    if stop == Stage::Binary {
        if let Some(r) = lam.as_rational() {
            let (a, b) = (r.numer().to_u64(), r.denom().to_u64());
            let (Some(a), Some(b)) = (a, b) else {
                return Err(ConstructionError::SizeCapExceeded { entries: u128::MAX, cap: opts.binary_cap });
            };
            let real = rational_to_binary(a, b, 3)?;
            report.record("rational_to_binary", &real.a, &real.cert)?;
            return Ok(Construction { a: real.a, cert: real.cert, report });
        }
    }

    let l = companion_matrix(alpha.minpoly())?;
    let data = eigenpair(&l, &field)?;
    let pos = positivize(&data)?;
    report.change_of_basis_is_identity = Some(pos.m == l);
    let q = minimal_q(&pos.v, &pos.w);
    let build = build_trilinear(&pos.m, &field, &pos.v, &pos.w, &q)?;
    report.q = Some(q.to_string());
    report.record("trilinear", &build.a, &build.cert)?;

    let ss = shift_scale(&build.a, &build.cert)?;
    report.r = Some(ss.r.to_string());
    report.s = Some(ss.s.to_string());
    report.record("shift_scale", &ss.a, &ss.cert)?;

    let eps = dyadic_epsilon(&lam, &ss.s);
    let approx = approximate_hypermatrix(&ss.a, &ss.cert, &eps, opts.refine_cap)?;
    report.epsilon = Some(format_rational(&approx.params.epsilon));
    report.delta = Some(format_rational(&approx.params.delta));
    report.refinements = approx.refinements.clone();
    report.record("approximate", &approx.a, &approx.cert)?;

    let s = Rational::from_integer(ss.s.clone());
    let r = Rational::from_integer(ss.r.clone());
    let a = approx.a.affine(&s, &-r);
    let cert = MysteryCertificate::new(lam, approx.cert.betas)?;
    let in_range = a
        .rational_entries()
        .is_some_and(|e| e.iter().all(|x| *x >= Rational::zero() && *x <= Rational::one()));
    if !in_range {
        return Err(ConstructionError::EntryOutOfRange);
    }
    report.record("rational_entries", &a, &cert)?;
    if stop == Stage::RationalEntries {
        return Ok(Construction { a, cert, report });
    }

    let (b, bcert) = cooperative_substitution(&a, &cert, None, opts.binary_cap)?;
    report.record("binary", &b, &bcert)?;
    Ok(Construction { a: b, cert: bcert, report })
}
