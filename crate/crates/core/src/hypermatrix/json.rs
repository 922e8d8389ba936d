//! JSON forms of fields, elements, hypermatrices and certificates.
//!
//! Rationals are strings `"a/b"`. A field is given by its minimal polynomial
//! (coefficients lowest degree first) and, for degree ≥ 2, a `root_interval`
//! fixing the real embedding. Elements are coefficient vectors of length
//! `deg f`, or bare rational strings when they lie in ℚ.

use serde::{Deserialize, Serialize};

use super::{Hypermatrix, HypermatrixError, MysteryCertificate, Vector};
use crate::arith::rational::{format_rational, parse_rational};
use crate::arith::{make_algebraic, AlgebraicNumber, FieldElement, FieldRef, NumberField, Polynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Scalar(String),
    Coeffs(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub minpoly: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_interval: Option<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementWithFieldJson {
    #[serde(flatten)]
    pub field: FieldJson,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypermatrixJson {
    pub format: Vec<usize>,
    #[serde(flatten)]
    pub field: FieldJson,
    pub entries: Vec<ElementJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    #[serde(default, flatten, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldJson>,
    pub alpha: ElementJson,
    pub betas: Vec<Vec<ElementJson>>,
}

/// A protocol file: the hypermatrix and (optionally) its certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolJson {
    pub hypermatrix: HypermatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
}

fn json_err(e: impl std::fmt::Display) -> HypermatrixError {
    HypermatrixError::Json(e.to_string())
}

pub fn field_to_json(field: &FieldRef) -> FieldJson {
    let minpoly = field.minpoly().coeffs().iter().map(format_rational).collect();
    let root_interval = (field.degree() > 1).then(|| {
        let (lo, hi) = field.root().interval();
        [format_rational(lo), format_rational(hi)]
    });
    FieldJson { minpoly, root_interval }
}

pub fn field_from_json(j: &FieldJson) -> Result<FieldRef, HypermatrixError> {
    let coeffs = j
        .minpoly
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>, _>>()?;
    let f = Polynomial::new(coeffs);
    match f.degree() {
        None | Some(0) => Err(json_err("minpoly must be nonconstant")),
        Some(1) => Ok(NumberField::new(&AlgebraicNumber::from_rational(-f.monic().coeff(0)))),
        Some(_) => {
            let [lo, hi] = j
                .root_interval
                .as_ref()
                .ok_or_else(|| json_err("root_interval is required for minpoly of degree >= 2"))?;
            let root = make_algebraic(f, parse_rational(lo)?, parse_rational(hi)?)?;
            Ok(NumberField::new(&root))
        }
    }
}

/// Rational elements are written as bare strings.
pub fn element_to_json(e: &FieldElement) -> ElementJson {
    match e.as_rational() {
        Some(r) => ElementJson::Scalar(format_rational(&r)),
        None => ElementJson::Coeffs(e.coeffs().iter().map(format_rational).collect()),
    }
}

pub fn element_from_json(field: &FieldRef, j: &ElementJson) -> Result<FieldElement, HypermatrixError> {
    match j {
        ElementJson::Scalar(s) => Ok(FieldElement::from_rational(field, parse_rational(s)?)),
        ElementJson::Coeffs(v) => {
            let coeffs = v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            Ok(FieldElement::from_coeffs(field, coeffs)?)
        }
    }
}

pub fn element_with_field_to_json(e: &FieldElement) -> ElementWithFieldJson {
    ElementWithFieldJson {
        field: field_to_json(e.field()),
        coeffs: e.coeffs().iter().map(format_rational).collect(),
    }
}

pub fn element_with_field_from_json(j: &ElementWithFieldJson) -> Result<FieldElement, HypermatrixError> {
    let field = field_from_json(&j.field)?;
    element_from_json(&field, &ElementJson::Coeffs(j.coeffs.clone()))
}

fn vector_from_json(field: &FieldRef, v: &[ElementJson]) -> Result<Vector, HypermatrixError> {
    v.iter().map(|e| element_from_json(field, e)).collect()
}

pub fn hypermatrix_to_json(a: &Hypermatrix) -> HypermatrixJson {
    HypermatrixJson {
        format: a.format().to_vec(),
        field: field_to_json(a.field()),
        entries: a.entries().iter().map(element_to_json).collect(),
    }
}

pub fn hypermatrix_from_json(j: &HypermatrixJson) -> Result<Hypermatrix, HypermatrixError> {
    let field = field_from_json(&j.field)?;
    Hypermatrix::with_field(j.format.clone(), &field, vector_from_json(&field, &j.entries)?)
}

/// The certificate's own field is written only when it differs from
/// `context` (the field of the accompanying hypermatrix).
pub fn certificate_to_json(c: &MysteryCertificate, context: Option<&FieldRef>) -> CertificateJson {
    let field = match context {
        Some(f) if f.degree() >= c.field().degree() && f.same_field(c.field()) => None,
        _ => Some(field_to_json(c.field())),
    };
    CertificateJson {
        field,
        alpha: element_to_json(&c.alpha),
        betas: c
            .betas
            .iter()
            .map(|b| b.iter().map(element_to_json).collect())
            .collect(),
    }
}

pub fn certificate_from_json(
    j: &CertificateJson,
    context: Option<&FieldRef>,
) -> Result<MysteryCertificate, HypermatrixError> {
    let field = match (&j.field, context) {
        (Some(f), _) => field_from_json(f)?,
        (None, Some(f)) => f.clone(),
        (None, None) => NumberField::rationals(),
    };
    let alpha = element_from_json(&field, &j.alpha)?;
    let betas = j
        .betas
        .iter()
        .map(|b| vector_from_json(&field, b))
        .collect::<Result<Vec<_>, _>>()?;
    MysteryCertificate::new(alpha, betas)
}

#[derive(Clone, Debug)]
pub struct Protocol {
    pub hypermatrix: Hypermatrix,
    pub certificate: Option<MysteryCertificate>,
}

impl Protocol {
    pub fn to_json(&self) -> ProtocolJson {
        // Store the hypermatrix in the certificate's field so the certificate
        // needs no field of its own.
        let hm = match &self.certificate {
            Some(c) if c.field().degree() > self.hypermatrix.field().degree() => self
                .hypermatrix
                .lift_to(c.field())
                .unwrap_or_else(|_| self.hypermatrix.clone()),
            _ => self.hypermatrix.clone(),
        };
        ProtocolJson {
            certificate: self
                .certificate
                .as_ref()
                .map(|c| certificate_to_json(c, Some(hm.field()))),
            hypermatrix: hypermatrix_to_json(&hm),
        }
    }

    pub fn from_json(j: &ProtocolJson) -> Result<Self, HypermatrixError> {
        let hypermatrix = hypermatrix_from_json(&j.hypermatrix)?;
        let certificate = j
            .certificate
            .as_ref()
            .map(|c| certificate_from_json(c, Some(hypermatrix.field())))
            .transpose()?;
        Ok(Protocol { hypermatrix, certificate })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self, HypermatrixError> {
        let j: ProtocolJson = serde_json::from_str(s).map_err(json_err)?;
        Self::from_json(&j)
    }
}
