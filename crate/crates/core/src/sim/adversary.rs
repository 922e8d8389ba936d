//! Exact bias of a protocol when a coalition of axes draws from an arbitrary
//! joint distribution while the remaining axes follow their betas.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{product_u128, SimError};
use crate::arith::rational::serde_vec;
use crate::arith::{FieldElement, Rational};
use crate::hypermatrix::{basis_vector, common_field, Hypermatrix, MysteryCertificate, Vector};

/// Finitely supported distribution over outcome tuples of a coalition;
/// `outcomes[k][i]` is the index drawn on axis `coalition[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub outcomes: Vec<Vec<usize>>,
    #[serde(with = "serde_vec")]
    pub masses: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub coalition: Vec<usize>,
    pub joint: JointDistribution,
}

impl AdversaryConfig {
    pub fn point_mass(coalition: Vec<usize>, outcome: Vec<usize>) -> Self {
        AdversaryConfig {
            coalition,
            joint: JointDistribution { outcomes: vec![outcome], masses: vec![Rational::one()] },
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, SimError> {
        serde_json::from_str(s).map_err(|e| SimError::InvalidAdversary(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("adversary serializes")
    }

    /// Axes distinct and in range, outcomes in range, masses nonnegative with
    /// sum one.
    pub fn validate(&self, format: &[usize]) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidAdversary(m));
        validate_coalition(&self.coalition, format)?;
        let j = &self.joint;
        if j.outcomes.len() != j.masses.len() {
            return bad("outcomes and masses differ in length".into());
        }
        for o in &j.outcomes {
            if o.len() != self.coalition.len() {
                return bad(format!("outcome {o:?} does not match the coalition size"));
            }
            if let Some((i, _)) = o.iter().zip(&self.coalition).find(|&(&i, &ax)| i >= format[ax]) {
                return bad(format!("index {i} out of range in outcome {o:?}"));
            }
        }
        if j.masses.iter().any(Signed::is_negative) {
            return bad("negative mass".into());
        }
        if j.masses.iter().sum::<Rational>() != Rational::one() {
            return bad("masses do not sum to 1".into());
        }
        Ok(())
    }
}

/// Coalition axes are distinct and in range.
pub fn validate_coalition(coalition: &[usize], format: &[usize]) -> Result<(), SimError> {
    let mut seen = vec![false; format.len()];
    for &ax in coalition {
        if ax >= format.len() {
            return Err(SimError::InvalidAdversary(format!("axis {ax} out of range")));
        }
        if std::mem::replace(&mut seen[ax], true) {
            return Err(SimError::InvalidAdversary(format!("axis {ax} listed twice")));
        }
    }
    Ok(())
}

fn check_cert(a: &Hypermatrix, cert: &MysteryCertificate) -> Result<(), SimError> {
    if cert.format() != a.format() {
        return Err(SimError::Hypermatrix(crate::hypermatrix::HypermatrixError::FormatMismatch(
            "certificate betas do not match the hypermatrix format".into(),
        )));
    }
    Ok(())
}

/// Contracts every axis outside `coalition` with its beta; the result is
/// indexed by the coalition axes in increasing order.
fn coalition_tensor(a: &Hypermatrix, cert: &MysteryCertificate, coalition: &[usize]) -> Result<(Vec<usize>, Vector), SimError> {
    let mut sorted = coalition.to_vec();
    sorted.sort_unstable();
    if sorted.is_empty() {
        return Ok((sorted, vec![a.evaluate(&cert.betas)?]));
    }
    let mut t = a.clone();
    for ax in (0..a.arity()).rev().filter(|ax| !sorted.contains(ax)) {
        t = t.contract_axis(ax, &cert.betas[ax])?;
    }
    Ok((sorted, t.into_entries()))
}

/// Joint path: the adversary's distribution as one vector on the product of
/// the coalition axes, contracted against the honest contraction of `A`.
pub fn exact_bias_joint(a: &Hypermatrix, cert: &MysteryCertificate, adv: &AdversaryConfig) -> Result<FieldElement, SimError> {
    check_cert(a, cert)?;
    adv.validate(a.format())?;
    let (sorted, t) = coalition_tensor(a, cert, &adv.coalition)?;
    let mut joint = vec![Rational::zero(); t.len()];
    for (o, m) in adv.joint.outcomes.iter().zip(&adv.joint.masses) {
        let idx = sorted.iter().fold(0usize, |acc, ax| {
            let pos = adv.coalition.iter().position(|c| c == ax).expect("sorted coalition");
            acc * a.format()[*ax] + o[pos]
        });
        joint[idx] += m;
    }
    let field = common_field(a.field(), cert.betas.iter().flatten())?;
    Ok(t.iter()
        .zip(&joint)
        .filter(|(_, m)| !m.is_zero())
        .fold(FieldElement::zero(&field), |acc, (x, m)| &acc + &x.scale(m)))
}

/// Basis path: by linearity, the mass-weighted sum of full evaluations with
/// each coalition axis replaced by the basis vector of its drawn index.
pub fn exact_bias_basis(a: &Hypermatrix, cert: &MysteryCertificate, adv: &AdversaryConfig) -> Result<FieldElement, SimError> {
    check_cert(a, cert)?;
    adv.validate(a.format())?;
    let field = common_field(a.field(), cert.betas.iter().flatten())?;
    let mut total = FieldElement::zero(&field);
    for (o, m) in adv.joint.outcomes.iter().zip(&adv.joint.masses) {
        let mut xs = cert.betas.clone();
        for (&ax, &i) in adv.coalition.iter().zip(o) {
            xs[ax] = basis_vector(&field, a.format()[ax], i);
        }
        total = &total + &a.evaluate(&xs)?.scale(m);
    }
    Ok(total)
}

/// Computes the bias both ways and insists they agree.
pub fn exact_bias_under_adversary(
    a: &Hypermatrix,
    cert: &MysteryCertificate,
    adv: &AdversaryConfig,
) -> Result<FieldElement, SimError> {
    let joint = exact_bias_joint(a, cert, adv)?;
    let basis = exact_bias_basis(a, cert, adv)?;
    if joint != basis {
        return Err(SimError::PathsDisagree);
    }
    Ok(joint)
}

/// Whether every joint distribution on `coalition` leaves the bias at α;
/// by linearity it suffices that every point mass does.
pub fn coalition_is_robust(
    a: &Hypermatrix,
    cert: &MysteryCertificate,
    coalition: &[usize],
    cap: u128,
) -> Result<bool, SimError> {
    check_cert(a, cert)?;
    validate_coalition(coalition, a.format())?;
    let size = product_u128(coalition.iter().map(|&ax| a.format()[ax]));
    if size > cap {
        return Err(SimError::EnumerationCapExceeded(size));
    }
    let (_, t) = coalition_tensor(a, cert, coalition)?;
    Ok(t.iter().all(|x| *x == cert.alpha))
}

/// Largest `r` such that every coalition of `r` axes is robust (0 if even
/// single axes are not), checking coalitions up to size `p − 1`.
pub fn robustness_level(a: &Hypermatrix, cert: &MysteryCertificate, cap: u128) -> Result<usize, SimError> {
    let p = a.arity();
    let mut level = 0;
    for r in 1..p {
        for mask in 0u64..1 << p {
            if mask.count_ones() as usize != r {
                continue;
            }
            let c: Vec<usize> = (0..p).filter(|&i| mask >> i & 1 == 1).collect();
            if !coalition_is_robust(a, cert, &c, cap)? {
                return Ok(level);
            }
        }
        level = r;
    }
    Ok(level)
}
