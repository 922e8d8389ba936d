//! r-robust simulation by composing a 3-player protocol along a majority
//! tree.
//!
//! Each leaf of the tree is a coin drawn by the player who owns it; each
//! internal node runs the node protocol on its three children's outcomes.
//! The node must be a {0,1} protocol whose three input distributions are
//! `(1 − α, α)` — coins of its own bias — so a simulated coin can feed the
//! next level. If a majority of a node's inputs are honest coins, so is its
//! output; the majority-gate property of the wiring lifts this to the root.
//!
//! For the flat view, player `j`'s axis is the product of their leaves'
//! coin spaces, earlier leaves more significant.

use serde::Serialize;

use super::sampling::{AxisSampler, FlipReport, DEFAULT_SAMPLING_BITS};
use super::{coalition_is_robust, product_u128, SimError};
use crate::arith::{FieldElement, Rational};
use crate::construction::Realization;
use crate::hypermatrix::{check_mystery, check_robust_binary, kron_vec, Hypermatrix, MysteryCertificate, Vector};
use crate::majority::{verify_majority, MajorityTree};
use crate::rng::trial_rng;

/// The proof obligations discharged when composing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionalCertificate {
    pub p: usize,
    pub r: usize,
    pub node_certificate_valid: bool,
    pub node_single_axis_robust: bool,
    pub node_composable: bool,
    pub majority_gate_valid: bool,
}

impl CompositionalCertificate {
    pub fn is_valid(&self) -> bool {
        2 * self.r < self.p
            && self.node_certificate_valid
            && self.node_single_axis_robust
            && self.node_composable
            && self.majority_gate_valid
    }
}

#[derive(Clone, Debug)]
pub struct CompositeProtocol {
    pub tree: MajorityTree,
    pub node: Realization,
    pub certificate: CompositionalCertificate,
    /// `table[4a + 2b + c]`: node output on children `(a, b, c)`.
    table: [bool; 8],
    coin: Vector,
}

/// Checks `r < p/2`, the node certificate and robustness, composability,
/// and that `tree` is a `p`-ary majority gate.
pub fn compose_robust(node: &Realization, tree: &MajorityTree, p: usize, r: usize) -> Result<CompositeProtocol, SimError> {
    if 2 * r >= p {
        return Err(SimError::PreconditionViolation { r, p });
    }
    let (a, cert) = (&node.a, &node.cert);
    if a.arity() != 3 || a.format() != [2, 2, 2] || !a.is_binary() {
        return Err(SimError::NodeNotComposable);
    }
    let node_certificate_valid = check_mystery(a, cert)?.is_valid();
    let node_single_axis_robust = node_certificate_valid && check_robust_binary(a, cert)?;
    if !node_single_axis_robust {
        return Err(SimError::NodeNotRobust);
    }
    let alpha = cert.alpha.clone();
    let coin = vec![&FieldElement::one(alpha.field()) - &alpha, alpha];
    if cert.betas.iter().any(|b| *b != coin) {
        return Err(SimError::NodeNotComposable);
    }
    if tree.p != p || !verify_majority(tree, p) {
        return Err(SimError::NotAMajorityGate(p));
    }
    let mut table = [false; 8];
    for (k, t) in table.iter_mut().enumerate() {
        *t = a.get(&[k >> 2, (k >> 1) & 1, k & 1]).is_one();
    }
    Ok(CompositeProtocol {
        tree: tree.clone(),
        node: node.clone(),
        certificate: CompositionalCertificate {
            p,
            r,
            node_certificate_valid,
            node_single_axis_robust,
            node_composable: true,
            majority_gate_valid: true,
        },
        table,
        coin,
    })
}

impl CompositeProtocol {
    pub fn p(&self) -> usize {
        self.certificate.p
    }

    /// Root output given each leaf's coin.
    pub fn evaluate_leaves(&self, leaves: &[bool]) -> bool {
        let mut level = leaves.to_vec();
        while level.len() > 1 {
            level = level
                .chunks_exact(3)
                .map(|c| self.table[(c[0] as usize) << 2 | (c[1] as usize) << 1 | c[2] as usize])
                .collect();
        }
        level[0]
    }

    fn leaves_of(&self) -> Vec<Vec<usize>> {
        let mut owned = vec![Vec::new(); self.p()];
        for (leaf, &c) in self.tree.coloring.iter().enumerate() {
            owned[c - 1].push(leaf);
        }
        owned
    }

    /// Number of entries of the flat hypermatrix.
    pub fn flat_size(&self) -> u128 {
        product_u128(self.leaves_of().iter().map(|l| 1usize.checked_shl(l.len() as u32).unwrap_or(usize::MAX)))
    }

    /// The composite as a single `p`-axis {0,1} protocol.
    pub fn materialize(&self, cap: u128) -> Result<Realization, SimError> {
        let size = self.flat_size();
        if size > cap {
            return Err(SimError::EnumerationCapExceeded(size));
        }
        let owned = self.leaves_of();
        let format: Vec<usize> = owned.iter().map(|l| 1 << l.len()).collect();
        let field = self.node.cert.field().clone();
        let (zero, one) = (FieldElement::zero(&field), FieldElement::one(&field));
        let mut leaves = vec![false; self.tree.leaves()];
        let a = Hypermatrix::from_fn(format, &field, |idx| {
            for (j, l) in owned.iter().enumerate() {
                for (pos, &leaf) in l.iter().enumerate() {
                    leaves[leaf] = idx[j] >> (l.len() - 1 - pos) & 1 == 1;
                }
            }
            if self.evaluate_leaves(&leaves) {
                one.clone()
            } else {
                zero.clone()
            }
        })?;
        let betas: Vec<Vector> = owned
            .iter()
            .map(|l| l.iter().fold(vec![one.clone()], |acc, _| kron_vec(&acc, &self.coin)))
            .collect();
        let cert = MysteryCertificate::new(self.node.cert.alpha.clone(), betas)?;
        Ok(Realization { a, cert })
    }

    /// Materializes within `cap` and checks the certificate plus every
    /// coalition of `r` players directly; `None` when over the cap.
    pub fn direct_check(&self, cap: u128) -> Result<Option<bool>, SimError> {
        let flat = match self.materialize(cap) {
            Ok(f) => f,
            Err(SimError::EnumerationCapExceeded(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !check_mystery(&flat.a, &flat.cert)?.is_valid() {
            return Ok(Some(false));
        }
        let (p, r) = (self.p(), self.certificate.r);
        for mask in 0u64..1 << p {
            if mask.count_ones() as usize == r {
                let c: Vec<usize> = (0..p).filter(|&i| mask >> i & 1 == 1).collect();
                if !coalition_is_robust(&flat.a, &flat.cert, &c, cap)? {
                    return Ok(Some(false));
                }
            }
        }
        Ok(Some(true))
    }

    /// Seeded runs in which each player in `pinned` (0-based, with a fixed
    /// coin value) sets all their leaves to that value.
    pub fn monte_carlo(&self, count: u64, seed: u64, pinned: &[(usize, bool)]) -> Result<FlipReport, SimError> {
        let sampler = AxisSampler::new(&self.coin, DEFAULT_SAMPLING_BITS)?;
        let pin: Vec<Option<bool>> = (0..self.p())
            .map(|j| pinned.iter().find(|&&(k, _)| k == j).map(|&(_, v)| v))
            .collect();
        let mut leaves = vec![false; self.tree.leaves()];
        let mut heads = 0u64;
        for trial in 0..count {
            let mut rng = trial_rng(seed, trial);
            for (leaf, &c) in leaves.iter_mut().zip(&self.tree.coloring) {
                *leaf = match pin[c - 1] {
                    Some(v) => v,
                    None => sampler.sample(&mut rng) == 1,
                };
            }
            heads += self.evaluate_leaves(&leaves) as u64;
        }
        let error: Rational = sampler.error_bound() * Rational::from_integer(self.tree.leaves().into());
        Ok(FlipReport::build(count, heads, seed, self.node.cert.alpha.clone(), &error))
    }
}
