//! Closed-form link counts and K_0 groups for four families of lens spaces
//! over `Z_{kl}`, used as regression oracles for the graph pipeline.
//!
//! | family | weights        |
//! |--------|----------------|
//! | `L3`   | `(1, l)`       |
//! | `L5A`  | `(1, 1, l)`    |
//! | `L5B`  | `(1, l, l)`    |
//! | `L7`   | `(1, 1, 1, l)` |

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::KTheory;
use crate::graph::{Multiplicity, MultiplicityMatrix, VertexId};
use crate::intlinalg::AbelianGroup;
use crate::lens::{distinguished_set, lens_parameters, WeightVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("no closed-form K_0 for family {0}")]
    NoClosedForm(LensFamily),
    #[error("k = {k}, l = {l}: beta = {beta} falls outside the enumerated residue classes")]
    UnmatchedCase { k: u64, l: u64, beta: BigInt },
    #[error("k = {k}, l = 1 selected case {case:?}, which cannot occur when l = 1")]
    ExcludedCase { k: u64, case: K7Case },
    #[error("k and l must be at least 1")]
    InvalidParameters,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LensFamily {
    L3,
    L5A,
    L5B,
    L7,
}

impl LensFamily {
    pub const ALL: [LensFamily; 4] = [
        LensFamily::L3,
        LensFamily::L5A,
        LensFamily::L5B,
        LensFamily::L7,
    ];

    pub fn weights(self, l: u64) -> WeightVector {
        let w = match self {
            LensFamily::L3 => vec![1, l],
            LensFamily::L5A => vec![1, 1, l],
            LensFamily::L5B => vec![1, l, l],
            LensFamily::L7 => vec![1, 1, 1, l],
        };
        WeightVector::new(w).expect("family weights are positive")
    }

    /// `n` such that the family lives on `S^{2n+1}`.
    pub fn sphere_dimension(self) -> usize {
        match self {
            LensFamily::L3 => 1,
            LensFamily::L5A | LensFamily::L5B => 2,
            LensFamily::L7 => 3,
        }
    }
}

impl fmt::Display for LensFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LensFamily::L3 => "L3",
            LensFamily::L5A => "L5A",
            LensFamily::L5B => "L5B",
            LensFamily::L7 => "L7",
        };
        f.write_str(s)
    }
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

/// Closed-form link counts `n_{ij}^{rs}`, indexed like the lens graph of the
/// family at `N = kl`.
///
/// In the closed forms the loop index `r` of a target at the top level runs
/// against the skew-product residues: formula index `r` is the lens vertex
/// with residue `-r mod l`.
pub fn oracle_multiplicities(
    family: LensFamily,
    k: u64,
    l: u64,
) -> Result<MultiplicityMatrix, OracleError> {
    if k == 0 || l == 0 {
        return Err(OracleError::InvalidParameters);
    }
    let p = lens_parameters(k * l, &family.weights(l)).expect("kl >= 1");
    let labels: Vec<VertexId> = distinguished_set(&p).vertices().to_vec();
    let (kb, lb) = (big(k), big(l));
    let kl = &kb * &lb;

    let count = |from: &VertexId, to: &VertexId| -> BigInt {
        let (i, r) = (from.level, big(from.index));
        let (j, s) = (to.level, big(to.index));
        let rho = big((l - to.index % l) % l);
        if i == j {
            return if r == s { big(1) } else { BigInt::zero() };
        }
        if i > j {
            return BigInt::zero();
        }
        let alpha = &kl * (&kb + 1u32) / 2u32;
        match (family, i, j) {
            (LensFamily::L3, 0, 1) => kb.clone(),
            (LensFamily::L5A, 0, 1) => kl.clone(),
            (LensFamily::L5A, 0, 2) => &alpha - &rho * &kb,
            (LensFamily::L5A, 1, 2) => kb.clone(),
            (LensFamily::L5B, 0, 1) => kb.clone(),
            (LensFamily::L5B, 0, 2) => &kb * (&kb + 1u32) / 2u32,
            (LensFamily::L5B, 1, 2) if r == s => kb.clone(),
            (LensFamily::L5B, 1, 2) => BigInt::zero(),
            (LensFamily::L7, 0, 1) | (LensFamily::L7, 1, 2) => kl.clone(),
            (LensFamily::L7, 0, 2) => &kl * (&kl + 1u32) / 2u32,
            (LensFamily::L7, 1, 3) => &alpha - &rho * &kb,
            (LensFamily::L7, 2, 3) => kb.clone(),
            (LensFamily::L7, 0, 3) => {
                let head = &kl * (&kb + 1u32) * (2u32 * &kl + &lb + 3u32);
                debug_assert!(head.is_multiple_of(&big(12)));
                head / 12u32 + &kb * &rho * (&rho - 1u32) / 2u32 - &alpha * &rho
            }
            _ => unreachable!("levels {i} -> {j} do not occur in {family}"),
        }
    };

    let mut entries = Vec::with_capacity(labels.len() * labels.len());
    for from in &labels {
        for to in &labels {
            let n = count(from, to);
            let n = n.to_biguint().expect("link counts are nonnegative");
            entries.push(Multiplicity::Finite(n));
        }
    }
    Ok(MultiplicityMatrix::from_entries(labels, entries))
}

/// `alpha = n^{00}_{13}` and `beta = n^{00}_{03}` of the `L7` family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K7Parameters {
    pub k: u64,
    pub l: u64,
    pub alpha: BigInt,
    pub beta: BigInt,
}

impl K7Parameters {
    pub fn new(k: u64, l: u64) -> Self {
        let (kb, lb) = (big(k), big(l));
        let alpha = &kb * &lb * (&kb + 1u32) / 2u32;
        let numerator = &alpha * (2u32 * &kb * &lb + &lb + 3u32);
        debug_assert!(numerator.is_multiple_of(&big(6)));
        let beta = numerator / 6u32;
        Self { k, l, alpha, beta }
    }

    /// Whether `alpha * (2kl + l + 3)` is divisible by 6.
    pub fn beta_is_integral(k: u64, l: u64) -> bool {
        let (kb, lb) = (big(k), big(l));
        let alpha = &kb * &lb * (&kb + 1u32) / 2u32;
        (alpha * (2u32 * &kb * &lb + &lb + 3u32)).is_multiple_of(&big(6))
    }
}

/// The six branches of the `L7` torsion computation, in the order listed in
/// the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum K7Case {
    /// `k | alpha`, `k | beta`
    AllDivisible,
    /// `k | alpha`, `beta ≡ k/6, 5k/6 (mod k)`
    SixthResidue,
    /// `k | alpha`, `beta ≡ k/3, 2k/3 (mod k)`
    ThirdResidue,
    /// `k | alpha`, `beta ≡ k/2 (mod k)`
    HalfResidue,
    /// `k ∤ alpha`, `k/2 | beta`
    HalfAlphaDivisible,
    /// `k ∤ alpha`, `k/2 ∤ beta`
    HalfAlphaIndivisible,
}

impl K7Case {
    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

pub fn k7_case(p: &K7Parameters) -> Result<K7Case, OracleError> {
    let k = big(p.k);
    let unmatched = || OracleError::UnmatchedCase {
        k: p.k,
        l: p.l,
        beta: p.beta.clone(),
    };
    let case = if p.alpha.is_multiple_of(&k) {
        let b = p.beta.mod_floor(&k);
        if b.is_zero() {
            K7Case::AllDivisible
        } else if &b * 6u32 == k || &b * 6u32 == &k * 5u32 {
            K7Case::SixthResidue
        } else if &b * 3u32 == k || &b * 3u32 == &k * 2u32 {
            K7Case::ThirdResidue
        } else if &b * 2u32 == k {
            K7Case::HalfResidue
        } else {
            return Err(unmatched());
        }
    } else {
        if !p.k.is_multiple_of(2) {
            return Err(unmatched());
        }
        let half = big(p.k / 2);
        let b = p.beta.mod_floor(&half);
        if b.is_zero() {
            K7Case::HalfAlphaDivisible
        } else if &b * 6u32 == k || &b * 3u32 == k {
            K7Case::HalfAlphaIndivisible
        } else {
            return Err(unmatched());
        }
    };
    if p.l == 1 && matches!(case, K7Case::SixthResidue | K7Case::HalfResidue) {
        return Err(OracleError::ExcludedCase { k: p.k, case });
    }
    Ok(case)
}

/// Closed-form K-theory for the `L5A`, `L5B` and `L7` families over `Z_{kl}`.
/// `K_1` is taken free of the same rank as `K_0`, since the K-matrix is square.
pub fn oracle_lens_k(family: LensFamily, k: u64, l: u64) -> Result<KTheory, OracleError> {
    if k == 0 || l == 0 {
        return Err(OracleError::InvalidParameters);
    }
    let free = usize::try_from(l).expect("l fits in usize");
    let kb = big(k);
    let even = k.is_multiple_of(2);
    let torsion: Vec<BigInt> = match family {
        LensFamily::L3 => return Err(OracleError::NoClosedForm(family)),
        LensFamily::L5A => {
            if !even || l.is_multiple_of(2) {
                vec![kb.clone(), kb.clone()]
            } else {
                vec![2u32 * &kb, &kb / 2u32]
            }
        }
        LensFamily::L5B => {
            if !even {
                vec![kb.clone(); free + 1]
            } else {
                let mut t = vec![2u32 * &kb, &kb / 2u32];
                t.extend(std::iter::repeat_n(kb.clone(), free - 1));
                t
            }
        }
        LensFamily::L7 => {
            let p = K7Parameters::new(k, l);
            let k = &kb;
            match k7_case(&p)? {
                K7Case::AllDivisible => vec![k.clone(), k.clone(), k.clone()],
                K7Case::SixthResidue => vec![k / 6u32, k.clone(), 6u32 * k],
                K7Case::ThirdResidue => vec![k / 3u32, k.clone(), 3u32 * k],
                K7Case::HalfResidue => vec![k / 2u32, k.clone(), 2u32 * k],
                K7Case::HalfAlphaDivisible => vec![k / 2u32, k / 2u32, 4u32 * k],
                K7Case::HalfAlphaIndivisible => vec![k / 6u32, k / 2u32, 12u32 * k],
            }
        }
    };
    Ok(KTheory {
        k0: AbelianGroup::from_cyclic_orders(free, torsion),
        k1: AbelianGroup::free(free),
    })
}

/// `beta mod k` as a multiple of `k/6`: returns `j` with `beta ≡ j k / 6 (mod k)`,
/// or `None` when the residue is not of that form.
pub fn beta_sixth_index(p: &K7Parameters) -> Option<u32> {
    let k = big(p.k);
    let b = p.beta.mod_floor(&k) * 6u32;
    b.is_multiple_of(&k)
        .then(|| (b / &k).to_u32().expect("index below 6"))
}

/// For even `k`: `beta mod k/2` as a multiple of `k/6`.
pub fn beta_half_sixth_index(p: &K7Parameters) -> Option<u32> {
    if !p.k.is_multiple_of(2) {
        return None;
    }
    let k = big(p.k);
    let b = p.beta.mod_floor(&big(p.k / 2)) * 6u32;
    b.is_multiple_of(&k)
        .then(|| (b / &k).to_u32().expect("index below 3"))
}
