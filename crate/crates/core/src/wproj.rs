//! Quantum weighted projective spaces.

use num_integer::Integer;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{DirectedMultigraph, GraphBuilder, Multiplicity, VertexId};
use crate::intlinalg::AbelianGroup;
use crate::ktheory::KTheory;
use crate::lens::WeightVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WprojError {
    #[error("weights must be positive")]
    InvalidWeights,
    #[error("need at least two weights, got {0}")]
    TooFewWeights(usize),
    #[error(
        "coprimality hypothesis fails at j = {j}: m_{j} shares a factor with every earlier weight"
    )]
    HypothesisNotSatisfied { j: usize },
}

/// The graph `W_1(m0, m1)`: a vertex `w0` with infinitely many edges to each of
/// `w1, ..., w_{m1/gcd(m0, m1)}`.
pub fn wp1_graph(m0: u64, m1: u64) -> Result<DirectedMultigraph, WprojError> {
    if m0 == 0 || m1 == 0 {
        return Err(WprojError::InvalidWeights);
    }
    let reduced = m1 / m0.gcd(&m1);
    let mut b = GraphBuilder::default();
    let w0 = b
        .add_vertex(VertexId::new(0, 0, "w0"))
        .expect("fresh graph");
    for j in 1..=reduced {
        let wj = b
            .add_vertex(VertexId::new(1, j, format!("w{j}")))
            .expect("distinct vertices");
        b.add_edge(w0, wj, Multiplicity::Infinite);
    }
    Ok(b.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WPCanonicalForm {
    pub gcd: u64,
    pub reduced: (u64, u64),
}

/// Teardrop weights `(1, m1 / gcd(m0, m1))` isomorphic to `WP^1(m0, m1)`.
pub fn wp1_canonical(m0: u64, m1: u64) -> Result<WPCanonicalForm, WprojError> {
    if m0 == 0 || m1 == 0 {
        return Err(WprojError::InvalidWeights);
    }
    let g = m0.gcd(&m1);
    Ok(WPCanonicalForm {
        gcd: g,
        reduced: (1, m1 / g),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    /// Least `i < j` with `gcd(m_i, m_j) = 1`.
    Coprime {
        j: usize,
        i: usize,
    },
    Missing {
        j: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
}

impl HypothesisReport {
    pub fn first_failure(&self) -> Option<usize> {
        self.witnesses.iter().find_map(|w| match *w {
            Witness::Missing { j } => Some(j),
            Witness::Coprime { .. } => None,
        })
    }
}

/// Checks that every `m_j`, `j >= 1`, is coprime to some earlier weight.
pub fn wp_hypothesis(m: &WeightVector) -> HypothesisReport {
    let w = m.as_slice();
    let witnesses: Vec<Witness> = (1..w.len())
        .map(|j| match (0..j).find(|&i| w[i].gcd(&w[j]) == 1) {
            Some(i) => Witness::Coprime { j, i },
            None => Witness::Missing { j },
        })
        .collect();
    let holds = witnesses
        .iter()
        .all(|w| matches!(w, Witness::Coprime { .. }));
    HypothesisReport { holds, witnesses }
}

/// One extension `0 -> K^{m_n} -> C(WP^n) -> C(WP^{n-1}) -> 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionStep {
    pub n: usize,
    pub ideal_copies: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WpKTheory {
    pub k_theory: KTheory,
    /// Set for `n = 1`, where the algebra is the graph algebra of `W_1(m)`.
    pub af: Option<bool>,
    /// Steps from `n` down to 2.
    pub steps: Vec<ExtensionStep>,
}

impl WpKTheory {
    pub fn to_json_value(&self) -> Value {
        let mut v = self.k_theory.to_json_value();
        let obj = v.as_object_mut().expect("K-theory JSON is an object");
        obj.insert("af".into(), json!(self.af));
        obj.insert(
            "extension".into(),
            json!({
                "steps": self
                    .steps
                    .iter()
                    .map(|s| json!({"n": s.n, "ideal_copies": s.ideal_copies}))
                    .collect::<Vec<_>>()
            }),
        );
        v
    }
}

/// K-groups of `WP^n_q(m)`.
///
/// For two weights the answer holds unconditionally. With more weights the
/// coprimality chain must hold; the groups are then assembled by adding
/// `m_j` free generators for each extension step `j = 2..=n`.
pub fn wp_k_theory(m: &WeightVector) -> Result<WpKTheory, WprojError> {
    let w = m.as_slice();
    if w.len() < 2 {
        return Err(WprojError::TooFewWeights(w.len()));
    }
    let g = wp1_graph(w[0], w[1])?;
    let af = g.is_acyclic();
    let base_rank = 1 + w[1] / w[0].gcd(&w[1]);
    if w.len() == 2 {
        return Ok(WpKTheory {
            k_theory: KTheory {
                k0: AbelianGroup::free(base_rank as usize),
                k1: AbelianGroup::trivial(),
            },
            af: Some(af),
            steps: Vec::new(),
        });
    }

    let report = wp_hypothesis(m);
    if let Some(j) = report.first_failure() {
        return Err(WprojError::HypothesisNotSatisfied { j });
    }
    let steps: Vec<ExtensionStep> = (2..w.len())
        .rev()
        .map(|n| ExtensionStep {
            n,
            ideal_copies: w[n],
        })
        .collect();
    let rank = base_rank + steps.iter().map(|s| s.ideal_copies).sum::<u64>();
    Ok(WpKTheory {
        k_theory: KTheory {
            k0: AbelianGroup::free(rank as usize),
            k1: AbelianGroup::trivial(),
        },
        af: None,
        steps,
    })
}
