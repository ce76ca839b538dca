//! K-groups of graph C*-algebras.
//!
//! For a graph with vertex set `V` and regular vertices `R`, the K-matrix has
//! one row per regular vertex and one column per vertex, with entries
//! `A(v, w) - δ(v, w)`. Its rows span a sublattice of `Z^V`; `K_0` is the
//! quotient and `K_1` is free of rank `|R| - rank`.

pub mod oracle;

use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::graph::{DirectedMultigraph, Multiplicity, VertexClass};
use crate::intlinalg::{cokernel, rank, AbelianGroup, IntegerMatrix, LinalgError};
use crate::lens::{lens_graph, LensError, WeightVector};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KTheory {
    pub k0: AbelianGroup,
    pub k1: AbelianGroup,
}

impl KTheory {
    pub fn to_json_value(&self) -> Value {
        json!({"k0": self.k0.to_json_value(), "k1": self.k1.to_json_value()})
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(value: &Value) -> Result<Self, LinalgError> {
        let field = |key: &str| {
            value.get(key).ok_or_else(|| LinalgError::Parse {
                location: key.to_string(),
                message: "missing field".into(),
            })
        };
        let k0 = AbelianGroup::from_json_value(field("k0")?)?;
        let k1 = AbelianGroup::from_json_value(field("k1")?)?;
        Ok(Self { k0, k1 })
    }
}

impl fmt::Display for KTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K0 = {}; K1 = {}", self.k0, self.k1)
    }
}

/// Adjacency minus identity, restricted to rows of regular vertices.
pub fn k_matrix(g: &DirectedMultigraph) -> IntegerMatrix {
    let regular: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| g.class_at(v) == VertexClass::Regular)
        .collect();
    let n = g.vertex_count();
    let mut m = IntegerMatrix::zeros(regular.len(), n);
    let mut row_of = vec![None; n];
    for (row, &v) in regular.iter().enumerate() {
        row_of[v] = Some(row);
        m[(row, v)] = BigInt::from(-1);
    }
    for e in g.edges() {
        let Some(row) = row_of[e.source] else {
            continue;
        };
        match &e.multiplicity {
            Multiplicity::Finite(k) => m[(row, e.range)] += BigInt::from(k.clone()),
            Multiplicity::Infinite => unreachable!("regular vertices emit finitely many edges"),
        }
    }
    m
}

pub fn graph_k_theory(g: &DirectedMultigraph) -> KTheory {
    let m = k_matrix(g);
    let k0 = cokernel(&m, g.vertex_count()).expect("K-matrix has one column per vertex");
    let k1 = AbelianGroup::free(m.rows() - rank(&m));
    KTheory { k0, k1 }
}

/// K-theory of the quantum lens space `L_q^{2n+1}(N; m)`.
pub fn lens_k_theory(n: usize, modulus: u64, m: &WeightVector) -> Result<KTheory, LensError> {
    lens_graph(n, modulus, m).map(|g| graph_k_theory(&g))
}
