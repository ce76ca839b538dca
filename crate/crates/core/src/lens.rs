//! Sphere graphs, their cyclic skew products, and the lens graphs obtained by
//! counting first-return paths between distinguished vertices.
//!
//! Vertex `(v_i, r)` of a skew product has level `i`, index `r` and tag
//! `v{i}_{r}`. The distinguished vertices `(v_k, t)` with `t < gcd(N, m_k)`
//! keep the same key and tag in the lens graph, so a lens-graph vertex can be
//! looked up directly in the skew product.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{
    topological_order, DirectedMultigraph, GraphBuilder, Multiplicity, MultiplicityMatrix, VertexId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LensError {
    #[error("weight vector must be nonempty with every weight at least 1")]
    InvalidWeights,
    #[error("group order N must be at least 1")]
    InvalidModulus,
    #[error("expected {expected} weights, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("edge {0} has no label")]
    UnlabelledEdge(usize),
    #[error("edge {0} has infinite multiplicity")]
    InfiniteEdge(usize),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(String),
    #[error("the graph with distinguished vertices removed has a cycle")]
    PuncturedGraphCyclic,
}

/// Positive integer weights `m_0, ..., m_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Result<Self, LensError> {
        if weights.is_empty() || weights.contains(&0) {
            return Err(LensError::InvalidWeights);
        }
        Ok(Self(weights))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of sphere levels minus one.
    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }
}

impl TryFrom<Vec<u64>> for WeightVector {
    type Error = LensError;

    fn try_from(v: Vec<u64>) -> Result<Self, LensError> {
        Self::new(v)
    }
}

/// The graph `L_{2n+1}`: vertices `v_0..v_n`, one edge `v_i -> v_j` for each `i <= j`.
pub fn sphere_graph(n: usize) -> DirectedMultigraph {
    let mut b = GraphBuilder::default();
    for i in 0..=n {
        b.add_vertex(VertexId::new(i as u32, 0, format!("v{i}")))
            .expect("sphere vertices are distinct");
    }
    for i in 0..=n {
        for j in i..=n {
            b.add_edge(i, j, Multiplicity::one());
        }
    }
    b.finish()
}

/// `Z_N`-valued labels, aligned with the edge list of the labelled graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabelling {
    modulus: u64,
    labels: Vec<u64>,
}

impl EdgeLabelling {
    pub fn new(modulus: u64, labels: Vec<u64>) -> Result<Self, LensError> {
        if modulus == 0 {
            return Err(LensError::InvalidModulus);
        }
        let labels = labels.into_iter().map(|c| c % modulus).collect();
        Ok(Self { modulus, labels })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn label(&self, edge: usize) -> Option<u64> {
        self.labels.get(edge).copied()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }
}

/// Labels each edge `e_ij` of `sphere_graph(n)` by `m_i mod N`.
pub fn weight_labelling(
    n: usize,
    modulus: u64,
    m: &WeightVector,
) -> Result<EdgeLabelling, LensError> {
    if m.len() != n + 1 {
        return Err(LensError::DimensionMismatch {
            expected: n + 1,
            actual: m.len(),
        });
    }
    let g = sphere_graph(n);
    let labels = g.edges().iter().map(|e| m.as_slice()[e.source]).collect();
    EdgeLabelling::new(modulus, labels)
}

/// Skew product `g x_c Z_N`. Vertex `(v, r)` is keyed `(level, index * N + r)`
/// and tagged `{tag}_{r}`; each edge `e: u -> w` lifts to
/// `(u, r - c(e)) -> (w, r)` for every residue `r`.
pub fn skew_product(
    g: &DirectedMultigraph,
    labelling: &EdgeLabelling,
) -> Result<DirectedMultigraph, LensError> {
    let n = labelling.modulus();
    for (i, e) in g.edges().iter().enumerate() {
        if e.multiplicity.is_infinite() {
            return Err(LensError::InfiniteEdge(i));
        }
        if labelling.label(i).is_none() {
            return Err(LensError::UnlabelledEdge(i));
        }
    }

    let mut b = GraphBuilder::default();
    let lift = |v: usize, r: u64| v * n as usize + r as usize;
    for v in g.vertices() {
        for r in 0..n {
            b.add_vertex(VertexId::new(
                v.level,
                v.index * n + r,
                format!("{}_{r}", v.tag),
            ))
            .map_err(|_| LensError::UnknownVertex(v.tag.clone()))?;
        }
    }
    for (i, e) in g.edges().iter().enumerate() {
        let c = labelling.labels[i];
        for r in 0..n {
            let from = (r + n - c) % n;
            b.add_edge(
                lift(e.source, from),
                lift(e.range, r),
                e.multiplicity.clone(),
            );
        }
    }
    Ok(b.finish())
}

/// `N`, the weights, `c_i = gcd(N, m_i)` and `d_i = N / c_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LensParameters {
    pub modulus: u64,
    pub weights: WeightVector,
    pub c: Vec<u64>,
    pub d: Vec<u64>,
}

pub fn lens_parameters(modulus: u64, m: &WeightVector) -> Result<LensParameters, LensError> {
    if modulus == 0 {
        return Err(LensError::InvalidModulus);
    }
    let c: Vec<u64> = m.as_slice().iter().map(|&mi| modulus.gcd(&mi)).collect();
    let d = c.iter().map(|&ci| modulus / ci).collect();
    Ok(LensParameters {
        modulus,
        weights: m.clone(),
        c,
        d,
    })
}

/// The vertices `(v_k, t)`, `t < c_k`, ordered by level then `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishedSet {
    vertices: Vec<VertexId>,
}

impl DistinguishedSet {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub fn distinguished_set(p: &LensParameters) -> DistinguishedSet {
    let vertices = p
        .c
        .iter()
        .enumerate()
        .flat_map(|(k, &ck)| (0..ck).map(move |t| VertexId::new(k as u32, t, format!("v{k}_{t}"))))
        .collect();
    DistinguishedSet { vertices }
}

fn distinguished_positions(
    skew: &DirectedMultigraph,
    dset: &DistinguishedSet,
) -> Result<(Vec<usize>, Vec<Option<usize>>), LensError> {
    let mut slot = vec![None; skew.vertex_count()];
    let mut positions = Vec::with_capacity(dset.len());
    for (k, v) in dset.vertices().iter().enumerate() {
        let p = skew
            .position(v)
            .ok_or_else(|| LensError::UnknownVertex(v.tag.clone()))?;
        slot[p] = Some(k);
        positions.push(p);
    }
    Ok((positions, slot))
}

/// Number of paths of length at least one between distinguished vertices
/// whose interior vertices are all outside the distinguished set.
///
/// The counts come from one dynamic-programming sweep per source over a
/// topological order of the graph with the distinguished vertices removed.
pub fn count_admissible(
    skew: &DirectedMultigraph,
    dset: &DistinguishedSet,
) -> Result<MultiplicityMatrix, LensError> {
    for (i, e) in skew.edges().iter().enumerate() {
        if e.multiplicity.is_infinite() {
            return Err(LensError::InfiniteEdge(i));
        }
    }
    let (positions, slot) = distinguished_positions(skew, dset)?;
    let interior: Vec<bool> = slot.iter().map(Option::is_none).collect();
    let order = topological_order(skew, &interior).ok_or(LensError::PuncturedGraphCyclic)?;
    let out = skew.out_edges();
    let mult = |e: usize| {
        skew.edges()[e]
            .multiplicity
            .finite()
            .expect("finite multiplicities checked above")
    };

    let k = positions.len();
    let mut entries = vec![Multiplicity::zero(); k * k];
    let mut ways = vec![BigUint::zero(); skew.vertex_count()];
    for (row, &src) in positions.iter().enumerate() {
        ways.iter_mut().for_each(BigUint::set_zero);
        let mut hits = vec![BigUint::zero(); k];
        let mut push = |from_ways: &BigUint, e: usize, ways: &mut Vec<BigUint>| {
            let to = skew.edges()[e].range;
            let added = from_ways * mult(e);
            match slot[to] {
                Some(col) => hits[col] += added,
                None => ways[to] += added,
            }
        };
        let one = BigUint::from(1u32);
        for &e in &out[src] {
            push(&one, e, &mut ways);
        }
        for &v in &order {
            if ways[v].is_zero() {
                continue;
            }
            let here = ways[v].clone();
            for &e in &out[v] {
                push(&here, e, &mut ways);
            }
        }
        for (col, h) in hits.into_iter().enumerate() {
            entries[row * k + col] = Multiplicity::Finite(h);
        }
    }
    Ok(MultiplicityMatrix::from_entries(
        dset.vertices().to_vec(),
        entries,
    ))
}

/// One edge of an explicit path; `copy` distinguishes parallel edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PathStep {
    pub edge: usize,
    pub copy: u64,
}

/// Lists every admissible path from `src` to `tgt` by depth-first search.
/// Exponential in general; meant for small instances.
pub fn enumerate_admissible(
    skew: &DirectedMultigraph,
    dset: &DistinguishedSet,
    src: &VertexId,
    tgt: &VertexId,
) -> Result<Vec<Vec<PathStep>>, LensError> {
    let (_, slot) = distinguished_positions(skew, dset)?;
    let start = skew
        .position(src)
        .ok_or_else(|| LensError::UnknownVertex(src.tag.clone()))?;
    let target = skew
        .position(tgt)
        .ok_or_else(|| LensError::UnknownVertex(tgt.tag.clone()))?;
    let out = skew.out_edges();
    let bound = skew.vertex_count() + 1;

    struct Search<'a> {
        skew: &'a DirectedMultigraph,
        out: &'a [Vec<usize>],
        slot: &'a [Option<usize>],
        target: usize,
        bound: usize,
        path: Vec<PathStep>,
        found: Vec<Vec<PathStep>>,
    }

    impl Search<'_> {
        fn walk(&mut self, v: usize) -> Result<(), LensError> {
            if self.path.len() >= self.bound {
                return Err(LensError::PuncturedGraphCyclic);
            }
            for &e in &self.out[v] {
                let edge = &self.skew.edges()[e];
                let copies = match &edge.multiplicity {
                    Multiplicity::Finite(m) => m.to_u64().ok_or(LensError::InfiniteEdge(e))?,
                    Multiplicity::Infinite => return Err(LensError::InfiniteEdge(e)),
                };
                for copy in 0..copies {
                    self.path.push(PathStep { edge: e, copy });
                    if edge.range == self.target {
                        self.found.push(self.path.clone());
                    } else if self.slot[edge.range].is_none() {
                        self.walk(edge.range)?;
                    }
                    self.path.pop();
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        skew,
        out: &out,
        slot: &slot,
        target,
        bound,
        path: Vec::new(),
        found: Vec::new(),
    };
    search.walk(start)?;
    Ok(search.found)
}

/// The lens graph together with the data it was built from.
#[derive(Clone, Debug)]
pub struct LensConstruction {
    pub parameters: LensParameters,
    pub skew: DirectedMultigraph,
    pub distinguished: DistinguishedSet,
    pub counts: MultiplicityMatrix,
    pub graph: DirectedMultigraph,
}

pub fn lens_construction(
    n: usize,
    modulus: u64,
    m: &WeightVector,
) -> Result<LensConstruction, LensError> {
    let labelling = weight_labelling(n, modulus, m)?;
    let skew = skew_product(&sphere_graph(n), &labelling)?;
    let parameters = lens_parameters(modulus, m)?;
    let distinguished = distinguished_set(&parameters);
    let counts = count_admissible(&skew, &distinguished)?;

    let mut b = GraphBuilder::default();
    for v in distinguished.vertices() {
        b.add_vertex(v.clone())
            .expect("distinguished vertices are distinct");
    }
    for i in 0..counts.dim() {
        for j in 0..counts.dim() {
            let m = counts.get(i, j);
            if !m.is_zero() {
                b.add_edge(i, j, m.clone());
            }
        }
    }
    Ok(LensConstruction {
        parameters,
        skew,
        distinguished,
        counts,
        graph: b.finish(),
    })
}

/// The graph whose C*-algebra is the quantum lens space `L_q^{2n+1}(N; m)`.
pub fn lens_graph(
    n: usize,
    modulus: u64,
    m: &WeightVector,
) -> Result<DirectedMultigraph, LensError> {
    lens_construction(n, modulus, m).map(|c| c.graph)
}
