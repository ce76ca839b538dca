//! Directed multigraphs with aggregated edge multiplicities.
//!
//! A graph stores each ordered pair `(source, range)` at most once; parallel
//! edges are folded into a [`Multiplicity`]. Vertex order is construction
//! order and every matrix derived from a graph uses it for rows and columns.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("edge {from} -> {to} references an undeclared vertex")]
    UnknownEndpoint { from: String, to: String },
    #[error("edge {from} -> {to} has multiplicity zero")]
    ZeroMultiplicity { from: String, to: String },
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

/// A vertex identified by its `(level, index)` pair; `tag` is the display name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexId {
    pub level: u32,
    pub index: u64,
    pub tag: String,
}

impl VertexId {
    pub fn new(level: u32, index: u64, tag: impl Into<String>) -> Self {
        Self {
            level,
            index,
            tag: tag.into(),
        }
    }

    pub fn key(&self) -> (u32, u64) {
        (self.level, self.index)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag)
    }
}

/// Number of parallel edges between two vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Finite(BigUint),
    Infinite,
}

impl Multiplicity {
    pub fn one() -> Self {
        Multiplicity::Finite(BigUint::one())
    }

    pub fn zero() -> Self {
        Multiplicity::Finite(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Multiplicity::Finite(n) if n.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Multiplicity::Infinite)
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Multiplicity::Finite(n) => Some(n),
            Multiplicity::Infinite => None,
        }
    }

    fn combine(&mut self, other: &Multiplicity) {
        *self = match (&*self, other) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => Multiplicity::Finite(a + b),
            _ => Multiplicity::Infinite,
        };
    }
}

impl From<u64> for Multiplicity {
    fn from(n: u64) -> Self {
        Multiplicity::Finite(BigUint::from(n))
    }
}

impl From<BigUint> for Multiplicity {
    fn from(n: BigUint) -> Self {
        Multiplicity::Finite(n)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Infinite => f.write_str("inf"),
        }
    }
}

// JSON form: an integer when it fits in 64 bits, a decimal string otherwise,
// and the string "inf" for infinitely many edges.
impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Infinite => s.serialize_str("inf"),
            Multiplicity::Finite(n) => match n.to_u64() {
                Some(v) => s.serialize_u64(v),
                None => s.serialize_str(&n.to_string()),
            },
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct MultVisitor;

        impl Visitor<'_> for MultVisitor {
            type Value = Multiplicity;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer, a decimal string, or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Multiplicity, E> {
                Ok(Multiplicity::from(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Multiplicity, E> {
                u64::try_from(v)
                    .map(Multiplicity::from)
                    .map_err(|_| E::custom(format!("negative multiplicity {v}")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Multiplicity, E> {
                if v == "inf" {
                    return Ok(Multiplicity::Infinite);
                }
                if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(E::custom(format!("invalid multiplicity {v:?}")));
                }
                v.parse::<BigUint>()
                    .map(Multiplicity::Finite)
                    .map_err(|e| E::custom(e.to_string()))
            }
        }

        d.deserialize_any(MultVisitor)
    }
}

/// Input record for [`DirectedMultigraph::new`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub source: VertexId,
    pub range: VertexId,
    pub multiplicity: Multiplicity,
}

impl EdgeRecord {
    pub fn new(source: VertexId, range: VertexId, multiplicity: impl Into<Multiplicity>) -> Self {
        Self {
            source,
            range,
            multiplicity: multiplicity.into(),
        }
    }
}

/// A stored edge; endpoints are positions in the graph's vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub range: usize,
    pub multiplicity: Multiplicity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VertexClass {
    Regular,
    Sink,
    InfiniteEmitter,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DirectedMultigraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    positions: HashMap<(u32, u64), usize>,
}

/// Validates and builds a graph. Repeated `(source, range)` records are merged
/// by adding their multiplicities.
pub fn make_graph(
    vertices: Vec<VertexId>,
    edges: Vec<EdgeRecord>,
) -> Result<DirectedMultigraph, GraphError> {
    DirectedMultigraph::new(vertices, edges)
}

impl DirectedMultigraph {
    pub fn new(vertices: Vec<VertexId>, edges: Vec<EdgeRecord>) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::default();
        for v in vertices {
            builder.add_vertex(v)?;
        }
        for e in edges {
            let (Some(s), Some(r)) = (
                builder.graph.position(&e.source),
                builder.graph.position(&e.range),
            ) else {
                return Err(GraphError::UnknownEndpoint {
                    from: e.source.tag,
                    to: e.range.tag,
                });
            };
            if e.multiplicity.is_zero() {
                return Err(GraphError::ZeroMultiplicity {
                    from: e.source.tag,
                    to: e.range.tag,
                });
            }
            builder.add_edge(s, r, e.multiplicity);
        }
        Ok(builder.finish())
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, idx: usize) -> &VertexId {
        &self.vertices[idx]
    }

    /// Position of `v` in the vertex list, matched on `(level, index)`.
    pub fn position(&self, v: &VertexId) -> Option<usize> {
        self.position_of(v.level, v.index)
    }

    pub fn position_of(&self, level: u32, index: u64) -> Option<usize> {
        self.positions.get(&(level, index)).copied()
    }

    pub fn find_edge(&self, source: usize, range: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.source == source && e.range == range)
    }

    /// Outgoing edge indices per vertex, in edge order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.source].push(i);
        }
        out
    }

    pub fn has_infinite_edges(&self) -> bool {
        self.edges.iter().any(|e| e.multiplicity.is_infinite())
    }

    /// Sum of all edge multiplicities, or `None` if some edge is infinite.
    pub fn total_multiplicity(&self) -> Option<BigUint> {
        self.edges.iter().try_fold(BigUint::zero(), |acc, e| {
            e.multiplicity.finite().map(|n| acc + n)
        })
    }

    pub fn vertex_class(&self, v: &VertexId) -> Result<VertexClass, GraphError> {
        self.position(v)
            .map(|idx| self.class_at(idx))
            .ok_or_else(|| GraphError::UnknownVertex(v.tag.clone()))
    }

    pub fn class_at(&self, idx: usize) -> VertexClass {
        let mut emits = false;
        for e in self.edges.iter().filter(|e| e.source == idx) {
            if e.multiplicity.is_infinite() {
                return VertexClass::InfiniteEmitter;
            }
            emits = true;
        }
        if emits {
            VertexClass::Regular
        } else {
            VertexClass::Sink
        }
    }

    pub fn regular_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| self.class_at(i) == VertexClass::Regular)
            .collect()
    }

    /// True when the graph has no directed cycle (loops count as cycles).
    pub fn is_acyclic(&self) -> bool {
        let all: Vec<bool> = vec![true; self.vertices.len()];
        topological_order(self, &all).is_some()
    }

    pub fn adjacency_matrix(&self) -> MultiplicityMatrix {
        let n = self.vertices.len();
        let mut entries = vec![Multiplicity::zero(); n * n];
        for e in &self.edges {
            entries[e.source * n + e.range] = e.multiplicity.clone();
        }
        MultiplicityMatrix {
            labels: self.vertices.clone(),
            entries,
        }
    }

    /// Graphviz rendering. Vertices sharing a level are placed on one rank and
    /// edges with multiplicity other than one carry a `(n)` or `(inf)` label.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        let mut levels: Vec<u32> = self.vertices.iter().map(|v| v.level).collect();
        levels.sort_unstable();
        levels.dedup();
        for level in levels {
            out.push_str("  { rank=same;");
            for v in self.vertices.iter().filter(|v| v.level == level) {
                out.push_str(&format!(" {};", dot_id(&v.tag)));
            }
            out.push_str(" }\n");
        }
        for e in &self.edges {
            let s = dot_id(&self.vertices[e.source].tag);
            let r = dot_id(&self.vertices[e.range].tag);
            match &e.multiplicity {
                Multiplicity::Finite(n) if n.is_one() => {
                    out.push_str(&format!("  {s} -> {r};\n"));
                }
                m => out.push_str(&format!("  {s} -> {r} [label=\"({m})\"];\n")),
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    source: self.vertices[e.source].tag.clone(),
                    range: self.vertices[e.range].tag.clone(),
                    multiplicity: e.multiplicity.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| GraphError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;

        let mut builder = GraphBuilder::default();
        let mut by_tag: HashMap<String, usize> = HashMap::new();
        for (i, v) in doc.vertices.into_iter().enumerate() {
            let tag = v.tag.clone();
            let idx = builder.add_vertex(v).map_err(|e| GraphError::Parse {
                location: format!("vertices[{i}]"),
                message: e.to_string(),
            })?;
            by_tag.insert(tag, idx);
        }
        for (i, e) in doc.edges.into_iter().enumerate() {
            let lookup = |tag: &str, field: &str| {
                by_tag.get(tag).copied().ok_or_else(|| GraphError::Parse {
                    location: format!("edges[{i}].{field}"),
                    message: format!("unknown vertex tag {tag:?}"),
                })
            };
            let s = lookup(&e.source, "source")?;
            let r = lookup(&e.range, "range")?;
            if e.multiplicity.is_zero() {
                return Err(GraphError::Parse {
                    location: format!("edges[{i}].multiplicity"),
                    message: "multiplicity must be at least 1".into(),
                });
            }
            builder.add_edge(s, r, e.multiplicity);
        }
        Ok(builder.finish())
    }
}

fn dot_id(tag: &str) -> String {
    format!("\"{}\"", tag.replace('\\', "\\\\").replace('"', "\\\""))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    source: String,
    range: String,
    multiplicity: Multiplicity,
}

/// Incremental construction used by the graph families in this crate.
#[derive(Default)]
pub(crate) struct GraphBuilder {
    graph: DirectedMultigraph,
    tags: HashMap<String, usize>,
    edge_slots: HashMap<(usize, usize), usize>,
}

impl GraphBuilder {
    pub(crate) fn add_vertex(&mut self, v: VertexId) -> Result<usize, GraphError> {
        if self.graph.positions.contains_key(&v.key()) || self.tags.contains_key(&v.tag) {
            return Err(GraphError::DuplicateVertex(v.tag));
        }
        let idx = self.graph.vertices.len();
        self.graph.positions.insert(v.key(), idx);
        self.tags.insert(v.tag.clone(), idx);
        self.graph.vertices.push(v);
        Ok(idx)
    }

    /// Caller guarantees `multiplicity` is nonzero and both endpoints exist.
    pub(crate) fn add_edge(&mut self, source: usize, range: usize, multiplicity: Multiplicity) {
        debug_assert!(!multiplicity.is_zero());
        match self.edge_slots.get(&(source, range)) {
            Some(&slot) => self.graph.edges[slot].multiplicity.combine(&multiplicity),
            None => {
                self.edge_slots
                    .insert((source, range), self.graph.edges.len());
                self.graph.edges.push(Edge {
                    source,
                    range,
                    multiplicity,
                });
            }
        }
    }

    pub(crate) fn finish(self) -> DirectedMultigraph {
        self.graph
    }
}

/// Kahn's algorithm on the subgraph induced by vertices with `keep[v]`.
/// Returns `None` if that subgraph has a cycle.
pub(crate) fn topological_order(g: &DirectedMultigraph, keep: &[bool]) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut indegree = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in g.edges() {
        if keep[e.source] && keep[e.range] {
            indegree[e.range] += 1;
            succ[e.source].push(e.range);
        }
    }
    let mut queue: std::collections::VecDeque<usize> =
        (0..n).filter(|&v| keep[v] && indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    let kept = keep.iter().filter(|&&k| k).count();
    (order.len() == kept).then_some(order)
}

/// Square matrix of multiplicities indexed by a vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityMatrix {
    labels: Vec<VertexId>,
    entries: Vec<Multiplicity>,
}

impl MultiplicityMatrix {
    pub(crate) fn from_entries(labels: Vec<VertexId>, entries: Vec<Multiplicity>) -> Self {
        assert_eq!(labels.len() * labels.len(), entries.len());
        Self { labels, entries }
    }

    pub fn labels(&self) -> &[VertexId] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, row: usize, col: usize) -> &Multiplicity {
        &self.entries[row * self.labels.len() + col]
    }

    pub fn position_of(&self, level: u32, index: u64) -> Option<usize> {
        self.labels
            .iter()
            .position(|v| v.level == level && v.index == index)
    }

    /// Entry between the vertices keyed `(level, index)`; `None` if either is absent.
    pub fn entry(&self, from: (u32, u64), to: (u32, u64)) -> Option<&Multiplicity> {
        let r = self.position_of(from.0, from.1)?;
        let c = self.position_of(to.0, to.1)?;
        Some(self.get(r, c))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Multiplicity]> {
        self.entries.chunks(self.labels.len().max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(level: u32, tag: &str) -> VertexId {
        VertexId::new(level, 0, tag)
    }

    #[test]
    fn empty_graph() {
        let g = make_graph(vec![], vec![]).unwrap();
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(g.to_json(), r#"{"vertices":[],"edges":[]}"#);
        assert_eq!(g.adjacency_matrix().dim(), 0);
    }

    #[test]
    fn single_loop() {
        let v0 = v(0, "v0");
        let g = make_graph(
            vec![v0.clone()],
            vec![EdgeRecord::new(v0.clone(), v0.clone(), 1)],
        )
        .unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.vertex_class(&v0).unwrap(), VertexClass::Regular);
        assert_eq!(g.adjacency_matrix().get(0, 0), &Multiplicity::one());
        assert!(!g.is_acyclic());
    }

    #[test]
    fn unknown_endpoint_rejected() {
        let (v0, v1) = (v(0, "v0"), v(1, "v1"));
        let err = make_graph(vec![v0.clone()], vec![EdgeRecord::new(v0, v1, 1)]).unwrap_err();
        assert!(matches!(err, GraphError::UnknownEndpoint { .. }));
    }

    #[test]
    fn duplicate_vertex_rejected() {
        let err = make_graph(vec![v(0, "a"), v(0, "b")], vec![]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateVertex("b".into()));
        let err = make_graph(vec![v(0, "a"), v(1, "a")], vec![]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateVertex("a".into()));
    }

    #[test]
    fn zero_multiplicity_rejected() {
        let v0 = v(0, "v0");
        let err =
            make_graph(vec![v0.clone()], vec![EdgeRecord::new(v0.clone(), v0, 0)]).unwrap_err();
        assert!(matches!(err, GraphError::ZeroMultiplicity { .. }));
    }

    #[test]
    fn parallel_records_merge() {
        let (a, b) = (v(0, "a"), v(1, "b"));
        let g = make_graph(
            vec![a.clone(), b.clone()],
            vec![
                EdgeRecord::new(a.clone(), b.clone(), 2),
                EdgeRecord::new(a.clone(), a.clone(), 1),
                EdgeRecord::new(a.clone(), b.clone(), 3),
            ],
        )
        .unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.edges()[0].multiplicity, Multiplicity::from(5));
        assert_eq!(g.total_multiplicity(), Some(BigUint::from(6u32)));
    }

    #[test]
    fn classes_and_dot_labels() {
        let (w0, w1) = (v(0, "w0"), v(1, "w1"));
        let g = make_graph(
            vec![w0.clone(), w1.clone()],
            vec![EdgeRecord::new(
                w0.clone(),
                w1.clone(),
                Multiplicity::Infinite,
            )],
        )
        .unwrap();
        assert_eq!(g.vertex_class(&w0).unwrap(), VertexClass::InfiniteEmitter);
        assert_eq!(g.vertex_class(&w1).unwrap(), VertexClass::Sink);
        assert!(matches!(
            g.vertex_class(&v(7, "x")),
            Err(GraphError::UnknownVertex(_))
        ));
        assert!(g.to_dot().contains("\"w0\" -> \"w1\" [label=\"(inf)\"];"));
        assert!(g.is_acyclic());
        assert_eq!(g.total_multiplicity(), None);
    }

    #[test]
    fn json_big_and_infinite_multiplicities() {
        let text = r#"{"vertices":[{"level":0,"index":0,"tag":"a"},{"level":1,"index":0,"tag":"b"}],"edges":[{"source":"a","range":"b","multiplicity":"123456789012345678901234567890"},{"source":"b","range":"b","multiplicity":"inf"},{"source":"a","range":"a","multiplicity":7}]}"#;
        let g = DirectedMultigraph::from_json(text).unwrap();
        assert_eq!(g.to_json(), text);
    }

    #[test]
    fn json_errors_carry_location() {
        let err = DirectedMultigraph::from_json("{\"vertices\": [}").unwrap_err();
        assert!(
            matches!(err, GraphError::Parse { ref location, .. } if location.starts_with("line 1"))
        );

        let text = r#"{"vertices":[{"level":0,"index":0,"tag":"a"}],"edges":[{"source":"a","range":"zz","multiplicity":1}]}"#;
        match DirectedMultigraph::from_json(text).unwrap_err() {
            GraphError::Parse { location, .. } => assert_eq!(location, "edges[0].range"),
            e => panic!("unexpected {e:?}"),
        }

        let text = r#"{"vertices":[{"level":0,"index":0,"tag":"a"}],"edges":[{"source":"a","range":"a","multiplicity":-1}]}"#;
        assert!(DirectedMultigraph::from_json(text).is_err());
        let text = r#"{"vertices":[{"level":0,"index":0,"tag":"a"}],"edges":[{"source":"a","range":"a","multiplicity":0}]}"#;
        assert!(DirectedMultigraph::from_json(text).is_err());
    }
}
