//! Graph models and exact K-theory for quantum lens spaces and quantum
//! weighted projective spaces.
//!
//! * [`graph`]: directed multigraphs with aggregated (possibly infinite)
//!   multiplicities, JSON and DOT serialization.
//! * [`lens`]: sphere graphs, cyclic skew products and lens graphs.
//! * [`intlinalg`]: integer matrices, Smith normal form, abelian groups.
//! * [`ktheory`]: K-groups of graph algebras, plus closed-form oracles.
//! * [`wproj`]: weighted projective lines and spaces.

pub mod graph;
pub mod intlinalg;
pub mod ktheory;
pub mod lens;
pub mod wproj;

pub use graph::{
    make_graph, DirectedMultigraph, Edge, EdgeRecord, GraphError, Multiplicity, MultiplicityMatrix,
    VertexClass, VertexId,
};
pub use intlinalg::{
    cokernel, kernel_rank, minor_gcds, smith_normal_form, AbelianGroup, IntegerMatrix, LinalgError,
    SmithForm,
};
pub use ktheory::oracle::{
    k7_case, oracle_lens_k, oracle_multiplicities, K7Case, K7Parameters, LensFamily, OracleError,
};
pub use ktheory::{graph_k_theory, k_matrix, lens_k_theory, KTheory};
pub use lens::{
    count_admissible, distinguished_set, enumerate_admissible, lens_construction, lens_graph,
    lens_parameters, skew_product, sphere_graph, weight_labelling, DistinguishedSet, EdgeLabelling,
    LensConstruction, LensError, LensParameters, PathStep, WeightVector,
};
pub use wproj::{
    wp1_canonical, wp1_graph, wp_hypothesis, wp_k_theory, ExtensionStep, HypothesisReport,
    WPCanonicalForm, Witness, WpKTheory, WprojError,
};

pub use num_bigint::{BigInt, BigUint};
