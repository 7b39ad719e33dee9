//! Single-pass estimation of maximum matching size in bounded-arboricity
//! graph streams.
//!
//! The [`estimator`] module holds the streaming sampler. Everything else is
//! either the data model ([`graph`], [`edge_list`]), instance generation
//! ([`generate`]) or exact, whole-stream reference computations used to check
//! the sampler ([`oracles`], [`matching`], [`arboricity`]).

pub mod arboricity;
pub mod edge_list;
pub mod estimator;
pub mod generate;
pub mod graph;
pub mod matching;
pub mod oracles;

pub use arboricity::{exact_arboricity, ArboricityError};
pub use edge_list::{parse_edge_list, read_edge_list, write_edge_list, EdgeList, EdgeListError};
pub use estimator::{
    default_capacity, estimate_matching, run, run_summary, Estimate, EstimatorConfig,
    EstimatorError, MatchingEstimate, RunSummary, SamplerState, TrackedEdge,
};
pub use generate::{derive_seed, generate_forest_union, shuffle_stream, GenerateError};
pub use graph::{validate_stream, Edge, EdgeStream, Graph, StreamError, Vertex};
pub use matching::{blossom_matching_size, maximum_matching_size, MatchingError};
pub use oracles::{
    classify_edges, exact_e_alpha, exact_e_alpha_prefix, exact_e_star, tail_degrees,
    DiagnosticReport, OracleError, PrefixProfile,
};
