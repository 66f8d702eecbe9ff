//! Double traces of graphs.
//!
//! A double trace is a closed walk that traverses every edge exactly twice.
//! This crate validates and classifies them (direction, stability order,
//! strongness), searches for them exhaustively, computes spanning-tree
//! co-tree deficiencies, and implements the vertex-splitting reductions that
//! turn a degree-qualified spanning tree into an antiparallel d-stable trace
//! and back.

pub mod decide;
pub mod embedding;
pub mod families;
pub mod formats;
pub mod graph;
pub mod par;
pub mod search;
pub mod spanning;
pub mod transform;
pub mod walks;

pub use decide::{
    build_antiparallel_d_stable, condition_table, decide_by_search, decide_existence,
    extract_qualified_tree_from_trace, revalidate, Condition, Construction, DecideError,
    DecisionCertificate, Evidence,
};
pub use formats::ParseError;
pub use graph::{Edge, Graph, GraphError, SplitSpec, Vertex};
pub use par::Execution;
pub use search::{
    enumerate_traces, find_parallel_trace, find_trace, DirectionReq, SearchError, SearchOptions,
    SearchOutcome, TraceKind, TraceSpec,
};
pub use walks::{classify_trace, validate_double_trace, Direction, DoubleTrace, TraceClass};
