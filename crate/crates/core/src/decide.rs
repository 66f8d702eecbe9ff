//! Existence decisions for every trace kind and direction, with certificates.
//!
//! | kind      | any          | parallel              | antiparallel                |
//! |-----------|--------------|-----------------------|-----------------------------|
//! | double    | always       | Eulerian              | always                      |
//! | d-stable  | `delta > d`  | `delta > d`, Eulerian | `delta > d`, tree qualified for `2d + 2` |
//! | strong    | always       | Eulerian              | tree with even co-tree      |
//!
//! Yes answers carry a trace or a spanning tree; no answers name the failing
//! condition. [`decide_by_search`] answers the same questions by exhaustive
//! search instead, for cross-checking.
//!
//! The antiparallel d-stable cell is constructive in both directions:
//! [`build_antiparallel_d_stable`] turns a qualified tree into a trace by
//! repeated deficiency-reducing splits, and
//! [`extract_qualified_tree_from_trace`] turns a trace back into a
//! qualified tree by splitting along repetitions.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::embedding::{antiparallel_strong_trace, EmbeddingError};
use crate::graph::{Graph, GraphError, Vertex};
use crate::par::Execution;
use crate::search::{
    dfs_double_trace, find_parallel_trace, find_trace, DirectionReq, SearchError, SearchOutcome,
    TraceKind, TraceSpec,
};
use crate::spanning::{
    cotree_decomposition, find_even_cotree_tree, find_qualified_tree, qualified_deficiency,
    SpanningError, SpanningTree,
};
use crate::transform::{
    lift_trace_through_identification, project_trace_through_split, split_reduce_qualified,
    transfer_tree_on_identification, TransformError,
};
use crate::walks::{
    classify_trace, repetition_analysis, transition_graph_at, Direction, DoubleTrace,
    RepetitionMode, TraceError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Spanning(#[from] SpanningError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("trace is not antiparallel")]
    NotAntiparallel,
    #[error("trace has stability order {found}, {required} required")]
    NotStable { required: usize, found: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A necessary condition that fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum Condition {
    MinDegree { d: usize, min_degree: usize },
    NotEulerian { vertex: Vertex, degree: usize },
    NoQualifiedTree { bound: usize },
    NoEvenCoTree,
    ParityObstruction { betti: usize },
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::MinDegree { d, min_degree } => {
                write!(f, "MinDegree(min_degree={min_degree}, d={d})")
            }
            Condition::NotEulerian { vertex, degree } => {
                write!(f, "NotEulerian(vertex={vertex}, degree={degree})")
            }
            Condition::NoQualifiedTree { bound } => write!(f, "NoQualifiedTree(D={bound})"),
            Condition::NoEvenCoTree => f.write_str("NoEvenCoTree"),
            Condition::ParityObstruction { betti } => write!(f, "ParityObstruction(betti={betti})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Trace(DoubleTrace),
    /// A spanning tree qualified for `bound`, or with only even co-tree
    /// components when `bound` is `None`.
    Tree {
        tree: SpanningTree,
        bound: Option<usize>,
    },
    /// The condition holds but the witness search ran out of budget.
    Unwitnessed,
    Violated(Condition),
    /// Exhaustive search found nothing.
    ExhaustedSearch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionCertificate {
    pub spec: TraceSpec,
    pub exists: bool,
    pub evidence: Evidence,
}

impl DecisionCertificate {
    fn yes(spec: TraceSpec, evidence: Evidence) -> Self {
        DecisionCertificate {
            spec,
            exists: true,
            evidence,
        }
    }

    fn no(spec: TraceSpec, condition: Condition) -> Self {
        DecisionCertificate {
            spec,
            exists: false,
            evidence: Evidence::Violated(condition),
        }
    }

    pub fn condition(&self) -> Option<&Condition> {
        match &self.evidence {
            Evidence::Violated(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecideOptions {
    /// Node budget for witness searches; `None` uses the search default.
    pub budget: Option<u64>,
}

/// `2d + 2`, the degree bound of the antiparallel d-stable condition.
pub fn stable_bound(d: usize) -> usize {
    2 * d + 2
}

fn require_traceable(g: &Graph) -> Result<(), DecideError> {
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(SearchError::NoEdges.into());
    }
    Ok(())
}

fn min_degree_violation(g: &Graph, d: usize) -> Option<Condition> {
    (g.min_degree() <= d).then(|| Condition::MinDegree {
        d,
        min_degree: g.min_degree(),
    })
}

fn eulerian_violation(g: &Graph) -> Option<Condition> {
    g.odd_degree_vertex().map(|vertex| Condition::NotEulerian {
        vertex,
        degree: g.degree(vertex),
    })
}

fn searched(g: &Graph, spec: TraceSpec, budget: Option<u64>) -> Result<Evidence, DecideError> {
    match find_trace(g, &spec, budget)? {
        SearchOutcome::Found(w) => Ok(Evidence::Trace(w)),
        SearchOutcome::BudgetExhausted => Ok(Evidence::Unwitnessed),
        SearchOutcome::NotFound => Err(DecideError::Internal(format!(
            "exhaustive search found no {spec} trace although the condition holds"
        ))),
    }
}

/// Decides whether `g` has a trace of the given kind and direction.
pub fn decide_existence(g: &Graph, spec: &TraceSpec) -> Result<DecisionCertificate, DecideError> {
    decide_existence_with(g, spec, DecideOptions::default())
}

pub fn decide_existence_with(
    g: &Graph,
    spec: &TraceSpec,
    opts: DecideOptions,
) -> Result<DecisionCertificate, DecideError> {
    let spec = TraceSpec::new(spec.kind, spec.direction)?;
    require_traceable(g)?;
    let yes = |evidence| Ok(DecisionCertificate::yes(spec, evidence));
    let no = |condition| Ok(DecisionCertificate::no(spec, condition));
    match (spec.kind, spec.direction) {
        (TraceKind::Double, DirectionReq::Any | DirectionReq::Antiparallel) => {
            yes(Evidence::Trace(dfs_double_trace(g)?))
        }
        (TraceKind::Double, DirectionReq::Parallel) => match eulerian_violation(g) {
            Some(c) => no(c),
            None => {
                let w = find_parallel_trace(g, None)?.expect("Eulerian graphs have a doubled tour");
                yes(Evidence::Trace(w))
            }
        },
        (TraceKind::Stable(d), DirectionReq::Any) => match min_degree_violation(g, d) {
            Some(c) => no(c),
            None => yes(searched(g, spec, opts.budget)?),
        },
        (TraceKind::Stable(d), DirectionReq::Parallel) => {
            match min_degree_violation(g, d).or_else(|| eulerian_violation(g)) {
                Some(c) => no(c),
                None => match find_parallel_trace(g, Some(d)) {
                    Ok(Some(w)) => yes(Evidence::Trace(w)),
                    Ok(None) => Err(DecideError::Internal(format!(
                        "no parallel {d}-stable trace although the condition holds"
                    ))),
                    Err(SearchError::BudgetExhausted(_)) => yes(Evidence::Unwitnessed),
                    Err(e) => Err(e.into()),
                },
            }
        }
        (TraceKind::Stable(d), DirectionReq::Antiparallel) => {
            if let Some(c) = min_degree_violation(g, d) {
                return no(c);
            }
            let bound = stable_bound(d);
            match find_qualified_tree(g, bound)? {
                Some(tree) => yes(Evidence::Tree {
                    tree,
                    bound: Some(bound),
                }),
                None => no(Condition::NoQualifiedTree { bound }),
            }
        }
        (TraceKind::Strong, DirectionReq::Any) => yes(searched(g, spec, opts.budget)?),
        (TraceKind::Strong, DirectionReq::Parallel) => match eulerian_violation(g) {
            Some(c) => no(c),
            None => yes(searched(g, spec, opts.budget)?),
        },
        (TraceKind::Strong, DirectionReq::Antiparallel) => {
            let betti = g.betti_number()?;
            if betti % 2 == 1 {
                return no(Condition::ParityObstruction { betti });
            }
            match find_even_cotree_tree(g)? {
                Some(tree) => yes(Evidence::Tree { tree, bound: None }),
                None => no(Condition::NoEvenCoTree),
            }
        }
    }
}

/// Decides by exhaustive search alone. `None` when the budget runs out.
pub fn decide_by_search(
    g: &Graph,
    spec: &TraceSpec,
    budget: Option<u64>,
) -> Result<Option<DecisionCertificate>, DecideError> {
    require_traceable(g)?;
    Ok(match find_trace(g, spec, budget)? {
        SearchOutcome::Found(w) => Some(DecisionCertificate::yes(*spec, Evidence::Trace(w))),
        SearchOutcome::NotFound => Some(DecisionCertificate {
            spec: *spec,
            exists: false,
            evidence: Evidence::ExhaustedSearch,
        }),
        SearchOutcome::BudgetExhausted => None,
    })
}

/// A trace for a yes cell: constructive for the antiparallel stable and
/// strong cells, otherwise the certificate's trace or a search.
pub fn witness_trace(
    g: &Graph,
    spec: &TraceSpec,
    opts: DecideOptions,
) -> Result<Option<DoubleTrace>, DecideError> {
    witness_from_certificate(g, &decide_existence_with(g, spec, opts)?)
}

/// The trace behind a certificate: its own trace, or one built from its
/// tree. `None` for no answers and unwitnessed yes answers.
pub fn witness_from_certificate(
    g: &Graph,
    cert: &DecisionCertificate,
) -> Result<Option<DoubleTrace>, DecideError> {
    if !cert.exists {
        return Ok(None);
    }
    match (cert.spec.kind, &cert.evidence) {
        (_, Evidence::Trace(w)) => Ok(Some(w.clone())),
        (TraceKind::Stable(d), Evidence::Tree { .. }) => match build_antiparallel_d_stable(g, d)? {
            Construction::Built(w) => Ok(Some(w)),
            Construction::NoSuchTrace(_) => Err(DecideError::Internal(
                "construction disagrees with the decision".into(),
            )),
        },
        (_, Evidence::Tree { tree, .. }) => Ok(Some(antiparallel_strong_trace(g, tree)?)),
        (_, Evidence::Unwitnessed) => Ok(None),
        _ => Err(DecideError::Internal(
            "yes certificate without witness".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Built(DoubleTrace),
    NoSuchTrace(DecisionCertificate),
}

/// One split of the reduction, recorded so the trace can be lifted back.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Step {
    vertex: Vertex,
    new_vertices: [Vertex; 2],
}

/// Builds an antiparallel d-stable trace, or explains why none exists.
///
/// Starting from a qualified tree of minimum qualified deficiency, splits a
/// high-degree vertex of an odd co-tree component until no odd component
/// is left, builds an antiparallel strong trace of the final graph, and
/// merges the split vertices back one by one. Each half of a split vertex
/// has more than `d` neighbors, so the merged vertex only gains repetitions
/// of size above `d`.
pub fn build_antiparallel_d_stable(g: &Graph, d: usize) -> Result<Construction, DecideError> {
    let spec = TraceSpec::new(TraceKind::Stable(d), DirectionReq::Antiparallel)?;
    require_traceable(g)?;
    if let Some(c) = min_degree_violation(g, d) {
        return Ok(Construction::NoSuchTrace(DecisionCertificate::no(spec, c)));
    }
    let bound = stable_bound(d);
    let cert = match qualified_deficiency(g, bound, None) {
        Ok(cert) => cert,
        Err(SpanningError::NoQualifiedTree { bound }) => {
            return Ok(Construction::NoSuchTrace(DecisionCertificate::no(
                spec,
                Condition::NoQualifiedTree { bound },
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let mut graph = g.clone();
    let mut tree = cert.witness_tree;
    let mut value = cert.value;
    let mut steps = Vec::new();
    while value > 0 {
        let dec = cotree_decomposition(&graph, &tree)?;
        let v = dec
            .odd_components()
            .next()
            .map(|c| c.witness)
            .ok_or_else(|| {
                DecideError::Internal("positive deficiency without odd component".into())
            })?;
        let out = split_reduce_qualified(&graph, &tree, v, bound)?;
        if out.deficiency_after >= value {
            return Err(DecideError::Internal(format!(
                "split at {v} did not reduce the qualified deficiency {value}"
            )));
        }
        steps.push(Step {
            vertex: v,
            new_vertices: out.new_vertices,
        });
        value = out.deficiency_after;
        graph = out.graph_after;
        tree = out.tree_after;
    }
    let mut w = antiparallel_strong_trace(&graph, &tree)?;
    for step in steps.iter().rev() {
        w = lift_trace_through_identification(&w, &step.new_vertices, step.vertex)?;
    }
    let class = classify_trace(&w);
    if w.host() != g || class.direction != Direction::Antiparallel || class.stability_order < d {
        return Err(DecideError::Internal(format!(
            "constructed trace is {} with stability order {}",
            class.direction, class.stability_order
        )));
    }
    Ok(Construction::Built(w))
}

/// Recovers a spanning tree qualified for `2d + 2` from an antiparallel
/// d-stable trace.
///
/// Every vertex with a nontrivial repetition is split along its repetition
/// classes, which leaves an antiparallel strong trace of the split graph.
/// That graph has a tree with only even co-tree components, and merging the
/// split vertices back keeps each odd component touching a merged vertex or
/// another vertex of degree at least `2d + 2`.
pub fn extract_qualified_tree_from_trace(
    w: &DoubleTrace,
    d: usize,
) -> Result<SpanningTree, DecideError> {
    let class = classify_trace(w);
    if class.direction != Direction::Antiparallel {
        return Err(DecideError::NotAntiparallel);
    }
    if class.stability_order < d {
        return Err(DecideError::NotStable {
            required: d,
            found: class.stability_order,
        });
    }
    let g = w.host();
    let bound = stable_bound(d);
    let protected: BTreeSet<Vertex> = g.vertices().filter(|&v| g.degree(v) >= bound).collect();
    let report = repetition_analysis(w, RepetitionMode::Components);
    let mut current = w.clone();
    let mut steps: Vec<(Vertex, Vec<Vertex>)> = Vec::new();
    for v in report.repetition_vertices() {
        let parts = transition_graph_at(&current, v)?.components();
        let (next, fresh) = project_trace_through_split(&current, v, &parts)?;
        steps.push((v, fresh));
        current = next;
    }
    debug_assert!(classify_trace(&current).strong);
    let mut graph = current.host().clone();
    let mut tree = find_even_cotree_tree(&graph)?.ok_or_else(|| {
        DecideError::Internal(
            "graph with an antiparallel strong trace has no even co-tree tree".into(),
        )
    })?;
    for (v, fresh) in steps.iter().rev() {
        tree = transfer_tree_on_identification(&graph, &tree, fresh, *v, &protected)?;
        graph = graph.identify_vertices(fresh, *v)?;
    }
    debug_assert_eq!(&graph, g);
    qualified_deficiency(g, bound, Some(&tree))?;
    Ok(tree)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sufficiency {
    Sufficient,
    Inconclusive,
}

/// A quick sufficient test for an antiparallel d-stable trace: 4-edge-
/// connected, `delta > d`, and either a vertex of degree `>= 2d + 2` or an
/// even Betti number.
pub fn sufficient_four_edge_connected(g: &Graph, d: usize) -> Result<Sufficiency, DecideError> {
    g.require_connected()?;
    if g.vertex_count() < 2 {
        return Ok(Sufficiency::Inconclusive);
    }
    let ok = g.edge_connectivity()? >= 4
        && g.min_degree() > d
        && (g.max_degree() >= stable_bound(d) || g.betti_number()? % 2 == 0);
    Ok(if ok {
        Sufficiency::Sufficient
    } else {
        Sufficiency::Inconclusive
    })
}

/// The cells of the decision table, row by row: double, d-stable for each
/// requested `d`, strong; within a row any, parallel, antiparallel.
pub fn table_specs(ds: &[usize]) -> Result<Vec<TraceSpec>, DecideError> {
    let kinds = std::iter::once(TraceKind::Double)
        .chain(ds.iter().map(|&d| TraceKind::Stable(d)))
        .chain(std::iter::once(TraceKind::Strong));
    let mut out = Vec::new();
    for kind in kinds {
        for direction in [
            DirectionReq::Any,
            DirectionReq::Parallel,
            DirectionReq::Antiparallel,
        ] {
            out.push(TraceSpec::new(kind, direction)?);
        }
    }
    Ok(out)
}

pub fn condition_table(g: &Graph, ds: &[usize]) -> Result<Vec<DecisionCertificate>, DecideError> {
    condition_table_with(g, ds, DecideOptions::default(), Execution::default())
}

pub fn condition_table_with(
    g: &Graph,
    ds: &[usize],
    opts: DecideOptions,
    exec: Execution,
) -> Result<Vec<DecisionCertificate>, DecideError> {
    require_traceable(g)?;
    let specs = table_specs(ds)?;
    exec.map(specs, |spec| decide_existence_with(g, &spec, opts))
        .into_iter()
        .collect()
}

/// Re-checks a certificate against `g` from scratch.
pub fn revalidate(g: &Graph, cert: &DecisionCertificate) -> Result<bool, DecideError> {
    let spec = cert.spec;
    Ok(match &cert.evidence {
        Evidence::Trace(w) => cert.exists && w.host() == g && classify_trace(w).satisfies(&spec),
        Evidence::Tree { tree, bound } => {
            let dec = cotree_decomposition(g, tree)?;
            let tree_ok = match bound {
                Some(b) => dec.unqualified(*b).is_none(),
                None => dec.deficiency() == 0,
            };
            let degree_ok = match spec.kind {
                TraceKind::Stable(d) => g.min_degree() > d && *bound == Some(stable_bound(d)),
                _ => bound.is_none(),
            };
            cert.exists && spec.direction == DirectionReq::Antiparallel && tree_ok && degree_ok
        }
        Evidence::Unwitnessed => cert.exists && decide_existence(g, &spec)?.exists,
        Evidence::Violated(c) => {
            !cert.exists
                && match c {
                    Condition::MinDegree { d, .. } => g.min_degree() <= *d,
                    Condition::NotEulerian { vertex, .. } => g.degree(*vertex) % 2 == 1,
                    Condition::NoQualifiedTree { bound } => {
                        find_qualified_tree(g, *bound)?.is_none()
                    }
                    Condition::NoEvenCoTree => find_even_cotree_tree(g)?.is_none(),
                    Condition::ParityObstruction { betti } => {
                        g.betti_number()? == *betti && betti % 2 == 1
                    }
                }
        }
        Evidence::ExhaustedSearch => {
            !cert.exists && find_trace(g, &spec, None)? == SearchOutcome::NotFound
        }
    })
}
