//! Vertex splitting and identification applied to spanning trees and traces.
//!
//! * [`transfer_tree_on_identification`] carries a spanning tree of a split
//!   graph back to the graph with the split vertices merged.
//! * [`split_reduce_deficiency`] and [`split_reduce_qualified`] split a
//!   vertex of an odd co-tree component into two halves of sizes
//!   `ceil(d/2)` and `floor(d/2)` and produce a spanning tree of the result
//!   with strictly fewer odd components.
//! * [`project_trace_through_split`] and [`lift_trace_through_identification`]
//!   move a double trace between a graph and a split of it.
//!
//! The split search tries, in order: the tree obtained by relabeling `T` and
//! adding one former co-tree edge at the split vertex, over every balanced
//! partition (route `Direct`); the same after switching to another spanning
//! tree of `G` that is no worse (route `Rewired`); and any spanning tree of
//! any balanced split (route `Exhaustive`). Every result is validated before
//! it is returned.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, SplitSpec, Vertex};
use crate::spanning::{
    cotree_decomposition, for_each_spanning_tree, CoTreeDecomposition, SpanningError, SpanningTree,
};
use crate::walks::{transition_graph_at, validate_double_trace, DoubleTrace, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spanning(#[from] SpanningError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("vertex {0} does not lie in an odd co-tree component")]
    NotInOddComponent(Vertex),
    #[error("vertex {vertex} has degree {degree}, below the bound {bound}")]
    DegreeBelowBound {
        vertex: Vertex,
        degree: usize,
        bound: usize,
    },
    #[error("visit of {vertex} from {pred} to {succ} crosses parts of the partition")]
    PartitionNotRepetitionClosed {
        vertex: Vertex,
        pred: Vertex,
        succ: Vertex,
    },
    #[error("no split of {0} reduces the deficiency")]
    NoReducingSplit(Vertex),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitRoute {
    Direct,
    Rewired,
    Exhaustive,
}

/// A split of `vertex` into two new vertices with a spanning tree of the
/// result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitOutcome {
    pub vertex: Vertex,
    /// Neighbors of `vertex` attached to `new_vertices[0]` and `[1]`.
    pub parts: [BTreeSet<Vertex>; 2],
    pub new_vertices: [Vertex; 2],
    #[serde(skip)]
    pub graph_after: Graph,
    pub tree_after: SpanningTree,
    pub deficiency_before: usize,
    pub deficiency_after: usize,
    pub route: SplitRoute,
}

impl SplitOutcome {
    /// The edge of the split graph corresponding to `e`.
    pub fn edge_image(&self, e: Edge) -> Edge {
        if !e.contains(self.vertex) {
            return e;
        }
        let x = e.other(self.vertex);
        let side = usize::from(!self.parts[0].contains(&x));
        Edge::new(self.new_vertices[side], x)
    }

    /// The edge of the original graph corresponding to `e`.
    pub fn edge_preimage(&self, e: Edge) -> Edge {
        let map = |x: Vertex| {
            if self.new_vertices.contains(&x) {
                self.vertex
            } else {
                x
            }
        };
        Edge::new(map(e.lo()), map(e.hi()))
    }
}

// ---------------------------------------------------------------------------
// identification

fn relabel_tree(t: &SpanningTree, map: impl Fn(Vertex) -> Vertex) -> BTreeSet<Edge> {
    t.edges()
        .iter()
        .map(|e| Edge::new(map(e.lo()), map(e.hi())))
        .collect()
}

fn odd_components_covered(dec: &CoTreeDecomposition, cover: &BTreeSet<Vertex>) -> bool {
    dec.odd_components()
        .all(|c| c.vertices.iter().any(|v| cover.contains(v)))
}

/// Merges `targets` of `g_split` into `new_id` and builds a spanning tree of
/// the merged graph from `t_split`.
///
/// Requires every odd co-tree component of `t_split` to contain a vertex of
/// `protected` or a target. Guarantees every odd co-tree component of the
/// result contains a vertex of `protected` or `new_id`.
///
/// Targets are merged pairwise into the first one. Each merge relabels the
/// tree, which closes exactly one cycle through the merged vertex, and drops
/// the tree edge leaving the first target on the tree path between the two.
pub fn transfer_tree_on_identification(
    g_split: &Graph,
    t_split: &SpanningTree,
    targets: &[Vertex],
    new_id: Vertex,
    protected: &BTreeSet<Vertex>,
) -> Result<SpanningTree, TransformError> {
    let dec = cotree_decomposition(g_split, t_split)?;
    // validates disjoint neighborhoods, non-adjacency and the id
    g_split.identify_vertices(targets, new_id)?;
    let mut cover: BTreeSet<Vertex> = protected.iter().chain(targets).copied().collect();
    if !odd_components_covered(&dec, &cover) {
        return Err(TransformError::PreconditionViolated(
            "an odd co-tree component contains neither a protected vertex nor a target".into(),
        ));
    }
    let mut graph = g_split.clone();
    let mut tree = t_split.clone();
    let mut acc = targets[0];
    let rest: Vec<Vertex> = targets[1..].iter().copied().filter(|&t| t != acc).collect();
    for (i, &b) in rest.iter().enumerate() {
        let merged_id = if i + 1 == rest.len() { new_id } else { acc };
        let path = tree
            .path(acc, b)
            .expect("a spanning tree connects any two vertices");
        let u = path[1];
        graph = graph.identify_vertices(&[acc, b], merged_id)?;
        let map = |x: Vertex| if x == acc || x == b { merged_id } else { x };
        let mut edges = relabel_tree(&tree, map);
        edges.remove(&Edge::new(merged_id, u));
        tree = SpanningTree::new(&graph, edges).map_err(|e| {
            TransformError::PreconditionViolated(format!(
                "merging {acc} and {b} broke the tree: {e}"
            ))
        })?;
        cover.remove(&acc);
        cover.remove(&b);
        cover.insert(merged_id);
        let dec = cotree_decomposition(&graph, &tree)?;
        if !odd_components_covered(&dec, &cover) {
            return Err(TransformError::PreconditionViolated(format!(
                "merging {acc} and {b} left an uncovered odd component"
            )));
        }
        acc = merged_id;
    }
    Ok(tree)
}

// ---------------------------------------------------------------------------
// splitting

/// How a candidate tree is scored: plain deficiency, or qualified
/// deficiency for a degree bound (`None` when the tree is not qualified).
#[derive(Clone, Copy)]
enum Measure {
    Plain,
    Qualified(usize),
}

impl Measure {
    fn score(self, g: &Graph, t: &SpanningTree) -> Option<usize> {
        let dec = cotree_decomposition(g, t).ok()?;
        match self {
            Measure::Plain => Some(dec.deficiency()),
            Measure::Qualified(bound) => dec.unqualified(bound).is_none().then(|| dec.deficiency()),
        }
    }
}

/// All ordered pairs `(P0, P1)` partitioning `nbrs` with sizes
/// `{ceil(d/2), floor(d/2)}` in either order.
fn balanced_partitions(nbrs: &[Vertex]) -> Vec<[BTreeSet<Vertex>; 2]> {
    let n = nbrs.len();
    let mut sizes = vec![n.div_ceil(2)];
    if n % 2 == 1 {
        sizes.push(n / 2);
    }
    let mut out = Vec::new();
    for size in sizes {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let first: BTreeSet<Vertex> = pick.iter().map(|&i| nbrs[i]).collect();
            let second = nbrs
                .iter()
                .copied()
                .filter(|x| !first.contains(x))
                .collect();
            out.push([first, second]);
            // next combination
            let Some(i) = (0..size).rev().find(|&i| pick[i] < n - size + i) else {
                break;
            };
            pick[i] += 1;
            for j in i + 1..size {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    out
}

struct Splitter<'a> {
    g: &'a Graph,
    v: Vertex,
    measure: Measure,
    before: usize,
}

impl Splitter<'_> {
    fn split(&self, parts: &[BTreeSet<Vertex>; 2]) -> (Graph, [Vertex; 2]) {
        let spec = SplitSpec::new(self.v, parts.to_vec());
        let (g2, fresh) = self
            .g
            .split_vertex(&spec)
            .expect("balanced partition of N(v)");
        (g2, [fresh[0], fresh[1]])
    }

    fn outcome(
        &self,
        parts: &[BTreeSet<Vertex>; 2],
        graph_after: Graph,
        new_vertices: [Vertex; 2],
        tree_after: SpanningTree,
        after: usize,
        route: SplitRoute,
    ) -> SplitOutcome {
        SplitOutcome {
            vertex: self.v,
            parts: parts.clone(),
            new_vertices,
            graph_after,
            tree_after,
            deficiency_before: self.before,
            deficiency_after: after,
            route,
        }
    }

    /// Relabel `t` onto each balanced split and add one former co-tree edge
    /// at `v`; first candidate that lowers the score wins.
    fn direct(&self, t: &SpanningTree, route: SplitRoute) -> Option<SplitOutcome> {
        let nbrs: Vec<Vertex> = self.g.neighbors(self.v).ok()?.iter().copied().collect();
        let tree_nbrs = t.neighbors(self.v);
        let cotree_nbrs: Vec<Vertex> = nbrs
            .iter()
            .copied()
            .filter(|x| !tree_nbrs.contains(x))
            .collect();
        for parts in balanced_partitions(&nbrs) {
            let (g2, fresh) = self.split(&parts);
            let side = |x: Vertex| fresh[usize::from(!parts[0].contains(&x))];
            let relabeled: BTreeSet<Edge> = t
                .edges()
                .iter()
                .map(|&e| {
                    if e.contains(self.v) {
                        let x = e.other(self.v);
                        Edge::new(side(x), x)
                    } else {
                        e
                    }
                })
                .collect();
            for &w in &cotree_nbrs {
                let mut edges = relabeled.clone();
                edges.insert(Edge::new(side(w), w));
                let Ok(t2) = SpanningTree::new(&g2, edges) else {
                    continue;
                };
                if let Some(after) = self.measure.score(&g2, &t2) {
                    if after < self.before {
                        return Some(self.outcome(&parts, g2, fresh, t2, after, route));
                    }
                }
            }
        }
        None
    }

    /// Other spanning trees of `G`, no worse than the original and with `v`
    /// still in an odd component, fed to [`Self::direct`].
    fn rewired(&self, original: &SpanningTree) -> Option<SplitOutcome> {
        let mut found = None;
        let _ = for_each_spanning_tree(self.g, |t2| {
            if &t2 == original {
                return std::ops::ControlFlow::Continue(());
            }
            let ok = self
                .measure
                .score(self.g, &t2)
                .is_some_and(|s| s <= self.before)
                && cotree_decomposition(self.g, &t2)
                    .ok()
                    .and_then(|d| d.component_of(self.v).map(|c| c.is_odd()))
                    .unwrap_or(false);
            if ok {
                if let Some(out) = self.direct(&t2, SplitRoute::Rewired) {
                    found = Some(out);
                    return std::ops::ControlFlow::Break(());
                }
            }
            std::ops::ControlFlow::Continue(())
        });
        found
    }

    /// Best spanning tree of every balanced split.
    fn exhaustive(&self) -> Option<SplitOutcome> {
        let nbrs: Vec<Vertex> = self.g.neighbors(self.v).ok()?.iter().copied().collect();
        for parts in balanced_partitions(&nbrs) {
            let (g2, fresh) = self.split(&parts);
            if !g2.is_connected().unwrap_or(false) {
                continue;
            }
            let mut found = None;
            let _ = for_each_spanning_tree(&g2, |t2| {
                if let Some(after) = self.measure.score(&g2, &t2) {
                    if after < self.before {
                        found = Some((t2, after));
                        return std::ops::ControlFlow::Break(());
                    }
                }
                std::ops::ControlFlow::Continue(())
            });
            if let Some((t2, after)) = found {
                return Some(self.outcome(&parts, g2, fresh, t2, after, SplitRoute::Exhaustive));
            }
        }
        None
    }

    fn run(&self, t: &SpanningTree) -> Result<SplitOutcome, TransformError> {
        let out = self
            .direct(t, SplitRoute::Direct)
            .or_else(|| self.rewired(t))
            .or_else(|| self.exhaustive())
            .ok_or(TransformError::NoReducingSplit(self.v))?;
        // never hand out an unchecked result
        let t2 = SpanningTree::new(&out.graph_after, out.tree_after.edges().iter().copied())?;
        assert!(out.graph_after.is_connected()?);
        assert_eq!(
            self.measure.score(&out.graph_after, &t2),
            Some(out.deficiency_after)
        );
        assert!(out.deficiency_after < out.deficiency_before);
        Ok(out)
    }
}

fn require_odd(dec: &CoTreeDecomposition, v: Vertex) -> Result<(), TransformError> {
    match dec.component_of(v) {
        Some(c) if c.is_odd() => Ok(()),
        _ => Err(TransformError::NotInOddComponent(v)),
    }
}

/// Splits `v` (in an odd co-tree component of `t`) so that the resulting
/// graph has a spanning tree with fewer odd co-tree components.
pub fn split_reduce_deficiency(
    g: &Graph,
    t: &SpanningTree,
    v: Vertex,
) -> Result<SplitOutcome, TransformError> {
    g.require_connected()?;
    let dec = cotree_decomposition(g, t)?;
    g.neighbors(v)?;
    require_odd(&dec, v)?;
    Splitter {
        g,
        v,
        measure: Measure::Plain,
        before: dec.deficiency(),
    }
    .run(t)
}

/// Like [`split_reduce_deficiency`] for qualified trees: `t` must be
/// qualified for `bound` and `d(v) >= bound`; the result is qualified for
/// `bound` in the split graph and has strictly smaller qualified deficiency.
pub fn split_reduce_qualified(
    g: &Graph,
    t: &SpanningTree,
    v: Vertex,
    bound: usize,
) -> Result<SplitOutcome, TransformError> {
    g.require_connected()?;
    let dec = cotree_decomposition(g, t)?;
    if let Some(c) = dec.unqualified(bound) {
        return Err(SpanningError::NotQualified {
            bound,
            edges: c.edges.iter().copied().collect(),
        }
        .into());
    }
    let degree = g.neighbors(v)?.len();
    require_odd(&dec, v)?;
    if degree < bound {
        return Err(TransformError::DegreeBelowBound {
            vertex: v,
            degree,
            bound,
        });
    }
    Splitter {
        g,
        v,
        measure: Measure::Qualified(bound),
        before: dec.deficiency(),
    }
    .run(t)
}

// ---------------------------------------------------------------------------
// traces

/// Rewrites `w` onto the graph obtained by splitting `v` along `parts`: each
/// visit of `v` goes to the new vertex of the part holding its neighbors.
///
/// Every part must be a union of repetition classes at `v`. Returns the new
/// trace and the new vertex ids, one per part.
pub fn project_trace_through_split(
    w: &DoubleTrace,
    v: Vertex,
    parts: &[BTreeSet<Vertex>],
) -> Result<(DoubleTrace, Vec<Vertex>), TransformError> {
    let g = w.host();
    let spec = SplitSpec::new(v, parts.to_vec());
    spec.validate(g)?;
    let part_of: BTreeMap<Vertex, usize> = parts
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().map(move |&x| (x, i)))
        .collect();
    for (pred, succ) in transition_graph_at(w, v)?.links {
        if part_of[&pred] != part_of[&succ] {
            return Err(TransformError::PartitionNotRepetitionClosed {
                vertex: v,
                pred,
                succ,
            });
        }
    }
    let (g2, fresh) = g.split_vertex(&spec)?;
    let seq = w.sequence();
    let n = seq.len();
    let projected: Vec<Vertex> = (0..n)
        .map(|i| {
            if seq[i] == v {
                fresh[part_of[&seq[(i + n - 1) % n]]]
            } else {
                seq[i]
            }
        })
        .collect();
    let w2 = validate_double_trace(&g2, &projected)?;
    Ok((w2, fresh))
}

/// Rewrites `w` onto the graph with `targets` merged into `new_id`.
pub fn lift_trace_through_identification(
    w: &DoubleTrace,
    targets: &[Vertex],
    new_id: Vertex,
) -> Result<DoubleTrace, TransformError> {
    let g = w
        .host()
        .identify_vertices(targets, new_id)
        .map_err(|e| TransformError::PreconditionViolated(e.to_string()))?;
    let lifted: Vec<Vertex> = w
        .sequence()
        .iter()
        .map(|x| if targets.contains(x) { new_id } else { *x })
        .collect();
    Ok(validate_double_trace(&g, &lifted)?)
}
