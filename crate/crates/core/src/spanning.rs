//! Spanning trees, co-tree components and deficiency.
//!
//! The co-tree of a spanning tree `T` is the edge set `E(G) - E(T)`; its
//! components are the connected components of the subgraph induced by those
//! edges, so co-tree components may share vertices with tree edges but never
//! with each other. A component is odd or even by its edge count. The
//! deficiency of `T` is its number of odd components.
//!
//! A tree is *qualified* for a degree bound `D` when each odd component
//! contains a vertex of host degree at least `D`.
//!
//! Minimization is exact: every spanning tree is enumerated (include/exclude
//! branching with cycle and connectivity pruning). That is exponential, but
//! fine for the graph sizes this crate targets.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, Vertex};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanningError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("not a spanning tree: {0}")]
    NotSpanningTree(String),
    #[error(
        "no spanning tree has every odd co-tree component touching a vertex of degree >= {bound}"
    )]
    NoQualifiedTree { bound: usize },
    #[error("odd co-tree component {edges:?} has no vertex of degree >= {bound}")]
    NotQualified { bound: usize, edges: Vec<Edge> },
    #[error("vertex {0} has no co-tree edge")]
    VertexNotInCoTree(Vertex),
}

/// A validated spanning tree, stored as its edge set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SpanningTree {
    edges: BTreeSet<Edge>,
}

impl SpanningTree {
    pub fn new<I>(g: &Graph, edges: I) -> Result<Self, SpanningError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        if g.is_empty() {
            return Err(GraphError::EmptyGraph.into());
        }
        if let Some(e) = edges.iter().find(|e| !g.has_edge(e.lo(), e.hi())) {
            return Err(SpanningError::NotSpanningTree(format!(
                "{e} is not an edge of the graph"
            )));
        }
        if edges.len() + 1 != g.vertex_count() {
            return Err(SpanningError::NotSpanningTree(format!(
                "{} edges for {} vertices",
                edges.len(),
                g.vertex_count()
            )));
        }
        let mut dsu = Dsu::new(g.vertices());
        for e in &edges {
            if !dsu.union(e.lo(), e.hi()) {
                return Err(SpanningError::NotSpanningTree(format!(
                    "{e} closes a cycle"
                )));
            }
        }
        Ok(SpanningTree { edges })
    }

    pub(crate) fn from_trusted(edges: BTreeSet<Edge>) -> Self {
        SpanningTree { edges }
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    /// Tree edges at `v`, by neighbor.
    pub fn neighbors(&self, v: Vertex) -> BTreeSet<Vertex> {
        self.edges
            .iter()
            .filter(|e| e.contains(v))
            .map(|e| e.other(v))
            .collect()
    }

    /// The unique tree path from `a` to `b`, as a vertex list.
    pub fn path(&self, a: Vertex, b: Vertex) -> Option<Vec<Vertex>> {
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for e in &self.edges {
            adj.entry(e.lo()).or_default().push(e.hi());
            adj.entry(e.hi()).or_default().push(e.lo());
        }
        let mut parent = BTreeMap::from([(a, a)]);
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            if x == b {
                break;
            }
            for &y in adj.get(&x).into_iter().flatten() {
                if let std::collections::btree_map::Entry::Vacant(slot) = parent.entry(y) {
                    slot.insert(x);
                    stack.push(y);
                }
            }
        }
        parent.get(&b)?;
        let mut path = vec![b];
        while *path.last().expect("non-empty") != a {
            path.push(parent[path.last().expect("non-empty")]);
        }
        path.reverse();
        Some(path)
    }

    pub fn edge_list(&self) -> Vec<(Vertex, Vertex)> {
        self.edges.iter().map(|e| e.endpoints()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoTreeComponent {
    pub edges: BTreeSet<Edge>,
    pub vertices: BTreeSet<Vertex>,
    pub parity: Parity,
    /// A vertex of maximum host degree, smallest id on ties.
    pub witness: Vertex,
    pub witness_degree: usize,
}

impl CoTreeComponent {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_odd(&self) -> bool {
        self.parity == Parity::Odd
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoTreeDecomposition {
    pub tree: SpanningTree,
    /// Ordered by smallest edge.
    pub components: Vec<CoTreeComponent>,
}

impl CoTreeDecomposition {
    pub fn odd_components(&self) -> impl Iterator<Item = &CoTreeComponent> {
        self.components.iter().filter(|c| c.is_odd())
    }

    pub fn deficiency(&self) -> usize {
        self.odd_components().count()
    }

    /// The component containing `v`, if `v` has a co-tree edge.
    pub fn component_of(&self, v: Vertex) -> Option<&CoTreeComponent> {
        self.components.iter().find(|c| c.vertices.contains(&v))
    }

    /// First odd component with no vertex of degree `>= bound`.
    pub fn unqualified(&self, bound: usize) -> Option<&CoTreeComponent> {
        self.odd_components().find(|c| c.witness_degree < bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeficiencyCertificate {
    pub value: usize,
    pub witness_tree: SpanningTree,
    pub qualified_bound: Option<usize>,
}

/// One part of a co-tree component after splitting a vertex into one copy
/// per co-tree edge at it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitPart {
    /// Original edges of the part, including those at the split vertex.
    pub edges: BTreeSet<Edge>,
    /// Neighbors of the split vertex whose edge lies in this part.
    pub attachments: BTreeSet<Vertex>,
}

impl SplitPart {
    pub fn is_odd(&self) -> bool {
        self.edges.len() % 2 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalSplit {
    pub vertex: Vertex,
    pub odd_parts: Vec<SplitPart>,
    pub even_parts: Vec<SplitPart>,
}

// ---------------------------------------------------------------------------

struct Dsu {
    parent: BTreeMap<Vertex, Vertex>,
}

impl Dsu {
    fn new(vertices: impl Iterator<Item = Vertex>) -> Self {
        Dsu {
            parent: vertices.map(|v| (v, v)).collect(),
        }
    }

    fn find(&mut self, mut v: Vertex) -> Vertex {
        while self.parent[&v] != v {
            let up = self.parent[&self.parent[&v]];
            self.parent.insert(v, up);
            v = up;
        }
        v
    }

    fn union(&mut self, a: Vertex, b: Vertex) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent.insert(ra.max(rb), ra.min(rb));
        true
    }
}

fn check_tree(g: &Graph, t: &SpanningTree) -> Result<(), SpanningError> {
    SpanningTree::new(g, t.edges.iter().copied()).map(|_| ())
}

/// Components of an edge set, ordered by smallest edge.
fn edge_components(edges: &BTreeSet<Edge>) -> Vec<BTreeSet<Edge>> {
    let mut dsu = Dsu::new(edges.iter().flat_map(|e| [e.lo(), e.hi()]));
    for e in edges {
        dsu.union(e.lo(), e.hi());
    }
    let mut groups: BTreeMap<Vertex, BTreeSet<Edge>> = BTreeMap::new();
    for &e in edges {
        let r = dsu.find(e.lo());
        groups.entry(r).or_default().insert(e);
    }
    let mut comps: Vec<_> = groups.into_values().collect();
    comps.sort_by_key(|c| *c.iter().next().expect("non-empty"));
    comps
}

fn decompose(g: &Graph, t: &SpanningTree) -> CoTreeDecomposition {
    let cotree: BTreeSet<Edge> = g.edges().filter(|e| !t.contains(*e)).collect();
    let components = edge_components(&cotree)
        .into_iter()
        .map(|edges| {
            let vertices: BTreeSet<Vertex> = edges.iter().flat_map(|e| [e.lo(), e.hi()]).collect();
            let witness = *vertices
                .iter()
                .max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))
                .expect("non-empty");
            CoTreeComponent {
                parity: if edges.len() % 2 == 1 {
                    Parity::Odd
                } else {
                    Parity::Even
                },
                witness_degree: g.degree(witness),
                witness,
                vertices,
                edges,
            }
        })
        .collect();
    CoTreeDecomposition {
        tree: t.clone(),
        components,
    }
}

pub fn cotree_decomposition(
    g: &Graph,
    t: &SpanningTree,
) -> Result<CoTreeDecomposition, SpanningError> {
    check_tree(g, t)?;
    Ok(decompose(g, t))
}

pub fn deficiency_of_tree(g: &Graph, t: &SpanningTree) -> Result<usize, SpanningError> {
    Ok(cotree_decomposition(g, t)?.deficiency())
}

/// Deficiency of `t` counted only if `t` is qualified for `bound`.
fn qualified_value(g: &Graph, t: &SpanningTree, bound: usize) -> Option<usize> {
    let dec = decompose(g, t);
    dec.unqualified(bound).is_none().then(|| dec.deficiency())
}

// ---------------------------------------------------------------------------
// enumeration

/// Calls `f` on every spanning tree of `g`, in a fixed order, until it breaks.
pub fn for_each_spanning_tree<F>(g: &Graph, mut f: F) -> Result<(), SpanningError>
where
    F: FnMut(SpanningTree) -> ControlFlow<()>,
{
    g.require_connected()?;
    let en = Enumerator::new(g);
    let _ = en.run(&mut en.root(), &mut f);
    Ok(())
}

/// Every spanning tree of `g`.
pub fn spanning_trees(g: &Graph) -> Result<Vec<SpanningTree>, SpanningError> {
    let mut out = Vec::new();
    for_each_spanning_tree(g, |t| {
        out.push(t);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Evaluates `score` on every spanning tree and returns the first tree (in
/// enumeration order) with the smallest score. Trees scoring `None` are
/// skipped; a score equal to `floor` stops the scan early.
fn best_tree<S>(
    g: &Graph,
    exec: Execution,
    floor: usize,
    score: S,
) -> Result<Option<(usize, SpanningTree)>, SpanningError>
where
    S: Fn(&SpanningTree) -> Option<usize> + Sync,
{
    g.require_connected()?;
    let en = Enumerator::new(g);
    let branches = en.branches(if exec.is_parallel() { 6 } else { 0 });
    // Lowest branch index that reached `floor`; later branches cannot win.
    let cutoff = AtomicUsize::new(usize::MAX);
    let indexed: Vec<(usize, EnumState)> = branches.into_iter().enumerate().collect();
    let results = exec.map(indexed, |(i, mut st)| {
        let mut best: Option<(usize, SpanningTree)> = None;
        if i > cutoff.load(Ordering::Relaxed) {
            return None;
        }
        let _ = en.run(&mut st, &mut |t| {
            if i > cutoff.load(Ordering::Relaxed) {
                best = None;
                return ControlFlow::Break(());
            }
            if let Some(s) = score(&t) {
                if best.as_ref().is_none_or(|(b, _)| s < *b) {
                    best = Some((s, t));
                    if s <= floor {
                        cutoff.fetch_min(i, Ordering::Relaxed);
                        return ControlFlow::Break(());
                    }
                }
            }
            ControlFlow::Continue(())
        });
        best
    });
    let mut best: Option<(usize, SpanningTree)> = None;
    for (s, t) in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, t));
        }
    }
    Ok(best)
}

#[derive(Clone)]
struct EnumState {
    next: usize,
    chosen: Vec<usize>,
    excluded: Vec<bool>,
    comp: Vec<usize>,
}

struct Enumerator {
    n: usize,
    ids: Vec<Vertex>,
    ends: Vec<(usize, usize)>,
}

impl Enumerator {
    fn new(g: &Graph) -> Self {
        let ids: Vec<Vertex> = g.vertices().collect();
        let index = |v: Vertex| ids.binary_search(&v).expect("vertex");
        let ends = g.edges().map(|e| (index(e.lo()), index(e.hi()))).collect();
        Enumerator {
            n: ids.len(),
            ids,
            ends,
        }
    }

    fn root(&self) -> EnumState {
        EnumState {
            next: 0,
            chosen: Vec::new(),
            excluded: vec![false; self.ends.len()],
            comp: (0..self.n).collect(),
        }
    }

    /// Independent sub-searches covering the whole space, in enumeration
    /// order, obtained by fixing the first `depth` include/exclude choices.
    fn branches(&self, depth: usize) -> Vec<EnumState> {
        let mut level = vec![self.root()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for st in level {
                if st.chosen.len() + 1 == self.n || st.next == self.ends.len() {
                    next.push(st);
                    continue;
                }
                next.extend(self.children(&st));
            }
            level = next;
        }
        level
    }

    fn children(&self, st: &EnumState) -> Vec<EnumState> {
        let k = st.next;
        let (a, b) = self.ends[k];
        let mut out = Vec::new();
        if st.comp[a] != st.comp[b] {
            let mut inc = st.clone();
            let (from, to) = (inc.comp[a].max(inc.comp[b]), inc.comp[a].min(inc.comp[b]));
            for c in &mut inc.comp {
                if *c == from {
                    *c = to;
                }
            }
            inc.chosen.push(k);
            inc.next += 1;
            out.push(inc);
        }
        let mut exc = st.clone();
        exc.excluded[k] = true;
        exc.next += 1;
        if self.connected_without_excluded(&exc) {
            out.push(exc);
        }
        out
    }

    fn connected_without_excluded(&self, st: &EnumState) -> bool {
        let mut comp: Vec<usize> = (0..self.n).collect();
        fn find(c: &mut [usize], mut x: usize) -> usize {
            while c[x] != x {
                c[x] = c[c[x]];
                x = c[x];
            }
            x
        }
        let mut groups = self.n;
        for (k, &(a, b)) in self.ends.iter().enumerate() {
            if st.excluded[k] {
                continue;
            }
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            if ra != rb {
                comp[ra] = rb;
                groups -= 1;
            }
        }
        groups == 1
    }

    fn run(
        &self,
        st: &mut EnumState,
        f: &mut dyn FnMut(SpanningTree) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if st.chosen.len() + 1 == self.n {
            let edges = st
                .chosen
                .iter()
                .map(|&k| Edge::new(self.ids[self.ends[k].0], self.ids[self.ends[k].1]))
                .collect();
            return f(SpanningTree::from_trusted(edges));
        }
        if st.next == self.ends.len() {
            return ControlFlow::Continue(());
        }
        for mut child in self.children(st) {
            self.run(&mut child, f)?;
        }
        ControlFlow::Continue(())
    }
}

// ---------------------------------------------------------------------------

/// Minimum deficiency over all spanning trees, with the first minimizing
/// tree in enumeration order.
pub fn graph_deficiency(g: &Graph) -> Result<DeficiencyCertificate, SpanningError> {
    graph_deficiency_with(g, Execution::default())
}

pub fn graph_deficiency_with(
    g: &Graph,
    exec: Execution,
) -> Result<DeficiencyCertificate, SpanningError> {
    let floor = g.betti_number()? % 2;
    let (value, tree) = best_tree(g, exec, floor, |t| Some(decompose(g, t).deficiency()))?
        .expect("a connected graph has a spanning tree");
    Ok(DeficiencyCertificate {
        value,
        witness_tree: tree,
        qualified_bound: None,
    })
}

/// Qualified deficiency for degree bound `bound`.
///
/// With `t`, the deficiency of `t` itself, which must be qualified. Without,
/// the minimum over all qualified trees.
pub fn qualified_deficiency(
    g: &Graph,
    bound: usize,
    t: Option<&SpanningTree>,
) -> Result<DeficiencyCertificate, SpanningError> {
    g.require_connected()?;
    if let Some(t) = t {
        let dec = cotree_decomposition(g, t)?;
        if let Some(c) = dec.unqualified(bound) {
            return Err(SpanningError::NotQualified {
                bound,
                edges: c.edges.iter().copied().collect(),
            });
        }
        return Ok(DeficiencyCertificate {
            value: dec.deficiency(),
            witness_tree: t.clone(),
            qualified_bound: Some(bound),
        });
    }
    let floor = g.betti_number()? % 2;
    match best_tree(g, Execution::default(), floor, |t| {
        qualified_value(g, t, bound)
    })? {
        Some((value, tree)) => Ok(DeficiencyCertificate {
            value,
            witness_tree: tree,
            qualified_bound: Some(bound),
        }),
        None => Err(SpanningError::NoQualifiedTree { bound }),
    }
}

/// A tree whose co-tree components are all even, if one exists.
pub fn find_even_cotree_tree(g: &Graph) -> Result<Option<SpanningTree>, SpanningError> {
    if g.betti_number()? % 2 == 1 {
        return Ok(None);
    }
    let best = best_tree(g, Execution::default(), 0, |t| {
        (decompose(g, t).deficiency() == 0).then_some(0)
    })?;
    Ok(best.map(|(_, t)| t))
}

/// A tree qualified for `bound`, of minimum qualified deficiency.
pub fn find_qualified_tree(g: &Graph, bound: usize) -> Result<Option<SpanningTree>, SpanningError> {
    match qualified_deficiency(g, bound, None) {
        Ok(cert) => Ok(Some(cert.witness_tree)),
        Err(SpanningError::NoQualifiedTree { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Splits `v` inside its co-tree component into one copy per co-tree edge at
/// `v` and classifies the resulting parts by parity.
pub fn local_odd_even_split(
    g: &Graph,
    t: &SpanningTree,
    v: Vertex,
) -> Result<LocalSplit, SpanningError> {
    let dec = cotree_decomposition(g, t)?;
    let comp = dec
        .component_of(v)
        .ok_or(SpanningError::VertexNotInCoTree(v))?;
    // copies of v get ids beyond every real vertex
    let base = g.max_vertex().expect("non-empty") + 1;
    let relabel = |i: usize, e: Edge| {
        if e.contains(v) {
            Edge::new(base + i as Vertex, e.other(v))
        } else {
            e
        }
    };
    let back: BTreeMap<Edge, Edge> = comp
        .edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (relabel(i, e), e))
        .collect();
    let relabeled: BTreeSet<Edge> = back.keys().copied().collect();
    let mut odd_parts = Vec::new();
    let mut even_parts = Vec::new();
    for part in edge_components(&relabeled) {
        let edges: BTreeSet<Edge> = part.iter().map(|r| back[r]).collect();
        let attachments = edges
            .iter()
            .filter(|e| e.contains(v))
            .map(|e| e.other(v))
            .collect();
        let part = SplitPart { edges, attachments };
        if part.is_odd() {
            odd_parts.push(part);
        } else {
            even_parts.push(part);
        }
    }
    Ok(LocalSplit {
        vertex: v,
        odd_parts,
        even_parts,
    })
}

/// A uniformly random spanning tree (Wilson's algorithm).
pub fn random_spanning_tree<R: Rng + ?Sized>(
    g: &Graph,
    rng: &mut R,
) -> Result<SpanningTree, SpanningError> {
    g.require_connected()?;
    let vertices: Vec<Vertex> = g.vertices().collect();
    let root = *vertices.choose(rng).expect("non-empty");
    let mut in_tree = BTreeSet::from([root]);
    let mut next: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut edges = BTreeSet::new();
    for &start in &vertices {
        let mut u = start;
        while !in_tree.contains(&u) {
            let nbrs: Vec<Vertex> = g.neighbors(u)?.iter().copied().collect();
            let w = *nbrs
                .choose(rng)
                .expect("connected graph with more than one vertex");
            next.insert(u, w);
            u = w;
        }
        let mut u = start;
        while !in_tree.contains(&u) {
            in_tree.insert(u);
            let w = next[&u];
            edges.insert(Edge::new(u, w));
            u = w;
        }
    }
    Ok(SpanningTree::from_trusted(edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, cube, cycle, path, star};

    fn tree(g: &Graph, edges: &[(Vertex, Vertex)]) -> SpanningTree {
        SpanningTree::new(g, edges.iter().map(|&(a, b)| Edge::new(a, b))).unwrap()
    }

    fn star_tree(g: &Graph, center: Vertex) -> SpanningTree {
        let edges: Vec<_> = g
            .neighbors(center)
            .unwrap()
            .iter()
            .map(|&w| (center, w))
            .collect();
        tree(g, &edges)
    }

    #[test]
    fn rejects_non_trees() {
        let k4 = complete(4);
        assert!(matches!(
            SpanningTree::new(&k4, [Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 2)]),
            Err(SpanningError::NotSpanningTree(_))
        ));
        assert!(matches!(
            SpanningTree::new(&k4, [Edge::new(0, 1), Edge::new(1, 2)]),
            Err(SpanningError::NotSpanningTree(_))
        ));
        assert!(matches!(
            SpanningTree::new(
                &path(4),
                [Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 3)]
            ),
            Err(SpanningError::NotSpanningTree(_))
        ));
    }

    #[test]
    fn decompositions() {
        let k4 = complete(4);
        let dec = cotree_decomposition(&k4, &star_tree(&k4, 0)).unwrap();
        assert_eq!(dec.components.len(), 1);
        let c = &dec.components[0];
        assert_eq!(c.vertices, BTreeSet::from([1, 2, 3]));
        assert_eq!(c.edge_count(), 3);
        assert_eq!(c.parity, Parity::Odd);
        assert_eq!(deficiency_of_tree(&k4, &star_tree(&k4, 0)), Ok(1));

        let k5 = complete(5);
        let dec = cotree_decomposition(&k5, &star_tree(&k5, 0)).unwrap();
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[0].edge_count(), 6);
        assert_eq!(dec.components[0].parity, Parity::Even);
        assert_eq!(dec.deficiency(), 0);

        let s = star(4);
        assert!(cotree_decomposition(&s, &star_tree(&s, 0))
            .unwrap()
            .components
            .is_empty());

        let c4 = cycle(4);
        assert_eq!(
            deficiency_of_tree(&c4, &tree(&c4, &[(0, 1), (1, 2), (2, 3)])),
            Ok(1)
        );
    }

    #[test]
    fn minimum_deficiency() {
        let k4 = complete(4);
        assert_eq!(spanning_trees(&k4).unwrap().len(), 16);
        assert_eq!(graph_deficiency(&k4).unwrap().value, 1);
        assert_eq!(graph_deficiency(&complete(5)).unwrap().value, 0);
        assert_eq!(graph_deficiency(&complete(3)).unwrap().value, 1);
        assert_eq!(spanning_trees(&cube()).unwrap().len(), 384);
        assert_eq!(spanning_trees(&complete(5)).unwrap().len(), 125);
    }

    #[test]
    fn qualified() {
        let k4 = complete(4);
        assert_eq!(
            qualified_deficiency(&k4, 4, None),
            Err(SpanningError::NoQualifiedTree { bound: 4 })
        );
        assert_eq!(find_qualified_tree(&k4, 4), Ok(None));
        let k5 = complete(5);
        let cert = qualified_deficiency(&k5, 8, None).unwrap();
        assert_eq!(cert.value, 0);
        assert_eq!(cert.qualified_bound, Some(8));
        let t = find_qualified_tree(&k5, 4).unwrap().unwrap();
        assert!(cotree_decomposition(&k5, &t)
            .unwrap()
            .unqualified(4)
            .is_none());
        assert_eq!(find_qualified_tree(&cycle(4), 4), Ok(None));
        assert!(matches!(
            qualified_deficiency(&k4, 4, Some(&star_tree(&k4, 0))),
            Err(SpanningError::NotQualified { bound: 4, .. })
        ));
        assert_eq!(
            qualified_deficiency(&k4, 3, Some(&star_tree(&k4, 0)))
                .unwrap()
                .value,
            1
        );
    }

    #[test]
    fn even_cotree() {
        assert!(find_even_cotree_tree(&complete(5)).unwrap().is_some());
        assert_eq!(find_even_cotree_tree(&complete(4)), Ok(None));
        assert_eq!(find_even_cotree_tree(&cube()), Ok(None));
    }

    #[test]
    fn local_split() {
        // K4 on v=0, a=1, b=2, c=3 with tree edges va, vb, bc
        let k4 = complete(4);
        let t = tree(&k4, &[(0, 1), (0, 2), (2, 3)]);
        let ls = local_odd_even_split(&k4, &t, 0).unwrap();
        assert_eq!(ls.odd_parts.len(), 1);
        assert_eq!(ls.odd_parts[0].edges.len(), 3);
        assert_eq!(ls.odd_parts[0].attachments, BTreeSet::from([3]));
        assert!(ls.even_parts.is_empty());

        // co-tree is the even path 1-0-2; splitting 0 leaves two odd edges
        let g = Graph::from_edges([(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]).unwrap();
        let t = tree(&g, &[(0, 3), (1, 3), (2, 3)]);
        let dec = cotree_decomposition(&g, &t).unwrap();
        assert_eq!(dec.deficiency(), 0);
        let ls = local_odd_even_split(&g, &t, 0).unwrap();
        assert_eq!(ls.odd_parts.len(), 2);
        assert!(ls.even_parts.is_empty());

        assert_eq!(
            local_odd_even_split(&k4, &tree(&k4, &[(0, 1), (0, 2), (0, 3)]), 0),
            Err(SpanningError::VertexNotInCoTree(0))
        );
    }

    #[test]
    fn random_trees_are_trees() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let k5 = complete(5);
        for _ in 0..50 {
            let t = random_spanning_tree(&k5, &mut rng).unwrap();
            assert!(SpanningTree::new(&k5, t.edges().iter().copied()).is_ok());
        }
    }
}
