//! Finite simple undirected graphs with integer vertex ids.
//!
//! A [`Graph`] is immutable once built. Splitting and identification return
//! new graphs; fresh vertex ids are always allocated as `max_id + 1, + 2, ...`
//! so transcripts of a reduction are reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Vertex = u32;

/// An unordered edge, stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    lo: Vertex,
    hi: Vertex,
}

impl Edge {
    /// Panics on a loop; use [`Graph::from_edges`] for checked input.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        Edge {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn lo(self) -> Vertex {
        self.lo
    }

    pub fn hi(self) -> Vertex {
        self.hi
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.lo, self.hi)
    }

    pub fn contains(self, v: Vertex) -> bool {
        self.lo == v || self.hi == v
    }

    /// The endpoint that is not `v`.
    pub fn other(self, v: Vertex) -> Vertex {
        if self.lo == v {
            self.hi
        } else {
            debug_assert_eq!(self.hi, v);
            self.lo
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0}-{1} listed more than once")]
    DuplicateEdge(Vertex, Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph needs at least {needed} vertices, has {found}")]
    TooSmall { needed: usize, found: usize },
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("vertex {vertex} has degree {degree}, at least 2 is required")]
    DegreeTooSmall { vertex: Vertex, degree: usize },
    #[error("vertices {0} and {1} share neighbor {2}")]
    OverlappingNeighborhoods(Vertex, Vertex, Vertex),
    #[error("vertices {0} and {1} are adjacent")]
    AdjacentTargets(Vertex, Vertex),
    #[error("identification needs at least two distinct targets")]
    TooFewTargets,
    #[error("vertex id {0} is already used by a non-target vertex")]
    IdInUse(Vertex),
}

/// A finite simple undirected graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
    edge_count: usize,
}

/// A partition of a vertex's neighborhood into non-empty blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub vertex: Vertex,
    pub parts: Vec<BTreeSet<Vertex>>,
}

impl SplitSpec {
    pub fn new(vertex: Vertex, parts: Vec<BTreeSet<Vertex>>) -> Self {
        SplitSpec { vertex, parts }
    }

    /// Checks the partition against `g`: at least two blocks, each non-empty,
    /// pairwise disjoint, covering exactly `N(vertex)`.
    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        let nbrs = g.neighbors(self.vertex)?;
        if nbrs.len() < 2 {
            return Err(GraphError::DegreeTooSmall {
                vertex: self.vertex,
                degree: nbrs.len(),
            });
        }
        if self.parts.len() < 2 {
            return Err(GraphError::InvalidPartition(format!(
                "need at least 2 parts, got {}",
                self.parts.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for (i, part) in self.parts.iter().enumerate() {
            if part.is_empty() {
                return Err(GraphError::InvalidPartition(format!("part {i} is empty")));
            }
            for &x in part {
                if !nbrs.contains(&x) {
                    return Err(GraphError::InvalidPartition(format!(
                        "{x} is not a neighbor of {}",
                        self.vertex
                    )));
                }
                if !seen.insert(x) {
                    return Err(GraphError::InvalidPartition(format!(
                        "{x} appears in more than one part"
                    )));
                }
            }
        }
        if seen.len() != nbrs.len() {
            let missing: Vec<_> = nbrs.difference(&seen).collect();
            return Err(GraphError::InvalidPartition(format!(
                "neighbors {missing:?} are not covered"
            )));
        }
        Ok(())
    }
}

impl Graph {
    /// Builds a graph from an edge list. Vertices are the union of endpoints.
    pub fn from_edges<I>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        Self::with_vertices(std::iter::empty(), edges)
    }

    /// Like [`Graph::from_edges`] but also declares (possibly isolated) vertices.
    pub fn with_vertices<V, I>(vertices: V, edges: I) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = Vertex>,
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Graph::default();
        for v in vertices {
            g.adj.entry(v).or_default();
        }
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if !g.adj.entry(a).or_default().insert(b) {
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
            g.adj.entry(b).or_default().insert(a);
            g.edge_count += 1;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    /// Edges in ascending `(lo, hi)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .flat_map(|(&v, nbrs)| nbrs.range(v + 1..).map(move |&w| Edge::new(v, w)))
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adj.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn neighbors(&self, v: Vertex) -> Result<&BTreeSet<Vertex>, GraphError> {
        self.adj.get(&v).ok_or(GraphError::UnknownVertex(v))
    }

    /// Degree of `v`; zero for unknown vertices.
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.values().map(BTreeSet::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn max_vertex(&self) -> Option<Vertex> {
        self.adj.keys().next_back().copied()
    }

    /// First vertex of odd degree, if any.
    pub fn odd_degree_vertex(&self) -> Option<Vertex> {
        self.adj
            .iter()
            .find(|(_, n)| n.len() % 2 == 1)
            .map(|(&v, _)| v)
    }

    /// All degrees even. Connectivity is the caller's concern.
    pub fn is_eulerian(&self) -> bool {
        self.odd_degree_vertex().is_none()
    }

    /// Connected components as vertex sets, ordered by smallest member.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for &w in &self.adj[&v] {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> Result<bool, GraphError> {
        if self.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        Ok(self.components().len() == 1)
    }

    /// Errors unless the graph is non-empty and connected.
    pub fn require_connected(&self) -> Result<(), GraphError> {
        if self.is_connected()? {
            Ok(())
        } else {
            Err(GraphError::Disconnected)
        }
    }

    /// `|E| - |V| + 1`, the number of co-tree edges of any spanning tree.
    pub fn betti_number(&self) -> Result<usize, GraphError> {
        self.require_connected()?;
        Ok(self.edge_count + 1 - self.vertex_count())
    }

    /// Size of a minimum edge cut.
    ///
    /// Unit-capacity max-flow from a fixed source to every other vertex; the
    /// minimum over those flows is the global edge connectivity because every
    /// cut separates the source from something.
    pub fn edge_connectivity(&self) -> Result<usize, GraphError> {
        self.require_connected()?;
        if self.vertex_count() < 2 {
            return Err(GraphError::TooSmall {
                needed: 2,
                found: self.vertex_count(),
            });
        }
        let ids: Vec<Vertex> = self.vertices().collect();
        let index: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj: Vec<Vec<usize>> = ids
            .iter()
            .map(|v| self.adj[v].iter().map(|w| index[w]).collect())
            .collect();
        Ok((1..ids.len())
            .map(|t| unit_max_flow(&adj, 0, t))
            .min()
            .unwrap_or(0))
    }

    /// Replaces `spec.vertex` by one fresh vertex per block, each adjacent to
    /// exactly its block. Fresh ids are `max + 1, max + 2, ...` in block order.
    ///
    /// The result may be disconnected.
    pub fn split_vertex(&self, spec: &SplitSpec) -> Result<(Graph, Vec<Vertex>), GraphError> {
        spec.validate(self)?;
        let base = self.max_vertex().expect("validated vertex exists");
        let fresh: Vec<Vertex> = (1..=spec.parts.len() as Vertex).map(|i| base + i).collect();
        let mut adj = self.adj.clone();
        let old = adj.remove(&spec.vertex).expect("validated vertex exists");
        for x in &old {
            adj.get_mut(x)
                .expect("neighbor exists")
                .remove(&spec.vertex);
        }
        for (part, &id) in spec.parts.iter().zip(&fresh) {
            adj.insert(id, part.clone());
            for x in part {
                adj.get_mut(x).expect("neighbor exists").insert(id);
            }
        }
        Ok((
            Graph {
                adj,
                edge_count: self.edge_count,
            },
            fresh,
        ))
    }

    /// Merges `targets` into a single vertex `new_id` adjacent to the union of
    /// their neighborhoods. Inverse of [`Graph::split_vertex`].
    ///
    /// `new_id` may be one of the targets or an unused id.
    pub fn identify_vertices(
        &self,
        targets: &[Vertex],
        new_id: Vertex,
    ) -> Result<Graph, GraphError> {
        let distinct: BTreeSet<Vertex> = targets.iter().copied().collect();
        if distinct.len() < 2 {
            return Err(GraphError::TooFewTargets);
        }
        for &t in &distinct {
            self.neighbors(t)?;
        }
        if self.contains_vertex(new_id) && !distinct.contains(&new_id) {
            return Err(GraphError::IdInUse(new_id));
        }
        let list: Vec<Vertex> = distinct.iter().copied().collect();
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                if self.has_edge(a, b) {
                    return Err(GraphError::AdjacentTargets(a, b));
                }
                if let Some(&shared) = self.adj[&a].intersection(&self.adj[&b]).next() {
                    return Err(GraphError::OverlappingNeighborhoods(a, b, shared));
                }
            }
        }
        let mut adj = self.adj.clone();
        let mut merged = BTreeSet::new();
        for t in &list {
            let nbrs = adj.remove(t).expect("checked above");
            for x in &nbrs {
                adj.get_mut(x).expect("neighbor exists").remove(t);
            }
            merged.extend(nbrs);
        }
        for x in &merged {
            adj.get_mut(x).expect("neighbor exists").insert(new_id);
        }
        adj.insert(new_id, merged);
        Ok(Graph {
            adj,
            edge_count: self.edge_count,
        })
    }

    /// Applies an injective relabeling to every vertex.
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> Graph {
        let f = |v: Vertex| *map.get(&v).unwrap_or(&v);
        let adj = self
            .adj
            .iter()
            .map(|(&v, n)| (f(v), n.iter().map(|&w| f(w)).collect()))
            .collect();
        Graph {
            adj,
            edge_count: self.edge_count,
        }
    }
}

/// Max-flow between `s` and `t` with unit capacity in both directions on
/// every undirected edge (Edmonds-Karp).
fn unit_max_flow(adj: &[Vec<usize>], s: usize, t: usize) -> usize {
    let n = adj.len();
    // flow[u][k]: net flow on the arc u -> adj[u][k], in {-1, 0, 1}
    let mut flow: Vec<Vec<i8>> = adj.iter().map(|n| vec![0; n.len()]).collect();
    let back: Vec<Vec<usize>> = adj
        .iter()
        .enumerate()
        .map(|(u, nbrs)| {
            nbrs.iter()
                .map(|&w| adj[w].iter().position(|&x| x == u).expect("symmetric"))
                .collect()
        })
        .collect();
    let mut total = 0;
    loop {
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut queue = VecDeque::from([s]);
        let mut reached = vec![false; n];
        reached[s] = true;
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for (k, &w) in adj[u].iter().enumerate() {
                if !reached[w] && flow[u][k] < 1 {
                    reached[w] = true;
                    pred[w] = Some((u, k));
                    queue.push_back(w);
                }
            }
        }
        if !reached[t] {
            return total;
        }
        let mut v = t;
        while let Some((u, k)) = pred[v] {
            flow[u][k] += 1;
            flow[v][back[u][k]] -= 1;
            v = u;
        }
        total += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, cycle, path};

    fn set(xs: &[Vertex]) -> BTreeSet<Vertex> {
        xs.iter().copied().collect()
    }

    #[test]
    fn builds_triangle() {
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![Edge::new(0, 1), Edge::new(0, 2), Edge::new(1, 2)]
        );
    }

    #[test]
    fn rejects_duplicates_and_loops() {
        assert_eq!(
            Graph::from_edges([(0, 1), (0, 1)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::from_edges([(1, 0), (0, 1)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(Graph::from_edges([(0, 0)]), Err(GraphError::SelfLoop(0)));
    }

    #[test]
    fn connectivity() {
        assert!(complete(4).is_connected().unwrap());
        let two = Graph::from_edges([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!two.is_connected().unwrap());
        let single = Graph::with_vertices([7], []).unwrap();
        assert!(single.is_connected().unwrap());
        assert_eq!(Graph::default().is_connected(), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn betti() {
        assert_eq!(complete(4).betti_number(), Ok(3));
        assert_eq!(complete(5).betti_number(), Ok(6));
        assert_eq!(path(6).betti_number(), Ok(0));
        let two = Graph::from_edges([(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.betti_number(), Err(GraphError::Disconnected));
    }

    #[test]
    fn edge_connectivity_examples() {
        assert_eq!(complete(5).edge_connectivity(), Ok(4));
        assert_eq!(cycle(4).edge_connectivity(), Ok(2));
        assert_eq!(path(3).edge_connectivity(), Ok(1));
        for n in 3..=5 {
            assert_eq!(complete(n).edge_connectivity(), Ok(n as usize - 1));
        }
        let single = Graph::with_vertices([0], []).unwrap();
        assert_eq!(
            single.edge_connectivity(),
            Err(GraphError::TooSmall {
                needed: 2,
                found: 1
            })
        );
    }

    #[test]
    fn split_k4() {
        let g = complete(4);
        let spec = SplitSpec::new(0, vec![set(&[1]), set(&[2, 3])]);
        let (h, fresh) = g.split_vertex(&spec).unwrap();
        assert_eq!(fresh, vec![4, 5]);
        assert_eq!(h.vertex_count(), 5);
        assert_eq!(h.edge_count(), 6);
        assert_eq!(h.degree(4), 1);
        assert_eq!(h.degree(5), 2);
    }

    #[test]
    fn split_c4_gives_path() {
        let g = cycle(4);
        let (h, _) = g
            .split_vertex(&SplitSpec::new(0, vec![set(&[1]), set(&[3])]))
            .unwrap();
        assert_eq!(h.vertex_count(), 5);
        assert_eq!(h.edge_count(), 4);
        assert!(h.is_connected().unwrap());
        assert_eq!(h.max_degree(), 2);
    }

    #[test]
    fn split_bowtie_disconnects() {
        let bowtie = Graph::from_edges([(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        let (h, _) = bowtie
            .split_vertex(&SplitSpec::new(0, vec![set(&[1, 2]), set(&[3, 4])]))
            .unwrap();
        assert_eq!(h.components().len(), 2);
        assert_eq!(h.edge_count(), 6);
    }

    #[test]
    fn split_rejects_bad_partitions() {
        let g = complete(4);
        let bad = [
            SplitSpec::new(0, vec![set(&[1, 2, 3])]),
            SplitSpec::new(0, vec![set(&[1]), set(&[2])]),
            SplitSpec::new(0, vec![set(&[1, 2]), set(&[2, 3])]),
            SplitSpec::new(0, vec![set(&[1]), set(&[]), set(&[2, 3])]),
            SplitSpec::new(0, vec![set(&[1, 9]), set(&[2, 3])]),
        ];
        for spec in bad {
            assert!(matches!(
                g.split_vertex(&spec),
                Err(GraphError::InvalidPartition(_))
            ));
        }
        let p = path(2);
        assert!(matches!(
            p.split_vertex(&SplitSpec::new(0, vec![set(&[1]), set(&[])])),
            Err(GraphError::DegreeTooSmall { .. })
        ));
    }

    #[test]
    fn identify_inverts_split() {
        let g = complete(4);
        let (h, fresh) = g
            .split_vertex(&SplitSpec::new(2, vec![set(&[0]), set(&[1, 3])]))
            .unwrap();
        let back = h.identify_vertices(&fresh, 2).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn identify_triangles_into_bowtie() {
        let two = Graph::from_edges([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let bowtie = two.identify_vertices(&[0, 3], 9).unwrap();
        assert!(bowtie.is_connected().unwrap());
        assert_eq!(bowtie.degree(9), 4);
        assert_eq!(bowtie.edge_count(), 6);
    }

    #[test]
    fn identify_preconditions() {
        let p = path(3); // 0-1-2
        assert_eq!(
            p.identify_vertices(&[0, 2], 5),
            Err(GraphError::OverlappingNeighborhoods(0, 2, 1))
        );
        assert_eq!(
            p.identify_vertices(&[0, 1], 5),
            Err(GraphError::AdjacentTargets(0, 1))
        );
        assert_eq!(p.identify_vertices(&[0], 5), Err(GraphError::TooFewTargets));
        let two = Graph::from_edges([(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            two.identify_vertices(&[0, 2], 3),
            Err(GraphError::IdInUse(3))
        );
    }
}
