//! Antiparallel strong traces from spanning trees with an even co-tree.
//!
//! A rotation system fixes a cyclic order of the neighbors around each
//! vertex. Its faces are the orbits of darts `u -> v` under
//! `u -> v  =>  v -> next_v(u)`, and each face is a closed walk. With a
//! single face that walk uses every edge once in each direction, and the
//! transition links at `v` are `{u, next_v(u)}` for every neighbor `u`,
//! which form one cycle on `N(v)`. So a one-face rotation system is exactly
//! an antiparallel strong trace.
//!
//! Construction: any rotation of a tree has one face. A co-tree edge added
//! inside the face splits it in two; a second co-tree edge sharing an
//! endpoint with the first can then be placed across the two faces, which
//! merges them again. Even co-tree components decompose into such adjacent
//! pairs, so the tree grows into a one-face system pair by pair.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, Vertex};
use crate::spanning::{cotree_decomposition, SpanningError, SpanningTree};
use crate::walks::{validate_double_trace, DoubleTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spanning(#[from] SpanningError),
    #[error("co-tree component {0:?} has an odd number of edges")]
    OddComponent(Vec<Edge>),
    #[error("graph has no edges, so it has no double trace")]
    NoEdges,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Rotation {
    order: BTreeMap<Vertex, Vec<Vertex>>,
    edges: usize,
}

impl Rotation {
    fn next(&self, v: Vertex, u: Vertex) -> Vertex {
        let ring = &self.order[&v];
        let i = ring
            .iter()
            .position(|&x| x == u)
            .expect("u is a neighbor of v");
        ring[(i + 1) % ring.len()]
    }

    /// Faces as dart sequences.
    fn faces(&self) -> Vec<Vec<(Vertex, Vertex)>> {
        let mut seen = BTreeSet::new();
        let mut faces = Vec::new();
        for (&v, ring) in &self.order {
            for &u in ring {
                if seen.contains(&(v, u)) {
                    continue;
                }
                let mut face = Vec::new();
                let mut dart = (v, u);
                while seen.insert(dart) {
                    face.push(dart);
                    dart = (dart.1, self.next(dart.1, dart.0));
                }
                faces.push(face);
            }
        }
        faces
    }

    fn face_count(&self) -> usize {
        self.faces().len()
    }

    fn insert(&mut self, a: Vertex, at_a: usize, b: Vertex, at_b: usize) {
        self.order.entry(a).or_default().insert(at_a, b);
        self.order.entry(b).or_default().insert(at_b, a);
        self.edges += 1;
    }

    fn remove(&mut self, a: Vertex, at_a: usize, b: Vertex, at_b: usize) {
        self.order.get_mut(&a).expect("vertex").remove(at_a);
        self.order.get_mut(&b).expect("vertex").remove(at_b);
        self.edges -= 1;
    }

    fn slots(&self, v: Vertex) -> usize {
        self.order.get(&v).map_or(1, |r| r.len().max(1))
    }
}

/// Splits a connected edge set with an even number of edges into pairs of
/// edges sharing a vertex. Returns `(shared, x, y)` for pairs `shared-x`,
/// `shared-y`.
fn adjacent_pairs(edges: &BTreeSet<Edge>) -> Vec<(Vertex, Vertex, Vertex)> {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.lo()).or_default().push(e.hi());
        adj.entry(e.hi()).or_default().push(e.lo());
    }
    let Some(&root) = adj.keys().next() else {
        return Vec::new();
    };
    // preorder with parents
    let mut parent: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut order = Vec::new();
    let mut stack = vec![(root, root)];
    let mut visited = BTreeSet::new();
    while let Some((x, p)) = stack.pop() {
        if !visited.insert(x) {
            continue;
        }
        order.push(x);
        if x != root {
            parent.insert(x, p);
        }
        for &y in adj[&x].iter().rev() {
            if !visited.contains(&y) {
                stack.push((y, x));
            }
        }
    }
    let mut used = BTreeSet::new();
    let mut pairs = Vec::new();
    for &x in order.iter().rev() {
        let up = parent.get(&x).copied();
        let mut ends: Vec<Vertex> = adj[&x]
            .iter()
            .copied()
            .filter(|&y| Some(y) != up && !used.contains(&Edge::new(x, y)))
            .collect();
        if ends.len() % 2 == 1 {
            ends.push(up.expect("the root always has an even number of unused edges"));
        }
        for pair in ends.chunks(2) {
            used.insert(Edge::new(x, pair[0]));
            used.insert(Edge::new(x, pair[1]));
            pairs.push((x, pair[0], pair[1]));
        }
    }
    debug_assert_eq!(used.len(), edges.len());
    pairs
}

/// An antiparallel strong trace built from a spanning tree whose co-tree
/// components all have an even number of edges.
pub fn antiparallel_strong_trace(
    g: &Graph,
    tree: &SpanningTree,
) -> Result<DoubleTrace, EmbeddingError> {
    let dec = cotree_decomposition(g, tree)?;
    if g.edge_count() == 0 {
        return Err(EmbeddingError::NoEdges);
    }
    if let Some(c) = dec.odd_components().next() {
        return Err(EmbeddingError::OddComponent(
            c.edges.iter().copied().collect(),
        ));
    }
    let mut rot = Rotation {
        order: BTreeMap::new(),
        edges: 0,
    };
    for e in tree.edges() {
        rot.insert(e.lo(), 0, e.hi(), 0);
    }
    for comp in &dec.components {
        for (shared, x, y) in adjacent_pairs(&comp.edges) {
            rot.insert(shared, 0, x, 0);
            debug_assert_eq!(rot.face_count(), 2);
            let placed = (0..rot.slots(shared)).find_map(|i| {
                (0..rot.slots(y)).find_map(|j| {
                    rot.insert(shared, i, y, j);
                    if rot.face_count() == 1 {
                        Some(())
                    } else {
                        rot.remove(shared, i, y, j);
                        None
                    }
                })
            });
            assert!(
                placed.is_some(),
                "an edge at a face-separating corner merges the faces"
            );
        }
    }
    let mut faces = rot.faces();
    debug_assert_eq!(faces.len(), 1);
    let walk: Vec<Vertex> = faces
        .pop()
        .expect("one face")
        .into_iter()
        .map(|(t, _)| t)
        .collect();
    Ok(validate_double_trace(g, &walk)
        .expect("a facial walk of a one-face system is a double trace"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, path};
    use crate::spanning::find_even_cotree_tree;
    use crate::walks::{classify_trace, Direction};

    #[test]
    fn pairs_cover_even_components() {
        let k4_edges: BTreeSet<Edge> = complete(4).edges().collect();
        let pairs = adjacent_pairs(&k4_edges);
        assert_eq!(pairs.len(), 3);
        let covered: BTreeSet<Edge> = pairs
            .iter()
            .flat_map(|&(s, x, y)| [Edge::new(s, x), Edge::new(s, y)])
            .collect();
        assert_eq!(covered, k4_edges);
    }

    #[test]
    fn k5_from_star() {
        let k5 = complete(5);
        let t = find_even_cotree_tree(&k5).unwrap().unwrap();
        let w = antiparallel_strong_trace(&k5, &t).unwrap();
        let class = classify_trace(&w);
        assert_eq!(class.direction, Direction::Antiparallel);
        assert!(class.strong);
        assert_eq!(w.len(), 20);
    }

    #[test]
    fn trees_and_odd_cotrees() {
        let p = path(3);
        let t = SpanningTree::new(&p, p.edges()).unwrap();
        let w = antiparallel_strong_trace(&p, &t).unwrap();
        assert!(classify_trace(&w).strong);

        let k3 = complete(3);
        let t = SpanningTree::new(&k3, [Edge::new(0, 1), Edge::new(1, 2)]).unwrap();
        assert!(matches!(
            antiparallel_strong_trace(&k3, &t),
            Err(EmbeddingError::OddComponent(_))
        ));
    }
}
