//! Naive reference implementations, written directly from the definitions
//! and sharing no code with the library beyond the graph type.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use trace_forge::{Edge, Graph, Vertex};

/// Every double trace of `g`, each as its lexicographically smallest
/// rotation, by plain backtracking with no pruning.
pub fn all_double_traces(g: &Graph) -> BTreeSet<Vec<Vertex>> {
    let start = g.vertices().next().expect("non-empty graph");
    let len = 2 * g.edge_count();
    let mut used: BTreeMap<Edge, u8> = g.edges().map(|e| (e, 0)).collect();
    let mut walk = vec![start];
    let mut out = BTreeSet::new();
    extend(g, len, &mut used, &mut walk, &mut out);
    out
}

fn extend(
    g: &Graph,
    len: usize,
    used: &mut BTreeMap<Edge, u8>,
    walk: &mut Vec<Vertex>,
    out: &mut BTreeSet<Vec<Vertex>>,
) {
    let here = *walk.last().unwrap();
    if walk.len() == len {
        let e = Edge::new(here, walk[0]);
        if g.has_edge(here, walk[0]) && used[&e] == 1 {
            out.insert(smallest_rotation(walk));
        }
        return;
    }
    for &next in g.neighbors(here).unwrap() {
        let e = Edge::new(here, next);
        if used[&e] < 2 {
            *used.get_mut(&e).unwrap() += 1;
            walk.push(next);
            extend(g, len, used, walk, out);
            walk.pop();
            *used.get_mut(&e).unwrap() -= 1;
        }
    }
}

pub fn smallest_rotation(seq: &[Vertex]) -> Vec<Vertex> {
    (0..seq.len())
        .map(|i| {
            seq[i..]
                .iter()
                .chain(&seq[..i])
                .copied()
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}

/// `(pred, succ)` at every position where `v` occurs.
fn visits(seq: &[Vertex], v: Vertex) -> Vec<(Vertex, Vertex)> {
    let n = seq.len();
    (0..n)
        .filter(|&i| seq[i] == v)
        .map(|i| (seq[(i + n - 1) % n], seq[(i + 1) % n]))
        .collect()
}

/// At every visit of `v`, the predecessor is in `set` iff the successor is.
pub fn is_repetition(seq: &[Vertex], v: Vertex, set: &BTreeSet<Vertex>) -> bool {
    visits(seq, v)
        .into_iter()
        .all(|(p, s)| set.contains(&p) == set.contains(&s))
}

fn subsets(items: &[Vertex]) -> impl Iterator<Item = BTreeSet<Vertex>> + '_ {
    (0u64..1 << items.len()).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    })
}

/// Sizes of the nontrivial repetitions at `v`, by trying every subset.
pub fn repetition_sizes(g: &Graph, seq: &[Vertex], v: Vertex) -> Vec<usize> {
    let nbrs: Vec<Vertex> = g.neighbors(v).unwrap().iter().copied().collect();
    subsets(&nbrs)
        .filter(|s| !s.is_empty() && s.len() < nbrs.len() && is_repetition(seq, v, s))
        .map(|s| s.len())
        .collect()
}

/// Largest `d` for which the trace is d-stable.
pub fn stability_order(g: &Graph, seq: &[Vertex]) -> usize {
    g.vertices()
        .map(|v| {
            let sizes = repetition_sizes(g, seq, v);
            match sizes.iter().min() {
                Some(&m) => m - 1,
                None => g.degree(v) - 1,
            }
        })
        .min()
        .unwrap()
}

pub fn is_strong(g: &Graph, seq: &[Vertex]) -> bool {
    g.vertices().all(|v| repetition_sizes(g, seq, v).is_empty())
}

/// `Some(true)` if every edge is traversed twice in the same direction,
/// `Some(false)` if every edge is traversed in both directions, `None` if
/// mixed.
pub fn all_parallel(seq: &[Vertex]) -> Option<bool> {
    let n = seq.len();
    let mut seen: BTreeMap<Edge, Vec<(Vertex, Vertex)>> = BTreeMap::new();
    for i in 0..n {
        let (a, b) = (seq[i], seq[(i + 1) % n]);
        seen.entry(Edge::new(a, b)).or_default().push((a, b));
    }
    let flags: BTreeSet<bool> = seen.values().map(|d| d[0] == d[1]).collect();
    match flags.len() {
        1 => flags.into_iter().next(),
        _ => None,
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

/// Every spanning tree, as an edge set, by checking every `(n-1)`-subset.
pub fn spanning_trees(g: &Graph) -> Vec<BTreeSet<Edge>> {
    let ids: Vec<Vertex> = g.vertices().collect();
    let index = |v: Vertex| ids.binary_search(&v).unwrap();
    let edges: Vec<Edge> = g.edges().collect();
    let k = ids.len() - 1;
    let mut out = Vec::new();
    let mut pick = Vec::new();
    choose(&edges, k, 0, &mut pick, &mut |chosen: &[Edge]| {
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        for e in chosen {
            let (a, b) = (
                find(&mut parent, index(e.lo())),
                find(&mut parent, index(e.hi())),
            );
            if a == b {
                return;
            }
            parent[a] = b;
        }
        out.push(chosen.iter().copied().collect());
    });
    out
}

fn choose(items: &[Edge], k: usize, from: usize, pick: &mut Vec<Edge>, f: &mut dyn FnMut(&[Edge])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in from..items.len() {
        if items.len() - i < k - pick.len() {
            break;
        }
        pick.push(items[i]);
        choose(items, k, i + 1, pick, f);
        pick.pop();
    }
}

/// Connected components of the co-tree, as edge sets.
pub fn cotree_components(g: &Graph, tree: &BTreeSet<Edge>) -> Vec<BTreeSet<Edge>> {
    let mut rest: BTreeSet<Edge> = g.edges().filter(|e| !tree.contains(e)).collect();
    let mut comps = Vec::new();
    while let Some(&seed) = rest.iter().next() {
        let mut comp = BTreeSet::new();
        let mut frontier = vec![seed];
        rest.remove(&seed);
        while let Some(e) = frontier.pop() {
            comp.insert(e);
            let touching: Vec<Edge> = rest
                .iter()
                .copied()
                .filter(|f| f.contains(e.lo()) || f.contains(e.hi()))
                .collect();
            for f in touching {
                rest.remove(&f);
                frontier.push(f);
            }
        }
        comps.push(comp);
    }
    comps
}

pub fn odd_count(comps: &[BTreeSet<Edge>]) -> usize {
    comps.iter().filter(|c| c.len() % 2 == 1).count()
}

/// Every odd co-tree component touches a vertex of degree at least `bound`.
pub fn is_qualified(g: &Graph, comps: &[BTreeSet<Edge>], bound: usize) -> bool {
    comps.iter().filter(|c| c.len() % 2 == 1).all(|c| {
        c.iter()
            .flat_map(|e| [e.lo(), e.hi()])
            .any(|v| g.degree(v) >= bound)
    })
}

/// Minimum number of odd co-tree components over all spanning trees.
pub fn deficiency(g: &Graph) -> usize {
    spanning_trees(g)
        .iter()
        .map(|t| odd_count(&cotree_components(g, t)))
        .min()
        .unwrap()
}

pub fn has_qualified_tree(g: &Graph, bound: usize) -> bool {
    spanning_trees(g)
        .iter()
        .any(|t| is_qualified(g, &cotree_components(g, t), bound))
}
