//! Double traces and their local repetition structure.
//!
//! A double trace is stored as a cyclic vertex sequence `v_0 .. v_{l-1}` with
//! `v_0` implicitly following `v_{l-1}`. Every visit `v_i = v` contributes the
//! unordered pair `{v_{i-1}, v_{i+1}}` to the *transition graph* at `v`. A set
//! `N` of neighbors is a repetition at `v` exactly when no transition pair
//! has one end in `N` and the other outside, so the repetitions at `v` are
//! the unions of connected components of its transition graph. The
//! component method is the primary algorithm; the subset scan
//! ([`RepetitionMode::BruteForce`]) is kept as an independent check.
//!
//! d-stability at `v` means `d(v) > d` and no repetition `N` with
//! `1 <= |N| <= d`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, Vertex};
use crate::search::{DirectionReq, TraceKind, TraceSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has no edges, so it has no double trace")]
    NoEdges,
    #[error("trace has length {found}, a double trace of this graph has length {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("step {index} ({from} -> {to}) does not follow an edge")]
    NonAdjacentStep {
        index: usize,
        from: Vertex,
        to: Vertex,
    },
    #[error("edge {edge} is traversed {count} times, expected 2")]
    WrongMultiplicity { edge: Edge, count: usize },
    #[error("trace visits {0}, which is not a vertex of the graph")]
    UnknownVertex(Vertex),
}

/// Traversal direction label of an edge, or of a whole trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Parallel,
    Antiparallel,
    Mixed,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Parallel => "parallel",
            Direction::Antiparallel => "antiparallel",
            Direction::Mixed => "mixed",
        })
    }
}

/// A validated closed walk traversing every edge of its host exactly twice.
///
/// The sequence is kept in its lexicographically smallest rotation; the
/// traversal direction is preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleTrace {
    host: Graph,
    sequence: Vec<Vertex>,
}

/// Smallest rotation of a cyclic sequence.
pub fn canonical_rotation(seq: &[Vertex]) -> Vec<Vertex> {
    let n = seq.len();
    let best = (0..n)
        .min_by(|&a, &b| {
            (0..n)
                .map(|k| seq[(a + k) % n])
                .cmp((0..n).map(|k| seq[(b + k) % n]))
        })
        .unwrap_or(0);
    (0..n).map(|k| seq[(best + k) % n]).collect()
}

/// Checks that `seq`, read cyclically, is a double trace of `g`.
///
/// Over-used edges are reported first, then non-adjacent steps, then
/// under-used edges, each in ascending order.
pub fn validate_double_trace(g: &Graph, seq: &[Vertex]) -> Result<DoubleTrace, TraceError> {
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(TraceError::NoEdges);
    }
    let expected = 2 * g.edge_count();
    if seq.len() != expected {
        return Err(TraceError::WrongLength {
            expected,
            found: seq.len(),
        });
    }
    if let Some(&v) = seq.iter().find(|&&v| !g.contains_vertex(v)) {
        return Err(TraceError::UnknownVertex(v));
    }
    let mut counts: BTreeMap<Edge, usize> = g.edges().map(|e| (e, 0)).collect();
    let mut bad_step = None;
    for i in 0..seq.len() {
        let (a, b) = (seq[i], seq[(i + 1) % seq.len()]);
        if a != b && g.has_edge(a, b) {
            *counts.get_mut(&Edge::new(a, b)).expect("edge of g") += 1;
        } else if bad_step.is_none() {
            bad_step = Some(TraceError::NonAdjacentStep {
                index: i,
                from: a,
                to: b,
            });
        }
    }
    if let Some((&edge, &count)) = counts.iter().find(|(_, &c)| c > 2) {
        return Err(TraceError::WrongMultiplicity { edge, count });
    }
    if let Some(err) = bad_step {
        return Err(err);
    }
    if let Some((&edge, &count)) = counts.iter().find(|(_, &c)| c != 2) {
        return Err(TraceError::WrongMultiplicity { edge, count });
    }
    Ok(DoubleTrace {
        host: g.clone(),
        sequence: canonical_rotation(seq),
    })
}

impl DoubleTrace {
    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn sequence(&self) -> &[Vertex] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Iterator over cyclic steps `(v_i, v_{i+1})`.
    pub fn steps(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let n = self.sequence.len();
        (0..n).map(move |i| (self.sequence[i], self.sequence[(i + 1) % n]))
    }

    /// Every visit of `v` as a `(predecessor, successor)` pair, in sequence order.
    pub fn visits(&self, v: Vertex) -> Vec<(Vertex, Vertex)> {
        let n = self.sequence.len();
        (0..n)
            .filter(|&i| self.sequence[i] == v)
            .map(|i| (self.sequence[(i + n - 1) % n], self.sequence[(i + 1) % n]))
            .collect()
    }

    /// Space-separated vertex ids, the on-disk trace format.
    pub fn to_line(&self) -> String {
        let ids: Vec<String> = self.sequence.iter().map(u32::to_string).collect();
        ids.join(" ")
    }
}

/// Per-edge direction labels.
pub fn direction_profile(w: &DoubleTrace) -> BTreeMap<Edge, Direction> {
    let mut first: BTreeMap<Edge, (Vertex, Option<Direction>)> = BTreeMap::new();
    for (a, b) in w.steps() {
        let e = Edge::new(a, b);
        match first.get_mut(&e) {
            None => {
                first.insert(e, (a, None));
            }
            Some((tail, label)) => {
                *label = Some(if *tail == a {
                    Direction::Parallel
                } else {
                    Direction::Antiparallel
                });
            }
        }
    }
    first
        .into_iter()
        .map(|(e, (_, label))| (e, label.expect("every edge is traversed twice")))
        .collect()
}

/// Parallel or antiparallel when every edge agrees, mixed otherwise.
pub fn trace_direction(profile: &BTreeMap<Edge, Direction>) -> Direction {
    let mut labels = profile.values();
    let first = *labels.next().expect("a double trace has at least one edge");
    if labels.all(|&d| d == first) {
        first
    } else {
        Direction::Mixed
    }
}

/// The pairing of predecessors and successors over all visits of `center`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionGraph {
    pub center: Vertex,
    pub nodes: BTreeSet<Vertex>,
    /// One unordered `(min, max)` pair per visit; `a == b` is a self-link.
    pub links: Vec<(Vertex, Vertex)>,
}

impl TransitionGraph {
    /// Connected components, ordered by smallest member. These are exactly
    /// the minimal non-empty repetitions at `center`.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut parent: BTreeMap<Vertex, Vertex> = self.nodes.iter().map(|&v| (v, v)).collect();
        fn find(parent: &mut BTreeMap<Vertex, Vertex>, mut v: Vertex) -> Vertex {
            while parent[&v] != v {
                let up = parent[&parent[&v]];
                parent.insert(v, up);
                v = up;
            }
            v
        }
        for &(a, b) in &self.links {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent.insert(ra.max(rb), ra.min(rb));
            }
        }
        let mut groups: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        for &v in &self.nodes {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().insert(v);
        }
        let mut comps: Vec<_> = groups.into_values().collect();
        comps.sort_by_key(|c| *c.iter().next().expect("non-empty"));
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Number of times `x` occurs as a link endpoint (self-links count twice).
    pub fn endpoint_multiplicity(&self, x: Vertex) -> usize {
        self.links
            .iter()
            .map(|&(a, b)| usize::from(a == x) + usize::from(b == x))
            .sum()
    }
}

pub fn transition_graph_at(w: &DoubleTrace, v: Vertex) -> Result<TransitionGraph, TraceError> {
    let nodes = w
        .host
        .neighbors(v)
        .map_err(|_| TraceError::UnknownVertex(v))?
        .clone();
    let links = w
        .visits(v)
        .into_iter()
        .map(|(p, s)| (p.min(s), p.max(s)))
        .collect();
    Ok(TransitionGraph {
        center: v,
        nodes,
        links,
    })
}

/// Whether `subset` satisfies the repetition condition at `v`: at every visit
/// the predecessor is in `subset` iff the successor is.
pub fn is_repetition(w: &DoubleTrace, v: Vertex, subset: &BTreeSet<Vertex>) -> bool {
    w.visits(v)
        .into_iter()
        .all(|(p, s)| subset.contains(&p) == subset.contains(&s))
}

/// The one-directional reading: every visit entering from `subset` also
/// leaves into `subset`.
pub fn is_closed_under_entry(w: &DoubleTrace, v: Vertex, subset: &BTreeSet<Vertex>) -> bool {
    w.visits(v)
        .into_iter()
        .all(|(p, s)| !subset.contains(&p) || subset.contains(&s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepetitionMode {
    /// Components of the transition graph.
    Components,
    /// Test the repetition condition on every subset of `N(v)`. Exponential
    /// in the degree; for cross-checking only.
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepetitionReport {
    /// Minimal non-empty repetitions at each vertex, each list ordered by
    /// smallest member.
    pub minimal: BTreeMap<Vertex, Vec<BTreeSet<Vertex>>>,
    /// Largest `d` for which the trace is d-stable.
    pub stability_order: usize,
    pub strong: bool,
}

impl RepetitionReport {
    /// Vertices carrying a nontrivial repetition.
    pub fn repetition_vertices(&self) -> Vec<Vertex> {
        self.minimal
            .iter()
            .filter(|(_, comps)| comps.len() > 1)
            .map(|(&v, _)| v)
            .collect()
    }
}

/// Largest `d` with no repetition of size `1..=d` at this vertex and `d < deg`.
fn local_stability(degree: usize, minimal: &[BTreeSet<Vertex>]) -> usize {
    if minimal.len() <= 1 {
        degree - 1
    } else {
        minimal.iter().map(BTreeSet::len).min().expect("non-empty") - 1
    }
}

fn brute_force_minimal(w: &DoubleTrace, v: Vertex) -> Vec<BTreeSet<Vertex>> {
    let nbrs: Vec<Vertex> = w
        .host
        .neighbors(v)
        .expect("vertex of host")
        .iter()
        .copied()
        .collect();
    assert!(nbrs.len() <= 20, "subset scan is exponential in the degree");
    let subsets: Vec<BTreeSet<Vertex>> = (1u32..1 << nbrs.len())
        .map(|mask| {
            nbrs.iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &x)| x)
                .collect()
        })
        .filter(|s| is_repetition(w, v, s))
        .collect();
    let mut minimal: Vec<BTreeSet<Vertex>> = subsets
        .iter()
        .filter(|s| !subsets.iter().any(|t| t.len() < s.len() && t.is_subset(s)))
        .cloned()
        .collect();
    minimal.sort_by_key(|c| *c.iter().next().expect("non-empty"));
    minimal
}

pub fn repetition_analysis(w: &DoubleTrace, mode: RepetitionMode) -> RepetitionReport {
    let mut minimal = BTreeMap::new();
    let mut stability = usize::MAX;
    for v in w.host.vertices() {
        let comps = match mode {
            RepetitionMode::Components => transition_graph_at(w, v)
                .expect("vertex of host")
                .components(),
            RepetitionMode::BruteForce => brute_force_minimal(w, v),
        };
        stability = stability.min(local_stability(w.host.degree(v), &comps));
        minimal.insert(v, comps);
    }
    let strong = minimal.values().all(|c| c.len() <= 1);
    RepetitionReport {
        minimal,
        stability_order: stability,
        strong,
    }
}

/// Largest `d` such that `w` is d-stable. Bounded by `min_degree - 1`.
pub fn stability_order(w: &DoubleTrace) -> usize {
    repetition_analysis(w, RepetitionMode::Components).stability_order
}

/// Whether the one-directional and the biconditional repetition conditions
/// select the same subsets at every vertex. Exhaustive over subsets.
pub fn directional_readings_agree(w: &DoubleTrace) -> bool {
    w.host.vertices().all(|v| {
        let nbrs: Vec<Vertex> = w
            .host
            .neighbors(v)
            .expect("vertex")
            .iter()
            .copied()
            .collect();
        (0u32..1 << nbrs.len()).all(|mask| {
            let s: BTreeSet<Vertex> = nbrs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &x)| x)
                .collect();
            is_repetition(w, v, &s) == is_closed_under_entry(w, v, &s)
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceClass {
    pub is_double: bool,
    pub direction: Direction,
    pub stability_order: usize,
    pub strong: bool,
}

impl TraceClass {
    pub fn satisfies(&self, spec: &TraceSpec) -> bool {
        let direction_ok = match spec.direction {
            DirectionReq::Any => true,
            DirectionReq::Parallel => self.direction == Direction::Parallel,
            DirectionReq::Antiparallel => self.direction == Direction::Antiparallel,
        };
        let kind_ok = match spec.kind {
            TraceKind::Double => self.is_double,
            TraceKind::Stable(d) => self.stability_order >= d,
            TraceKind::Strong => self.strong,
        };
        direction_ok && kind_ok
    }
}

pub fn classify_trace(w: &DoubleTrace) -> TraceClass {
    let report = repetition_analysis(w, RepetitionMode::Components);
    TraceClass {
        is_double: true,
        direction: trace_direction(&direction_profile(w)),
        stability_order: report.stability_order,
        strong: report.strong,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, path};

    fn set(xs: &[Vertex]) -> BTreeSet<Vertex> {
        xs.iter().copied().collect()
    }

    // a=0, b=1, c=2
    fn k3_anti() -> DoubleTrace {
        validate_double_trace(&complete(3), &[0, 1, 2, 0, 2, 1]).unwrap()
    }

    fn k3_par() -> DoubleTrace {
        validate_double_trace(&complete(3), &[0, 1, 2, 0, 1, 2]).unwrap()
    }

    #[test]
    fn validation_examples() {
        let k3 = complete(3);
        assert_eq!(k3_anti().len(), 6);
        assert_eq!(
            validate_double_trace(&k3, &[0, 1, 2]),
            Err(TraceError::WrongLength {
                expected: 6,
                found: 3
            })
        );
        assert_eq!(
            validate_double_trace(&k3, &[0, 1, 0, 1, 2, 0]),
            Err(TraceError::WrongMultiplicity {
                edge: Edge::new(0, 1),
                count: 3
            })
        );
        assert_eq!(
            validate_double_trace(&k3, &[0, 1, 2, 2, 1, 0]),
            Err(TraceError::NonAdjacentStep {
                index: 2,
                from: 2,
                to: 2
            })
        );
        assert_eq!(
            validate_double_trace(&k3, &[0, 1, 2, 0, 1, 9]),
            Err(TraceError::UnknownVertex(9))
        );
    }

    #[test]
    fn stored_in_smallest_rotation() {
        let w = validate_double_trace(&complete(3), &[2, 0, 1, 2, 0, 1]).unwrap();
        assert_eq!(w.sequence(), &[0, 1, 2, 0, 1, 2]);
        assert_eq!(canonical_rotation(&[3, 1, 2, 1, 1]), vec![1, 1, 3, 1, 2]);
    }

    #[test]
    fn directions() {
        assert!(direction_profile(&k3_par())
            .values()
            .all(|&d| d == Direction::Parallel));
        assert!(direction_profile(&k3_anti())
            .values()
            .all(|&d| d == Direction::Antiparallel));
        let edge = validate_double_trace(&path(2), &[0, 1]).unwrap();
        assert_eq!(
            direction_profile(&edge).get(&Edge::new(0, 1)),
            Some(&Direction::Antiparallel)
        );
    }

    #[test]
    fn transition_graphs() {
        let t = transition_graph_at(&k3_anti(), 0).unwrap();
        assert_eq!(t.links, vec![(1, 1), (2, 2)]);
        assert_eq!(t.components(), vec![set(&[1]), set(&[2])]);

        let t = transition_graph_at(&k3_par(), 1).unwrap();
        assert_eq!(t.links, vec![(0, 2), (0, 2)]);
        assert_eq!(t.components(), vec![set(&[0, 2])]);

        let edge = validate_double_trace(&path(2), &[0, 1]).unwrap();
        let t = transition_graph_at(&edge, 0).unwrap();
        assert_eq!(t.links, vec![(1, 1)]);
        assert_eq!(t.components(), vec![set(&[1])]);

        assert_eq!(
            transition_graph_at(&k3_anti(), 7),
            Err(TraceError::UnknownVertex(7))
        );
    }

    #[test]
    fn repetitions_and_stability() {
        let anti = repetition_analysis(&k3_anti(), RepetitionMode::BruteForce);
        assert_eq!(anti.minimal[&0], vec![set(&[1]), set(&[2])]);
        assert_eq!(anti.stability_order, 0);
        assert!(!anti.strong);
        assert!(is_repetition(&k3_anti(), 0, &set(&[1])));

        let par = repetition_analysis(&k3_par(), RepetitionMode::BruteForce);
        assert!(par.minimal.values().all(|c| c.len() == 1));
        assert_eq!(par.stability_order, 1);
        assert!(par.strong);

        // The one-directional reading accepts {1} at 0 in the parallel trace
        // (the walk never enters 0 from 1), so only the antiparallel trace
        // has both readings agree.
        assert!(directional_readings_agree(&k3_anti()));
        assert!(!directional_readings_agree(&k3_par()));
        assert!(is_closed_under_entry(&k3_par(), 0, &set(&[1])));

        for w in [k3_anti(), k3_par()] {
            for v in 0..3 {
                assert!(is_repetition(&w, v, &BTreeSet::new()));
                assert!(is_repetition(&w, v, w.host().neighbors(v).unwrap()));
            }
            assert_eq!(
                repetition_analysis(&w, RepetitionMode::BruteForce),
                repetition_analysis(&w, RepetitionMode::Components)
            );
        }
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify_trace(&k3_par()),
            TraceClass {
                is_double: true,
                direction: Direction::Parallel,
                stability_order: 1,
                strong: true
            }
        );
        assert_eq!(
            classify_trace(&k3_anti()),
            TraceClass {
                is_double: true,
                direction: Direction::Antiparallel,
                stability_order: 0,
                strong: false
            }
        );
        let spec = TraceSpec::new(TraceKind::Stable(1), DirectionReq::Any).unwrap();
        assert!(classify_trace(&k3_par()).satisfies(&spec));
        assert!(!classify_trace(&k3_anti()).satisfies(&spec));
    }
}
