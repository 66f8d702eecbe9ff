//! Backtracking search over double traces.
//!
//! The search extends a walk one traversal at a time over the doubled edge
//! multiset. Each edge has two traversal slots; direction requirements
//! restrict which way the second slot may be used. Alongside the walk the
//! engine maintains, per vertex, the partial transition graph as an
//! undoable union-find. A component whose every node already has both of its
//! link endpoints is final, so stability and strongness violations are
//! detected the moment such a component closes.
//!
//! The search is complete: `NotFound` means every double trace of the graph
//! was ruled out. With a node budget the search may instead stop with
//! `BudgetExhausted`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};
use crate::par::Execution;
use crate::walks::{canonical_rotation, classify_trace, validate_double_trace, DoubleTrace};

/// Node budget applied when none is given and the graph has more than
/// [`UNBUDGETED_EDGE_LIMIT`] edges.
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;
pub const UNBUDGETED_EDGE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has no edges, so it has no double trace")]
    NoEdges,
    #[error("stability order must be at least 1")]
    ZeroOrder,
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionReq {
    Any,
    Parallel,
    Antiparallel,
}

impl fmt::Display for DirectionReq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DirectionReq::Any => "any",
            DirectionReq::Parallel => "parallel",
            DirectionReq::Antiparallel => "antiparallel",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Double,
    Stable(usize),
    Strong,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceKind::Double => f.write_str("double"),
            TraceKind::Stable(d) => write!(f, "{d}-stable"),
            TraceKind::Strong => f.write_str("strong"),
        }
    }
}

/// One cell of the trace-kind by direction matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TraceSpec {
    pub kind: TraceKind,
    pub direction: DirectionReq,
}

impl TraceSpec {
    pub fn new(kind: TraceKind, direction: DirectionReq) -> Result<Self, SearchError> {
        if kind == TraceKind::Stable(0) {
            return Err(SearchError::ZeroOrder);
        }
        Ok(TraceSpec { kind, direction })
    }
}

impl fmt::Display for TraceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.direction, self.kind)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(DoubleTrace),
    NotFound,
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn trace(self) -> Option<DoubleTrace> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of search-tree nodes; `None` applies the default policy.
    pub budget: Option<u64>,
    pub execution: Execution,
}

fn effective_budget(g: &Graph, budget: Option<u64>) -> u64 {
    match budget {
        Some(b) => b,
        None if g.edge_count() <= UNBUDGETED_EDGE_LIMIT => u64::MAX,
        None => DEFAULT_NODE_BUDGET,
    }
}

/// Finds a double trace satisfying `spec`, or proves none exists.
pub fn find_trace(
    g: &Graph,
    spec: &TraceSpec,
    budget: Option<u64>,
) -> Result<SearchOutcome, SearchError> {
    find_trace_with(
        g,
        spec,
        SearchOptions {
            budget,
            ..SearchOptions::default()
        },
    )
}

pub fn find_trace_with(
    g: &Graph,
    spec: &TraceSpec,
    opts: SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    let spec = TraceSpec::new(spec.kind, spec.direction)?;
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(SearchError::NoEdges);
    }
    if let TraceKind::Stable(d) = spec.kind {
        // d-stability requires d(v) > d everywhere
        if g.min_degree() <= d {
            return Ok(SearchOutcome::NotFound);
        }
    }
    let engine = Engine::new(g, spec);
    let limit = effective_budget(g, opts.budget);
    let counter = AtomicU64::new(0);
    let root = engine.root_with_first_step();
    let Some(root) = root else {
        return Ok(SearchOutcome::NotFound);
    };
    let frontier = engine.frontier(root, opts.execution, &counter, limit);
    let hit = opts.execution.find_map_first(frontier, |mut st| {
        let mut found = None;
        let flow = engine.dfs(&mut st, &counter, limit, &mut |walk| {
            found = Some(walk.to_vec());
            ControlFlow::Break(())
        });
        match (flow, found) {
            (_, Some(walk)) => Some(Ok(walk)),
            (Stop::Budget, None) => Some(Err(())),
            _ => None,
        }
    });
    match hit {
        Some(Ok(walk)) => {
            let w = engine.to_trace(&walk);
            debug_assert!(classify_trace(&w).satisfies(&spec));
            Ok(SearchOutcome::Found(w))
        }
        Some(Err(())) => Ok(SearchOutcome::BudgetExhausted),
        None if counter.load(Ordering::Relaxed) >= limit => Ok(SearchOutcome::BudgetExhausted),
        None => Ok(SearchOutcome::NotFound),
    }
}

/// All traces satisfying `spec`, one per rotation class, at most `cap` of
/// them, sorted by canonical sequence. Unbudgeted.
pub fn enumerate_traces(
    g: &Graph,
    spec: &TraceSpec,
    cap: usize,
) -> Result<Vec<DoubleTrace>, SearchError> {
    enumerate_traces_with(g, spec, cap, Execution::default())
}

pub fn enumerate_traces_with(
    g: &Graph,
    spec: &TraceSpec,
    cap: usize,
    execution: Execution,
) -> Result<Vec<DoubleTrace>, SearchError> {
    let spec = TraceSpec::new(spec.kind, spec.direction)?;
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(SearchError::NoEdges);
    }
    if cap == 0 {
        return Ok(Vec::new());
    }
    let engine = Engine::new(g, spec);
    let counter = AtomicU64::new(0);
    let frontier = engine.frontier(engine.root(), execution, &counter, u64::MAX);
    // Each branch keeps its first `cap` distinct traces in DFS order; merging
    // in branch order then reproduces the sequential scan.
    let per_branch = execution.map(frontier, |mut st| {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        engine.dfs(&mut st, &counter, u64::MAX, &mut |walk| {
            let canon = canonical_rotation(&engine.ids_of(walk));
            if seen.insert(canon.clone()) {
                order.push(canon);
            }
            if order.len() >= cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        order
    });
    let mut seen = BTreeSet::new();
    for canon in per_branch.into_iter().flatten() {
        if seen.len() >= cap {
            break;
        }
        seen.insert(canon);
    }
    Ok(seen
        .into_iter()
        .map(|seq| validate_double_trace(g, &seq).expect("search emits valid traces"))
        .collect())
}

/// An Euler tour as a cyclic vertex sequence (no repeated end vertex), or
/// `None` when some degree is odd. Hierholzer's algorithm, smallest
/// neighbor first.
pub fn euler_tour(g: &Graph) -> Option<Vec<Vertex>> {
    if !g.is_eulerian() || g.edge_count() == 0 || !g.is_connected().ok()? {
        return None;
    }
    let mut remaining: std::collections::BTreeMap<Vertex, BTreeSet<Vertex>> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).expect("vertex").clone()))
        .collect();
    let start = g.vertices().next()?;
    let mut stack = vec![start];
    let mut circuit = Vec::new();
    while let Some(&top) = stack.last() {
        let next = remaining[&top].iter().next().copied();
        match next {
            Some(w) => {
                remaining.get_mut(&top).expect("vertex").remove(&w);
                remaining.get_mut(&w).expect("vertex").remove(&top);
                stack.push(w);
            }
            None => circuit.push(stack.pop().expect("non-empty")),
        }
    }
    circuit.reverse();
    circuit.pop();
    Some(circuit)
}

/// A parallel double trace, optionally d-stable.
///
/// Traverses one Euler tour twice in the same direction; when that is not
/// d-stable, falls back to the backtracking search restricted to parallel
/// traces. `Ok(None)` iff `g` is not Eulerian or `min_degree <= d`.
pub fn find_parallel_trace(
    g: &Graph,
    d: Option<usize>,
) -> Result<Option<DoubleTrace>, SearchError> {
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(SearchError::NoEdges);
    }
    if d == Some(0) {
        return Err(SearchError::ZeroOrder);
    }
    let Some(tour) = euler_tour(g) else {
        return Ok(None);
    };
    if d.is_some_and(|d| g.min_degree() <= d) {
        return Ok(None);
    }
    let doubled: Vec<Vertex> = tour.iter().chain(&tour).copied().collect();
    let w = validate_double_trace(g, &doubled).expect("a doubled Euler tour is a double trace");
    let Some(d) = d else {
        return Ok(Some(w));
    };
    if classify_trace(&w).stability_order >= d {
        return Ok(Some(w));
    }
    let spec = TraceSpec::new(TraceKind::Stable(d), DirectionReq::Parallel)?;
    match find_trace(g, &spec, None)? {
        SearchOutcome::Found(w) => Ok(Some(w)),
        SearchOutcome::NotFound => Ok(None),
        SearchOutcome::BudgetExhausted => {
            Err(SearchError::BudgetExhausted(effective_budget(g, None)))
        }
    }
}

/// An antiparallel double trace from a depth-first traversal: tree edges
/// are walked down and back up, every other edge is crossed and immediately
/// re-crossed. Neighbors are taken in ascending order.
pub fn dfs_double_trace(g: &Graph) -> Result<DoubleTrace, SearchError> {
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(SearchError::NoEdges);
    }
    let root = g.vertices().next().expect("non-empty");
    let mut used: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    let mut visited = BTreeSet::from([root]);
    let mut walk = vec![root];
    // (vertex, neighbors not yet examined)
    let mut stack: Vec<(Vertex, Vec<Vertex>)> =
        vec![(root, g.neighbors(root)?.iter().rev().copied().collect())];
    while let Some((x, pending)) = stack.last_mut() {
        let x = *x;
        let Some(y) = pending.pop() else {
            stack.pop();
            if let Some((parent, _)) = stack.last() {
                walk.push(*parent);
            }
            continue;
        };
        if !used.insert((x.min(y), x.max(y))) {
            continue;
        }
        walk.push(y);
        if visited.insert(y) {
            stack.push((y, g.neighbors(y)?.iter().rev().copied().collect()));
        } else {
            walk.push(x);
        }
    }
    walk.pop();
    Ok(validate_double_trace(g, &walk).expect("a depth-first traversal is a double trace"))
}

/// A uniformly shuffled Hierholzer run over the doubled edge multiset.
pub fn random_double_trace<R: Rng + ?Sized>(
    g: &Graph,
    rng: &mut R,
) -> Result<DoubleTrace, SearchError> {
    g.require_connected()?;
    if g.edge_count() == 0 {
        return Err(SearchError::NoEdges);
    }
    let ids: Vec<Vertex> = g.vertices().collect();
    let index = |v: Vertex| ids.binary_search(&v).expect("vertex");
    // slot 2k and 2k+1 are the two copies of edge k
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ids.len()];
    for (k, e) in g.edges().enumerate() {
        let (a, b) = (index(e.lo()), index(e.hi()));
        for slot in [2 * k, 2 * k + 1] {
            adj[a].push((b, slot));
            adj[b].push((a, slot));
        }
    }
    for list in &mut adj {
        list.shuffle(rng);
    }
    let mut used = vec![false; 2 * g.edge_count()];
    let mut cursor = vec![0usize; ids.len()];
    let start = rng.gen_range(0..ids.len());
    let mut stack = vec![start];
    let mut circuit = Vec::new();
    while let Some(&top) = stack.last() {
        while cursor[top] < adj[top].len() && used[adj[top][cursor[top]].1] {
            cursor[top] += 1;
        }
        if cursor[top] < adj[top].len() {
            let (w, slot) = adj[top][cursor[top]];
            used[slot] = true;
            stack.push(w);
        } else {
            circuit.push(ids[stack.pop().expect("non-empty")]);
        }
    }
    circuit.pop();
    Ok(validate_double_trace(g, &circuit).expect("Hierholzer yields a closed walk"))
}

// ---------------------------------------------------------------------------
// engine

enum Stop {
    Done,
    Budget,
}

/// Per-vertex union-find over local neighbor slots, undone in LIFO order.
#[derive(Clone, Debug)]
struct LocalDsu {
    parent: Vec<u16>,
    size: Vec<u16>,
    /// At a root: link endpoints still missing in the component.
    open: Vec<u16>,
    /// Total size of components that are already final.
    closed: usize,
}

impl LocalDsu {
    fn new(degree: usize) -> Self {
        LocalDsu {
            parent: (0..degree as u16).collect(),
            size: vec![1; degree],
            open: vec![2; degree],
            closed: 0,
        }
    }

    fn find(&self, mut x: u16) -> u16 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }
}

#[derive(Clone, Copy, Debug)]
enum Undo {
    Use {
        edge: usize,
        first: bool,
    },
    Balance {
        from: usize,
        to: usize,
    },
    Link {
        at: usize,
        ra: u16,
        rb: u16,
        merged: Option<(u16, u16)>,
        closed_add: usize,
    },
    Push,
}

#[derive(Clone, Debug)]
struct State {
    walk: Vec<usize>,
    via: Vec<usize>,
    uses: Vec<u8>,
    tail: Vec<usize>,
    dsu: Vec<LocalDsu>,
    /// Parallel mode: (out minus in, undetermined) over first traversals.
    balance: Vec<(i32, i32)>,
    undo: Vec<Undo>,
    /// Nodes expanded since the last flush to the shared counter.
    pending: u64,
}

struct Engine {
    spec: TraceSpec,
    ids: Vec<Vertex>,
    /// `adj[v]` = (neighbor, edge), ascending neighbor id.
    adj: Vec<Vec<(usize, usize)>>,
    ends: Vec<(usize, usize)>,
    /// Position of the other endpoint in each endpoint's adjacency list.
    slot: Vec<(u16, u16)>,
    steps: usize,
}

const FLUSH_EVERY: u64 = 4096;

impl Engine {
    fn new(g: &Graph, spec: TraceSpec) -> Self {
        let ids: Vec<Vertex> = g.vertices().collect();
        let index = |v: Vertex| ids.binary_search(&v).expect("vertex");
        let ends: Vec<(usize, usize)> = g.edges().map(|e| (index(e.lo()), index(e.hi()))).collect();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ids.len()];
        for (k, &(a, b)) in ends.iter().enumerate() {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut slot = vec![(0u16, 0u16); ends.len()];
        for (v, list) in adj.iter().enumerate() {
            for (pos, &(_, k)) in list.iter().enumerate() {
                if ends[k].0 == v {
                    slot[k].0 = pos as u16;
                } else {
                    slot[k].1 = pos as u16;
                }
            }
        }
        Engine {
            spec,
            ids,
            adj,
            ends,
            slot,
            steps: 2 * g.edge_count(),
        }
    }

    fn local(&self, v: usize, edge: usize) -> u16 {
        if self.ends[edge].0 == v {
            self.slot[edge].0
        } else {
            self.slot[edge].1
        }
    }

    fn ids_of(&self, walk: &[usize]) -> Vec<Vertex> {
        walk.iter().map(|&i| self.ids[i]).collect()
    }

    fn to_trace(&self, walk: &[usize]) -> DoubleTrace {
        let g = Graph::from_edges(self.ends.iter().map(|&(a, b)| (self.ids[a], self.ids[b])))
            .expect("engine graph is simple");
        validate_double_trace(&g, &self.ids_of(walk)).expect("search emits valid traces")
    }

    fn root(&self) -> State {
        let m = self.ends.len();
        State {
            walk: vec![0],
            via: Vec::with_capacity(self.steps),
            uses: vec![0; m],
            tail: vec![usize::MAX; m],
            dsu: self.adj.iter().map(|l| LocalDsu::new(l.len())).collect(),
            balance: self.adj.iter().map(|l| (0, l.len() as i32)).collect(),
            undo: Vec::new(),
            pending: 0,
        }
    }

    /// Root with the first traversal fixed to `v0 -> smallest neighbor`.
    ///
    /// Every trace can be rotated to start with a traversal of that edge,
    /// reversed if needed; reversal changes neither direction labels nor
    /// transition links.
    fn root_with_first_step(&self) -> Option<State> {
        let mut st = self.root();
        let (y, e) = self.adj[0][0];
        self.try_step(&mut st, y, e).then(|| {
            st.undo.clear();
            st
        })
    }

    fn complete(&self, st: &State) -> bool {
        st.via.len() == self.steps
    }

    /// Splits the search below `st` into independent prefixes for parallel
    /// execution. Prefix order matches sequential DFS order.
    fn frontier(&self, st: State, exec: Execution, counter: &AtomicU64, limit: u64) -> Vec<State> {
        let mut level = vec![st];
        if !exec.is_parallel() {
            return level;
        }
        let want = 8 * std::thread::available_parallelism().map_or(4, |n| n.get());
        for _ in 0..6 {
            if level.len() >= want || level.iter().all(|s| self.complete(s)) {
                break;
            }
            let mut next = Vec::new();
            for mut s in level {
                if self.complete(&s) {
                    next.push(s);
                    continue;
                }
                let x = *s.walk.last().expect("non-empty walk");
                for &(y, e) in &self.adj[x] {
                    if counter.fetch_add(1, Ordering::Relaxed) >= limit {
                        return Vec::new();
                    }
                    let mark = s.undo.len();
                    if self.try_step(&mut s, y, e) {
                        let mut child = s.clone();
                        child.undo.clear();
                        next.push(child);
                        self.rollback(&mut s, mark);
                    }
                }
            }
            level = next;
        }
        level
    }

    fn dfs(
        &self,
        st: &mut State,
        counter: &AtomicU64,
        limit: u64,
        sink: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> Stop {
        let chunk = (limit / 64).clamp(1, FLUSH_EVERY);
        let flow = self.dfs_inner(st, counter, limit, chunk, sink);
        counter.fetch_add(st.pending, Ordering::Relaxed);
        st.pending = 0;
        match flow {
            ControlFlow::Continue(()) => Stop::Done,
            ControlFlow::Break(stop) => stop,
        }
    }

    fn dfs_inner(
        &self,
        st: &mut State,
        counter: &AtomicU64,
        limit: u64,
        chunk: u64,
        sink: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<Stop> {
        if self.complete(st) {
            let walk = &st.walk[..self.steps];
            return match sink(walk) {
                ControlFlow::Continue(()) => ControlFlow::Continue(()),
                ControlFlow::Break(()) => ControlFlow::Break(Stop::Done),
            };
        }
        let x = *st.walk.last().expect("non-empty walk");
        for &(y, e) in &self.adj[x] {
            st.pending += 1;
            if st.pending == chunk {
                st.pending = 0;
                if counter.fetch_add(chunk, Ordering::Relaxed) + chunk > limit {
                    return ControlFlow::Break(Stop::Budget);
                }
            }
            let mark = st.undo.len();
            if self.try_step(st, y, e) {
                let flow = self.dfs_inner(st, counter, limit, chunk, sink);
                self.rollback(st, mark);
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Traverses `x -> y` along `e` if allowed; on a pruned or illegal step
    /// the state is left unchanged and `false` is returned.
    fn try_step(&self, st: &mut State, y: usize, e: usize) -> bool {
        let x = *st.walk.last().expect("non-empty walk");
        match st.uses[e] {
            0 => {}
            1 => {
                let ok = match self.spec.direction {
                    DirectionReq::Any => true,
                    DirectionReq::Parallel => st.tail[e] == x,
                    DirectionReq::Antiparallel => st.tail[e] == y,
                };
                if !ok {
                    return false;
                }
            }
            _ => return false,
        }
        let mark = st.undo.len();
        let first = st.uses[e] == 0;
        st.uses[e] += 1;
        if first {
            st.tail[e] = x;
        }
        st.undo.push(Undo::Use { edge: e, first });
        if first && self.spec.direction == DirectionReq::Parallel {
            st.balance[x].0 += 1;
            st.balance[x].1 -= 1;
            st.balance[y].0 -= 1;
            st.balance[y].1 -= 1;
            st.undo.push(Undo::Balance { from: x, to: y });
            if !balance_feasible(st.balance[x]) || !balance_feasible(st.balance[y]) {
                self.rollback(st, mark);
                return false;
            }
        }
        if let Some(&arrived) = st.via.last() {
            if !self.link(st, x, self.local(x, arrived), self.local(x, e)) {
                self.rollback(st, mark);
                return false;
            }
        }
        st.walk.push(y);
        st.via.push(e);
        st.undo.push(Undo::Push);
        if self.complete(st) {
            debug_assert_eq!(y, 0, "a walk using every slot closes at its start");
            let first_edge = st.via[0];
            if !self.link(st, y, self.local(y, e), self.local(y, first_edge)) {
                self.rollback(st, mark);
                return false;
            }
        }
        true
    }

    /// Adds the transition link `{a, b}` at `v`; returns `false` if this
    /// closes a component that the spec forbids.
    fn link(&self, st: &mut State, v: usize, a: u16, b: u16) -> bool {
        let dsu = &mut st.dsu[v];
        let (ra, rb) = (dsu.find(a), dsu.find(b));
        dsu.open[ra as usize] -= 1;
        dsu.open[rb as usize] -= 1;
        let mut merged = None;
        let mut root = ra;
        if ra != rb {
            let (small, large) = if dsu.size[ra as usize] < dsu.size[rb as usize] {
                (ra, rb)
            } else {
                (rb, ra)
            };
            dsu.parent[small as usize] = large;
            dsu.size[large as usize] += dsu.size[small as usize];
            dsu.open[large as usize] += dsu.open[small as usize];
            merged = Some((small, large));
            root = large;
        }
        let mut closed_add = 0;
        let mut ok = true;
        if dsu.open[root as usize] == 0 {
            let size = dsu.size[root as usize] as usize;
            closed_add = size;
            dsu.closed += size;
            let degree = dsu.parent.len();
            ok = match self.spec.kind {
                TraceKind::Double => true,
                TraceKind::Strong => size == degree,
                TraceKind::Stable(d) => {
                    // the unclosed rest is a union of future components
                    let rest = degree - dsu.closed;
                    size > d && (rest == 0 || rest > d)
                }
            };
        }
        st.undo.push(Undo::Link {
            at: v,
            ra,
            rb,
            merged,
            closed_add,
        });
        ok
    }

    fn rollback(&self, st: &mut State, mark: usize) {
        while st.undo.len() > mark {
            match st.undo.pop().expect("above mark") {
                Undo::Use { edge, first } => {
                    st.uses[edge] -= 1;
                    if first {
                        st.tail[edge] = usize::MAX;
                    }
                }
                Undo::Balance { from, to } => {
                    st.balance[from].0 -= 1;
                    st.balance[from].1 += 1;
                    st.balance[to].0 += 1;
                    st.balance[to].1 += 1;
                }
                Undo::Link {
                    at,
                    ra,
                    rb,
                    merged,
                    closed_add,
                } => {
                    let dsu = &mut st.dsu[at];
                    dsu.closed -= closed_add;
                    if let Some((small, large)) = merged {
                        dsu.size[large as usize] -= dsu.size[small as usize];
                        dsu.open[large as usize] -= dsu.open[small as usize];
                        dsu.parent[small as usize] = small;
                    }
                    dsu.open[ra as usize] += 1;
                    dsu.open[rb as usize] += 1;
                }
                Undo::Push => {
                    st.walk.pop();
                    st.via.pop();
                }
            }
        }
    }
}

/// In a parallel trace every vertex ends with as many out-oriented as
/// in-oriented edges.
fn balance_feasible((diff, undetermined): (i32, i32)) -> bool {
    diff.abs() <= undetermined && (diff - undetermined) % 2 == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, cycle, path};
    use crate::walks::{classify_trace, Direction};

    fn spec(kind: TraceKind, direction: DirectionReq) -> TraceSpec {
        TraceSpec::new(kind, direction).unwrap()
    }

    #[test]
    fn zero_order_rejected() {
        assert_eq!(
            TraceSpec::new(TraceKind::Stable(0), DirectionReq::Any),
            Err(SearchError::ZeroOrder)
        );
    }

    #[test]
    fn k3_cells() {
        let k3 = complete(3);
        let w = find_trace(&k3, &spec(TraceKind::Double, DirectionReq::Any), None)
            .unwrap()
            .trace()
            .unwrap();
        assert_eq!(w.len(), 6);
        let w = find_trace(
            &k3,
            &spec(TraceKind::Double, DirectionReq::Antiparallel),
            None,
        )
        .unwrap()
        .trace()
        .unwrap();
        assert_eq!(classify_trace(&w).direction, Direction::Antiparallel);
    }

    #[test]
    fn k4_refutations() {
        let k4 = complete(4);
        assert_eq!(
            find_trace(
                &k4,
                &spec(TraceKind::Stable(1), DirectionReq::Antiparallel),
                None
            ),
            Ok(SearchOutcome::NotFound)
        );
        assert_eq!(
            find_trace(&k4, &spec(TraceKind::Double, DirectionReq::Parallel), None),
            Ok(SearchOutcome::NotFound)
        );
    }

    #[test]
    fn parallel_constructions() {
        let w = find_parallel_trace(&complete(3), None).unwrap().unwrap();
        assert_eq!(w.sequence(), &[0, 1, 2, 0, 1, 2]);
        let class = classify_trace(&w);
        assert_eq!(class.direction, Direction::Parallel);
        assert!(class.strong);
        assert_eq!(find_parallel_trace(&complete(4), None), Ok(None));
        let w = find_parallel_trace(&complete(5), Some(3)).unwrap().unwrap();
        let class = classify_trace(&w);
        assert_eq!(class.direction, Direction::Parallel);
        assert!(class.stability_order >= 3);
        assert_eq!(find_parallel_trace(&complete(5), Some(4)), Ok(None));
    }

    #[test]
    fn enumeration_examples() {
        let k3 = complete(3);
        let all = enumerate_traces(&k3, &spec(TraceKind::Double, DirectionReq::Any), 100).unwrap();
        let seqs: Vec<&[Vertex]> = all.iter().map(|w| w.sequence()).collect();
        assert!(seqs.contains(&&[0, 1, 2, 0, 1, 2][..]));
        assert!(seqs.contains(&&[0, 1, 2, 0, 2, 1][..]));
        let mut sorted = seqs.clone();
        sorted.sort();
        assert_eq!(seqs, sorted);

        let edge =
            enumerate_traces(&path(2), &spec(TraceKind::Double, DirectionReq::Any), 10).unwrap();
        assert_eq!(edge.len(), 1);
        assert_eq!(edge[0].sequence(), &[0, 1]);

        let none = enumerate_traces(
            &complete(4),
            &spec(TraceKind::Stable(1), DirectionReq::Antiparallel),
            10,
        )
        .unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        for g in [complete(4), cycle(5), complete(3)] {
            for s in [
                spec(TraceKind::Double, DirectionReq::Any),
                spec(TraceKind::Strong, DirectionReq::Any),
                spec(TraceKind::Double, DirectionReq::Antiparallel),
            ] {
                let a = enumerate_traces_with(&g, &s, 50, Execution::Sequential).unwrap();
                let b = enumerate_traces_with(&g, &s, 50, Execution::Parallel).unwrap();
                assert_eq!(a, b);
                let opts = |execution| SearchOptions {
                    budget: None,
                    execution,
                };
                assert_eq!(
                    find_trace_with(&g, &s, opts(Execution::Sequential)),
                    find_trace_with(&g, &s, opts(Execution::Parallel))
                );
            }
        }
    }

    #[test]
    fn budget_is_reported() {
        let g = complete(6);
        let s = spec(TraceKind::Strong, DirectionReq::Antiparallel);
        let opts = SearchOptions {
            budget: Some(10),
            execution: Execution::Sequential,
        };
        assert_eq!(
            find_trace_with(&g, &s, opts),
            Ok(SearchOutcome::BudgetExhausted)
        );
    }

    #[test]
    fn dfs_traces_are_antiparallel() {
        for g in [complete(4), cycle(5), path(2), complete(6)] {
            let w = dfs_double_trace(&g).unwrap();
            assert_eq!(classify_trace(&w).direction, Direction::Antiparallel);
        }
        assert_eq!(dfs_double_trace(&path(2)).unwrap().sequence(), &[0, 1]);
    }

    #[test]
    fn euler_and_random() {
        use rand::SeedableRng;
        assert_eq!(euler_tour(&complete(3)), Some(vec![0, 1, 2]));
        assert_eq!(euler_tour(&complete(4)), None);
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let w = random_double_trace(&complete(5), &mut rng).unwrap();
            assert_eq!(w.len(), 20);
        }
    }

    #[test]
    fn errors() {
        let two = Graph::from_edges([(0, 1), (2, 3)]).unwrap();
        let s = spec(TraceKind::Double, DirectionReq::Any);
        assert_eq!(
            find_trace(&two, &s, None),
            Err(SearchError::Graph(GraphError::Disconnected))
        );
        let single = Graph::with_vertices([0], []).unwrap();
        assert_eq!(find_trace(&single, &s, None), Err(SearchError::NoEdges));
    }
}
