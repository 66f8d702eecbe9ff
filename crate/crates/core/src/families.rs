//! Named graphs, exhaustive enumeration of small connected graphs up to
//! isomorphism, and random generators used by the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Graph, Vertex};

/// Complete graph on `0..n`.
pub fn complete(n: Vertex) -> Graph {
    let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
    Graph::with_vertices(0..n, edges).expect("simple by construction")
}

/// Cycle `0-1-...-(n-1)-0`, `n >= 3`.
pub fn cycle(n: Vertex) -> Graph {
    assert!(n >= 3);
    Graph::from_edges((0..n).map(|i| (i, (i + 1) % n))).expect("simple by construction")
}

/// Path on `n` vertices `0-1-...-(n-1)`.
pub fn path(n: Vertex) -> Graph {
    Graph::with_vertices(0..n, (1..n).map(|i| (i - 1, i))).expect("simple by construction")
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: Vertex) -> Graph {
    Graph::from_edges((1..=leaves).map(|i| (0, i))).expect("simple by construction")
}

/// The 3-cube Q3 on `0..8`; vertices adjacent iff their labels differ in one bit.
pub fn cube() -> Graph {
    let edges = (0..8u32).flat_map(|a| {
        (0..3)
            .map(move |bit| (a, a ^ (1 << bit)))
            .filter(|&(a, b)| a < b)
    });
    Graph::from_edges(edges).expect("simple by construction")
}

/// Two triangles sharing vertex 0.
pub fn bowtie() -> Graph {
    Graph::from_edges([(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).expect("simple")
}

/// Complete bipartite graph with parts `0..a` and `a..a+b`.
pub fn complete_bipartite(a: Vertex, b: Vertex) -> Graph {
    let edges = (0..a).flat_map(|x| (a..a + b).map(move |y| (x, y)));
    Graph::from_edges(edges).expect("simple by construction")
}

/// The Petersen graph.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(edges).expect("simple by construction")
}

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn mask_connected(n: usize, pairs: &[(usize, usize)], mask: u32) -> bool {
    let mut reach = 1u32;
    loop {
        let mut next = reach;
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                if reach >> a & 1 == 1 {
                    next |= 1 << b;
                }
                if reach >> b & 1 == 1 {
                    next |= 1 << a;
                }
            }
        }
        if next == reach {
            return reach == (1u32 << n) - 1;
        }
        reach = next;
    }
}

/// Every connected simple graph on `n` vertices, one per isomorphism class,
/// labeled `0..n`. Intended for `n <= 7`.
///
/// A labeled graph is kept iff its edge bitmask is the minimum over all
/// vertex permutations.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=7).contains(&n), "enumeration is meant for small n");
    let pairs = pair_index(n);
    let mut slot = vec![vec![0usize; n]; n];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        slot[a][b] = k;
        slot[b][a] = k;
    }
    let perms = permutations(n);
    // For each permutation, where each pair-bit moves to.
    let moves: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|&(a, b)| slot[p[a]][p[b]]).collect())
        .collect();
    let is_canonical = |mask: u32| {
        moves.iter().all(|mv| {
            let mut image = 0u32;
            for (k, &to) in mv.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    image |= 1 << to;
                }
            }
            image >= mask
        })
    };
    (0..1u32 << pairs.len())
        .filter(|&mask| mask_connected(n, &pairs, mask) && is_canonical(mask))
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &(a, b))| (a as Vertex, b as Vertex));
            Graph::with_vertices(0..n as Vertex, edges).expect("simple by construction")
        })
        .collect()
}

/// All connected graphs with `lo..=hi` vertices, up to isomorphism.
pub fn connected_graphs_between(lo: usize, hi: usize) -> Vec<Graph> {
    (lo..=hi).flat_map(connected_graphs).collect()
}

/// A random connected graph on `0..n`: a random tree plus each remaining pair
/// with probability `p`, skipping pairs that would push a degree past
/// `max_degree`.
pub fn random_connected<R: Rng + ?Sized>(
    n: Vertex,
    p: f64,
    max_degree: usize,
    rng: &mut R,
) -> Graph {
    assert!(n >= 1 && max_degree >= 2);
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let mut degree = vec![0usize; n as usize];
    let mut edges = Vec::new();
    for i in 1..order.len() {
        // attach to a random earlier vertex that still has room; the most
        // recent one always has degree <= 1 here
        let candidates: Vec<Vertex> = order[..i]
            .iter()
            .copied()
            .filter(|&u| degree[u as usize] < max_degree)
            .collect();
        let u = *candidates.choose(rng).unwrap_or(&order[i - 1]);
        let v = order[i];
        degree[u as usize] += 1;
        degree[v as usize] += 1;
        edges.push((u.min(v), u.max(v)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if edges.contains(&(a, b)) {
                continue;
            }
            if degree[a as usize] < max_degree && degree[b as usize] < max_degree && rng.gen_bool(p)
            {
                degree[a as usize] += 1;
                degree[b as usize] += 1;
                edges.push((a, b));
            }
        }
    }
    Graph::with_vertices(0..n, edges).expect("simple by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequence() {
        // Connected graphs up to isomorphism: 1, 1, 2, 6, 21, 112.
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn named_graphs() {
        assert_eq!(complete(5).edge_count(), 10);
        assert_eq!(cube().edge_count(), 12);
        assert_eq!(cube().min_degree(), 3);
        assert_eq!(petersen().edge_count(), 15);
        assert_eq!(petersen().max_degree(), 3);
        assert_eq!(complete_bipartite(3, 3).edge_count(), 9);
        assert_eq!(bowtie().degree(0), 4);
        assert_eq!(star(4).betti_number(), Ok(0));
    }

    #[test]
    fn random_graphs_are_connected_and_bounded() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..9);
            let g = random_connected(n, 0.4, 4, &mut rng);
            assert!(g.is_connected().unwrap());
            assert!(g.max_degree() <= 4);
            assert_eq!(g.vertex_count(), n as usize);
        }
    }
}
