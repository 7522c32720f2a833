//! Instance generators for tests, benchmarks and exhaustive sweeps.
//!
//! Everything here is deterministic given the caller's RNG, so seeded suites
//! reproduce exactly.

use std::collections::BTreeMap;

use crate::graph::{Graph, Vertex};
use crate::rng::SplitMix64;
use crate::strategy::{RobberStrategy, StateKey};

/// Every labeled connected graph on `n` vertices, by enumeration of all edge
/// subsets. Feasible for `n` up to 6 or so (the count at 6 is 26704).
pub fn connected_graphs(n: u32) -> Vec<Graph> {
    let pairs: Vec<(Vertex, Vertex)> = (1..=n)
        .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let edges: Vec<(Vertex, Vertex)> = pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if let Ok(g) = Graph::from_edges(n, &edges, |i| i) {
            out.push(g);
        }
    }
    out
}

/// Random connected graph: a random spanning tree plus each remaining pair
/// independently with probability `extra_edge_prob`.
pub fn random_connected_graph(n: u32, extra_edge_prob: f64, rng: &mut SplitMix64) -> Graph {
    assert!(n >= 1);
    let mut order: Vec<Vertex> = (1..=n).collect();
    for i in (1..order.len()).rev() {
        let j = rng.next_below(i + 1);
        order.swap(i, j);
    }
    let mut edges = Vec::new();
    for i in 1..order.len() {
        let parent = order[rng.next_below(i)];
        edges.push((parent, order[i]));
    }
    let mut present: std::collections::BTreeSet<(Vertex, Vertex)> = edges
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    for u in 1..=n {
        for v in u + 1..=n {
            if !present.contains(&(u, v)) && rng.next_f64() < extra_edge_prob {
                present.insert((u, v));
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges, |i| i).expect("spanning tree keeps the graph connected")
}

/// Oblivious deterministic law: every vertex maps to a uniformly random
/// member of its closed neighborhood.
pub fn random_oblivious(g: &Graph, rng: &mut SplitMix64) -> RobberStrategy {
    let mut map = BTreeMap::new();
    for v in g.vertices() {
        let nbhd = g.closed_unchecked(v);
        let dest = nbhd.as_slice()[rng.next_below(nbhd.len())];
        if dest != v {
            map.insert(v, dest);
        }
    }
    RobberStrategy::oblivious(map, g).expect("destinations drawn from closed neighborhoods")
}

/// State-deterministic law listing each joint position with probability
/// `listed_prob`; listed positions move to a random legal destination,
/// everything else stays.
pub fn random_state_deterministic(
    g: &Graph,
    rng: &mut SplitMix64,
    listed_prob: f64,
) -> RobberStrategy {
    let mut map: BTreeMap<StateKey, Vertex> = BTreeMap::new();
    for_each_state(g, |x1, x2, x3| {
        if rng.next_f64() < listed_prob {
            let nbhd = g.closed_unchecked(x3);
            let dest = nbhd.as_slice()[rng.next_below(nbhd.len())];
            if dest != x3 {
                map.insert((x1, x2, x3), dest);
            }
        }
    });
    RobberStrategy::state_deterministic(map, g).expect("destinations are legal")
}

/// Stochastic law with a random distribution over the closed neighborhood at
/// each listed joint position.
pub fn random_markov(g: &Graph, rng: &mut SplitMix64, listed_prob: f64) -> RobberStrategy {
    let mut map: BTreeMap<StateKey, Vec<(Vertex, f64)>> = BTreeMap::new();
    for_each_state(g, |x1, x2, x3| {
        if rng.next_f64() < listed_prob {
            let nbhd = g.closed_unchecked(x3);
            let raw: Vec<f64> = (0..nbhd.len()).map(|_| rng.next_f64() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let entries: Vec<(Vertex, f64)> = nbhd
                .iter()
                .zip(&raw)
                .map(|(v, w)| (v, w / total))
                .collect();
            map.insert((x1, x2, x3), entries);
        }
    });
    RobberStrategy::stationary_markov(map, g).expect("normalized distributions are legal")
}

fn for_each_state(g: &Graph, mut f: impl FnMut(Vertex, Vertex, Vertex)) {
    for x1 in g.vertices() {
        for x2 in g.vertices() {
            for x3 in g.vertices() {
                f(x1, x2, x3);
            }
        }
    }
}
