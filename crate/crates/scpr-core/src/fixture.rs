//! Bundled demonstration instance.
//!
//! A six-vertex tree with a deterministic, state-dependent (non-oblivious)
//! robber law under which neither cop has a deterministic optimal strategy:
//! from the start position the one-turn game is a matching-pennies matrix
//! and both cops must flip fair coins. The `repro` CLI command replays it.

use crate::graph::{Graph, Vertex};
use crate::strategy::RobberStrategy;

/// Edge-list document for the demo graph.
pub const GRAPH_TEXT: &str = "graph 6 5
e 1 4
e 2 3
e 3 4
e 4 5
e 5 6
";

/// Robber law document for the demo. Every unlisted state stays in place.
pub const ROBBER_TEXT: &str = "robber state
m 2 6 1 4
m 2 6 4 3
m 2 5 4 5
m 3 6 4 5
m 3 5 4 3
";

pub struct Counterexample {
    pub graph: Graph,
    pub robber: RobberStrategy,
    /// Joint start position (x1, x2, x3).
    pub start: (Vertex, Vertex, Vertex),
    /// Presentation order for the first cop's moves at the start.
    pub row_moves: [Vertex; 2],
    /// Presentation order for the second cop's moves at the start (stay
    /// listed first).
    pub col_moves: [Vertex; 2],
}

pub fn counterexample() -> Counterexample {
    let graph = Graph::load(GRAPH_TEXT).expect("bundled graph is valid");
    let robber = RobberStrategy::load(ROBBER_TEXT, &graph).expect("bundled robber law is valid");
    Counterexample {
        graph,
        robber,
        start: (2, 6, 1),
        row_moves: [2, 3],
        col_moves: [6, 5],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_builds() {
        let fx = counterexample();
        assert_eq!(fx.graph.vertex_count(), 6);
        assert!(fx.graph.is_cop_win());
        assert!(!fx.robber.is_oblivious_deterministic());
    }
}
