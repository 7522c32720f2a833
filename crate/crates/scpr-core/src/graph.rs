//! The playing field: undirected, finite, simple, connected graphs.
//!
//! Vertices are dense 1-based identifiers `1..=n`, which keeps every
//! state-indexing scheme in the crate a flat-array computation.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// 1-based vertex identifier.
pub type Vertex = u32;

/// Sorted set of distinct vertices.
///
/// Closed neighborhoods, legal move sets and matrix-game action labels are
/// all `VertexSet`s; the ascending order fixes deterministic tie-breaking
/// everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    /// Builds from arbitrary input, sorting and deduplicating.
    pub fn from_vec(mut v: Vec<Vertex>) -> Self {
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: cannot parse `{text}`: {reason}")]
    Parse {
        line: usize,
        text: String,
        reason: String,
    },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: Vertex },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("line {line}: vertex {v} out of range 1..={n}")]
    VertexOutOfRange { line: usize, v: Vertex, n: u32 },
    #[error("graph is disconnected: vertex {unreached} is unreachable from vertex 1")]
    Disconnected { unreached: Vertex },
    #[error("edge count mismatch: header declares {declared}, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("vertex {v} out of range 1..={n}")]
    QueryOutOfRange { v: Vertex, n: u32 },
}

/// Undirected simple connected graph on vertices `1..=n`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: u32,
    edges: Vec<(Vertex, Vertex)>,
    closed: Vec<VertexSet>,
}

impl Graph {
    /// Validates and builds a graph from an edge list.
    ///
    /// Edges are `{u, v}` pairs in either orientation. `line_of` maps an edge
    /// index to the source line it came from, for error reporting; pass the
    /// identity when there is no source document.
    pub fn from_edges(
        n: u32,
        edges: &[(Vertex, Vertex)],
        line_of: impl Fn(usize) -> usize,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Parse {
                line: 0,
                text: String::new(),
                reason: "vertex count must be positive".into(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            let line = line_of(i);
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(GraphError::VertexOutOfRange { line, v: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line, v: u });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge {
                    line,
                    u: key.0,
                    v: key.1,
                });
            }
            normalized.push(key);
        }

        let mut closed: Vec<Vec<Vertex>> = (1..=n).map(|v| vec![v]).collect();
        for &(u, v) in &normalized {
            closed[(u - 1) as usize].push(v);
            closed[(v - 1) as usize].push(u);
        }
        let closed: Vec<VertexSet> = closed.into_iter().map(VertexSet::from_vec).collect();

        let g = Graph {
            n,
            edges: normalized,
            closed,
        };
        if let Some(unreached) = g.first_unreachable() {
            return Err(GraphError::Disconnected { unreached });
        }
        Ok(g)
    }

    /// Parses the edge-list text format.
    ///
    /// The first non-comment line is `graph <n> <m>`, followed by exactly `m`
    /// lines `e <u> <v>`. Lines starting with `#` and blank lines are
    /// ignored. Fields are whitespace-separated decimal integers.
    pub fn load(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<(u32, usize)> = None;
        let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
        let mut edge_lines: Vec<usize> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap();
            let parse_err = |reason: &str| GraphError::Parse {
                line: line_no,
                text: line.to_string(),
                reason: reason.to_string(),
            };
            match tag {
                "graph" if header.is_none() => {
                    let n: u32 = fields
                        .next()
                        .ok_or_else(|| parse_err("missing vertex count"))?
                        .parse()
                        .map_err(|_| parse_err("vertex count is not an integer"))?;
                    let m: usize = fields
                        .next()
                        .ok_or_else(|| parse_err("missing edge count"))?
                        .parse()
                        .map_err(|_| parse_err("edge count is not an integer"))?;
                    if fields.next().is_some() {
                        return Err(parse_err("trailing fields after header"));
                    }
                    header = Some((n, m));
                }
                "graph" => return Err(parse_err("duplicate header line")),
                "e" => {
                    if header.is_none() {
                        return Err(parse_err("edge before `graph <n> <m>` header"));
                    }
                    let u: Vertex = fields
                        .next()
                        .ok_or_else(|| parse_err("missing first endpoint"))?
                        .parse()
                        .map_err(|_| parse_err("endpoint is not an integer"))?;
                    let v: Vertex = fields
                        .next()
                        .ok_or_else(|| parse_err("missing second endpoint"))?
                        .parse()
                        .map_err(|_| parse_err("endpoint is not an integer"))?;
                    if fields.next().is_some() {
                        return Err(parse_err("trailing fields after edge"));
                    }
                    edges.push((u, v));
                    edge_lines.push(line_no);
                }
                _ => return Err(parse_err("unknown line tag")),
            }
        }

        let (n, m) = header.ok_or_else(|| GraphError::Parse {
            line: 0,
            text: String::new(),
            reason: "missing `graph <n> <m>` header".into(),
        })?;
        if edges.len() != m {
            return Err(GraphError::EdgeCountMismatch {
                declared: m,
                found: edges.len(),
            });
        }
        Graph::from_edges(n, &edges, |i| edge_lines[i])
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    /// Iterates vertices `1..=n`.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n
    }

    /// Edges as normalized `(min, max)` pairs in insertion order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v == 0 || v > self.n {
            Err(GraphError::QueryOutOfRange { v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Closed neighborhood `N[x] = {x} ∪ {y : {x,y} ∈ E}`, sorted ascending.
    pub fn closed_neighborhood(&self, x: Vertex) -> Result<&VertexSet, GraphError> {
        self.check_vertex(x)?;
        Ok(&self.closed[(x - 1) as usize])
    }

    /// Closed neighborhood without the range check, for validated vertices.
    pub(crate) fn closed_unchecked(&self, x: Vertex) -> &VertexSet {
        &self.closed[(x - 1) as usize]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v
            && u >= 1
            && u <= self.n
            && v >= 1
            && v <= self.n
            && self.closed[(u - 1) as usize].contains(v)
    }

    fn first_unreachable(&self) -> Option<Vertex> {
        let dist = self.bfs_from(1);
        dist.iter()
            .position(|d| *d == u32::MAX)
            .map(|i| (i + 1) as Vertex)
    }

    fn bfs_from(&self, start: Vertex) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n as usize];
        dist[(start - 1) as usize] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let du = dist[(u - 1) as usize];
            for w in self.closed[(u - 1) as usize].iter() {
                let slot = &mut dist[(w - 1) as usize];
                if *slot == u32::MAX {
                    *slot = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest-path distance between `u` and `v`; `0` iff `u == v`.
    pub fn bfs_distance(&self, u: Vertex, v: Vertex) -> Result<u32, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.bfs_from(u)[(v - 1) as usize])
    }

    /// All-pairs shortest-path table, `dist[u-1][v-1]`.
    pub fn distance_table(&self) -> Vec<Vec<u32>> {
        self.vertices().map(|u| self.bfs_from(u)).collect()
    }

    /// Whether one cop suffices against an adversarial robber.
    ///
    /// Decided by dismantling: repeatedly delete any vertex `u` that has a
    /// distinct surviving vertex `v` with `N[u] ⊆ N[v]` in the surviving
    /// induced subgraph; the graph is cop-win iff a single vertex remains.
    pub fn is_cop_win(&self) -> bool {
        let n = self.n as usize;
        let mut alive = vec![true; n];
        let mut remaining = n;
        loop {
            if remaining == 1 {
                return true;
            }
            let mut removed = false;
            'outer: for u in 0..n {
                if !alive[u] {
                    continue;
                }
                for v in 0..n {
                    if u == v || !alive[v] {
                        continue;
                    }
                    if self.dominates(v, u, &alive) {
                        alive[u] = false;
                        remaining -= 1;
                        removed = true;
                        break 'outer;
                    }
                }
            }
            if !removed {
                return false;
            }
        }
    }

    /// `N[u] ⊆ N[v]` within the subgraph induced by `alive` (0-based indices).
    fn dominates(&self, v: usize, u: usize, alive: &[bool]) -> bool {
        self.closed[u]
            .iter()
            .filter(|w| alive[(*w - 1) as usize])
            .all(|w| self.closed[v].contains(w))
    }
}
