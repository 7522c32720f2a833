//! Game machinery, solvers and simulators for the *selfish cops and passive
//! robber* (SCPR) pursuit game on finite graphs.
//!
//! Two cop players, each controlling one token, compete to be the first to
//! capture a robber token whose movement law is fixed in advance and known to
//! both cops. The game is zero-sum *between the cops*: the first player scores
//! 1 when their token reaches the robber first, 0 otherwise. This crate
//! provides:
//!
//! * [`graph`] — the playing field: undirected simple connected graphs with
//!   closed-neighborhood, distance and cop-win queries;
//! * [`strategy`] — robber movement laws and cop policies, with text formats
//!   for both;
//! * [`matrix_game`] — exact-value solving of finite zero-sum matrix games;
//! * [`engine`] — state spaces, legal actions, payoffs and transition kernels
//!   for the sequential and concurrent game variants;
//! * [`solver`] — value iteration for both variants, the capture-time dynamic
//!   program for oblivious deterministic robbers, best-response and policy
//!   evaluation;
//! * [`simulate`] — reproducible Monte Carlo rollouts under given policies;
//! * [`instances`] — graph and strategy generators for tests and benchmarks;
//! * [`fixture`] — a bundled six-vertex instance where a deterministic robber
//!   forces both cops into randomized optimal play.
//!
//! With the default `parallel` feature, value-iteration sweeps and Monte Carlo
//! episodes run on rayon; results are bit-identical to the sequential
//! fallback (`--no-default-features`) because every parallel unit of work is
//! an independent pure function aggregated in index order.
//!
//! ```
//! use scpr_core::engine::ConcSpace;
//! use scpr_core::solver::solve_concurrent;
//! use scpr_core::{ConcState, Graph, RobberStrategy, SolveParams};
//!
//! let g = Graph::load("graph 3 2\ne 1 2\ne 2 3")?;
//! let robber = RobberStrategy::identity(); // never moves
//! let report = solve_concurrent(&g, &robber, &SolveParams::default());
//! let space = ConcSpace::new(&g);
//! // Both cops one step from the robber: the first cop wins the tie.
//! let v = report.values.value(space.index(&ConcState::position(1, 3, 2)));
//! assert_eq!(v, 1.0);
//! # Ok::<(), scpr_core::graph::GraphError>(())
//! ```

pub mod engine;
mod exec;
pub mod fixture;
pub mod graph;
pub mod instances;
pub mod matrix_game;
pub mod rng;
pub mod simulate;
pub mod solver;
pub mod strategy;

pub use engine::{ConcState, SeqState, StateClass, Variant};
pub use graph::{Graph, Vertex, VertexSet};
pub use matrix_game::{MatrixGame, MatrixGameSolution};
pub use solver::{SolveParams, SolveReport, ValueVector};
pub use strategy::{CopPolicy, Player, RobberStrategy};
