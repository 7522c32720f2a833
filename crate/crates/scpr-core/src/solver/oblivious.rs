//! Fast path for oblivious deterministic robbers.
//!
//! When the robber's law reads only its own location, the cops decouple:
//! each plays a private pursuit race against a predictable trajectory, and
//! the joint game value is 1 exactly when the first cop's minimum capture
//! time does not exceed the second's. The minimum times satisfy a dynamic
//! program over cop/robber vertex pairs that stabilizes within `n` sweeps.
//!
//! None of this survives state-dependent (non-oblivious) deterministic laws
//! — the bundled fixture is the canonical counterexample — so these entry
//! points refuse such input instead of returning wrong 0/1 tables.

use std::collections::BTreeMap;

use crate::engine::{conc_transition, Action, ConcSpace, ConcState, StateClass};
use crate::graph::{Graph, Vertex};
use crate::strategy::{CopPolicy, Player, RobberStrategy, StateKey};

use super::{SolveReport, SolverError, ValueVector};

/// Internal sentinel: strictly larger than any reachable finite time, and
/// absorbing under the `1 +` step of the dynamic program.
const NEVER: u32 = u32::MAX;

/// Minimum capture times and time-optimal moves for a single cop chasing an
/// oblivious deterministic robber, indexed by (cop vertex, robber vertex).
#[derive(Debug, Clone)]
pub struct CaptureTimeTable {
    n: u32,
    times: Vec<u32>,
    moves: Vec<Vertex>,
    /// Sweeps until the table stopped changing (at most `n`).
    pub iterations: usize,
}

impl CaptureTimeTable {
    #[inline]
    fn slot(&self, cop: Vertex, robber: Vertex) -> usize {
        (cop as usize - 1) * self.n as usize + (robber as usize - 1)
    }

    pub(crate) fn raw_time(&self, cop: Vertex, robber: Vertex) -> u32 {
        self.times[self.slot(cop, robber)]
    }

    /// Minimum number of turns to capture; `None` when capture is
    /// impossible (cannot happen on a connected graph, but the table
    /// representation allows it).
    pub fn time(&self, cop: Vertex, robber: Vertex) -> Option<u32> {
        match self.raw_time(cop, robber) {
            NEVER => None,
            t => Some(t),
        }
    }

    /// A time-optimal first move for the cop.
    pub fn cop_move(&self, cop: Vertex, robber: Vertex) -> Vertex {
        self.moves[self.slot(cop, robber)]
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }
}

fn require_oblivious(robber: &RobberStrategy) -> Result<(), SolverError> {
    if robber.is_oblivious_deterministic() {
        Ok(())
    } else {
        Err(SolverError::NotOblivious {
            kind: robber.kind_name(),
        })
    }
}

/// Runs the capture-time dynamic program.
///
/// `T(x, x) = 0`; elsewhere `T(c, r) = min over c' in N[c] of
/// 1 + T(c', law(r))`, iterated from an all-infinite start until stable.
pub fn oblivious_capture_times(
    g: &Graph,
    robber: &RobberStrategy,
) -> Result<CaptureTimeTable, SolverError> {
    require_oblivious(robber)?;
    let n = g.vertex_count();
    let size = (n as usize) * (n as usize);
    let next_robber: Vec<Vertex> = g
        .vertices()
        .map(|v| robber.oblivious_move(v).expect("kind checked above"))
        .collect();
    let slot = |c: Vertex, r: Vertex| (c as usize - 1) * n as usize + (r as usize - 1);

    let mut times = vec![NEVER; size];
    for v in g.vertices() {
        times[slot(v, v)] = 0;
    }

    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut next = vec![NEVER; size];
        for c in g.vertices() {
            for r in g.vertices() {
                next[slot(c, r)] = if c == r {
                    0
                } else {
                    let chased = next_robber[(r - 1) as usize];
                    g.closed_unchecked(c)
                        .iter()
                        .map(|c2| times[slot(c2, chased)].saturating_add(1))
                        .min()
                        .expect("closed neighborhoods are nonempty")
                };
            }
        }
        let stable = next == times;
        times = next;
        if stable {
            break;
        }
        // The times are bounded by n - 1 on a connected graph, so the
        // program must stabilize within n sweeps.
        debug_assert!(iterations <= n as usize + 1);
    }

    let mut moves = vec![0; size];
    for c in g.vertices() {
        for r in g.vertices() {
            moves[slot(c, r)] = if c == r {
                c
            } else {
                let chased = next_robber[(r - 1) as usize];
                let mut best = NEVER;
                let mut best_move = c;
                let mut first = true;
                for c2 in g.closed_unchecked(c).iter() {
                    let t = times[slot(c2, chased)].saturating_add(1);
                    if first || t < best {
                        best = t;
                        best_move = c2;
                        first = false;
                    }
                }
                best_move
            };
        }
    }

    Ok(CaptureTimeTable {
        n,
        times,
        moves,
        iterations,
    })
}

/// Solves the concurrent game for an oblivious deterministic robber by the
/// capture-time race: the value is 1 iff the first cop's time is no larger
/// than the second's (and finite), and each cop's optimal policy is the
/// lifted time-optimal pursuit move.
pub fn solve_oblivious_concurrent(
    g: &Graph,
    robber: &RobberStrategy,
) -> Result<SolveReport, SolverError> {
    let table = oblivious_capture_times(g, robber)?;
    let space = ConcSpace::new(g);
    let mut values = vec![0.0; space.len()];
    let mut map1: BTreeMap<StateKey, Vertex> = BTreeMap::new();
    let mut map2: BTreeMap<StateKey, Vertex> = BTreeMap::new();
    for (idx, state) in space.states().enumerate() {
        let ConcState::Position { x1, x2, x3 } = state else {
            continue;
        };
        let t1 = table.raw_time(x1, x3);
        let t2 = table.raw_time(x2, x3);
        values[idx] = if t1 != NEVER && t1 <= t2 { 1.0 } else { 0.0 };
        if state.classify() == StateClass::Ordinary {
            map1.insert((x1, x2, x3), table.cop_move(x1, x3));
            map2.insert((x1, x2, x3), table.cop_move(x2, x3));
        }
    }

    let values = ValueVector {
        values,
        iterations: table.iterations,
        residual: 0.0,
        converged: true,
        monotone: true,
        in_unit_interval: true,
    };
    let optimality_residual = pure_minimax_residual(g, robber, values.as_slice());
    Ok(SolveReport {
        values,
        policy1: CopPolicy::deterministic(Player::One, map1),
        policy2: CopPolicy::deterministic(Player::Two, map2),
        optimality_residual,
        epsilon: 0.0,
    })
}

/// Checks the pure minimax characterization: at every state the max-min and
/// min-max of the one-turn continuation over pure moves both equal the
/// state's value. Returns the largest deviation found (0 when the values
/// come from [`solve_oblivious_concurrent`]).
pub fn verify_pure_minimax(
    g: &Graph,
    robber: &RobberStrategy,
    values: &ValueVector,
) -> Result<f64, SolverError> {
    require_oblivious(robber)?;
    Ok(pure_minimax_residual(g, robber, values.as_slice()))
}

fn pure_minimax_residual(g: &Graph, robber: &RobberStrategy, values: &[f64]) -> f64 {
    let space = ConcSpace::new(g);
    let mut worst = 0.0f64;
    for (idx, state) in space.states().enumerate() {
        let v = values[idx];
        let q = state.immediate_payoff();
        let deviation = match state.classify() {
            StateClass::Terminal => continue,
            StateClass::C1Capture | StateClass::C2Capture => {
                // Null actions, terminal successor: both orderings give q.
                (q - v).abs()
            }
            StateClass::Ordinary => {
                let ConcState::Position { x1, x2, .. } = state else {
                    continue;
                };
                let continuation = |a1: Vertex, a2: Vertex| -> f64 {
                    let dist =
                        conc_transition(g, robber, &state, Action::Move(a1), Action::Move(a2))
                            .expect("legal moves");
                    debug_assert_eq!(dist.entries().len(), 1, "deterministic robber");
                    let (succ, _) = dist.entries()[0];
                    q + values[space.index(&succ)]
                };
                let rows = g.closed_unchecked(x1);
                let cols = g.closed_unchecked(x2);
                let maxmin = rows
                    .iter()
                    .map(|a1| {
                        cols.iter()
                            .map(|a2| continuation(a1, a2))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                let minmax = cols
                    .iter()
                    .map(|a2| {
                        rows.iter()
                            .map(|a1| continuation(a1, a2))
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .fold(f64::INFINITY, f64::min);
                (maxmin - v).abs().max((minmax - v).abs())
            }
        };
        worst = worst.max(deviation);
    }
    worst
}
