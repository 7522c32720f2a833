//! Concurrent-variant value iteration.
//!
//! Every ordinary state hosts a one-turn matrix game between the cops' move
//! sets; its mixed-strategy value drives the update, and the optimal mixed
//! strategies of the converged games become the returned policies.

use std::collections::BTreeMap;

use crate::engine::{conc_transition, Action, ConcSpace, ConcState, StateClass};
use crate::graph::{Graph, Vertex};
use crate::matrix_game::MatrixGame;
use crate::strategy::{CopPolicy, Player, RobberStrategy, StateKey};

use super::model::{conc_model, MaxChoice, Role};
use super::{operator_residual, solve_model, SolveParams, SolveReport};

/// One-turn matrix game at a concurrent state under given continuation
/// values, with its move labels.
pub struct StateGame {
    pub game: MatrixGame,
    pub row_moves: Vec<Vertex>,
    pub col_moves: Vec<Vertex>,
}

impl StateGame {
    /// Entry for the given move labels.
    pub fn entry(&self, a1: Vertex, a2: Vertex) -> Option<f64> {
        let i = self.row_moves.iter().position(|&m| m == a1)?;
        let j = self.col_moves.iter().position(|&m| m == a2)?;
        Some(self.game.entry(i, j))
    }
}

/// Builds the one-turn game `q(s) + Σ Pr(s′|s, a1, a2) v(s′)` at an ordinary
/// state; `None` at captures and the terminal, whose action sets are null.
///
/// Move labels are the sorted closed neighborhoods; `values` is indexed by
/// the concurrent state space of `g`.
pub fn state_matrix_game(
    g: &Graph,
    robber: &RobberStrategy,
    values: &[f64],
    state: ConcState,
) -> Option<StateGame> {
    if state.classify() != StateClass::Ordinary {
        return None;
    }
    let ConcState::Position { x1, x2, .. } = state else {
        return None;
    };
    let space = ConcSpace::new(g);
    let q = state.immediate_payoff();
    let row_moves: Vec<Vertex> = g.closed_unchecked(x1).iter().collect();
    let col_moves: Vec<Vertex> = g.closed_unchecked(x2).iter().collect();
    let mut entries = Vec::with_capacity(row_moves.len() * col_moves.len());
    for &a1 in &row_moves {
        for &a2 in &col_moves {
            let dist = conc_transition(g, robber, &state, Action::Move(a1), Action::Move(a2))
                .expect("moves drawn from the legal action sets");
            let expected: f64 = dist
                .entries()
                .iter()
                .map(|&(succ, p)| p * values[space.index(&succ)])
                .sum();
            entries.push(q + expected);
        }
    }
    Some(StateGame {
        game: MatrixGame::from_flat(row_moves.len(), col_moves.len(), entries)
            .expect("finite values"),
        row_moves,
        col_moves,
    })
}

pub fn solve_concurrent(g: &Graph, robber: &RobberStrategy, params: &SolveParams) -> SolveReport {
    let space = ConcSpace::new(g);
    let model = conc_model(g, robber, &space, Role::Optimizes, Role::Optimizes);
    let solution = solve_model(&model, params);
    let values = solution.values;
    let optimality_residual = operator_residual(values.as_slice(), |i, v| model.apply(i, v));

    // First cop: the progressing mixtures recorded during the sweeps.
    // Second cop: greedy mixtures of the converged one-turn games.
    let mut map1: BTreeMap<StateKey, Vec<(Vertex, f64)>> = BTreeMap::new();
    let mut map2: BTreeMap<StateKey, Vec<(Vertex, f64)>> = BTreeMap::new();
    for (idx, state) in space.states().enumerate() {
        let ConcState::Position { x1, x2, x3 } = state else {
            continue;
        };
        if let Some(MaxChoice::Mixture(mix)) = &solution.max_choices[idx] {
            map1.insert((x1, x2, x3), mix.clone());
        }
        if let Some(MaxChoice::Mixture(mix)) = model.min_choice(idx, values.as_slice()) {
            map2.insert((x1, x2, x3), mix);
        }
    }

    SolveReport {
        values,
        policy1: CopPolicy::mixed(Player::One, map1),
        policy2: CopPolicy::mixed(Player::Two, map2),
        optimality_residual,
        epsilon: params.nominal_epsilon(),
    }
}
