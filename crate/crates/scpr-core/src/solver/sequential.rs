//! Sequential-variant value iteration.
//!
//! Because the off-turn player has a single legal action, the one-turn game
//! at every state collapses to a plain max (first cop's turns) or min
//! (second cop's turns) over the acting player's moves, and deterministic
//! stationary policies fall out of the converged values by argmax/argmin
//! with the lowest-vertex tie-break.

use std::collections::BTreeMap;

use crate::engine::{SeqSpace, SeqState, StateClass};
use crate::graph::Graph;
use crate::strategy::{CopPolicy, Player, RobberStrategy, StateKey};

use super::model::{seq_model, MaxChoice, Role};
use super::{operator_residual, solve_model, SolveParams, SolveReport};

pub fn solve_sequential(g: &Graph, robber: &RobberStrategy, params: &SolveParams) -> SolveReport {
    let space = SeqSpace::new(g);
    let model = seq_model(g, robber, &space, Role::Optimizes, Role::Optimizes);
    let solution = solve_model(&model, params);
    let values = solution.values;
    let optimality_residual = operator_residual(values.as_slice(), |i, v| model.apply(i, v));

    let mut map1: BTreeMap<StateKey, _> = BTreeMap::new();
    let mut map2: BTreeMap<StateKey, _> = BTreeMap::new();
    for (idx, state) in space.states().enumerate() {
        if state.classify() != StateClass::Ordinary {
            continue;
        }
        let SeqState::Position { x1, x2, x3, turn } = state else {
            continue;
        };
        if turn == 1 {
            if let Some(MaxChoice::Move(dest)) = solution.max_choices[idx] {
                map1.insert((x1, x2, x3), dest);
            }
        } else if let Some(MaxChoice::Move(dest)) = model.min_choice(idx, values.as_slice()) {
            map2.insert((x1, x2, x3), dest);
        }
    }

    SolveReport {
        values,
        policy1: CopPolicy::deterministic(Player::One, map1),
        policy2: CopPolicy::deterministic(Player::Two, map2),
        optimality_residual,
        epsilon: params.nominal_epsilon(),
    }
}
