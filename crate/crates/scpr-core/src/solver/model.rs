//! Per-state update operators, precomputed once per solve.
//!
//! Every solver folds its game into the same shape: each state is either
//! frozen at its immediate payoff (captures, terminal), optimized over one
//! player's action kernels, averaged through a fixed stochastic kernel, or
//! handed to the matrix-game solver for simultaneous play. Ordinary states
//! have zero immediate payoff, so the update is purely an expectation over
//! the previous iterate.

use crate::engine::{
    conc_legal_actions, conc_transition, seq_legal_actions, seq_transition, Action, ConcSpace,
    ConcState, SeqSpace, SeqState, StateClass,
};
use crate::graph::{Graph, Vertex};
use crate::matrix_game::MatrixGame;
use crate::strategy::{CopPolicy, Player, RobberStrategy};

/// Sparse successor distribution over state indices.
pub(crate) type Dist = Vec<(u32, f64)>;

pub(crate) struct ActionDist {
    pub label: Vertex,
    pub dist: Dist,
}

pub(crate) enum StateUpdate {
    /// Capture and terminal states: the value is the immediate payoff.
    Fixed(f64),
    /// One player optimizes over their moves; the labels are ascending, so a
    /// strict comparison yields the lowest-vertex tie-break.
    Best {
        maximize: bool,
        actions: Vec<ActionDist>,
    },
    /// All behavior frozen into a single kernel row.
    Mixture(Dist),
    /// Simultaneous play: a matrix game over both move sets.
    Game {
        row_moves: Vec<Vertex>,
        col_moves: Vec<Vertex>,
        /// Row-major, `row_moves.len() * col_moves.len()` entries.
        dists: Vec<Dist>,
    },
}

pub(crate) struct Model {
    pub updates: Vec<StateUpdate>,
    pub payoffs: Vec<f64>,
}

#[inline]
pub(crate) fn dot(dist: &Dist, v: &[f64]) -> f64 {
    dist.iter().map(|&(i, p)| p * v[i as usize]).sum()
}

/// The maximizing side's play at one state, captured while sweeping.
#[derive(Debug, Clone)]
pub(crate) enum MaxChoice {
    Move(Vertex),
    Mixture(Vec<(Vertex, f64)>),
}

impl Model {
    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn initial_values(&self) -> Vec<f64> {
        self.payoffs.clone()
    }

    pub fn apply(&self, idx: usize, v: &[f64]) -> f64 {
        self.apply_with_choice(idx, v).0
    }

    /// Update value plus the maximizer's witnessing play: the argmax move at
    /// optimizing-for-max states (lowest vertex among exact ties), the
    /// optimal row mixture at matrix-game states, `None` elsewhere.
    pub fn apply_with_choice(&self, idx: usize, v: &[f64]) -> (f64, Option<MaxChoice>) {
        match &self.updates[idx] {
            StateUpdate::Fixed(x) => (*x, None),
            StateUpdate::Best { maximize, actions } => {
                let mut best = if *maximize {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                };
                let mut label = actions[0].label;
                for a in actions {
                    let val = dot(&a.dist, v);
                    if (*maximize && val > best) || (!*maximize && val < best) {
                        best = val;
                        label = a.label;
                    }
                }
                let choice = if *maximize {
                    Some(MaxChoice::Move(label))
                } else {
                    None
                };
                (best, choice)
            }
            StateUpdate::Mixture(dist) => (dot(dist, v), None),
            StateUpdate::Game {
                row_moves,
                col_moves,
                dists,
            } => {
                let entries: Vec<f64> = dists.iter().map(|d| dot(d, v)).collect();
                let solution = MatrixGame::from_flat(row_moves.len(), col_moves.len(), entries)
                    .expect("finite entries")
                    .solve();
                let mixture = positive_support(row_moves, &solution.row_strategy);
                (solution.value, Some(MaxChoice::Mixture(mixture)))
            }
        }
    }

    /// Minimizing side's greedy play under the given values: the argmin move
    /// at optimizing-for-min states, the optimal column mixture at
    /// matrix-game states. For the minimizer of a positive game, greedy with
    /// respect to the converged values is optimal, so this is extracted once
    /// at the end.
    pub fn min_choice(&self, idx: usize, v: &[f64]) -> Option<MaxChoice> {
        match &self.updates[idx] {
            StateUpdate::Best {
                maximize: false,
                actions,
            } => {
                let mut best = f64::INFINITY;
                let mut label = actions[0].label;
                for a in actions {
                    let val = dot(&a.dist, v);
                    if val < best {
                        best = val;
                        label = a.label;
                    }
                }
                Some(MaxChoice::Move(label))
            }
            StateUpdate::Game {
                row_moves,
                col_moves,
                dists,
            } => {
                let entries: Vec<f64> = dists.iter().map(|d| dot(d, v)).collect();
                let solution = MatrixGame::from_flat(row_moves.len(), col_moves.len(), entries)
                    .expect("finite entries")
                    .solve();
                Some(MaxChoice::Mixture(positive_support(
                    col_moves,
                    &solution.col_strategy,
                )))
            }
            _ => None,
        }
    }
}

/// Positive-weight entries, renormalized to sum to one.
pub(crate) fn positive_support(labels: &[Vertex], weights: &[f64]) -> Vec<(Vertex, f64)> {
    let kept: Vec<(Vertex, f64)> = labels
        .iter()
        .zip(weights)
        .filter(|&(_, &w)| w > 1e-12)
        .map(|(&l, &w)| (l, w))
        .collect();
    let total: f64 = kept.iter().map(|&(_, w)| w).sum();
    kept.into_iter().map(|(l, w)| (l, w / total)).collect()
}

fn merge_weighted(parts: Vec<(f64, Dist)>) -> Dist {
    let mut merged: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
    for (w, dist) in parts {
        if w <= 0.0 {
            continue;
        }
        for (idx, p) in dist {
            *merged.entry(idx).or_insert(0.0) += w * p;
        }
    }
    merged.into_iter().collect()
}

/// How each cop behaves when building a model.
pub(crate) enum Role<'a> {
    Optimizes,
    Follows(&'a CopPolicy),
}

impl Role<'_> {
    fn policy(&self) -> Option<&CopPolicy> {
        match self {
            Role::Optimizes => None,
            Role::Follows(p) => Some(p),
        }
    }
}

/// Sequential-game model. Each cop either optimizes on their own turns or
/// follows a frozen policy there; the off-turn player always just holds.
pub(crate) fn seq_model(
    g: &Graph,
    robber: &RobberStrategy,
    space: &SeqSpace,
    role1: Role<'_>,
    role2: Role<'_>,
) -> Model {
    let mut updates = Vec::with_capacity(space.len());
    let mut payoffs = Vec::with_capacity(space.len());
    for state in space.states() {
        let q = state.immediate_payoff();
        payoffs.push(q);
        if state.classify() != StateClass::Ordinary {
            updates.push(StateUpdate::Fixed(q));
            continue;
        }
        let SeqState::Position { x1, x2, x3, turn } = state else {
            unreachable!("terminal is not ordinary");
        };
        let (player, role) = if turn == 1 {
            (Player::One, &role1)
        } else {
            (Player::Two, &role2)
        };
        let action_dist = |dest: Vertex| -> Dist {
            seq_transition(g, robber, &state, Action::Move(dest))
                .expect("moves drawn from the legal action set")
                .entries()
                .iter()
                .map(|&(succ, p)| (space.index(&succ) as u32, p))
                .collect()
        };
        match role.policy() {
            None => {
                let actions = seq_legal_actions(g, &state, player)
                    .into_iter()
                    .map(|a| {
                        let Action::Move(dest) = a else {
                            unreachable!("ordinary states have move actions");
                        };
                        ActionDist {
                            label: dest,
                            dist: action_dist(dest),
                        }
                    })
                    .collect();
                updates.push(StateUpdate::Best {
                    maximize: player == Player::One,
                    actions,
                });
            }
            Some(policy) => {
                let parts = policy
                    .move_support(x1, x2, x3)
                    .into_iter()
                    .map(|(dest, w)| (w, action_dist(dest)))
                    .collect();
                updates.push(StateUpdate::Mixture(merge_weighted(parts)));
            }
        }
    }
    Model { updates, payoffs }
}

/// Concurrent-game model. With both cops optimizing every ordinary state is
/// a matrix game; freezing one side folds its mixture into the other's
/// action kernels, and freezing both leaves plain Markov-chain rows.
pub(crate) fn conc_model(
    g: &Graph,
    robber: &RobberStrategy,
    space: &ConcSpace,
    role1: Role<'_>,
    role2: Role<'_>,
) -> Model {
    let mut updates = Vec::with_capacity(space.len());
    let mut payoffs = Vec::with_capacity(space.len());
    for state in space.states() {
        let q = state.immediate_payoff();
        payoffs.push(q);
        if state.classify() != StateClass::Ordinary {
            updates.push(StateUpdate::Fixed(q));
            continue;
        }
        let ConcState::Position { x1, x2, x3 } = state else {
            unreachable!("terminal is not ordinary");
        };
        let moves = |player: Player| -> Vec<Vertex> {
            conc_legal_actions(g, &state, player)
                .into_iter()
                .map(|a| {
                    let Action::Move(dest) = a else {
                        unreachable!("ordinary states have move actions");
                    };
                    dest
                })
                .collect()
        };
        let row_moves = moves(Player::One);
        let col_moves = moves(Player::Two);
        let pair_dist = |a1: Vertex, a2: Vertex| -> Dist {
            conc_transition(g, robber, &state, Action::Move(a1), Action::Move(a2))
                .expect("moves drawn from the legal action sets")
                .entries()
                .iter()
                .map(|&(succ, p)| (space.index(&succ) as u32, p))
                .collect()
        };

        let update = match (role1.policy(), role2.policy()) {
            (None, None) => {
                let mut dists = Vec::with_capacity(row_moves.len() * col_moves.len());
                for &a1 in &row_moves {
                    for &a2 in &col_moves {
                        dists.push(pair_dist(a1, a2));
                    }
                }
                StateUpdate::Game {
                    row_moves,
                    col_moves,
                    dists,
                }
            }
            (None, Some(p2)) => {
                let weights = p2.move_support(x1, x2, x3);
                let actions = row_moves
                    .iter()
                    .map(|&a1| ActionDist {
                        label: a1,
                        dist: merge_weighted(
                            weights.iter().map(|&(a2, w)| (w, pair_dist(a1, a2))).collect(),
                        ),
                    })
                    .collect();
                StateUpdate::Best {
                    maximize: true,
                    actions,
                }
            }
            (Some(p1), None) => {
                let weights = p1.move_support(x1, x2, x3);
                let actions = col_moves
                    .iter()
                    .map(|&a2| ActionDist {
                        label: a2,
                        dist: merge_weighted(
                            weights.iter().map(|&(a1, w)| (w, pair_dist(a1, a2))).collect(),
                        ),
                    })
                    .collect();
                StateUpdate::Best {
                    maximize: false,
                    actions,
                }
            }
            (Some(p1), Some(p2)) => {
                let w1 = p1.move_support(x1, x2, x3);
                let w2 = p2.move_support(x1, x2, x3);
                let mut parts = Vec::with_capacity(w1.len() * w2.len());
                for &(a1, u) in &w1 {
                    for &(a2, w) in &w2 {
                        parts.push((u * w, pair_dist(a1, a2)));
                    }
                }
                StateUpdate::Mixture(merge_weighted(parts))
            }
        };
        updates.push(update);
    }
    Model { updates, payoffs }
}
