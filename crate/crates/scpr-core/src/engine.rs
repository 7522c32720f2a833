//! State spaces, payoffs and transition kernels for both game variants.
//!
//! Sequential play alternates: a turn either moves the first cop token, or
//! moves the second cop token and then the robber; a cop stepping onto the
//! robber freezes it and captures outright. Concurrent play moves all three
//! tokens simultaneously and a capture is a cop sharing the robber's vertex
//! at the end of the turn. Same-cell capture is the only concurrent capture:
//! a cop and the robber exchanging endpoints of one edge pass each other.
//! Cop moves therefore never deflect the robber's law, which is what makes
//! the capture-time race analysis for oblivious robbers exact.
//!
//! Capture states collect their payoff once and transit to the absorbing
//! terminal state, whatever anyone plays; the terminal transits to itself.

use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::strategy::{Player, RobberStrategy};

/// Which game is being played.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Sequential,
    Concurrent,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Sequential => write!(f, "sequential"),
            Variant::Concurrent => write!(f, "concurrent"),
        }
    }
}

/// Classification of a state; exactly one applies.
///
/// A position where the first cop shares the robber's vertex is a C1 capture
/// even when the second cop is there too (ties favor C1); a C2 capture
/// requires the second cop alone on the robber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    C1Capture,
    C2Capture,
    Terminal,
    Ordinary,
}

fn class_of(x1: Vertex, x2: Vertex, x3: Vertex) -> StateClass {
    if x1 == x3 {
        StateClass::C1Capture
    } else if x2 == x3 {
        StateClass::C2Capture
    } else {
        StateClass::Ordinary
    }
}

/// Sequential game state: token positions plus whose turn is next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeqState {
    Position {
        x1: Vertex,
        x2: Vertex,
        x3: Vertex,
        turn: u8,
    },
    Terminal,
}

impl SeqState {
    pub fn position(x1: Vertex, x2: Vertex, x3: Vertex, turn: u8) -> Self {
        debug_assert!(turn == 1 || turn == 2);
        SeqState::Position { x1, x2, x3, turn }
    }

    pub fn classify(&self) -> StateClass {
        match *self {
            SeqState::Terminal => StateClass::Terminal,
            SeqState::Position { x1, x2, x3, .. } => class_of(x1, x2, x3),
        }
    }

    /// 1 at C1-capture states, 0 elsewhere (terminal included).
    pub fn immediate_payoff(&self) -> f64 {
        if self.classify() == StateClass::C1Capture {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for SeqState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SeqState::Terminal => write!(f, "TAU"),
            SeqState::Position { x1, x2, x3, turn } => write!(f, "({x1}, {x2}, {x3}, {turn})"),
        }
    }
}

/// Concurrent game state: token positions only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConcState {
    Position { x1: Vertex, x2: Vertex, x3: Vertex },
    Terminal,
}

impl ConcState {
    pub fn position(x1: Vertex, x2: Vertex, x3: Vertex) -> Self {
        ConcState::Position { x1, x2, x3 }
    }

    pub fn classify(&self) -> StateClass {
        match *self {
            ConcState::Terminal => StateClass::Terminal,
            ConcState::Position { x1, x2, x3 } => class_of(x1, x2, x3),
        }
    }

    pub fn immediate_payoff(&self) -> f64 {
        if self.classify() == StateClass::C1Capture {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for ConcState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConcState::Terminal => write!(f, "TAU"),
            ConcState::Position { x1, x2, x3 } => write!(f, "({x1}, {x2}, {x3})"),
        }
    }
}

/// A token move, or the null move available only where play is over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Move(Vertex),
    Null,
}

/// Successor distribution; probabilities are positive, states distinct, and
/// the total is one up to floating-point rounding.
#[derive(Debug, Clone)]
pub struct TransitionDistribution<S> {
    entries: Vec<(S, f64)>,
}

impl<S> TransitionDistribution<S> {
    fn point_mass(s: S) -> Self {
        TransitionDistribution {
            entries: vec![(s, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(S, f64)] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|&(_, p)| p).sum()
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("illegal action {action:?} for {player} at state {state}")]
    IllegalAction {
        player: Player,
        state: String,
        action: Action,
    },
}

/// Sequential state space, ordered lexicographically by `(x1, x2, x3, turn)`
/// with the terminal state last: `2n³ + 1` states in all.
#[derive(Debug, Clone, Copy)]
pub struct SeqSpace {
    n: u32,
}

impl SeqSpace {
    pub fn new(g: &Graph) -> Self {
        SeqSpace {
            n: g.vertex_count(),
        }
    }

    pub fn len(&self) -> usize {
        2 * (self.n as usize).pow(3) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn terminal_index(&self) -> usize {
        self.len() - 1
    }

    pub fn index(&self, s: &SeqState) -> usize {
        let n = self.n as usize;
        match *s {
            SeqState::Terminal => self.terminal_index(),
            SeqState::Position { x1, x2, x3, turn } => {
                let (x1, x2, x3) = (x1 as usize - 1, x2 as usize - 1, x3 as usize - 1);
                (((x1 * n) + x2) * n + x3) * 2 + (turn as usize - 1)
            }
        }
    }

    pub fn state(&self, idx: usize) -> SeqState {
        if idx == self.terminal_index() {
            return SeqState::Terminal;
        }
        let n = self.n as usize;
        let turn = (idx % 2) as u8 + 1;
        let rest = idx / 2;
        let x3 = (rest % n) as Vertex + 1;
        let x2 = ((rest / n) % n) as Vertex + 1;
        let x1 = (rest / (n * n)) as Vertex + 1;
        SeqState::position(x1, x2, x3, turn)
    }

    pub fn states(&self) -> impl Iterator<Item = SeqState> + '_ {
        (0..self.len()).map(|i| self.state(i))
    }
}

/// Concurrent state space: `n³ + 1` states, same ordering convention.
#[derive(Debug, Clone, Copy)]
pub struct ConcSpace {
    n: u32,
}

impl ConcSpace {
    pub fn new(g: &Graph) -> Self {
        ConcSpace {
            n: g.vertex_count(),
        }
    }

    pub fn len(&self) -> usize {
        (self.n as usize).pow(3) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn terminal_index(&self) -> usize {
        self.len() - 1
    }

    pub fn index(&self, s: &ConcState) -> usize {
        let n = self.n as usize;
        match *s {
            ConcState::Terminal => self.terminal_index(),
            ConcState::Position { x1, x2, x3 } => {
                let (x1, x2, x3) = (x1 as usize - 1, x2 as usize - 1, x3 as usize - 1);
                ((x1 * n) + x2) * n + x3
            }
        }
    }

    pub fn state(&self, idx: usize) -> ConcState {
        if idx == self.terminal_index() {
            return ConcState::Terminal;
        }
        let n = self.n as usize;
        let x3 = (idx % n) as Vertex + 1;
        let x2 = ((idx / n) % n) as Vertex + 1;
        let x1 = (idx / (n * n)) as Vertex + 1;
        ConcState::position(x1, x2, x3)
    }

    pub fn states(&self) -> impl Iterator<Item = ConcState> + '_ {
        (0..self.len()).map(|i| self.state(i))
    }
}

/// Legal actions in the sequential game.
///
/// On a player's own turn at an ordinary position they may move anywhere in
/// their closed neighborhood; off-turn their only "action" is holding
/// position. Capture and terminal states admit only the null move.
pub fn seq_legal_actions(g: &Graph, s: &SeqState, player: Player) -> Vec<Action> {
    match *s {
        SeqState::Terminal => vec![Action::Null],
        SeqState::Position { x1, x2, x3, turn } => {
            if class_of(x1, x2, x3) != StateClass::Ordinary {
                return vec![Action::Null];
            }
            let own = player.own_position(x1, x2);
            if turn == player.number() {
                g.closed_unchecked(own).iter().map(Action::Move).collect()
            } else {
                vec![Action::Move(own)]
            }
        }
    }
}

/// Legal actions in the concurrent game: each cop moves within their closed
/// neighborhood at ordinary positions, null otherwise.
pub fn conc_legal_actions(g: &Graph, s: &ConcState, player: Player) -> Vec<Action> {
    match *s {
        ConcState::Terminal => vec![Action::Null],
        ConcState::Position { x1, x2, x3 } => {
            if class_of(x1, x2, x3) != StateClass::Ordinary {
                return vec![Action::Null];
            }
            let own = player.own_position(x1, x2);
            g.closed_unchecked(own).iter().map(Action::Move).collect()
        }
    }
}

/// Sequential transition law. `action` belongs to the acting player; the
/// other token holds position.
///
/// On the second player's turn the robber moves after the cop, drawing from
/// the law evaluated at `(x1, a2, x3)` — unless the cop stepped onto the
/// robber, which freezes it and captures with probability one.
pub fn seq_transition(
    g: &Graph,
    robber: &RobberStrategy,
    s: &SeqState,
    action: Action,
) -> Result<TransitionDistribution<SeqState>, EngineError> {
    let illegal = |player: Player| EngineError::IllegalAction {
        player,
        state: s.to_string(),
        action,
    };
    match *s {
        SeqState::Terminal => match action {
            Action::Null => Ok(TransitionDistribution::point_mass(SeqState::Terminal)),
            Action::Move(_) => Err(illegal(Player::One)),
        },
        SeqState::Position { x1, x2, x3, turn } => {
            let player = if turn == 1 { Player::One } else { Player::Two };
            if class_of(x1, x2, x3) != StateClass::Ordinary {
                return match action {
                    Action::Null => Ok(TransitionDistribution::point_mass(SeqState::Terminal)),
                    Action::Move(_) => Err(illegal(player)),
                };
            }
            let Action::Move(dest) = action else {
                return Err(illegal(player));
            };
            let own = player.own_position(x1, x2);
            if !g.closed_unchecked(own).contains(dest) {
                return Err(illegal(player));
            }
            if turn == 1 {
                return Ok(TransitionDistribution::point_mass(SeqState::position(
                    dest, x2, x3, 2,
                )));
            }
            let a2 = dest;
            if a2 == x3 {
                // Cop arrives on the robber: frozen robber, certain capture.
                return Ok(TransitionDistribution::point_mass(SeqState::position(
                    x1, a2, x3, 1,
                )));
            }
            let entries = robber
                .move_distribution(g, x1, a2, x3)
                .into_iter()
                .filter(|&(_, p)| p > 0.0)
                .map(|(r, p)| (SeqState::position(x1, a2, r, 1), p))
                .collect();
            Ok(TransitionDistribution { entries })
        }
    }
}

/// Concurrent transition law.
///
/// All three tokens move at once: the successor is `(a1, a2, r)` for each
/// robber destination `r` drawn from the law at the current joint position.
/// Captures are read off the successor by [`ConcState::classify`]; a cop
/// crossing the robber on an edge does not capture it.
pub fn conc_transition(
    g: &Graph,
    robber: &RobberStrategy,
    s: &ConcState,
    action1: Action,
    action2: Action,
) -> Result<TransitionDistribution<ConcState>, EngineError> {
    let illegal = |player: Player, action: Action| EngineError::IllegalAction {
        player,
        state: s.to_string(),
        action,
    };
    match *s {
        ConcState::Terminal => match (action1, action2) {
            (Action::Null, Action::Null) => {
                Ok(TransitionDistribution::point_mass(ConcState::Terminal))
            }
            (Action::Move(_), _) => Err(illegal(Player::One, action1)),
            (_, Action::Move(_)) => Err(illegal(Player::Two, action2)),
        },
        ConcState::Position { x1, x2, x3 } => {
            if class_of(x1, x2, x3) != StateClass::Ordinary {
                return match (action1, action2) {
                    (Action::Null, Action::Null) => {
                        Ok(TransitionDistribution::point_mass(ConcState::Terminal))
                    }
                    (Action::Move(_), _) => Err(illegal(Player::One, action1)),
                    (_, Action::Move(_)) => Err(illegal(Player::Two, action2)),
                };
            }
            let Action::Move(a1) = action1 else {
                return Err(illegal(Player::One, action1));
            };
            let Action::Move(a2) = action2 else {
                return Err(illegal(Player::Two, action2));
            };
            if !g.closed_unchecked(x1).contains(a1) {
                return Err(illegal(Player::One, action1));
            }
            if !g.closed_unchecked(x2).contains(a2) {
                return Err(illegal(Player::Two, action2));
            }

            let entries = robber
                .move_distribution(g, x1, x2, x3)
                .into_iter()
                .filter(|&(_, p)| p > 0.0)
                .map(|(r, p)| (ConcState::position(a1, a2, r), p))
                .collect();
            Ok(TransitionDistribution { entries })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::strategy::DISTRIBUTION_TOL;

    fn path3() -> Graph {
        Graph::load("graph 3 2\ne 1 2\ne 2 3").unwrap()
    }

    #[test]
    fn state_space_sizes() {
        let fx = fixture::counterexample();
        assert_eq!(SeqSpace::new(&fx.graph).len(), 433); // 2·6³ + 1
        assert_eq!(ConcSpace::new(&fx.graph).len(), 217); // 6³ + 1
        let single = Graph::load("graph 1 0").unwrap();
        assert_eq!(SeqSpace::new(&single).len(), 3);
        assert_eq!(ConcSpace::new(&single).len(), 2);
    }

    #[test]
    fn index_maps_are_bijective_and_ordered() {
        let g = path3();
        let seq = SeqSpace::new(&g);
        for (i, s) in seq.states().enumerate() {
            assert_eq!(seq.index(&s), i);
        }
        assert_eq!(seq.state(seq.terminal_index()), SeqState::Terminal);
        let conc = ConcSpace::new(&g);
        for (i, s) in conc.states().enumerate() {
            assert_eq!(conc.index(&s), i);
        }
        // Lexicographic: (1,1,1,1) first, turn is the least significant key.
        assert_eq!(seq.state(0), SeqState::position(1, 1, 1, 1));
        assert_eq!(seq.state(1), SeqState::position(1, 1, 1, 2));
        assert_eq!(seq.state(2), SeqState::position(1, 1, 2, 1));
    }

    #[test]
    fn classification_covers_the_tie_break() {
        assert_eq!(
            SeqState::position(4, 6, 4, 1).classify(),
            StateClass::C1Capture
        );
        assert_eq!(
            ConcState::position(3, 5, 5).classify(),
            StateClass::C2Capture
        );
        // All tokens on one vertex counts for the first cop.
        assert_eq!(
            SeqState::position(5, 5, 5, 2).classify(),
            StateClass::C1Capture
        );
    }

    #[test]
    fn immediate_payoffs() {
        assert_eq!(SeqState::position(4, 6, 4, 1).immediate_payoff(), 1.0);
        assert_eq!(SeqState::position(3, 5, 5, 1).immediate_payoff(), 0.0);
        assert_eq!(SeqState::Terminal.immediate_payoff(), 0.0);
    }

    #[test]
    fn legal_actions_follow_turn_order() {
        let fx = fixture::counterexample();
        let s = SeqState::position(2, 6, 1, 1);
        let a1 = seq_legal_actions(&fx.graph, &s, Player::One);
        assert_eq!(a1, vec![Action::Move(2), Action::Move(3)]);
        let a2 = seq_legal_actions(&fx.graph, &s, Player::Two);
        assert_eq!(a2, vec![Action::Move(6)]);
        assert_eq!(
            seq_legal_actions(&fx.graph, &SeqState::Terminal, Player::One),
            vec![Action::Null]
        );
        assert_eq!(
            seq_legal_actions(&fx.graph, &SeqState::position(1, 6, 1, 1), Player::Two),
            vec![Action::Null],
            "capture states admit only the null move"
        );
    }

    #[test]
    fn first_cop_move_transition() {
        let fx = fixture::counterexample();
        let robber = RobberStrategy::identity();
        let s = SeqState::position(2, 3, 5, 1);
        let dist = seq_transition(&fx.graph, &robber, &s, Action::Move(3)).unwrap();
        assert_eq!(dist.entries(), &[(SeqState::position(3, 3, 5, 2), 1.0)]);
    }

    #[test]
    fn capture_states_absorb() {
        let fx = fixture::counterexample();
        let robber = RobberStrategy::identity();
        let s = SeqState::position(4, 6, 4, 1);
        let dist = seq_transition(&fx.graph, &robber, &s, Action::Null).unwrap();
        assert_eq!(dist.entries(), &[(SeqState::Terminal, 1.0)]);
        let t = seq_transition(&fx.graph, &robber, &SeqState::Terminal, Action::Null).unwrap();
        assert_eq!(t.entries(), &[(SeqState::Terminal, 1.0)]);
    }

    #[test]
    fn cop_landing_on_robber_freezes_it() {
        let g = path3();
        let robber = RobberStrategy::identity();
        let s = SeqState::position(1, 2, 3, 2);
        let dist = seq_transition(&g, &robber, &s, Action::Move(3)).unwrap();
        assert_eq!(dist.entries(), &[(SeqState::position(1, 3, 3, 1), 1.0)]);
        assert_eq!(dist.entries()[0].0.classify(), StateClass::C2Capture);
    }

    #[test]
    fn robber_moves_after_second_cop() {
        let fx = fixture::counterexample();
        // From (2, 6, 1) on the second cop's turn, a2 = 5: the law is queried
        // at the end-of-turn position (2, 5, 1), which is unlisted, so stay.
        let s = SeqState::position(2, 6, 1, 2);
        let dist = seq_transition(&fx.graph, &fx.robber, &s, Action::Move(5)).unwrap();
        assert_eq!(dist.entries(), &[(SeqState::position(2, 5, 1, 1), 1.0)]);
    }

    #[test]
    fn robber_crossing_a_cop_is_not_captured() {
        // Cop 1 → 2 while the robber walks 2 → 1: they pass on the edge and
        // play continues; only end-of-turn coincidence captures.
        let g = path3();
        let mut map = std::collections::BTreeMap::new();
        map.insert((1, 3, 2), 1);
        let robber = RobberStrategy::state_deterministic(map, &g).unwrap();
        let s = ConcState::position(1, 3, 2);
        let dist = conc_transition(&g, &robber, &s, Action::Move(2), Action::Move(3)).unwrap();
        assert_eq!(dist.entries(), &[(ConcState::position(2, 3, 1), 1.0)]);
        assert_eq!(dist.entries()[0].0.classify(), StateClass::Ordinary);
    }

    #[test]
    fn simultaneous_arrival_is_a_first_cop_capture() {
        // Both cops step onto the static robber together: the state
        // (2, 2, 2) classifies for the first cop.
        let g = path3();
        let robber = RobberStrategy::identity();
        let s = ConcState::position(1, 3, 2);
        let dist = conc_transition(&g, &robber, &s, Action::Move(2), Action::Move(2)).unwrap();
        assert_eq!(dist.entries(), &[(ConcState::position(2, 2, 2), 1.0)]);
        assert_eq!(dist.entries()[0].0.classify(), StateClass::C1Capture);
    }

    #[test]
    fn fixture_first_turn_successor() {
        let fx = fixture::counterexample();
        let s = ConcState::position(2, 6, 1);
        let dist =
            conc_transition(&fx.graph, &fx.robber, &s, Action::Move(2), Action::Move(6)).unwrap();
        assert_eq!(dist.entries(), &[(ConcState::position(2, 6, 4), 1.0)]);
    }

    #[test]
    fn terminal_concurrent_loops() {
        let fx = fixture::counterexample();
        let dist = conc_transition(
            &fx.graph,
            &fx.robber,
            &ConcState::Terminal,
            Action::Null,
            Action::Null,
        )
        .unwrap();
        assert_eq!(dist.entries(), &[(ConcState::Terminal, 1.0)]);
    }

    #[test]
    fn illegal_actions_are_rejected() {
        let fx = fixture::counterexample();
        let robber = RobberStrategy::identity();
        let s = SeqState::position(2, 6, 1, 1);
        // 5 is not adjacent to 2.
        assert!(seq_transition(&fx.graph, &robber, &s, Action::Move(5)).is_err());
        let c = ConcState::position(2, 6, 1);
        assert!(
            conc_transition(&fx.graph, &robber, &c, Action::Move(2), Action::Move(4)).is_err()
        );
    }

    #[test]
    fn transition_probabilities_sum_to_one() {
        let g = path3();
        let text = "robber markov\np 1 1 2 1 0.25\np 1 1 2 2 0.25\np 1 1 2 3 0.5\n";
        let robber = RobberStrategy::load(text, &g).unwrap();
        // Sequential second-cop turn reaching the listed robber state.
        let s = SeqState::position(1, 1, 2, 2);
        let dist = seq_transition(&g, &robber, &s, Action::Move(1)).unwrap();
        assert!((dist.total() - 1.0).abs() <= DISTRIBUTION_TOL);
        assert_eq!(dist.entries().len(), 3);
        // Concurrent from the same joint position: one successor per robber
        // destination with positive probability.
        let c = ConcState::position(1, 1, 2);
        let dist = conc_transition(&g, &robber, &c, Action::Move(2), Action::Move(1)).unwrap();
        assert!((dist.total() - 1.0).abs() <= DISTRIBUTION_TOL);
        assert_eq!(dist.entries().len(), 3);
        for &(_, p) in dist.entries() {
            assert!(p > 0.0);
        }
    }
}
