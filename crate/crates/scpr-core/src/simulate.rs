//! Monte Carlo rollouts under given policies, for cross-validating solver
//! output.
//!
//! Reproducibility contract: episode `i` of a run draws from a SplitMix64
//! stream seeded by [`crate::rng::episode_seed`]`(master_seed, i)`. Within a
//! turn the draw order is fixed — the acting cop's mixture first (first cop
//! before second in the concurrent game), then the successor state — and
//! every draw samples its distribution by inverse CDF in stored (sorted)
//! order, skipping the draw entirely when the distribution is a point mass.
//! Episodes are therefore independent of thread count and schedule.

use crate::engine::{
    conc_transition, seq_transition, Action, ConcState, SeqState, StateClass,
    TransitionDistribution,
};
use crate::exec;
use crate::graph::{Graph, Vertex};
use crate::rng::{episode_seed, SplitMix64};
use crate::strategy::{CopPolicy, RobberStrategy};

/// How an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    C1Wins,
    C2Wins,
    Truncated,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::C1Wins => "C1",
            Outcome::C2Wins => "C2",
            Outcome::Truncated => "TRUNC",
        }
    }
}

/// One playout: the visited states (starting state included), the outcome,
/// and the number of transitions taken.
#[derive(Debug, Clone)]
pub struct EpisodeTrace<S> {
    pub states: Vec<S>,
    pub outcome: Outcome,
    pub length: usize,
}

/// Monte Carlo estimate of the first cop's win probability.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub mean: f64,
    pub standard_error: f64,
    pub episodes: usize,
    /// Fraction of episodes cut off at the horizon (counted as non-wins).
    pub truncated_fraction: f64,
}

fn sample<S: Copy>(dist: &TransitionDistribution<S>, rng: &mut SplitMix64) -> S {
    let entries = dist.entries();
    if entries.len() == 1 {
        return entries[0].0;
    }
    let u = rng.next_f64();
    let mut acc = 0.0;
    for &(s, p) in entries {
        acc += p;
        if u < acc {
            return s;
        }
    }
    entries.last().expect("nonempty distribution").0
}

fn sample_move(support: &[(Vertex, f64)], rng: &mut SplitMix64) -> Vertex {
    if support.len() == 1 {
        return support[0].0;
    }
    let u = rng.next_f64();
    let mut acc = 0.0;
    for &(v, p) in support {
        acc += p;
        if u < acc {
            return v;
        }
    }
    support.last().expect("nonempty support").0
}

fn outcome_of_class(class: StateClass) -> Option<Outcome> {
    match class {
        StateClass::C1Capture => Some(Outcome::C1Wins),
        StateClass::C2Capture => Some(Outcome::C2Wins),
        _ => None,
    }
}

/// Plays one sequential episode to capture or horizon.
pub fn play_sequential_episode(
    g: &Graph,
    robber: &RobberStrategy,
    policy1: &CopPolicy,
    policy2: &CopPolicy,
    start: SeqState,
    horizon: usize,
    seed: u64,
) -> EpisodeTrace<SeqState> {
    let mut rng = SplitMix64::new(seed);
    let mut states = vec![start];
    loop {
        let current = *states.last().expect("trace is never empty");
        if let Some(outcome) = outcome_of_class(current.classify()) {
            let length = states.len() - 1;
            return EpisodeTrace { states, outcome, length };
        }
        if states.len() > horizon || current == SeqState::Terminal {
            let length = states.len() - 1;
            return EpisodeTrace {
                states,
                outcome: Outcome::Truncated,
                length,
            };
        }
        let SeqState::Position { x1, x2, x3, turn } = current else {
            unreachable!("terminal handled above");
        };
        let policy = if turn == 1 { policy1 } else { policy2 };
        let dest = sample_move(&policy.move_support(x1, x2, x3), &mut rng);
        let dist = seq_transition(g, robber, &current, Action::Move(dest))
            .expect("policy moves are legal");
        states.push(sample(&dist, &mut rng));
    }
}

/// Plays one concurrent episode to capture or horizon.
pub fn play_concurrent_episode(
    g: &Graph,
    robber: &RobberStrategy,
    policy1: &CopPolicy,
    policy2: &CopPolicy,
    start: ConcState,
    horizon: usize,
    seed: u64,
) -> EpisodeTrace<ConcState> {
    let mut rng = SplitMix64::new(seed);
    let mut states = vec![start];
    loop {
        let current = *states.last().expect("trace is never empty");
        if let Some(outcome) = outcome_of_class(current.classify()) {
            let length = states.len() - 1;
            return EpisodeTrace { states, outcome, length };
        }
        if states.len() > horizon || current == ConcState::Terminal {
            let length = states.len() - 1;
            return EpisodeTrace {
                states,
                outcome: Outcome::Truncated,
                length,
            };
        }
        let ConcState::Position { x1, x2, x3 } = current else {
            unreachable!("terminal handled above");
        };
        let a1 = sample_move(&policy1.move_support(x1, x2, x3), &mut rng);
        let a2 = sample_move(&policy2.move_support(x1, x2, x3), &mut rng);
        let dist = conc_transition(g, robber, &current, Action::Move(a1), Action::Move(a2))
            .expect("policy moves are legal");
        states.push(sample(&dist, &mut rng));
    }
}

fn summarize(outcomes: Vec<Outcome>) -> Estimate {
    let episodes = outcomes.len();
    let wins = outcomes.iter().filter(|&&o| o == Outcome::C1Wins).count();
    let truncated = outcomes.iter().filter(|&&o| o == Outcome::Truncated).count();
    let mean = wins as f64 / episodes as f64;
    Estimate {
        mean,
        standard_error: (mean * (1.0 - mean) / episodes as f64).sqrt(),
        episodes,
        truncated_fraction: truncated as f64 / episodes as f64,
    }
}

/// Win-probability estimate over independently seeded sequential episodes.
#[allow(clippy::too_many_arguments)]
pub fn estimate_sequential_value(
    g: &Graph,
    robber: &RobberStrategy,
    policy1: &CopPolicy,
    policy2: &CopPolicy,
    start: SeqState,
    episodes: usize,
    horizon: usize,
    master_seed: u64,
) -> Estimate {
    assert!(episodes >= 1);
    let outcomes = exec::map_indexed(episodes, |i| {
        play_sequential_episode(
            g,
            robber,
            policy1,
            policy2,
            start,
            horizon,
            episode_seed(master_seed, i as u64),
        )
        .outcome
    });
    summarize(outcomes)
}

/// Win-probability estimate over independently seeded concurrent episodes.
#[allow(clippy::too_many_arguments)]
pub fn estimate_concurrent_value(
    g: &Graph,
    robber: &RobberStrategy,
    policy1: &CopPolicy,
    policy2: &CopPolicy,
    start: ConcState,
    episodes: usize,
    horizon: usize,
    master_seed: u64,
) -> Estimate {
    assert!(episodes >= 1);
    let outcomes = exec::map_indexed(episodes, |i| {
        play_concurrent_episode(
            g,
            robber,
            policy1,
            policy2,
            start,
            horizon,
            episode_seed(master_seed, i as u64),
        )
        .outcome
    });
    summarize(outcomes)
}

/// Default simulation horizon: `4n²` turns.
pub fn default_horizon(g: &Graph) -> usize {
    4 * (g.vertex_count() as usize).pow(2)
}

/// Renders a trace in the dump format: one `t x1 x2 x3 [u]` line per state,
/// terminated by an `outcome` line.
pub fn write_sequential_trace(trace: &EpisodeTrace<SeqState>) -> String {
    let mut out = String::new();
    for (t, s) in trace.states.iter().enumerate() {
        match *s {
            SeqState::Position { x1, x2, x3, turn } => {
                out.push_str(&format!("{t} {x1} {x2} {x3} {turn}\n"));
            }
            SeqState::Terminal => out.push_str(&format!("{t} TAU\n")),
        }
    }
    out.push_str(&format!("outcome {}\n", trace.outcome.label()));
    out
}

/// Concurrent counterpart of [`write_sequential_trace`].
pub fn write_concurrent_trace(trace: &EpisodeTrace<ConcState>) -> String {
    let mut out = String::new();
    for (t, s) in trace.states.iter().enumerate() {
        match *s {
            ConcState::Position { x1, x2, x3 } => {
                out.push_str(&format!("{t} {x1} {x2} {x3}\n"));
            }
            ConcState::Terminal => out.push_str(&format!("{t} TAU\n")),
        }
    }
    out.push_str(&format!("outcome {}\n", trace.outcome.label()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::strategy::Player;
    use std::collections::BTreeMap;

    #[test]
    fn fixture_playout_passes_through_the_expected_states() {
        // First cop holds then intercepts at 3; second cop holds at 6. The
        // robber runs 1 → 4 → 3 and is met there.
        let fx = fixture::counterexample();
        let p1 = CopPolicy::deterministic(Player::One, BTreeMap::from([((2, 6, 4), 3)]));
        let p2 = CopPolicy::stay(Player::Two);
        let trace = play_concurrent_episode(
            &fx.graph,
            &fx.robber,
            &p1,
            &p2,
            ConcState::position(2, 6, 1),
            100,
            1,
        );
        assert_eq!(trace.outcome, Outcome::C1Wins);
        assert!(trace.states.contains(&ConcState::position(2, 6, 4)));
        assert_eq!(trace.states.last(), Some(&ConcState::position(3, 6, 3)));
        assert_eq!(trace.length, 2);
    }

    #[test]
    fn capture_start_ends_immediately() {
        let fx = fixture::counterexample();
        let p1 = CopPolicy::stay(Player::One);
        let p2 = CopPolicy::stay(Player::Two);
        let trace = play_concurrent_episode(
            &fx.graph,
            &fx.robber,
            &p1,
            &p2,
            ConcState::position(4, 6, 4),
            100,
            9,
        );
        assert_eq!(trace.outcome, Outcome::C1Wins);
        assert_eq!(trace.length, 0);
    }

    #[test]
    fn static_play_truncates_at_the_horizon() {
        let fx = fixture::counterexample();
        let p1 = CopPolicy::stay(Player::One);
        let p2 = CopPolicy::stay(Player::Two);
        let trace = play_sequential_episode(
            &fx.graph,
            &RobberStrategy::identity(),
            &p1,
            &p2,
            SeqState::position(1, 2, 6, 1),
            10,
            77,
        );
        assert_eq!(trace.outcome, Outcome::Truncated);
        assert_eq!(trace.length, 10);
        assert_eq!(trace.states.len(), 11);
    }

    #[test]
    fn same_seed_same_trace() {
        let fx = fixture::counterexample();
        let p1 = CopPolicy::mixed(
            Player::One,
            BTreeMap::from([((2, 6, 1), vec![(2, 0.5), (3, 0.5)])]),
        );
        let p2 = CopPolicy::mixed(
            Player::Two,
            BTreeMap::from([((2, 6, 1), vec![(5, 0.5), (6, 0.5)])]),
        );
        for seed in [0u64, 1, 99] {
            let a = play_concurrent_episode(
                &fx.graph,
                &fx.robber,
                &p1,
                &p2,
                ConcState::position(2, 6, 1),
                50,
                seed,
            );
            let b = play_concurrent_episode(
                &fx.graph,
                &fx.robber,
                &p1,
                &p2,
                ConcState::position(2, 6, 1),
                50,
                seed,
            );
            assert_eq!(a.states, b.states);
            assert_eq!(a.outcome, b.outcome);
        }
    }

    #[test]
    fn deterministic_instances_estimate_exactly() {
        let g = Graph::load("graph 3 2\ne 1 2\ne 2 3").unwrap();
        let robber = RobberStrategy::identity();
        // First cop adjacent, walks in; second cop far and static.
        let p1 = CopPolicy::deterministic(Player::One, BTreeMap::from([((2, 1, 3), 3)]));
        let p2 = CopPolicy::stay(Player::Two);
        let est = estimate_concurrent_value(
            &g,
            &robber,
            &p1,
            &p2,
            ConcState::position(2, 1, 3),
            1,
            100,
            123,
        );
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.standard_error, 0.0);
        assert_eq!(est.truncated_fraction, 0.0);
    }

    #[test]
    fn estimates_are_master_seed_reproducible() {
        let fx = fixture::counterexample();
        let p1 = CopPolicy::mixed(
            Player::One,
            BTreeMap::from([((2, 6, 1), vec![(2, 0.5), (3, 0.5)])]),
        );
        let p2 = CopPolicy::mixed(
            Player::Two,
            BTreeMap::from([((2, 6, 1), vec![(5, 0.5), (6, 0.5)])]),
        );
        let run = || {
            estimate_concurrent_value(
                &fx.graph,
                &fx.robber,
                &p1,
                &p2,
                ConcState::position(2, 6, 1),
                2000,
                100,
                0xfeed,
            )
        };
        let a = run();
        let b = run();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.truncated_fraction, b.truncated_fraction);
    }

    #[test]
    fn traces_replay_through_the_engine() {
        // Every consecutive state pair must be reachable with positive
        // probability under some pair of legal moves.
        use crate::engine::{conc_legal_actions, conc_transition};
        let fx = fixture::counterexample();
        let p1 = CopPolicy::mixed(
            Player::One,
            BTreeMap::from([((2, 6, 1), vec![(2, 0.5), (3, 0.5)])]),
        );
        let p2 = CopPolicy::mixed(
            Player::Two,
            BTreeMap::from([((2, 6, 1), vec![(5, 0.5), (6, 0.5)])]),
        );
        for seed in 0..20u64 {
            let trace = play_concurrent_episode(
                &fx.graph,
                &fx.robber,
                &p1,
                &p2,
                ConcState::position(2, 6, 1),
                30,
                seed,
            );
            for pair in trace.states.windows(2) {
                let (from, to) = (pair[0], pair[1]);
                let reachable = conc_legal_actions(&fx.graph, &from, Player::One)
                    .into_iter()
                    .any(|a1| {
                        conc_legal_actions(&fx.graph, &from, Player::Two).into_iter().any(
                            |a2| {
                                conc_transition(&fx.graph, &fx.robber, &from, a1, a2)
                                    .unwrap()
                                    .entries()
                                    .iter()
                                    .any(|&(s, p)| s == to && p > 0.0)
                            },
                        )
                    });
                assert!(reachable, "{from} -> {to} has no positive-probability move");
            }
        }
    }

    #[test]
    fn trace_dump_format() {
        let fx = fixture::counterexample();
        let p1 = CopPolicy::deterministic(Player::One, BTreeMap::from([((2, 6, 4), 3)]));
        let p2 = CopPolicy::stay(Player::Two);
        let trace = play_concurrent_episode(
            &fx.graph,
            &fx.robber,
            &p1,
            &p2,
            ConcState::position(2, 6, 1),
            100,
            1,
        );
        let dump = write_concurrent_trace(&trace);
        assert_eq!(dump, "0 2 6 1\n1 2 6 4\n2 3 6 3\noutcome C1\n");
    }
}
