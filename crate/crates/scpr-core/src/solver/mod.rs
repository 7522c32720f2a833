//! Game solvers: value iteration for both variants, the capture-time dynamic
//! program for oblivious deterministic robbers, best responses and policy
//! evaluation.
//!
//! Every iterative routine here is an instance of one scheme: start from the
//! immediate-payoff vector and repeatedly apply a per-state update operator
//! until the sup-norm change drops below tolerance. The game is positive
//! (payoffs nonnegative, collected once), so the iterates increase
//! monotonically toward the smallest solution of the optimality equations;
//! both facts are tracked and reported.
//!
//! Sweeps are Jacobi-style: iteration `i` reads only iteration `i − 1`, so
//! states update independently and in parallel with bit-identical results.

mod concurrent;
mod model;
mod oblivious;
mod response;
mod sequential;

pub use concurrent::{solve_concurrent, state_matrix_game, StateGame};
pub use oblivious::{
    oblivious_capture_times, solve_oblivious_concurrent, verify_pure_minimax, CaptureTimeTable,
};
pub use response::{best_response, certify_epsilon, evaluate_policies, EpsilonCertificate};
pub use sequential::solve_sequential;

use thiserror::Error;

use crate::exec;
use crate::strategy::{CopPolicy, Player, PolicyViolation};

/// Convergence knobs shared by all iterative solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolveParams {
    /// Stop once the sup-norm change of a sweep is below this.
    pub tol: f64,
    /// Sweep budget; defaults to ten times the state-space size, which
    /// covers both the exactly-stabilizing deterministic case and the
    /// geometric stochastic one.
    pub max_iter: Option<usize>,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

impl SolveParams {
    pub fn with_tol(tol: f64) -> Self {
        SolveParams {
            tol,
            max_iter: None,
        }
    }

    fn resolved_max_iter(&self, state_count: usize) -> usize {
        self.max_iter.unwrap_or(10 * state_count).max(1)
    }

    /// Nominal optimality slack reported when no certificate is computed.
    pub fn nominal_epsilon(&self) -> f64 {
        10.0 * self.tol
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("requires an oblivious deterministic robber law, got kind `{kind}`")]
    NotOblivious { kind: &'static str },
    #[error("invalid policy for {player}: {} violation(s), first: {}",
            .violations.len(),
            .violations.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidPolicy {
        player: Player,
        violations: Vec<PolicyViolation>,
    },
    #[error("expected one policy per player, in order C1 then C2")]
    WrongPlayers,
}

pub(crate) fn require_valid_policy(
    policy: &CopPolicy,
    g: &crate::graph::Graph,
) -> Result<(), SolverError> {
    let violations = policy.validate(g);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SolverError::InvalidPolicy {
            player: policy.player,
            violations,
        })
    }
}

/// Converged (or budget-exhausted) per-state values with iteration metadata.
#[derive(Debug, Clone)]
pub struct ValueVector {
    values: Vec<f64>,
    /// Sweeps performed.
    pub iterations: usize,
    /// Sup-norm change of the final sweep.
    pub residual: f64,
    /// False when the sweep budget ran out with the residual at or above
    /// tolerance; the values are still returned.
    pub converged: bool,
    /// Whether every sweep increased every component (exact comparison).
    pub monotone: bool,
    /// Whether every iterate of every sweep stayed inside [0, 1].
    pub in_unit_interval: bool,
}

impl ValueVector {
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A solved game: values, one stationary policy per cop, the residual of the
/// optimality equations at the returned values, and the optimality slack
/// `epsilon` (nominal unless a certificate replaced it).
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub values: ValueVector,
    pub policy1: CopPolicy,
    pub policy2: CopPolicy,
    pub optimality_residual: f64,
    pub epsilon: f64,
}

pub(crate) struct ModelSolution {
    pub values: ValueVector,
    /// Per state, the maximizing side's play recorded at the sweep where the
    /// state's value last increased. In a positive game a maximizer policy
    /// that is merely greedy for the converged values can stall on a value
    /// plateau and never collect; the play that *raised* the value makes
    /// strict progress toward capture, so it is the one kept. States whose
    /// value never moved are filled from the converged values at the end.
    pub max_choices: Vec<Option<model::MaxChoice>>,
}

/// Runs Jacobi value iteration on a model from its immediate payoffs until
/// the sup-norm change is below `tol` or the sweep budget is exhausted.
pub(crate) fn solve_model(m: &model::Model, params: &SolveParams) -> ModelSolution {
    let len = m.len();
    let max_iter = params.resolved_max_iter(len);
    let mut current = m.initial_values();
    let mut max_choices: Vec<Option<model::MaxChoice>> = vec![None; len];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut monotone = true;
    let mut in_unit_interval = current.iter().all(|&v| (0.0..=1.0).contains(&v));

    while iterations < max_iter {
        let next = exec::map_indexed(len, |i| m.apply_with_choice(i, &current));
        iterations += 1;
        let mut change = 0.0f64;
        for (i, (value, choice)) in next.iter().enumerate() {
            let delta = value - current[i];
            if delta < 0.0 {
                monotone = false;
            }
            if delta > 0.0 {
                if let Some(choice) = choice {
                    max_choices[i] = Some(choice.clone());
                }
            }
            change = change.max(delta.abs());
            if !(0.0..=1.0).contains(value) {
                in_unit_interval = false;
            }
        }
        for (slot, (value, _)) in current.iter_mut().zip(&next) {
            *slot = *value;
        }
        residual = change;
        if change < params.tol {
            converged = true;
            break;
        }
    }

    for (i, slot) in max_choices.iter_mut().enumerate() {
        if slot.is_none() {
            *slot = m.apply_with_choice(i, &current).1;
        }
    }

    ModelSolution {
        values: ValueVector {
            values: current,
            iterations,
            residual,
            converged,
            monotone,
            in_unit_interval,
        },
        max_choices,
    }
}

/// Largest violation of `v = update(v)` at the given values.
pub(crate) fn operator_residual<F>(values: &[f64], update: F) -> f64
where
    F: Fn(usize, &[f64]) -> f64 + Sync + Send,
{
    let reapplied = exec::map_indexed(values.len(), |i| update(i, values));
    values
        .iter()
        .zip(&reapplied)
        .map(|(&a, &b)| (a - b).abs())
        .fold(0.0, f64::max)
}
