//! Best responses against frozen policies, joint policy evaluation, and the
//! numeric optimality certificates built from them.
//!
//! Freezing one cop's stationary policy folds it into the transition kernel
//! and leaves a one-player optimization; freezing both leaves a plain Markov
//! chain whose expected payoff satisfies a linear fixed point. Both reuse
//! the same iteration driver as the full solvers.

use crate::engine::{ConcSpace, SeqSpace, Variant};
use crate::graph::Graph;
use crate::strategy::{CopPolicy, Player, RobberStrategy};

use super::model::{conc_model, seq_model, Model, Role};
use super::{
    require_valid_policy, solve_model, SolveParams, SolveReport, SolverError, ValueVector,
};

fn run(model: &Model, params: &SolveParams) -> ValueVector {
    solve_model(model, params).values
}

/// Value of the game when `fixed` is announced and the other cop plays a
/// best response: the supremum over the first cop's strategies when the
/// second is frozen, the infimum over the second's when the first is.
pub fn best_response(
    g: &Graph,
    robber: &RobberStrategy,
    variant: Variant,
    fixed: &CopPolicy,
    params: &SolveParams,
) -> Result<ValueVector, SolverError> {
    require_valid_policy(fixed, g)?;
    let (role1, role2) = match fixed.player {
        Player::One => (Role::Follows(fixed), Role::Optimizes),
        Player::Two => (Role::Optimizes, Role::Follows(fixed)),
    };
    let model = match variant {
        Variant::Sequential => seq_model(g, robber, &SeqSpace::new(g), role1, role2),
        Variant::Concurrent => conc_model(g, robber, &ConcSpace::new(g), role1, role2),
    };
    Ok(run(&model, params))
}

/// Expected payoff to the first cop when both follow the given policies:
/// the solution of `w = q + P w` for the induced chain, `w(terminal) = 0`.
pub fn evaluate_policies(
    g: &Graph,
    robber: &RobberStrategy,
    variant: Variant,
    policy1: &CopPolicy,
    policy2: &CopPolicy,
    params: &SolveParams,
) -> Result<ValueVector, SolverError> {
    if policy1.player != Player::One || policy2.player != Player::Two {
        return Err(SolverError::WrongPlayers);
    }
    require_valid_policy(policy1, g)?;
    require_valid_policy(policy2, g)?;
    let (role1, role2) = (Role::Follows(policy1), Role::Follows(policy2));
    let model = match variant {
        Variant::Sequential => seq_model(g, robber, &SeqSpace::new(g), role1, role2),
        Variant::Concurrent => conc_model(g, robber, &ConcSpace::new(g), role1, role2),
    };
    Ok(run(&model, params))
}

/// Numeric optimality certificate for a solved game.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonCertificate {
    /// How far above the value the first cop can push by deviating against
    /// the returned second-cop policy.
    pub c2_exploitability: f64,
    /// How far below the value the second cop can push against the returned
    /// first-cop policy.
    pub c1_exploitability: f64,
    /// The certified optimality slack: the larger of the two.
    pub epsilon: f64,
}

/// Measures both policies of a report by best response.
pub fn certify_epsilon(
    g: &Graph,
    robber: &RobberStrategy,
    variant: Variant,
    report: &SolveReport,
    params: &SolveParams,
) -> Result<EpsilonCertificate, SolverError> {
    let against_p2 = best_response(g, robber, variant, &report.policy2, params)?;
    let against_p1 = best_response(g, robber, variant, &report.policy1, params)?;
    let v = report.values.as_slice();
    let c2_exploitability = against_p2
        .as_slice()
        .iter()
        .zip(v)
        .map(|(&br, &val)| br - val)
        .fold(0.0f64, f64::max);
    let c1_exploitability = against_p1
        .as_slice()
        .iter()
        .zip(v)
        .map(|(&br, &val)| val - br)
        .fold(0.0f64, f64::max);
    Ok(EpsilonCertificate {
        c2_exploitability,
        c1_exploitability,
        epsilon: c2_exploitability.max(c1_exploitability),
    })
}
