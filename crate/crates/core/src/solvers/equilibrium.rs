use super::best_response::restricted_best_response;
use super::minimax::{minimax_zero_sum_matrix, MinimaxSolution};
use crate::error::{Error, Result};
use crate::game::{policy_value, JointPolicy, Policy, StochasticGame};
use crate::restrictions::{build_implicit, ImplicitGame, RestrictedPolicySpace, TauMapping};
use crate::tol;

/// Outcome of checking a joint policy for a restricted equilibrium.
#[derive(Debug, Clone)]
pub struct EquilibriumCertificate {
    pub joint: JointPolicy,
    /// Per player, best restricted deviation value minus current value at
    /// the initial state.
    pub gaps: Vec<f64>,
    pub epsilon: f64,
    /// `max(gaps) <= epsilon`.
    pub verdict: bool,
}

impl EquilibriumCertificate {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }
}

/// Regret gap of each player against its restricted space.
///
/// Every policy must lie in its space (tolerance 1e-9).
pub fn check_equilibrium(
    game: &StochasticGame,
    joint: &JointPolicy,
    spaces: &[RestrictedPolicySpace],
    epsilon: f64,
) -> Result<EquilibriumCertificate> {
    game.check_joint(joint)?;
    if spaces.len() != game.player_count() {
        return Err(Error::Dimension(format!(
            "{} spaces for {} players",
            spaces.len(),
            game.player_count()
        )));
    }
    for (i, space) in spaces.iter().enumerate() {
        if !space.contains(joint.policy(i), tol::MEMBERSHIP) {
            return Err(Error::NotInSpace { player: i });
        }
    }
    let current = policy_value(game, joint)?;
    let gaps = (0..game.player_count())
        .map(|i| {
            let br = restricted_best_response(game, i, &joint.others(i), &spaces[i])?;
            Ok((br.value - current[i]).max(0.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let verdict = gaps.iter().all(|&g| g <= epsilon);
    Ok(EquilibriumCertificate {
        joint: joint.clone(),
        gaps,
        epsilon,
        verdict,
    })
}

/// Most pure joint policies [`enumerate_deterministic`] will check.
pub const MAX_PURE_JOINT: f64 = 1e5;

/// Certificate for every pure joint policy, against unrestricted
/// deviations. A pure profile that fails here also fails against pure-only
/// deviations, since some pure deviation is always among the best.
pub fn enumerate_deterministic(game: &StochasticGame, epsilon: f64) -> Result<Vec<EquilibriumCertificate>> {
    let states = game.state_count();
    let per_player: Vec<f64> = (0..game.player_count())
        .map(|i| (game.action_count(i) as f64).powi(states as i32))
        .collect();
    let total: f64 = per_player.iter().product();
    if total > MAX_PURE_JOINT {
        return Err(Error::Size(format!("{total} pure joint policies")));
    }
    let full = vec![RestrictedPolicySpace::Full; game.player_count()];
    let mut out = Vec::with_capacity(total as usize);
    for index in 0..total as usize {
        let mut rest = index;
        let mut policies = vec![Policy::new(vec![]); game.player_count()];
        for i in (0..game.player_count()).rev() {
            let count = per_player[i] as usize;
            let mut code = rest % count;
            rest /= count;
            let n = game.action_count(i);
            let mut choice = vec![0; states];
            for c in choice.iter_mut().rev() {
                *c = code % n;
                code /= n;
            }
            policies[i] = Policy::pure(n, &choice);
        }
        out.push(check_equilibrium(game, &JointPolicy::new(policies), &full, epsilon)?);
    }
    Ok(out)
}

/// A restricted equilibrium of a zero-sum matrix game found by solving
/// the implicit game over hull generators.
#[derive(Debug, Clone)]
pub struct ImplicitEquilibrium {
    pub implicit: ImplicitGame,
    /// Minimax solution over generator indices.
    pub solution: MinimaxSolution,
    /// The same strategies expressed over the original actions.
    pub joint: JointPolicy,
    pub certificate: EquilibriumCertificate,
}

impl ImplicitEquilibrium {
    /// Value to the row player.
    pub fn value(&self) -> f64 {
        self.solution.value
    }
}

/// Restricted equilibrium of a zero-sum matrix game whose players are
/// limited to global hulls (or unrestricted).
pub fn restricted_equilibrium_via_implicit(
    game: &StochasticGame,
    spaces: &[RestrictedPolicySpace],
) -> Result<ImplicitEquilibrium> {
    if game.player_count() != 2 || !game.is_matrix_game() {
        return Err(Error::Unsupported("needs a two-player matrix game".into()));
    }
    if !game.classify().zero_sum {
        return Err(Error::Unsupported("game is not zero-sum".into()));
    }
    if spaces.len() != 2 {
        return Err(Error::Dimension("one space per player".into()));
    }
    let mut tau = TauMapping::identity(game);
    for (i, space) in spaces.iter().enumerate() {
        match space {
            RestrictedPolicySpace::Full => {}
            RestrictedPolicySpace::ConvexHullGlobal(gens) => {
                tau = tau.with_hull(game, i, gens)?;
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "implicit solve needs full or hull spaces, got {other:?}"
                )))
            }
        }
    }
    let implicit = build_implicit(game, tau, None)?;
    let solution = minimax_zero_sum_matrix(&implicit.game)?;
    let implicit_joint = JointPolicy::new(vec![
        Policy::new(vec![solution.row.clone()]),
        Policy::new(vec![solution.col.clone()]),
    ]);
    let joint = implicit.map_policy(&implicit_joint)?;
    let certificate = check_equilibrium(game, &joint, spaces, tol::CROSS_ORACLE)?;
    Ok(ImplicitEquilibrium {
        implicit,
        solution,
        joint,
        certificate,
    })
}

/// Players take turns replacing their policy with a restricted best
/// response until a full round changes nothing. Returns the final joint
/// policy and whether it stopped changing within `max_rounds`.
pub fn best_response_dynamics(
    game: &StochasticGame,
    spaces: &[RestrictedPolicySpace],
    start: JointPolicy,
    max_rounds: usize,
) -> Result<(JointPolicy, bool)> {
    let mut joint = start;
    for _ in 0..max_rounds {
        let mut changed = false;
        for (i, space) in spaces.iter().enumerate() {
            let br = restricted_best_response(game, i, &joint.others(i), space)?;
            let current = policy_value(game, &joint)?[i];
            // Only move for a strict improvement, so fixed points are stable.
            if br.value > current + tol::SOLVED * (1.0 + current.abs()) {
                joint = joint.with(i, br.policy);
                changed = true;
            }
        }
        if !changed {
            return Ok((joint, true));
        }
    }
    Ok((joint, false))
}
