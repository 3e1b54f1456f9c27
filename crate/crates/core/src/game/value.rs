//! Exact values of joint policies.
//!
//! Both formulations reduce to a Markov chain `P` over states with
//! per-player expected rewards `r_i`. Discounted values solve
//! `(I - gamma P) V_i = r_i`; average values weight `r_i` by the
//! stationary distribution `d`, which solves `d (P - I) = 0, sum d = 1`.

use nalgebra::{DMatrix, DVector};

use super::mdp::InducedMdp;
use super::{JointPolicy, Policy, RewardFormulation, StochasticGame};
use crate::error::{Error, Result};
use crate::linalg;

/// Per-player, per-state values.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    values: Vec<Vec<f64>>,
    initial_state: usize,
}

impl ValueTable {
    pub fn new(values: Vec<Vec<f64>>, initial_state: usize) -> Self {
        Self {
            values,
            initial_state,
        }
    }

    pub fn get(&self, player: usize, state: usize) -> f64 {
        self.values[player][state]
    }

    pub fn player(&self, player: usize) -> &[f64] {
        &self.values[player]
    }

    /// `V_i` at the initial state.
    pub fn initial(&self, player: usize) -> f64 {
        self.values[player][self.initial_state]
    }
}

/// State-to-state chain and per-player expected rewards under `joint`.
pub(crate) fn chain(game: &StochasticGame, joint: &JointPolicy) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n_states = game.state_count();
    let n_players = game.player_count();
    let mut p = vec![vec![0.0; n_states]; n_states];
    let mut r = vec![vec![0.0; n_states]; n_players];
    for (s, row) in p.iter_mut().enumerate() {
        let dist = game.joint_distribution(joint, s);
        for (j, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (t, q) in game.transition(s, j).iter().enumerate() {
                row[t] += w * q;
            }
            for (i, ri) in r.iter_mut().enumerate() {
                ri[s] += w * game.reward(i, s, j);
            }
        }
    }
    (p, r)
}

/// Solves `(I - gamma P) V = r` for every reward vector in `rewards`.
pub(crate) fn discounted_chain_values(
    p: &[Vec<f64>],
    rewards: &[Vec<f64>],
    gamma: f64,
) -> Result<Vec<Vec<f64>>> {
    let n = p.len();
    let a = DMatrix::from_fn(n, n, |s, t| {
        let identity = if s == t { 1.0 } else { 0.0 };
        identity - gamma * p[s][t]
    });
    let rhs: Vec<DVector<f64>> = rewards
        .iter()
        .map(|r| DVector::from_column_slice(r))
        .collect();
    Ok(linalg::solve_many(a, &rhs)?
        .into_iter()
        .map(|v| v.iter().copied().collect())
        .collect())
}

/// Number of closed communicating classes of the chain's support graph.
pub(crate) fn closed_class_count(p: &[Vec<f64>]) -> usize {
    let reach = reachability(p, |s, t| p[s][t] > 0.0);
    let n = p.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let closed = (0..n).all(|t| !reach[s][t] || reach[t][s]);
        if closed {
            count += 1;
            for t in 0..n {
                if reach[s][t] {
                    seen[t] = true;
                }
            }
        }
    }
    count
}

/// `reach[s][t]`: t is reachable from s in zero or more steps.
fn reachability(p: &[Vec<f64>], edge: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    let n = p.len();
    let mut reach = vec![vec![false; n]; n];
    for (s, row) in reach.iter_mut().enumerate() {
        let mut stack = vec![s];
        row[s] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !row[v] && edge(u, v) {
                    row[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    reach
}

/// Stationary distribution of a unichain chain.
pub(crate) fn chain_stationary(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    let classes = closed_class_count(p);
    if classes != 1 {
        return Err(Error::Ergodicity(format!(
            "chain has {classes} closed classes under this joint policy"
        )));
    }
    // Rows of (P^T - I), last one replaced by the normalization.
    let a = DMatrix::from_fn(n, n, |s, t| {
        if s == n - 1 {
            1.0
        } else {
            let identity = if s == t { 1.0 } else { 0.0 };
            p[t][s] - identity
        }
    });
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let d = linalg::solve(a, &b)?;
    Ok(d.iter().copied().collect())
}

pub(crate) fn average_chain_values(p: &[Vec<f64>], rewards: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = chain_stationary(p)?;
    Ok(rewards.iter().map(|r| linalg::dot(&d, r)).collect())
}

/// Discounted values `V_i^pi(s)` for every player and state.
pub fn policy_value_discounted(game: &StochasticGame, joint: &JointPolicy) -> Result<ValueTable> {
    let RewardFormulation::Discounted(gamma) = game.formulation() else {
        return Err(Error::Formulation("discounted value requested for an average-reward game".into()));
    };
    game.check_joint(joint)?;
    let (p, r) = chain(game, joint);
    Ok(ValueTable::new(
        discounted_chain_values(&p, &r, gamma)?,
        game.initial_state(),
    ))
}

/// Long-run average reward per player (the same from every state).
pub fn policy_value_average(game: &StochasticGame, joint: &JointPolicy) -> Result<Vec<f64>> {
    if game.formulation() != RewardFormulation::Average {
        return Err(Error::Formulation("average value requested for a discounted game".into()));
    }
    game.check_joint(joint)?;
    if !check_ergodic(game) {
        return Err(Error::Ergodicity("states do not form a single communicating class".into()));
    }
    let (p, r) = chain(game, joint);
    average_chain_values(&p, &r)
}

/// Stationary state distribution under `joint`.
pub fn stationary_distribution(game: &StochasticGame, joint: &JointPolicy) -> Result<Vec<f64>> {
    game.check_joint(joint)?;
    let (p, _) = chain(game, joint);
    chain_stationary(&p)
}

/// `V_i^pi` at the initial state, whichever formulation the game uses.
pub fn policy_value(game: &StochasticGame, joint: &JointPolicy) -> Result<Vec<f64>> {
    match game.formulation() {
        RewardFormulation::Discounted(_) => {
            let table = policy_value_discounted(game, joint)?;
            Ok((0..game.player_count()).map(|i| table.initial(i)).collect())
        }
        RewardFormulation::Average => policy_value_average(game, joint),
    }
}

/// Largest violation of the discounted Bellman equations by `table`.
pub fn bellman_residual(game: &StochasticGame, joint: &JointPolicy, table: &ValueTable) -> Result<f64> {
    let RewardFormulation::Discounted(gamma) = game.formulation() else {
        return Err(Error::Formulation("Bellman residual needs a discounted game".into()));
    };
    let mut worst: f64 = 0.0;
    for s in 0..game.state_count() {
        let dist = game.joint_distribution(joint, s);
        for i in 0..game.player_count() {
            let mut rhs = 0.0;
            for (j, &w) in dist.iter().enumerate() {
                let next: f64 = game
                    .transition(s, j)
                    .iter()
                    .enumerate()
                    .map(|(t, q)| q * table.get(i, t))
                    .sum();
                rhs += w * (game.reward(i, s, j) + gamma * next);
            }
            worst = worst.max((table.get(i, s) - rhs).abs());
        }
    }
    Ok(worst)
}

/// Whether the union of all joint actions' transition supports forms a
/// single communicating class.
///
/// This is necessary for ergodicity under every joint policy but weaker
/// than it: a particular policy can still split the chain, which the
/// average-value evaluators detect and report.
pub fn check_ergodic(game: &StochasticGame) -> bool {
    let n = game.state_count();
    let support: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            (0..n)
                .map(|t| {
                    let any = (0..game.joint_count()).any(|j| game.transition(s, j)[t] > 0.0);
                    if any {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let reach = reachability(&support, |s, t| support[s][t] > 0.0);
    reach.iter().all(|row| row.iter().all(|r| *r))
}

/// The MDP player `player` faces when everyone else follows `others`.
pub fn induce_mdp(game: &StochasticGame, player: usize, others: &[Policy]) -> Result<InducedMdp> {
    if player >= game.player_count() {
        return Err(Error::OutOfRange(format!("player {player}")));
    }
    if others.len() + 1 != game.player_count() {
        return Err(Error::Dimension(format!(
            "{} opponent policies for a {}-player game",
            others.len(),
            game.player_count()
        )));
    }
    let n_states = game.state_count();
    let n_actions = game.action_count(player);
    // Opponent policies padded with a placeholder for the player itself;
    // the joint distribution is then split by the player's own action.
    let own = Policy::uniform(n_states, n_actions);
    let joint = JointPolicy::assemble(player, own, others);
    game.check_joint(&joint)?;

    let mut transition = vec![vec![vec![0.0; n_states]; n_actions]; n_states];
    let mut reward = vec![vec![0.0; n_actions]; n_states];
    for s in 0..n_states {
        for j in 0..game.joint_count() {
            let actions = game.joint_actions(j);
            let weight: f64 = actions
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != player)
                .map(|(k, a)| joint.policy(k).prob(s, *a))
                .product();
            if weight == 0.0 {
                continue;
            }
            let a = actions[player];
            for (t, q) in game.transition(s, j).iter().enumerate() {
                transition[s][a][t] += weight * q;
            }
            reward[s][a] += weight * game.reward(player, s, j);
        }
    }
    Ok(InducedMdp::new(
        transition,
        reward,
        game.initial_state(),
        game.formulation(),
    ))
}

/// One-shot expected payoff of a single-state game, scaled by
/// `1 / (1 - gamma)` when discounted.
pub fn matrix_value(game: &StochasticGame, joint: &JointPolicy) -> Result<Vec<f64>> {
    if !game.is_matrix_game() {
        return Err(Error::Unsupported(format!(
            "matrix value needs one state, game has {}",
            game.state_count()
        )));
    }
    game.check_joint(joint)?;
    let scale = match game.formulation() {
        RewardFormulation::Discounted(gamma) => 1.0 / (1.0 - gamma),
        RewardFormulation::Average => 1.0,
    };
    let dist = game.joint_distribution(joint, 0);
    Ok((0..game.player_count())
        .map(|i| {
            scale
                * dist
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * game.reward(i, 0, j))
                    .sum::<f64>()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{blotto_4_3, fact5_default, rps, MixedStrategy};

    /// Two states cycling s0 -> s1 -> s0 regardless of actions; one player
    /// with one action, reward 0 at s0 and 1 at s1.
    fn two_cycle(formulation: RewardFormulation) -> StochasticGame {
        StochasticGame::new(
            vec!["s0".into(), "s1".into()],
            vec![vec!["a".into()]],
            vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
            vec![vec![vec![0.0], vec![1.0]]],
            0,
            formulation,
        )
        .unwrap()
    }

    fn one_player_joint(states: usize) -> JointPolicy {
        JointPolicy::new(vec![Policy::uniform(states, 1)])
    }

    #[test]
    fn constant_reward_geometric_series() {
        let mut g = rps().with_formulation(RewardFormulation::Discounted(0.5));
        for i in 0..2 {
            for j in 0..9 {
                *g.reward_mut(i, 0, j) = 3.0;
            }
        }
        let joint = JointPolicy::new(vec![Policy::uniform(1, 3), Policy::pure(3, &[2])]);
        let v = policy_value_discounted(&g, &joint).unwrap();
        assert!((v.initial(0) - 6.0).abs() < 1e-12);
        assert!((v.initial(1) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_state_cycle_discounted() {
        // V0 = 0.5 V1, V1 = 1 + 0.5 V0  =>  V0 = 2/3, V1 = 4/3
        let g = two_cycle(RewardFormulation::Discounted(0.5));
        let v = policy_value_discounted(&g, &one_player_joint(2)).unwrap();
        assert!((v.get(0, 0) - 2.0 / 3.0).abs() < 1e-12);
        assert!((v.get(0, 1) - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_state_cycle_average() {
        let g = two_cycle(RewardFormulation::Average);
        let v = policy_value_average(&g, &one_player_joint(2)).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-12);
        assert!(check_ergodic(&g));
    }

    #[test]
    fn formulation_mismatch_is_an_error() {
        let g = two_cycle(RewardFormulation::Average);
        assert!(matches!(
            policy_value_discounted(&g, &one_player_joint(2)),
            Err(Error::Formulation(_))
        ));
        let g = two_cycle(RewardFormulation::Discounted(0.5));
        assert!(matches!(
            policy_value_average(&g, &one_player_joint(2)),
            Err(Error::Formulation(_))
        ));
    }

    #[test]
    fn absorbing_state_is_not_ergodic() {
        let g = StochasticGame::new(
            vec!["s0".into(), "sink".into()],
            vec![vec!["a".into()]],
            vec![vec![vec![0.5, 0.5]], vec![vec![0.0, 1.0]]],
            vec![vec![vec![0.0], vec![1.0]]],
            0,
            RewardFormulation::Average,
        )
        .unwrap();
        assert!(!check_ergodic(&g));
        assert!(matches!(
            policy_value_average(&g, &one_player_joint(2)),
            Err(Error::Ergodicity(_))
        ));
    }

    #[test]
    fn policy_that_splits_the_chain_is_rejected() {
        // Action 0 stays put, action 1 swaps: ergodic under the union of
        // supports, but "always stay" has two closed classes.
        let g = StochasticGame::new(
            vec!["a".into(), "b".into()],
            vec![vec!["stay".into(), "swap".into()]],
            vec![
                vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            ],
            vec![vec![vec![0.0, 0.0], vec![1.0, 1.0]]],
            0,
            RewardFormulation::Average,
        )
        .unwrap();
        assert!(check_ergodic(&g));
        let stay = JointPolicy::new(vec![Policy::pure(2, &[0, 0])]);
        assert!(matches!(policy_value_average(&g, &stay), Err(Error::Ergodicity(_))));
        let swap = JointPolicy::new(vec![Policy::pure(2, &[1, 1])]);
        assert!((policy_value_average(&g, &swap).unwrap()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fact5_is_ergodic() {
        assert!(check_ergodic(&fact5_default()));
    }

    #[test]
    fn matrix_values_from_tables() {
        let g = rps();
        let joint = JointPolicy::new(vec![Policy::pure(3, &[0]), Policy::pure(3, &[1])]);
        assert_eq!(matrix_value(&g, &joint).unwrap(), vec![-1.0, 1.0]);
        let uniform = JointPolicy::new(vec![Policy::uniform(1, 3), Policy::uniform(1, 3)]);
        let v = matrix_value(&g, &uniform).unwrap();
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);

        let b = blotto_4_3();
        let joint = JointPolicy::new(vec![Policy::pure(5, &[0]), Policy::pure(4, &[0])]);
        assert_eq!(matrix_value(&b, &joint).unwrap(), vec![4.0, -4.0]);
    }

    #[test]
    fn matrix_value_agrees_with_discounted_evaluation() {
        let g = rps().with_formulation(RewardFormulation::Discounted(0.8));
        let joint = JointPolicy::new(vec![
            Policy::from_rows(vec![vec![0.2, 0.5, 0.3]]).unwrap(),
            Policy::from_rows(vec![vec![0.6, 0.1, 0.3]]).unwrap(),
        ]);
        let direct = matrix_value(&g, &joint).unwrap();
        let table = policy_value_discounted(&g, &joint).unwrap();
        for i in 0..2 {
            assert!((direct[i] - table.initial(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_value_rejects_multi_state_games() {
        let g = fact5_default();
        let joint = JointPolicy::new(vec![Policy::uniform(3, 2), Policy::uniform(3, 2)]);
        assert!(matches!(matrix_value(&g, &joint), Err(Error::Unsupported(_))));
    }

    #[test]
    fn induced_mdp_against_uniform_rps_has_zero_rewards() {
        let g = rps();
        let mdp = induce_mdp(&g, 0, &[Policy::uniform(1, 3)]).unwrap();
        for a in 0..3 {
            assert!(mdp.reward(0, a).abs() < 1e-15);
        }
    }

    #[test]
    fn induced_mdp_against_pure_opponent_is_a_column() {
        let g = rps();
        // column plays Scissors: row rewards are the third column of R_r
        let mdp = induce_mdp(&g, 0, &[Policy::pure(3, &[2])]).unwrap();
        let rewards: Vec<f64> = (0..3).map(|a| mdp.reward(0, a)).collect();
        assert_eq!(rewards, vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn fact5_row_mdp_has_action_independent_transitions() {
        let g = fact5_default();
        let column = Policy::stationary(3, MixedStrategy::new(vec![0.3, 0.7]).unwrap());
        let mdp = induce_mdp(&g, 0, &[column]).unwrap();
        for s in 0..3 {
            assert_eq!(mdp.transition(s, 0), mdp.transition(s, 1));
        }
    }

    #[test]
    fn induce_mdp_checks_dimensions() {
        let g = rps();
        assert!(matches!(
            induce_mdp(&g, 0, &[Policy::uniform(1, 2)]),
            Err(Error::Dimension(_))
        ));
        assert!(induce_mdp(&g, 0, &[]).is_err());
    }
}
