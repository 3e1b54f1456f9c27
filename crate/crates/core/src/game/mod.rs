//! Stochastic games, policies, and their exact values.
//!
//! A game stores dense tables indexed by state and *joint action*. Joint
//! actions are numbered row-major over the players' action indices, so
//! player 0 is the most significant digit.

mod builders;
mod mdp;
mod policy;
mod value;

use serde::{Deserialize, Serialize};

pub use builders::{
    bach_stravinsky, bimatrix, blotto_4_3, fact5_default, fact5_game, rps, zero_sum_matrix,
    FACT5_LEFT, FACT5_RIGHT,
};
pub use mdp::{InducedMdp, VertexOptimum};
pub use policy::{JointPolicy, MixedStrategy, Policy};
pub use value::{
    bellman_residual, check_ergodic, induce_mdp, matrix_value, policy_value,
    policy_value_average, policy_value_discounted, stationary_distribution, ValueTable,
};

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardFormulation {
    /// Geometric discounting with factor in (0, 1).
    Discounted(f64),
    /// Long-run average reward; requires an ergodic game.
    Average,
}

impl RewardFormulation {
    pub fn discounted(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(Self::Discounted(gamma))
        } else {
            Err(Error::OutOfRange(format!("discount factor {gamma} not in (0, 1)")))
        }
    }
}

/// The tuple (n, S, A_1..n, T, R_1..n, s_0) plus its reward formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticGame {
    states: Vec<String>,
    action_sets: Vec<Vec<String>>,
    // [state][joint][next]
    transitions: Vec<Vec<Vec<f64>>>,
    // [player][state][joint]
    rewards: Vec<Vec<Vec<f64>>>,
    initial_state: usize,
    formulation: RewardFormulation,
}

/// One violated structural invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub state: Option<String>,
    pub joint_action: Option<Vec<usize>>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (&self.state, &self.joint_action) {
            (Some(s), Some(a)) => write!(f, "state {s}, joint action {a:?}: {}", self.message),
            (Some(s), None) => write!(f, "state {s}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

/// Structural predicates used by the existence results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub zero_sum: bool,
    pub no_control: bool,
    /// Entry `i` is true when transitions depend only on player `i`'s action.
    pub single_controller: Vec<bool>,
    pub team: bool,
}

impl Classification {
    pub fn is_single_controller(&self, player: usize) -> bool {
        self.single_controller.get(player).copied().unwrap_or(false)
    }
}

impl StochasticGame {
    /// Assembles a game from dense tables without checking them; call
    /// [`StochasticGame::validate`] before trusting the result.
    pub fn from_parts(
        states: Vec<String>,
        action_sets: Vec<Vec<String>>,
        transitions: Vec<Vec<Vec<f64>>>,
        rewards: Vec<Vec<Vec<f64>>>,
        initial_state: usize,
        formulation: RewardFormulation,
    ) -> Self {
        Self {
            states,
            action_sets,
            transitions,
            rewards,
            initial_state,
            formulation,
        }
    }

    /// Like [`StochasticGame::from_parts`] but fails on any violation.
    pub fn new(
        states: Vec<String>,
        action_sets: Vec<Vec<String>>,
        transitions: Vec<Vec<Vec<f64>>>,
        rewards: Vec<Vec<Vec<f64>>>,
        initial_state: usize,
        formulation: RewardFormulation,
    ) -> Result<Self> {
        let game = Self::from_parts(states, action_sets, transitions, rewards, initial_state, formulation);
        let report = game.validate();
        if let Some(first) = report.first() {
            return Err(Error::Malformed(format!(
                "{} violation(s), first: {first}",
                report.len()
            )));
        }
        Ok(game)
    }

    pub fn player_count(&self) -> usize {
        self.action_sets.len()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_sets(&self) -> &[Vec<String>] {
        &self.action_sets
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.action_sets[player].len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn formulation(&self) -> RewardFormulation {
        self.formulation
    }

    pub fn with_formulation(mut self, formulation: RewardFormulation) -> Self {
        self.formulation = formulation;
        self
    }

    pub fn with_initial_state(mut self, state: usize) -> Self {
        self.initial_state = state;
        self
    }

    pub fn is_matrix_game(&self) -> bool {
        self.states.len() == 1
    }

    pub fn joint_count(&self) -> usize {
        self.action_sets.iter().map(Vec::len).product()
    }

    /// Row-major index of a joint action.
    pub fn joint_index(&self, actions: &[usize]) -> usize {
        actions
            .iter()
            .zip(&self.action_sets)
            .fold(0, |acc, (a, set)| acc * set.len() + a)
    }

    /// Inverse of [`StochasticGame::joint_index`].
    pub fn joint_actions(&self, joint: usize) -> Vec<usize> {
        let mut rest = joint;
        let mut actions = vec![0; self.action_sets.len()];
        for (i, set) in self.action_sets.iter().enumerate().rev() {
            actions[i] = rest % set.len();
            rest /= set.len();
        }
        actions
    }

    pub fn transition(&self, state: usize, joint: usize) -> &[f64] {
        &self.transitions[state][joint]
    }

    pub fn transition_mut(&mut self, state: usize, joint: usize) -> &mut Vec<f64> {
        &mut self.transitions[state][joint]
    }

    pub fn reward(&self, player: usize, state: usize, joint: usize) -> f64 {
        self.rewards[player][state][joint]
    }

    pub fn reward_mut(&mut self, player: usize, state: usize, joint: usize) -> &mut f64 {
        &mut self.rewards[player][state][joint]
    }

    /// All invariant violations; an empty list means the game is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let global = |message: String| Violation {
            state: None,
            joint_action: None,
            message,
        };
        if self.action_sets.is_empty() {
            report.push(global("no players".into()));
            return report;
        }
        if self.states.is_empty() {
            report.push(global("no states".into()));
            return report;
        }
        for (i, set) in self.action_sets.iter().enumerate() {
            if set.is_empty() {
                report.push(global(format!("player {i} has no actions")));
            }
        }
        if !report.is_empty() {
            return report;
        }
        if self.initial_state >= self.states.len() {
            report.push(global(format!(
                "initial state index {} is not a state",
                self.initial_state
            )));
        }
        if self.rewards.len() != self.action_sets.len() {
            report.push(global(format!(
                "{} reward tables for {} players",
                self.rewards.len(),
                self.action_sets.len()
            )));
        }
        let joints = self.joint_count();
        let n_states = self.states.len();
        if self.transitions.len() != n_states {
            report.push(global(format!(
                "transition table covers {} of {n_states} states",
                self.transitions.len()
            )));
        }
        for (s, rows) in self.transitions.iter().enumerate().take(n_states) {
            let state = self.states[s].clone();
            if rows.len() != joints {
                report.push(Violation {
                    state: Some(state),
                    joint_action: None,
                    message: format!("{} transition rows for {joints} joint actions", rows.len()),
                });
                continue;
            }
            for (j, row) in rows.iter().enumerate() {
                let at = |message: String| Violation {
                    state: Some(state.clone()),
                    joint_action: Some(self.joint_actions(j)),
                    message,
                };
                if row.len() != n_states {
                    report.push(at(format!("transition vector has {} entries", row.len())));
                    continue;
                }
                if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    report.push(at("negative or non-finite transition probability".into()));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > tol::STRUCTURAL {
                    report.push(at(format!("transition probabilities sum to {sum}")));
                }
            }
        }
        for (i, table) in self.rewards.iter().enumerate() {
            if table.len() != n_states {
                report.push(global(format!("player {i} reward table covers {} states", table.len())));
                continue;
            }
            for (s, row) in table.iter().enumerate() {
                if row.len() != joints {
                    report.push(Violation {
                        state: Some(self.states[s].clone()),
                        joint_action: None,
                        message: format!("player {i} has {} rewards for {joints} joint actions", row.len()),
                    });
                    continue;
                }
                for (j, r) in row.iter().enumerate() {
                    if !r.is_finite() {
                        report.push(Violation {
                            state: Some(self.states[s].clone()),
                            joint_action: Some(self.joint_actions(j)),
                            message: format!("player {i} reward is not finite"),
                        });
                    }
                }
            }
        }
        if let RewardFormulation::Discounted(g) = self.formulation {
            if !(g > 0.0 && g < 1.0) {
                report.push(global(format!("discount factor {g} not in (0, 1)")));
            }
        }
        report
    }

    /// Exact structural predicates, compared with tolerance 1e-12.
    pub fn classify(&self) -> Classification {
        let eq = |a: f64, b: f64| (a - b).abs() <= tol::STRUCTURAL;
        let rows_eq = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| eq(*x, *y));
        let n = self.player_count();
        let joints = self.joint_count();
        let n_states = self.state_count();

        let zero_sum = (0..n_states).all(|s| {
            (0..joints).all(|j| eq((0..n).map(|i| self.rewards[i][s][j]).sum::<f64>(), 0.0))
        });
        let team = (1..n).all(|i| {
            (0..n_states).all(|s| (0..joints).all(|j| eq(self.rewards[i][s][j], self.rewards[0][s][j])))
        });
        let no_control = (0..n_states).all(|s| {
            (1..joints).all(|j| rows_eq(&self.transitions[s][j], &self.transitions[s][0]))
        });
        let single_controller = (0..n)
            .map(|p| {
                (0..n_states).all(|s| {
                    (0..joints).all(|j| {
                        let mut canonical = self.joint_actions(j);
                        let own = canonical[p];
                        canonical.iter_mut().for_each(|a| *a = 0);
                        canonical[p] = own;
                        rows_eq(
                            &self.transitions[s][j],
                            &self.transitions[s][self.joint_index(&canonical)],
                        )
                    })
                })
            })
            .collect();
        Classification {
            zero_sum,
            no_control,
            single_controller,
            team,
        }
    }

    /// Checks that `joint` has one policy per player over the right shapes.
    pub fn check_joint(&self, joint: &JointPolicy) -> Result<()> {
        if joint.players() != self.player_count() {
            return Err(Error::Dimension(format!(
                "{} policies for {} players",
                joint.players(),
                self.player_count()
            )));
        }
        for (i, p) in joint.policies().iter().enumerate() {
            self.check_policy(i, p)?;
        }
        Ok(())
    }

    pub fn check_policy(&self, player: usize, policy: &Policy) -> Result<()> {
        if player >= self.player_count() {
            return Err(Error::OutOfRange(format!("player {player}")));
        }
        if policy.states() != self.state_count()
            || policy.rows().iter().any(|r| r.len() != self.action_count(player))
        {
            return Err(Error::Dimension(format!(
                "policy for player {player} must be {} states x {} actions",
                self.state_count(),
                self.action_count(player)
            )));
        }
        Ok(())
    }

    /// Probability of each joint action at `state` under `joint`.
    pub fn joint_distribution(&self, joint: &JointPolicy, state: usize) -> Vec<f64> {
        let mut dist = vec![1.0];
        for p in joint.policies() {
            let row = p.row(state).probs();
            let mut next = Vec::with_capacity(dist.len() * row.len());
            for d in &dist {
                for q in row {
                    next.push(d * q);
                }
            }
            dist = next;
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_index_is_row_major() {
        let g = rps();
        assert_eq!(g.joint_index(&[0, 0]), 0);
        assert_eq!(g.joint_index(&[0, 2]), 2);
        assert_eq!(g.joint_index(&[1, 0]), 3);
        for j in 0..g.joint_count() {
            assert_eq!(g.joint_index(&g.joint_actions(j)), j);
        }
    }

    #[test]
    fn builders_are_valid() {
        assert!(rps().validate().is_empty());
        assert!(bach_stravinsky().validate().is_empty());
        assert!(blotto_4_3().validate().is_empty());
        assert!(fact5_default().validate().is_empty());
    }

    #[test]
    fn rescaled_row_is_reported_with_location() {
        let mut g = rps();
        let j = g.joint_index(&[1, 2]);
        for p in g.transition_mut(0, j).iter_mut() {
            *p *= 0.9;
        }
        let report = g.validate();
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].state.as_deref(), Some("s0"));
        assert_eq!(report[0].joint_action, Some(vec![1, 2]));
    }

    #[test]
    fn non_finite_reward_and_bad_initial_state_are_reported() {
        let mut g = rps().with_initial_state(4);
        *g.reward_mut(1, 0, 3) = f64::NAN;
        let report = g.validate();
        assert_eq!(report.len(), 2);
        assert!(report.iter().any(|v| v.message.contains("initial state")));
        assert!(report.iter().any(|v| v.joint_action == Some(vec![1, 0])));
    }

    #[test]
    fn classify_rps() {
        let c = rps().classify();
        assert!(c.zero_sum);
        assert!(c.no_control);
        assert!(!c.team);
    }

    #[test]
    fn classify_fact5() {
        let c = fact5_default().classify();
        assert!(c.zero_sum);
        assert!(c.is_single_controller(1));
        assert!(!c.is_single_controller(0));
        assert!(!c.no_control);
    }

    #[test]
    fn classify_team_game() {
        let g = bimatrix(
            &[vec![1.0, 0.0], vec![0.0, 2.0]],
            &[vec![1.0, 0.0], vec![0.0, 2.0]],
        )
        .unwrap();
        let c = g.classify();
        assert!(c.team);
        assert!(!c.zero_sum);
    }

    #[test]
    fn joint_distribution_is_product() {
        let g = rps();
        let joint = JointPolicy::new(vec![
            Policy::from_rows(vec![vec![0.5, 0.5, 0.0]]).unwrap(),
            Policy::from_rows(vec![vec![0.0, 0.25, 0.75]]).unwrap(),
        ]);
        let d = g.joint_distribution(&joint, 0);
        assert_eq!(d.len(), 9);
        assert!((d[g.joint_index(&[1, 2])] - 0.375).abs() < 1e-15);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
