use nalgebra::{DMatrix, DVector};

use super::value::{average_chain_values, discounted_chain_values};
use super::{MixedStrategy, Policy, RewardFormulation};
use crate::error::{Error, Result};
use crate::linalg;

const IMPROVEMENT_EPS: f64 = 1e-12;
const TIE_EPS: f64 = 1e-9;
const MAX_ITERATIONS: usize = 10_000;

/// Single-agent MDP obtained by fixing every other player's policy.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedMdp {
    // [state][action][next]
    transition: Vec<Vec<Vec<f64>>>,
    // [state][action]
    reward: Vec<Vec<f64>>,
    initial_state: usize,
    formulation: RewardFormulation,
}

/// Result of optimizing over per-state vertex sets.
#[derive(Debug, Clone)]
pub struct VertexOptimum {
    /// Chosen vertex index per state.
    pub choice: Vec<usize>,
    pub policy: Policy,
    /// Per-state values of `policy` (constant for the average formulation).
    pub values: Vec<f64>,
    /// Per state, every vertex whose one-step lookahead ties the best.
    pub optimal_vertices: Vec<Vec<usize>>,
}

impl InducedMdp {
    pub fn new(
        transition: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<f64>>,
        initial_state: usize,
        formulation: RewardFormulation,
    ) -> Self {
        Self {
            transition,
            reward,
            initial_state,
            formulation,
        }
    }

    pub fn state_count(&self) -> usize {
        self.reward.len()
    }

    pub fn action_count(&self) -> usize {
        self.reward.first().map_or(0, Vec::len)
    }

    pub fn transition(&self, state: usize, action: usize) -> &[f64] {
        &self.transition[state][action]
    }

    pub fn reward(&self, state: usize, action: usize) -> f64 {
        self.reward[state][action]
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn formulation(&self) -> RewardFormulation {
        self.formulation
    }

    fn check_policy(&self, policy: &Policy) -> Result<()> {
        if policy.states() != self.state_count()
            || policy.rows().iter().any(|r| r.len() != self.action_count())
        {
            return Err(Error::Dimension("policy does not match the MDP".into()));
        }
        Ok(())
    }

    fn chain(&self, rows: &[&MixedStrategy]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.state_count();
        let mut p = vec![vec![0.0; n]; n];
        let mut r = vec![0.0; n];
        for (s, row) in rows.iter().enumerate() {
            for (a, &w) in row.probs().iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                r[s] += w * self.reward[s][a];
                for (t, q) in self.transition[s][a].iter().enumerate() {
                    p[s][t] += w * q;
                }
            }
        }
        (p, r)
    }

    fn evaluate_rows(&self, rows: &[&MixedStrategy]) -> Result<Vec<f64>> {
        let (p, r) = self.chain(rows);
        match self.formulation {
            RewardFormulation::Discounted(gamma) => {
                Ok(discounted_chain_values(&p, &[r], gamma)?.remove(0))
            }
            RewardFormulation::Average => {
                let g = average_chain_values(&p, &[r])?[0];
                Ok(vec![g; self.state_count()])
            }
        }
    }

    /// Per-state values of `policy`; constant across states when average.
    pub fn evaluate(&self, policy: &Policy) -> Result<Vec<f64>> {
        self.check_policy(policy)?;
        let rows: Vec<&MixedStrategy> = policy.rows().iter().collect();
        self.evaluate_rows(&rows)
    }

    pub fn value_at_initial(&self, policy: &Policy) -> Result<f64> {
        Ok(self.evaluate(policy)?[self.initial_state])
    }

    /// Expected one-step lookahead of playing `row` at `state` against
    /// continuation values `next`.
    fn lookahead(&self, state: usize, row: &MixedStrategy, next: &[f64], gamma: f64) -> f64 {
        row.probs()
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(a, w)| {
                w * (self.reward[state][a] + gamma * linalg::dot(&self.transition[state][a], next))
            })
            .sum()
    }

    /// Gain and bias (bias pinned to 0 at the initial state).
    fn gain_bias(&self, rows: &[&MixedStrategy]) -> Result<(f64, Vec<f64>)> {
        let n = self.state_count();
        let (p, r) = self.chain(rows);
        if super::value::closed_class_count(&p) != 1 {
            return Err(Error::Ergodicity("policy splits the induced chain".into()));
        }
        // Unknowns: h(s) for s != ref, stored in place of h(ref) is g.
        let reference = self.initial_state;
        let a = DMatrix::from_fn(n, n, |s, t| {
            if t == reference {
                1.0
            } else {
                let identity = if s == t { 1.0 } else { 0.0 };
                identity - p[s][t]
            }
        });
        let x = linalg::solve(a, &DVector::from_column_slice(&r))?;
        let gain = x[reference];
        let mut bias: Vec<f64> = x.iter().copied().collect();
        bias[reference] = 0.0;
        Ok((gain, bias))
    }

    /// Exact policy iteration where state `s` may only play one of
    /// `vertices[s]` (deterministically). Optimizing a linear-in-policy
    /// objective over a product of polytopes reduces to this.
    ///
    /// Ties keep the incumbent, then the lowest vertex index.
    pub fn optimize_over_vertices(&self, vertices: &[Vec<MixedStrategy>]) -> Result<VertexOptimum> {
        let n = self.state_count();
        if vertices.len() != n || vertices.iter().any(|v| v.is_empty()) {
            return Err(Error::Dimension("need a non-empty vertex list per state".into()));
        }
        if vertices
            .iter()
            .flatten()
            .any(|v| v.len() != self.action_count())
        {
            return Err(Error::Dimension("vertex does not match the action count".into()));
        }
        let mut choice = vec![0usize; n];
        let (gamma, discounted) = match self.formulation {
            RewardFormulation::Discounted(g) => (g, true),
            RewardFormulation::Average => (1.0, false),
        };
        for _ in 0..MAX_ITERATIONS {
            let rows: Vec<&MixedStrategy> = (0..n).map(|s| &vertices[s][choice[s]]).collect();
            let continuation = if discounted {
                self.evaluate_rows(&rows)?
            } else {
                self.gain_bias(&rows)?.1
            };
            let mut changed = false;
            for s in 0..n {
                let scores: Vec<f64> = vertices[s]
                    .iter()
                    .map(|v| self.lookahead(s, v, &continuation, gamma))
                    .collect();
                let current = scores[choice[s]];
                let best = linalg::argmax(&scores);
                if scores[best] > current + IMPROVEMENT_EPS * (1.0 + current.abs()) {
                    choice[s] = best;
                    changed = true;
                }
            }
            if !changed {
                let values = self.evaluate_rows(&rows)?;
                let optimal_vertices = (0..n)
                    .map(|s| {
                        let scores: Vec<f64> = vertices[s]
                            .iter()
                            .map(|v| self.lookahead(s, v, &continuation, gamma))
                            .collect();
                        let best = scores[linalg::argmax(&scores)];
                        (0..scores.len())
                            .filter(|&k| scores[k] >= best - TIE_EPS * (1.0 + best.abs()))
                            .collect()
                    })
                    .collect();
                let policy = Policy::new(rows.into_iter().cloned().collect());
                return Ok(VertexOptimum {
                    choice,
                    policy,
                    values,
                    optimal_vertices,
                });
            }
        }
        Err(Error::Unsupported("policy iteration did not converge".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure_vertices(states: usize, actions: usize) -> Vec<Vec<MixedStrategy>> {
        vec![(0..actions).map(|a| MixedStrategy::pure(actions, a)).collect(); states]
    }

    /// Action 1 moves right towards the rewarding end state; action 0
    /// earns a little and falls back to s0. Unichain under every policy.
    fn chain_mdp(formulation: RewardFormulation) -> InducedMdp {
        let transition = vec![
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]],
        ];
        let reward = vec![vec![0.1, 0.0], vec![0.1, 0.0], vec![1.0, 1.0]];
        InducedMdp::new(transition, reward, 0, formulation)
    }

    fn brute_force_best(mdp: &InducedMdp) -> Vec<f64> {
        let mut best = vec![f64::NEG_INFINITY; 3];
        for code in 0..8usize {
            let choice: Vec<usize> = (0..3).map(|s| (code >> s) & 1).collect();
            let policy = Policy::pure(2, &choice);
            if let Ok(v) = mdp.evaluate(&policy) {
                for s in 0..3 {
                    best[s] = best[s].max(v[s]);
                }
            }
        }
        best
    }

    #[test]
    fn discounted_policy_iteration_matches_enumeration() {
        let mdp = chain_mdp(RewardFormulation::Discounted(0.9));
        let opt = mdp.optimize_over_vertices(&pure_vertices(3, 2)).unwrap();
        let best = brute_force_best(&mdp);
        for s in 0..3 {
            assert!((opt.values[s] - best[s]).abs() < 1e-10);
        }
        assert_eq!(opt.choice[0], 1);
    }

    #[test]
    fn average_policy_iteration_finds_best_gain() {
        let mdp = chain_mdp(RewardFormulation::Average);
        let vertices = pure_vertices(3, 2);
        // Staying at s0 forever earns 0.1 but moving right earns 1/3.
        let opt = mdp.optimize_over_vertices(&vertices).unwrap();
        assert!((opt.values[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ties_are_reported() {
        let mdp = InducedMdp::new(
            vec![vec![vec![1.0], vec![1.0], vec![1.0]]],
            vec![vec![1.0, 1.0, 0.0]],
            0,
            RewardFormulation::Average,
        );
        let opt = mdp.optimize_over_vertices(&pure_vertices(1, 3)).unwrap();
        assert_eq!(opt.choice, vec![0]);
        assert_eq!(opt.optimal_vertices, vec![vec![0, 1]]);
    }
}
