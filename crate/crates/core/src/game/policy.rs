use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A probability distribution over one player's actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Builds a strategy, rejecting negative entries or a sum away from 1.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let s = Self(probs);
        s.check(tol::STRUCTURAL)?;
        Ok(s)
    }

    /// Wraps a vector without checking it.
    pub fn new_unchecked(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    pub fn pure(actions: usize, action: usize) -> Self {
        let mut probs = vec![0.0; actions];
        probs[action] = 1.0;
        Self(probs)
    }

    pub fn uniform(actions: usize) -> Self {
        Self(vec![1.0 / actions as f64; actions])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn probs_mut(&mut self) -> &mut Vec<f64> {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.check(tol).is_ok()
    }

    fn check(&self, tol: f64) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::Malformed("empty strategy".into()));
        }
        if let Some(p) = self.0.iter().find(|p| !p.is_finite() || **p < -tol) {
            return Err(Error::Malformed(format!("invalid probability {p}")));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::Malformed(format!("probabilities sum to {sum}")));
        }
        Ok(())
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn blend(&self, other: &Self, alpha: f64) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect(),
        )
    }

    /// Index of the action played with probability one, if any.
    pub fn pure_action(&self, tol: f64) -> Option<usize> {
        self.0.iter().position(|p| *p >= 1.0 - tol)
    }
}

impl std::ops::Index<usize> for MixedStrategy {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// One mixed strategy per state for a single player.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    rows: Vec<MixedStrategy>,
}

impl Policy {
    pub fn new(rows: Vec<MixedStrategy>) -> Self {
        Self { rows }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self {
            rows: rows.into_iter().map(MixedStrategy::new).collect::<Result<_>>()?,
        })
    }

    pub fn uniform(states: usize, actions: usize) -> Self {
        Self {
            rows: vec![MixedStrategy::uniform(actions); states],
        }
    }

    /// The same strategy in every state.
    pub fn stationary(states: usize, strategy: MixedStrategy) -> Self {
        Self {
            rows: vec![strategy; states],
        }
    }

    /// Pure policy from one action index per state.
    pub fn pure(actions: usize, choice: &[usize]) -> Self {
        Self {
            rows: choice
                .iter()
                .map(|&a| MixedStrategy::pure(actions, a))
                .collect(),
        }
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn actions(&self) -> usize {
        self.rows.first().map_or(0, MixedStrategy::len)
    }

    pub fn rows(&self) -> &[MixedStrategy] {
        &self.rows
    }

    pub fn row(&self, state: usize) -> &MixedStrategy {
        &self.rows[state]
    }

    pub fn row_mut(&mut self, state: usize) -> &mut MixedStrategy {
        &mut self.rows[state]
    }

    pub fn prob(&self, state: usize, action: usize) -> f64 {
        self.rows[state][action]
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.is_valid(tol))
    }

    /// Statewise-constant blend `alpha * self + (1 - alpha) * other`.
    pub fn blend(&self, other: &Self, alpha: f64) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.blend(b, alpha))
                .collect(),
        }
    }

    /// Blend with an independent coefficient per state.
    pub fn blend_statewise(&self, other: &Self, alpha: &[f64]) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .zip(alpha)
                .map(|((a, b), w)| a.blend(b, *w))
                .collect(),
        }
    }

    /// Largest absolute coordinate difference.
    pub fn distance_max(&self, other: &Self) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| crate::linalg::max_abs_diff(a.probs(), b.probs()))
            .fold(0.0, f64::max)
    }

    pub fn distance_l1(&self, other: &Self) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| crate::linalg::l1_distance(a.probs(), b.probs()))
            .sum()
    }

    /// Concatenation of all rows.
    pub fn flatten(&self) -> Vec<f64> {
        self.rows.iter().flat_map(|r| r.probs().iter().copied()).collect()
    }
}

/// One policy per player.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPolicy {
    policies: Vec<Policy>,
}

impl JointPolicy {
    pub fn new(policies: Vec<Policy>) -> Self {
        Self { policies }
    }

    pub fn players(&self) -> usize {
        self.policies.len()
    }

    pub fn policies(&self) -> &[Policy] {
        &self.policies
    }

    pub fn policy(&self, player: usize) -> &Policy {
        &self.policies[player]
    }

    pub fn into_policies(self) -> Vec<Policy> {
        self.policies
    }

    /// Every player's policy except `player`'s, in player order.
    pub fn others(&self, player: usize) -> Vec<Policy> {
        self.policies
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, p)| p.clone())
            .collect()
    }

    /// `<replacement, self_{-player}>`.
    pub fn with(&self, player: usize, replacement: Policy) -> Self {
        let mut policies = self.policies.clone();
        policies[player] = replacement;
        Self { policies }
    }

    /// Re-inserts `own` into a list of opponents' policies.
    pub fn assemble(player: usize, own: Policy, others: &[Policy]) -> Self {
        let mut policies = others.to_vec();
        policies.insert(player, own);
        Self { policies }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_validation() {
        assert!(MixedStrategy::new(vec![0.25, 0.75]).is_ok());
        assert!(MixedStrategy::new(vec![0.5, 0.4]).is_err());
        assert!(MixedStrategy::new(vec![-0.1, 1.1]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
    }

    #[test]
    fn assemble_inverts_others() {
        let a = Policy::uniform(1, 2);
        let b = Policy::pure(3, &[1]);
        let c = Policy::pure(2, &[0]);
        let joint = JointPolicy::new(vec![a, b.clone(), c]);
        let rebuilt = JointPolicy::assemble(1, b, &joint.others(1));
        assert_eq!(rebuilt, joint);
    }

    #[test]
    fn statewise_blend_uses_per_state_weights() {
        let x = Policy::pure(2, &[0, 0]);
        let y = Policy::pure(2, &[1, 1]);
        let z = x.blend_statewise(&y, &[1.0, 0.25]);
        assert_eq!(z.row(0).probs(), &[1.0, 0.0]);
        assert_eq!(z.row(1).probs(), &[0.25, 0.75]);
    }
}
