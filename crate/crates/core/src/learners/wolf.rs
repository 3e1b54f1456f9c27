use rand::Rng;

use super::config::{QConfig, WolfPhcConfig};
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, Policy};
use crate::linalg;

/// What one WoLF-PHC update did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Hill-climbing step size applied.
    pub delta: f64,
    /// Whether the current policy strictly beat the average policy.
    pub winning: bool,
}

/// A WoLF-PHC learner. Its choices are either the player's actions or,
/// for the restricted variant, the generators of a hull of policies.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    /// `[state][choice]`.
    pub q: Vec<Vec<f64>>,
    pub policy: Policy,
    pub avg_policy: Policy,
    pub counts: Vec<u64>,
    /// Updates performed so far; the schedules' `t`.
    pub steps: u64,
    pub config: WolfPhcConfig,
    generators: Option<Vec<Policy>>,
}

impl LearnerState {
    pub fn new(states: usize, actions: usize, config: WolfPhcConfig) -> Result<Self> {
        config.check()?;
        if states == 0 || actions == 0 {
            return Err(Error::Dimension("learner needs states and actions".into()));
        }
        Ok(Self {
            q: vec![vec![0.0; actions]; states],
            policy: Policy::uniform(states, actions),
            avg_policy: Policy::uniform(states, actions),
            counts: vec![0; states],
            steps: 0,
            config,
            generators: None,
        })
    }

    /// Hill-climbs over mixtures of `generators`, one weight vector per
    /// state; in a single-state game that is exactly their convex hull.
    pub fn restricted(generators: Vec<Policy>, config: WolfPhcConfig) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Malformed("restricted learner needs generators".into()))?;
        let (states, actions) = (first.states(), first.actions());
        if generators.iter().any(|g| g.states() != states || g.actions() != actions) {
            return Err(Error::Dimension("generators differ in shape".into()));
        }
        let mut learner = Self::new(states, generators.len(), config)?;
        learner.generators = Some(generators);
        Ok(learner)
    }

    pub fn generators(&self) -> Option<&[Policy]> {
        self.generators.as_deref()
    }

    pub fn choice_count(&self) -> usize {
        self.q[0].len()
    }

    /// The policy over the player's actions.
    pub fn explicit_policy(&self) -> Policy {
        match &self.generators {
            None => self.policy.clone(),
            Some(gens) => Policy::new(
                (0..self.policy.states())
                    .map(|s| explicit_row(gens, s, self.policy.row(s)))
                    .collect(),
            ),
        }
    }

    /// Draws a choice from the exploration-mixed policy at `state`.
    pub fn choose<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        let n = self.choice_count();
        if rng.random::<f64>() < self.config.explore.at(self.steps) {
            return rng.random_range(0..n);
        }
        sample(self.policy.row(state).probs(), rng)
    }

    /// Executed action for a choice: the choice itself, or a draw from
    /// the chosen generator.
    pub fn act<R: Rng + ?Sized>(&self, state: usize, choice: usize, rng: &mut R) -> usize {
        match &self.generators {
            None => choice,
            Some(gens) => sample(gens[choice].row(state).probs(), rng),
        }
    }
}

fn explicit_row(generators: &[Policy], state: usize, weights: &MixedStrategy) -> MixedStrategy {
    let mut row = vec![0.0; generators[0].actions()];
    for (g, &w) in generators.iter().zip(weights.probs()) {
        for (r, p) in row.iter_mut().zip(g.row(state).probs()) {
            *r += w * p;
        }
    }
    MixedStrategy::new_unchecked(row)
}

/// Inverse-CDF draw; falls back to the last positive entry on rounding.
pub(crate) fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

fn q_update(q: &mut [Vec<f64>], alpha: f64, gamma: f64, s: usize, a: usize, r: f64, next: usize) {
    let future = q[next].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    q[s][a] = (1.0 - alpha) * q[s][a] + alpha * (r + gamma * future);
}

/// One WoLF-PHC update after playing choice `a` at `s`, receiving `r`
/// and moving to `next`:
///
/// 1. `Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + gamma max_b Q(next,b))`;
/// 2. the visit count grows and the average policy moves towards the
///    current one by `1 / count`;
/// 3. the learner is winning if the current policy's expected Q strictly
///    exceeds the average policy's, and then uses `delta_win`, otherwise
///    `delta_lose`;
/// 4. the greedy choice gains `delta`, every other loses
///    `delta / (n - 1)`, and the row is clipped to [0, 1] and renormalized.
pub fn wolf_phc_step(
    learner: &mut LearnerState,
    s: usize,
    a: usize,
    r: f64,
    next: usize,
) -> Result<StepInfo> {
    let n = learner.choice_count();
    if a >= n || s >= learner.q.len() || next >= learner.q.len() {
        return Err(Error::OutOfRange(format!(
            "choice {a} at state {s} (next {next}) for a learner with {n} choices"
        )));
    }
    let t = learner.steps;
    let config = learner.config;
    q_update(&mut learner.q, config.alpha.at(t), config.gamma, s, a, r, next);

    learner.counts[s] += 1;
    let count = learner.counts[s] as f64;
    let current = learner.policy.row(s).probs().to_vec();
    for (avg, p) in learner.avg_policy.row_mut(s).probs_mut().iter_mut().zip(&current) {
        *avg += (p - *avg) / count;
    }

    let q = &learner.q[s];
    let expected_now = linalg::dot(&current, q);
    let expected_avg = linalg::dot(learner.avg_policy.row(s).probs(), q);
    let winning = expected_now > expected_avg;
    let delta = if winning {
        config.delta_win.at(t)
    } else {
        config.delta_lose.at(t)
    };

    if n > 1 {
        let greedy = linalg::argmax(q);
        let row = learner.policy.row_mut(s).probs_mut();
        for (b, p) in row.iter_mut().enumerate() {
            let moved = if b == greedy {
                *p + delta
            } else {
                *p - delta / (n - 1) as f64
            };
            *p = moved.clamp(0.0, 1.0);
        }
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= total);
    }
    learner.steps += 1;
    Ok(StepInfo { delta, winning })
}

/// [`wolf_phc_step`] for a restricted learner, where `g` is the
/// generator that was drawn.
pub fn restricted_wolf_phc_step(
    learner: &mut LearnerState,
    s: usize,
    g: usize,
    r: f64,
    next: usize,
) -> Result<StepInfo> {
    if learner.generators.is_none() {
        return Err(Error::Unsupported("learner is not restricted".into()));
    }
    wolf_phc_step(learner, s, g, r, next)
}

/// Tabular Q-learner whose greedy policy is the pure argmax.
#[derive(Debug, Clone, PartialEq)]
pub struct QLearnerState {
    pub q: Vec<Vec<f64>>,
    pub steps: u64,
    pub config: QConfig,
}

impl QLearnerState {
    pub fn new(states: usize, actions: usize, config: QConfig) -> Result<Self> {
        config.check()?;
        if states == 0 || actions == 0 {
            return Err(Error::Dimension("learner needs states and actions".into()));
        }
        Ok(Self {
            q: vec![vec![0.0; actions]; states],
            steps: 0,
            config,
        })
    }

    /// Pure argmax policy, lowest index on ties.
    pub fn greedy_policy(&self) -> Policy {
        let n = self.q[0].len();
        let choice: Vec<usize> = self.q.iter().map(|row| linalg::argmax(row)).collect();
        Policy::pure(n, &choice)
    }

    pub fn choose<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        let n = self.q[0].len();
        if rng.random::<f64>() < self.config.explore.at(self.steps) {
            return rng.random_range(0..n);
        }
        linalg::argmax(&self.q[state])
    }
}

pub fn q_learner_step(learner: &mut QLearnerState, s: usize, a: usize, r: f64, next: usize) -> Result<()> {
    let n = learner.q[0].len();
    if a >= n || s >= learner.q.len() || next >= learner.q.len() {
        return Err(Error::OutOfRange(format!("action {a} at state {s} (next {next})")));
    }
    let c = learner.config;
    q_update(&mut learner.q, c.alpha.at(learner.steps), c.gamma, s, a, r, next);
    learner.steps += 1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::config::Schedule;

    fn fixed(alpha: f64) -> WolfPhcConfig {
        WolfPhcConfig {
            alpha: Schedule::new(alpha, 1.0, 1e300),
            delta_win: Schedule::new(0.01, 1.0, 1e300),
            delta_lose: Schedule::new(0.04, 1.0, 1e300),
            explore: Schedule::new(0.1, 1.0, 1e300),
            gamma: 0.0,
        }
    }

    #[test]
    fn q_arithmetic() {
        let mut l = LearnerState::new(1, 2, fixed(0.1)).unwrap();
        wolf_phc_step(&mut l, 0, 1, 1.0, 0).unwrap();
        assert!((l.q[0][1] - 0.1).abs() < 1e-15);
        let mut q = QLearnerState::new(1, 2, QConfig { alpha: Schedule::new(0.1, 1.0, 1e300), ..QConfig::default() }).unwrap();
        q_learner_step(&mut q, 0, 1, 1.0, 0).unwrap();
        assert!((q.q[0][1] - 0.1).abs() < 1e-15);
        assert_eq!(q.greedy_policy().row(0).probs(), &[0.0, 1.0]);
    }

    #[test]
    fn equal_expectations_take_the_losing_step() {
        let mut l = LearnerState::new(1, 2, fixed(0.0001)).unwrap();
        l.q[0] = vec![1.0, 0.0];
        let info = wolf_phc_step(&mut l, 0, 1, 0.0, 0).unwrap();
        assert!(!info.winning);
        assert_eq!(info.delta, 0.04);
        assert!((l.policy.prob(0, 0) - 0.54).abs() < 1e-12);
    }

    #[test]
    fn pure_greedy_policy_is_unchanged() {
        let mut l = LearnerState::new(1, 3, fixed(0.1)).unwrap();
        l.q[0] = vec![0.0, 5.0, 0.0];
        l.policy = Policy::pure(3, &[1]);
        wolf_phc_step(&mut l, 0, 1, 5.0, 0).unwrap();
        assert_eq!(l.policy.row(0).probs(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn restricted_learner_maps_weights() {
        let gens = vec![
            Policy::from_rows(vec![vec![0.5, 0.5, 0.0]]).unwrap(),
            Policy::from_rows(vec![vec![0.0, 0.5, 0.5]]).unwrap(),
        ];
        let mut l = LearnerState::restricted(gens, fixed(0.1)).unwrap();
        l.policy = Policy::pure(2, &[0]);
        assert_eq!(l.explicit_policy().row(0).probs(), &[0.5, 0.5, 0.0]);
        l.policy = Policy::from_rows(vec![vec![2.0 / 3.0, 1.0 / 3.0]]).unwrap();
        let e = l.explicit_policy();
        assert!(linalg::max_abs_diff(e.row(0).probs(), &[1.0 / 3.0, 0.5, 1.0 / 6.0]) < 1e-15);
        assert!(restricted_wolf_phc_step(&mut l, 0, 2, 0.0, 0).is_err());
        restricted_wolf_phc_step(&mut l, 0, 1, 1.0, 0).unwrap();
        assert!((l.q[0][1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn average_policy_is_the_running_mean() {
        let mut l = LearnerState::new(1, 3, fixed(0.3)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut sum = vec![0.0; 3];
        for k in 0..500 {
            for (s, p) in sum.iter_mut().zip(l.policy.row(0).probs()) {
                *s += p;
            }
            let a = l.choose(0, &mut rng);
            wolf_phc_step(&mut l, 0, a, [1.0, 0.0, -1.0][a], 0).unwrap();
            let mean: Vec<f64> = sum.iter().map(|s| s / (k + 1) as f64).collect();
            assert!(linalg::max_abs_diff(&mean, l.avg_policy.row(0).probs()) < 1e-10);
            assert!(l.policy.is_valid(1e-12));
        }
    }

    use rand::SeedableRng;
}
