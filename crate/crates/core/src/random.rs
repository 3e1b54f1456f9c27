//! Random instances for property checks, examples, and benchmarks.

use rand::Rng;
use rand_distr::Exp1;

use crate::game::{JointPolicy, MixedStrategy, Policy, RewardFormulation, StochasticGame};
use crate::restrictions::{RestrictedPolicySpace, Shape};

/// Uniformly distributed point on the probability simplex.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

pub fn strategy<R: Rng + ?Sized>(rng: &mut R, actions: usize) -> MixedStrategy {
    MixedStrategy::new_unchecked(simplex_point(rng, actions))
}

pub fn policy<R: Rng + ?Sized>(rng: &mut R, states: usize, actions: usize) -> Policy {
    Policy::new((0..states).map(|_| strategy(rng, actions)).collect())
}

pub fn joint_policy<R: Rng + ?Sized>(rng: &mut R, game: &StochasticGame) -> JointPolicy {
    JointPolicy::new(
        (0..game.player_count())
            .map(|i| policy(rng, game.state_count(), game.action_count(i)))
            .collect(),
    )
}

/// Which actions the transition function may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    /// Every joint action has its own transition row.
    Joint,
    /// Transitions ignore all actions.
    None,
    /// Transitions depend only on this player's action.
    Single(usize),
}

/// Shape and structure of a random game.
#[derive(Debug, Clone)]
pub struct GameShape {
    pub states: usize,
    pub actions: Vec<usize>,
    pub formulation: RewardFormulation,
    pub control: Control,
    /// All players share one reward function.
    pub team: bool,
    /// Two players with opposite rewards.
    pub zero_sum: bool,
}

impl GameShape {
    pub fn new(states: usize, actions: Vec<usize>, formulation: RewardFormulation) -> Self {
        Self {
            states,
            actions,
            formulation,
            control: Control::Joint,
            team: false,
            zero_sum: false,
        }
    }
}

/// Dense random game: every transition row has full support, so every
/// joint policy induces an ergodic chain. Rewards are uniform in [-1, 1].
pub fn game<R: Rng + ?Sized>(rng: &mut R, shape: &GameShape) -> StochasticGame {
    let players = shape.actions.len();
    let states: Vec<String> = (0..shape.states).map(|s| format!("s{s}")).collect();
    let action_sets: Vec<Vec<String>> = shape
        .actions
        .iter()
        .map(|&n| (0..n).map(|a| format!("a{a}")).collect())
        .collect();
    let joint_count: usize = shape.actions.iter().product();
    let digits = |mut j: usize| {
        let mut out = vec![0; players];
        for k in (0..players).rev() {
            out[k] = j % shape.actions[k];
            j /= shape.actions[k];
        }
        out
    };

    let transitions: Vec<Vec<Vec<f64>>> = (0..shape.states)
        .map(|_| {
            let rows: Vec<Vec<f64>> = match shape.control {
                Control::Joint => (0..joint_count)
                    .map(|_| simplex_point(rng, shape.states))
                    .collect(),
                Control::None => vec![simplex_point(rng, shape.states); joint_count],
                Control::Single(c) => {
                    let per_action: Vec<Vec<f64>> = (0..shape.actions[c])
                        .map(|_| simplex_point(rng, shape.states))
                        .collect();
                    (0..joint_count)
                        .map(|j| per_action[digits(j)[c]].clone())
                        .collect()
                }
            };
            rows
        })
        .collect();

    let mut draw = || -> Vec<Vec<f64>> {
        (0..shape.states)
            .map(|_| (0..joint_count).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect()
    };
    let rewards: Vec<Vec<Vec<f64>>> = if shape.team {
        vec![draw(); players]
    } else if shape.zero_sum && players == 2 {
        let first = draw();
        let second = first
            .iter()
            .map(|row| row.iter().map(|v| -v).collect())
            .collect();
        vec![first, second]
    } else {
        (0..players).map(|_| draw()).collect()
    };
    StochasticGame::from_parts(
        states,
        action_sets,
        transitions,
        rewards,
        0,
        shape.formulation,
    )
}

/// Random zero-sum matrix game with payoffs uniform in [-1, 1].
pub fn zero_sum_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> StochasticGame {
    let mut shape = GameShape::new(1, vec![rows, cols], RewardFormulation::Average);
    shape.zero_sum = true;
    game(rng, &shape)
}

/// Convex hull of `k` random policies.
pub fn global_hull<R: Rng + ?Sized>(rng: &mut R, shape: Shape, k: usize) -> RestrictedPolicySpace {
    RestrictedPolicySpace::ConvexHullGlobal(
        (0..k)
            .map(|_| policy(rng, shape.states, shape.actions))
            .collect(),
    )
}

/// Per-state hulls of `k` random strategies each.
pub fn statewise_hull<R: Rng + ?Sized>(rng: &mut R, shape: Shape, k: usize) -> RestrictedPolicySpace {
    RestrictedPolicySpace::ConvexHullStatewise(
        (0..shape.states)
            .map(|_| (0..k).map(|_| strategy(rng, shape.actions)).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_games_are_valid_and_structured() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let gamma = RewardFormulation::Discounted(0.8);
        for control in [Control::Joint, Control::None, Control::Single(1)] {
            let mut shape = GameShape::new(3, vec![2, 3], gamma);
            shape.control = control;
            let g = game(&mut rng, &shape);
            assert!(g.validate().is_empty());
            let c = g.classify();
            match control {
                Control::None => assert!(c.no_control),
                Control::Single(p) => assert!(c.is_single_controller(p)),
                Control::Joint => assert!(!c.no_control),
            }
        }
        let mut shape = GameShape::new(2, vec![2, 2, 2], gamma);
        shape.team = true;
        assert!(game(&mut rng, &shape).classify().team);
        assert!(zero_sum_matrix(&mut rng, 3, 4).classify().zero_sum);
    }

    #[test]
    fn simplex_points_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let p = simplex_point(&mut rng, n);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|v| *v >= 0.0));
        }
    }
}
