use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{induce_mdp, InducedMdp, MixedStrategy, Policy, StochasticGame};
use crate::linalg;
use crate::restrictions::{RestrictedPolicySpace, Shape};

/// Most pure policies a deterministic space may have.
pub const MAX_PURE_POLICIES: f64 = 1e6;
/// Largest weight grid evaluated when the value is not linear in the weights.
const MAX_WEIGHT_GRID: usize = 200_000;
/// Grid steps per unit of weight before the cap above applies.
const DEFAULT_DIVISIONS: usize = 100;
const NEAR_OPTIMAL: f64 = 1e-9;

/// Description of the set of optimal policies.
#[derive(Debug, Clone)]
pub enum OptimalSet {
    /// Per state, the vertices that attain the optimum; any policy built
    /// from them (state by state) is optimal. For a convex statewise space
    /// this includes per-state mixtures of them.
    Face(Vec<Vec<MixedStrategy>>),
    /// Evaluated points within 1e-9 of the best one found.
    Sampled(Vec<Policy>),
}

#[derive(Debug, Clone)]
pub struct BestResponse {
    pub policy: Policy,
    /// Value of `policy` at the initial state.
    pub value: f64,
    pub optimal_set: OptimalSet,
    /// How far `value` may fall short of the true optimum. Zero when the
    /// optimum is computed exactly; otherwise an estimate from the grid's
    /// largest neighbour-to-neighbour value change.
    pub tolerance: f64,
}

fn mix_policies(generators: &[Policy], weights: &[f64]) -> Policy {
    let rows = (0..generators[0].states())
        .map(|s| {
            let mut row = vec![0.0; generators[0].actions()];
            for (g, &w) in generators.iter().zip(weights) {
                if w == 0.0 {
                    continue;
                }
                for (r, p) in row.iter_mut().zip(g.row(s).probs()) {
                    *r += w * p;
                }
            }
            MixedStrategy::new_unchecked(row)
        })
        .collect();
    Policy::new(rows)
}

fn compositions(k: usize, m: usize) -> Vec<Vec<u32>> {
    fn go(k: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=left {
            prefix.push(i);
            go(k - 1, left - i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, m as u32, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Maximizes `V(s0)` over the convex weights of `generators`.
fn optimize_weights(mdp: &InducedMdp, generators: &[Policy]) -> Result<BestResponse> {
    let k = generators.len();
    let eval = |w: &[f64]| mdp.value_at_initial(&mix_policies(generators, w));
    if k == 1 {
        let policy = generators[0].clone();
        let value = mdp.value_at_initial(&policy)?;
        return Ok(BestResponse {
            optimal_set: OptimalSet::Sampled(vec![policy.clone()]),
            policy,
            value,
            tolerance: 0.0,
        });
    }
    let mut m = DEFAULT_DIVISIONS;
    while m > 1 && binomial(m + k - 1, k - 1) > MAX_WEIGHT_GRID as f64 {
        m -= 1;
    }
    let grid = compositions(k, m);
    let weights = |c: &[u32]| c.iter().map(|&i| i as f64 / m as f64).collect::<Vec<f64>>();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|c| eval(&weights(c)))
        .collect::<Result<Vec<f64>>>()?;

    let best_index = linalg::argmax(&values);
    let grid_best = values[best_index];
    let index: HashMap<&[u32], usize> = grid.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let mut delta = 0.0f64;
    let mut neighbour = vec![0u32; k];
    for (i, c) in grid.iter().enumerate() {
        for a in 0..k {
            if c[a] == 0 {
                continue;
            }
            for b in 0..k {
                if b == a {
                    continue;
                }
                neighbour.copy_from_slice(c);
                neighbour[a] -= 1;
                neighbour[b] += 1;
                let j = index[neighbour.as_slice()];
                delta = delta.max((values[i] - values[j]).abs());
            }
        }
    }

    // Pairwise golden-section polish from the best grid point.
    let mut w = weights(&grid[best_index]);
    let mut best = grid_best;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..20 {
        let before = best;
        for a in 0..k {
            for b in a + 1..k {
                let total = w[a] + w[b];
                if total <= 0.0 {
                    continue;
                }
                let at = |theta: f64, w: &[f64]| {
                    let mut v = w.to_vec();
                    v[a] = theta;
                    v[b] = total - theta;
                    v
                };
                let (mut lo, mut hi) = (0.0, total);
                let mut x1 = hi - ratio * (hi - lo);
                let mut x2 = lo + ratio * (hi - lo);
                let mut f1 = eval(&at(x1, &w))?;
                let mut f2 = eval(&at(x2, &w))?;
                for _ in 0..60 {
                    if f1 < f2 {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + ratio * (hi - lo);
                        f2 = eval(&at(x2, &w))?;
                    } else {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - ratio * (hi - lo);
                        f1 = eval(&at(x1, &w))?;
                    }
                }
                let theta = 0.5 * (lo + hi);
                let candidate = at(theta, &w);
                let value = eval(&candidate)?;
                if value > best {
                    best = value;
                    w = candidate;
                }
            }
        }
        if best <= before + 1e-15 * (1.0 + before.abs()) {
            break;
        }
    }

    let bound = (k - 1) as f64 * delta;
    let policy = mix_policies(generators, &w);
    let mut near: Vec<Policy> = grid
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v >= best - NEAR_OPTIMAL * (1.0 + best.abs()))
        .map(|(c, _)| mix_policies(generators, &weights(c)))
        .collect();
    if near.iter().all(|p| p.distance_max(&policy) > 1e-12) {
        near.push(policy.clone());
    }
    Ok(BestResponse {
        policy,
        value: best,
        optimal_set: OptimalSet::Sampled(near),
        tolerance: (grid_best + bound - best).max(0.0),
    })
}

/// Best response of `player` within `space` when everyone else plays
/// `others`, measured by the value at the initial state.
///
/// Spaces that are products of per-state polytopes (and deterministic
/// spaces) are solved exactly by policy iteration over vertices. Global
/// hulls and state-uniform spaces in multi-state games are searched over
/// their weight simplex on a grid with a local polish, and the result
/// carries a tolerance estimate.
pub fn restricted_best_response(
    game: &StochasticGame,
    player: usize,
    others: &[Policy],
    space: &RestrictedPolicySpace,
) -> Result<BestResponse> {
    let mdp = induce_mdp(game, player, others)?;
    let shape = Shape::new(game.state_count(), game.action_count(player));
    space.check(shape)?;
    let vertices = match space {
        RestrictedPolicySpace::DeterministicOnly => {
            if RestrictedPolicySpace::pure_policy_count(shape) > MAX_PURE_POLICIES {
                return Err(Error::Size(format!(
                    "{}^{} pure policies",
                    shape.actions, shape.states
                )));
            }
            // The best pure policy of an MDP is found by policy iteration
            // over pure actions.
            RestrictedPolicySpace::Full.statewise_vertices(shape)
        }
        _ => space.statewise_vertices(shape),
    };
    if let Some(vertices) = vertices {
        let opt = mdp.optimize_over_vertices(&vertices)?;
        let face = opt
            .optimal_vertices
            .iter()
            .zip(&vertices)
            .map(|(idx, verts)| idx.iter().map(|&k| verts[k].clone()).collect())
            .collect();
        return Ok(BestResponse {
            value: opt.values[game.initial_state()],
            policy: opt.policy,
            optimal_set: OptimalSet::Face(face),
            tolerance: 0.0,
        });
    }
    let generators: Vec<Policy> = match space {
        RestrictedPolicySpace::ConvexHullGlobal(gens) => gens.clone(),
        RestrictedPolicySpace::StateUniform => (0..shape.actions)
            .map(|a| Policy::stationary(shape.states, MixedStrategy::pure(shape.actions, a)))
            .collect(),
        _ => unreachable!("every other space has statewise vertices"),
    };
    optimize_weights(&mdp, &generators)
}

/// Optimal policies to blend, drawn from the optimal set.
fn optimal_candidates<R: Rng>(set: &OptimalSet, rng: &mut R, count: usize) -> Vec<Policy> {
    match set {
        OptimalSet::Sampled(points) => points.clone(),
        OptimalSet::Face(face) => (0..count)
            .map(|_| {
                Policy::new(
                    face.iter()
                        .map(|verts| verts[rng.random_range(0..verts.len())].clone())
                        .collect(),
                )
            })
            .collect(),
    }
}

/// Checks that blends of distinct optimal policies stay optimal.
///
/// Returns `true` when the optimal set is a single policy. Blends are
/// evaluated exactly and compared with the optimum at 1e-8.
pub fn best_response_convexity_test(
    game: &StochasticGame,
    player: usize,
    others: &[Policy],
    space: &RestrictedPolicySpace,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let br = restricted_best_response(game, player, others, space)?;
    let mdp = induce_mdp(game, player, others)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = optimal_candidates(&br.optimal_set, &mut rng, 2 * trials.max(1));
    candidates.push(br.policy.clone());
    let mut distinct: Vec<Policy> = Vec::new();
    for c in candidates {
        if distinct.iter().all(|d| d.distance_max(&c) > 1e-9) {
            distinct.push(c);
        }
    }
    if distinct.len() < 2 {
        return Ok(true);
    }
    for _ in 0..trials {
        let a = rng.random_range(0..distinct.len());
        let mut b = rng.random_range(0..distinct.len() - 1);
        if b >= a {
            b += 1;
        }
        let alpha = rng.random_range(0.05..0.95);
        let blend = distinct[a].blend(&distinct[b], alpha);
        let value = mdp.value_at_initial(&blend)?;
        if (value - br.value).abs() > 1e-8 * (1.0 + br.value.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{fact5_default, rps, JointPolicy};
    use crate::game::policy_value;

    fn one(p: &[f64]) -> Policy {
        Policy::from_rows(vec![p.to_vec()]).unwrap()
    }

    #[test]
    fn rps_against_uniform_everything_is_optimal() {
        let br = restricted_best_response(&rps(), 0, &[Policy::uniform(1, 3)], &RestrictedPolicySpace::Full).unwrap();
        assert!(br.value.abs() < 1e-12);
        let OptimalSet::Face(face) = br.optimal_set else { panic!() };
        assert_eq!(face[0].len(), 3);
    }

    #[test]
    fn rps_against_skewed_column() {
        let col = one(&[1.0 / 3.0, 0.5, 1.0 / 6.0]);
        let br = restricted_best_response(&rps(), 0, &[col], &RestrictedPolicySpace::Full).unwrap();
        assert!((br.value - 1.0 / 6.0).abs() < 1e-12);
        let OptimalSet::Face(face) = br.optimal_set else { panic!() };
        let actions: Vec<usize> = face[0].iter().map(|v| v.pure_action(0.0).unwrap()).collect();
        assert_eq!(actions, vec![1, 2]);
    }

    #[test]
    fn singleton_space_returns_its_policy() {
        let mine = one(&[0.2, 0.3, 0.5]);
        let space = RestrictedPolicySpace::Singleton(mine.clone());
        let br = restricted_best_response(&rps(), 0, &[Policy::pure(3, &[0])], &space).unwrap();
        assert_eq!(br.policy, mine);
        assert!((br.value + 0.2).abs() < 1e-12);
    }

    #[test]
    fn value_matches_evaluation_for_state_uniform() {
        let g = fact5_default();
        let row = Policy::stationary(3, MixedStrategy::new(vec![0.3, 0.7]).unwrap());
        let br = restricted_best_response(&g, 1, &[row.clone()], &RestrictedPolicySpace::StateUniform).unwrap();
        let joint = JointPolicy::new(vec![row, br.policy.clone()]);
        assert!((policy_value(&g, &joint).unwrap()[1] - br.value).abs() < 1e-10);
        assert!(RestrictedPolicySpace::StateUniform.contains(&br.policy, 1e-9));
        // u < 1/2: the column player plays L everywhere.
        assert!((br.policy.prob(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_bound() {
        let g = crate::random::game(
            &mut ChaCha8Rng::seed_from_u64(3),
            &crate::random::GameShape::new(13, vec![3, 2], crate::game::RewardFormulation::Discounted(0.5)),
        );
        let others = [Policy::uniform(13, 2)];
        assert!(matches!(
            restricted_best_response(&g, 0, &others, &RestrictedPolicySpace::DeterministicOnly),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn fact5_column_best_responses_are_not_convex_at_one_half() {
        let g = fact5_default();
        let row = Policy::stationary(3, MixedStrategy::uniform(2));
        let convex = best_response_convexity_test(&g, 1, &[row], &RestrictedPolicySpace::StateUniform, 20, 1).unwrap();
        assert!(!convex);
    }
}
