#![allow(dead_code)]

use rand::Rng;
use sgl::game::{induce_mdp, policy_value, JointPolicy, Policy, StochasticGame};
use sgl::restrictions::{RestrictedPolicySpace, Shape};
use sgl::solvers::check_equilibrium;

/// An opponent policy for a two-player game that makes `player`
/// indifferent between the two generators, found on the segment between
/// two random opponent policies. Valid when the player's value is linear
/// in the opponent's policy, as in matrix and no-control games.
pub fn indifferent_opponent<R: Rng>(
    rng: &mut R,
    game: &StochasticGame,
    player: usize,
    gens: &[Policy],
    tries: usize,
) -> Option<Policy> {
    let other = 1 - player;
    let (states, actions) = (game.state_count(), game.action_count(other));
    let diff = |o: &Policy| -> f64 {
        let mdp = induce_mdp(game, player, std::slice::from_ref(o)).unwrap();
        mdp.value_at_initial(&gens[0]).unwrap() - mdp.value_at_initial(&gens[1]).unwrap()
    };
    for _ in 0..tries {
        let a = sgl::random::policy(rng, states, actions);
        let b = sgl::random::policy(rng, states, actions);
        let (da, db) = (diff(&a), diff(&b));
        if da * db < 0.0 {
            let t = da / (da - db);
            return Some(a.blend(&b, 1.0 - t));
        }
    }
    None
}

/// Max over a row-strategy grid of the worst column payoff.
pub fn grid_maximin(payoff: &[Vec<f64>], divisions: usize) -> f64 {
    let rows = payoff.len();
    let cols = payoff[0].len();
    let mut best = f64::NEG_INFINITY;
    let mut counts = vec![0usize; rows];
    fn go(k: usize, left: usize, counts: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k + 1 == counts.len() {
            counts[k] = left;
            f(counts);
            return;
        }
        for i in 0..=left {
            counts[k] = i;
            go(k + 1, left - i, counts, f);
        }
    }
    let scale = 1.0 / divisions as f64;
    go(0, divisions, &mut counts, &mut |c: &[usize]| {
        let mut worst = f64::INFINITY;
        for j in 0..cols {
            let mut v = 0.0;
            for (i, &n) in c.iter().enumerate() {
                v += n as f64 * payoff[i][j];
            }
            worst = worst.min(v);
        }
        best = best.max(worst * scale);
    });
    best
}

/// Team-game check: the grid point with the highest common value must
/// pass the restricted equilibrium check within twice the largest
/// value change between neighbouring grid points. Spaces must be
/// two-generator global hulls. Returns (max gap, bound).
pub fn team_grid_check(game: &StochasticGame, spaces: &[RestrictedPolicySpace], divisions: usize) -> (f64, f64) {
    let grids: Vec<_> = spaces
        .iter()
        .enumerate()
        .map(|(i, s)| s.grid(Shape::new(game.state_count(), game.action_count(i)), divisions))
        .collect();
    let (n0, n1) = (grids[0].len(), grids[1].len());
    let mut values = vec![vec![0.0; n1]; n0];
    let mut best = (0, 0);
    for a in 0..n0 {
        for b in 0..n1 {
            let joint = JointPolicy::new(vec![grids[0][a].policy.clone(), grids[1][b].policy.clone()]);
            values[a][b] = policy_value(game, &joint).unwrap()[0];
            if values[a][b] > values[best.0][best.1] {
                best = (a, b);
            }
        }
    }
    let mut delta = 0.0f64;
    for a in 0..n0 {
        for b in 0..n1 {
            if a + 1 < n0 {
                delta = delta.max((values[a + 1][b] - values[a][b]).abs());
            }
            if b + 1 < n1 {
                delta = delta.max((values[a][b + 1] - values[a][b]).abs());
            }
        }
    }
    let joint = JointPolicy::new(vec![grids[0][best.0].policy.clone(), grids[1][best.1].policy.clone()]);
    let cert = check_equilibrium(game, &joint, spaces, 0.0).unwrap();
    (cert.max_gap(), 2.0 * delta)
}
