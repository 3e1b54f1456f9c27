//! Named games.

use super::{RewardFormulation, StochasticGame};
use crate::error::{Error, Result};

/// Row-player payoffs in the left matrix state of [`fact5_game`]
/// (rows U, D; columns L, R).
pub const FACT5_LEFT: [[f64; 2]; 2] = [[1.0, 2.0], [0.0, 2.0]];
/// Row-player payoffs in the right matrix state of [`fact5_game`].
pub const FACT5_RIGHT: [[f64; 2]; 2] = [[2.0, 0.0], [2.0, 1.0]];

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn labels(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn named_bimatrix(
    row_actions: Vec<String>,
    col_actions: Vec<String>,
    row_payoffs: &[Vec<f64>],
    col_payoffs: &[Vec<f64>],
) -> Result<StochasticGame> {
    let rows = row_actions.len();
    let cols = col_actions.len();
    let shape_ok = |m: &[Vec<f64>]| m.len() == rows && m.iter().all(|r| r.len() == cols);
    if rows == 0 || cols == 0 || !shape_ok(row_payoffs) || !shape_ok(col_payoffs) {
        return Err(Error::Malformed(format!(
            "payoff matrices must both be {rows}x{cols}"
        )));
    }
    let flat = |m: &[Vec<f64>]| m.iter().flatten().copied().collect::<Vec<_>>();
    StochasticGame::new(
        vec!["s0".into()],
        vec![row_actions, col_actions],
        vec![vec![vec![1.0]; rows * cols]],
        vec![vec![flat(row_payoffs)], vec![flat(col_payoffs)]],
        0,
        RewardFormulation::Average,
    )
}

/// Two-player single-state game from row and column payoff matrices.
///
/// Matrix games use the average formulation, so values are one-shot
/// expected payoffs.
pub fn bimatrix(row_payoffs: &[Vec<f64>], col_payoffs: &[Vec<f64>]) -> Result<StochasticGame> {
    let rows = row_payoffs.len();
    let cols = row_payoffs.first().map_or(0, Vec::len);
    named_bimatrix(names("r", rows), names("c", cols), row_payoffs, col_payoffs)
}

/// Zero-sum matrix game; the column player receives the negation.
pub fn zero_sum_matrix(row_payoffs: &[Vec<f64>]) -> Result<StochasticGame> {
    let negated: Vec<Vec<f64>> = row_payoffs
        .iter()
        .map(|r| r.iter().map(|v| -v).collect())
        .collect();
    bimatrix(row_payoffs, &negated)
}

pub fn rps() -> StochasticGame {
    let row = vec![
        vec![0.0, -1.0, 1.0],
        vec![1.0, 0.0, -1.0],
        vec![-1.0, 1.0, 0.0],
    ];
    let col = vec![
        vec![0.0, 1.0, -1.0],
        vec![-1.0, 0.0, 1.0],
        vec![1.0, -1.0, 0.0],
    ];
    let actions = labels(&["Rock", "Paper", "Scissors"]);
    named_bimatrix(actions.clone(), actions, &row, &col).expect("static matrices")
}

pub fn bach_stravinsky() -> StochasticGame {
    let row = vec![vec![2.0, 0.0], vec![0.0, 1.0]];
    let col = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
    let actions = labels(&["Bach", "Stravinsky"]);
    named_bimatrix(actions.clone(), actions, &row, &col).expect("static matrices")
}

/// Colonel Blotto: four regiments for the row player, three for the column.
pub fn blotto_4_3() -> StochasticGame {
    let row = vec![
        vec![4.0, 2.0, 1.0, 0.0],
        vec![1.0, 3.0, 0.0, -1.0],
        vec![-2.0, 2.0, 2.0, -2.0],
        vec![-1.0, 0.0, 3.0, 1.0],
        vec![0.0, 1.0, 2.0, 4.0],
    ];
    let col: Vec<Vec<f64>> = row
        .iter()
        .map(|r| r.iter().map(|v| -v).collect())
        .collect();
    named_bimatrix(
        labels(&["4-0", "3-1", "2-2", "1-3", "0-4"]),
        labels(&["3-0", "2-1", "1-2", "0-3"]),
        &row,
        &col,
    )
    .expect("static matrices")
}

/// Three-state zero-sum game in which a state-uniform restriction leaves
/// no restricted equilibrium.
///
/// From `s0` (reward 0) the column player's L/R leads to state `left` /
/// `right` with probability `1 - eps` and to the other one with `eps`,
/// whatever the row player does. Both matrix states return to `s0`
/// deterministically. `left` and `right` hold the row player's payoffs
/// (rows U, D; columns L, R); the column player receives the negation.
pub fn fact5_game(
    left: [[f64; 2]; 2],
    right: [[f64; 2]; 2],
    eps: f64,
    gamma: f64,
) -> Result<StochasticGame> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps {eps} not in (0, 1)")));
    }
    if left.iter().chain(&right).flatten().any(|v| !v.is_finite()) {
        return Err(Error::Malformed("payoff matrices must be finite".into()));
    }
    let formulation = RewardFormulation::discounted(gamma)?;
    let (s0, l, r) = (0, 1, 2);
    // joint index = row * 2 + col
    let mut transitions = vec![vec![vec![0.0; 3]; 4]; 3];
    let mut row_rewards = vec![vec![0.0; 4]; 3];
    for row_action in 0..2 {
        for col_action in 0..2 {
            let j = row_action * 2 + col_action;
            let (near, far) = if col_action == 0 { (l, r) } else { (r, l) };
            transitions[s0][j][near] = 1.0 - eps;
            transitions[s0][j][far] = eps;
            transitions[l][j][s0] = 1.0;
            transitions[r][j][s0] = 1.0;
            row_rewards[l][j] = left[row_action][col_action];
            row_rewards[r][j] = right[row_action][col_action];
        }
    }
    let col_rewards = row_rewards
        .iter()
        .map(|row| row.iter().map(|v| -v).collect())
        .collect();
    StochasticGame::new(
        labels(&["s0", "left", "right"]),
        vec![labels(&["U", "D"]), labels(&["L", "R"])],
        transitions,
        vec![row_rewards, col_rewards],
        s0,
        formulation,
    )
}

/// [`fact5_game`] with the default matrices, `eps = 0.1`, `gamma = 0.9`.
pub fn fact5_default() -> StochasticGame {
    fact5_game(FACT5_LEFT, FACT5_RIGHT, 0.1, 0.9).expect("static parameters")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blotto_rule(row: (i32, i32), col: (i32, i32)) -> f64 {
        let field = |x: i32, y: i32| {
            if x > y {
                (1 + y) as f64
            } else if y > x {
                -((1 + x) as f64)
            } else {
                0.0
            }
        };
        field(row.0, col.0) + field(row.1, col.1)
    }

    #[test]
    fn blotto_table_matches_battlefield_rule() {
        let g = blotto_4_3();
        for r in 0..5 {
            for c in 0..4 {
                let expected = blotto_rule((4 - r, r), (3 - c, c));
                let j = g.joint_index(&[r as usize, c as usize]);
                assert_eq!(g.reward(0, 0, j), expected, "row {r} col {c}");
                assert_eq!(g.reward(1, 0, j), -expected);
            }
        }
    }

    #[test]
    fn fact5_transitions_follow_column_choice() {
        let g = fact5_default();
        for row_action in 0..2 {
            let left = g.transition(0, g.joint_index(&[row_action, 0]));
            let right = g.transition(0, g.joint_index(&[row_action, 1]));
            assert_eq!(left, &[0.0, 0.9, 0.1]);
            assert_eq!(right, &[0.0, 0.1, 0.9]);
        }
        for j in 0..4 {
            assert_eq!(g.transition(1, j), &[1.0, 0.0, 0.0]);
            assert_eq!(g.transition(2, j), &[1.0, 0.0, 0.0]);
            assert_eq!(g.reward(0, 0, j), 0.0);
        }
    }

    #[test]
    fn fact5_rejects_bad_parameters() {
        assert!(fact5_game(FACT5_LEFT, FACT5_RIGHT, 0.0, 0.9).is_err());
        assert!(fact5_game(FACT5_LEFT, FACT5_RIGHT, 0.1, 1.0).is_err());
        assert!(fact5_game([[f64::INFINITY, 0.0], [0.0, 0.0]], FACT5_RIGHT, 0.1, 0.5).is_err());
    }

    #[test]
    fn bimatrix_rejects_ragged_input() {
        assert!(bimatrix(&[vec![1.0, 2.0], vec![3.0]], &[vec![1.0, 2.0], vec![3.0, 4.0]]).is_err());
        assert!(bimatrix(&[], &[]).is_err());
    }
}
