use crate::error::{Error, Result};
use crate::game::{MixedStrategy, RewardFormulation, StochasticGame};
use crate::lp::{LinearProgram, LpOutcome, Relation};

/// Value and optimal strategies of a two-player zero-sum matrix game.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxSolution {
    /// Value to the row player; the column player's value is its negation.
    pub value: f64,
    pub row: MixedStrategy,
    pub col: MixedStrategy,
}

// Slack allowed on the optimal value while breaking ties.
const LEX_SLACK: f64 = 1e-12;

/// Lexicographically least maximin strategy for the row player of
/// `payoff` (row player's payoffs), and the game value.
fn maximin(payoff: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let rows = payoff.len();
    let cols = payoff[0].len();
    let low = payoff.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let high = payoff.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    // Shift so the value is positive and v can stay a nonnegative variable.
    let shift = 1.0 - low;
    let scale = (high - low).max(1.0);

    // variables x_0..x_{rows-1}, v
    let base = |extra: &mut LinearProgram| {
        for c in 0..cols {
            let mut coeffs: Vec<f64> = (0..rows).map(|r| payoff[r][c] + shift).collect();
            coeffs.push(-1.0);
            extra.constrain(coeffs, Relation::Ge, 0.0);
        }
        let mut sum = vec![1.0; rows + 1];
        sum[rows] = 0.0;
        extra.constrain(sum, Relation::Eq, 1.0);
    };
    let mut objective = vec![0.0; rows + 1];
    objective[rows] = 1.0;
    let mut lp = LinearProgram::new(objective);
    base(&mut lp);
    let (shifted_value, mut x) = match lp.solve() {
        LpOutcome::Optimal { x, value } => (value, x),
        other => unreachable!("maximin LP is feasible and bounded: {other:?}"),
    };

    // Fix the value, then minimize x_0, x_1, ... in turn.
    let mut fixed: Vec<(usize, f64)> = Vec::new();
    for k in 0..rows {
        let attempt = |slack: f64| {
            let floor = shifted_value - slack * scale;
            let mut objective = vec![0.0; rows + 1];
            objective[k] = -1.0;
            let mut lp = LinearProgram::new(objective);
            base(&mut lp);
            let mut at_least = vec![0.0; rows + 1];
            at_least[rows] = 1.0;
            lp.constrain(at_least, Relation::Ge, floor);
            for &(i, v) in &fixed {
                let mut pin = vec![0.0; rows + 1];
                pin[i] = 1.0;
                lp.constrain(pin, Relation::Le, v + slack * scale);
            }
            match lp.solve() {
                LpOutcome::Optimal { x, .. } => Some(x),
                _ => None,
            }
        };
        // Exact bounds first; a little slack if rounding made them infeasible.
        if let Some(xk) = attempt(0.0).or_else(|| attempt(LEX_SLACK)) {
            fixed.push((k, xk[k]));
            x = xk;
        }
    }
    let mut strategy: Vec<f64> = x[..rows].iter().map(|v| v.max(0.0)).collect();
    let total: f64 = strategy.iter().sum();
    strategy.iter_mut().for_each(|v| *v /= total);
    (shifted_value - shift, strategy)
}

/// Solves the zero-sum matrix game with row payoffs `payoff`.
pub fn minimax_matrix(payoff: &[Vec<f64>]) -> Result<MinimaxSolution> {
    if payoff.is_empty()
        || payoff[0].is_empty()
        || payoff.iter().any(|r| r.len() != payoff[0].len())
    {
        return Err(Error::Malformed("payoff matrix must be rectangular and non-empty".into()));
    }
    let (value, row) = maximin(payoff);
    let transposed: Vec<Vec<f64>> = (0..payoff[0].len())
        .map(|c| payoff.iter().map(|r| -r[c]).collect())
        .collect();
    let (_, col) = maximin(&transposed);
    Ok(MinimaxSolution {
        value,
        row: MixedStrategy::new_unchecked(row),
        col: MixedStrategy::new_unchecked(col),
    })
}

/// Row-player payoff matrix of a two-player single-state game.
pub fn row_payoffs(game: &StochasticGame) -> Result<Vec<Vec<f64>>> {
    if game.player_count() != 2 || !game.is_matrix_game() {
        return Err(Error::Unsupported(
            "needs a two-player single-state game".into(),
        ));
    }
    Ok((0..game.action_count(0))
        .map(|r| {
            (0..game.action_count(1))
                .map(|c| game.reward(0, 0, game.joint_index(&[r, c])))
                .collect()
        })
        .collect())
}

/// Minimax solution of a zero-sum matrix game, with the value expressed in
/// the game's formulation (scaled by `1 / (1 - gamma)` when discounted).
pub fn minimax_zero_sum_matrix(game: &StochasticGame) -> Result<MinimaxSolution> {
    let payoff = row_payoffs(game)?;
    if !game.classify().zero_sum {
        return Err(Error::Unsupported("game is not zero-sum".into()));
    }
    let mut solution = minimax_matrix(&payoff)?;
    if let RewardFormulation::Discounted(gamma) = game.formulation() {
        solution.value /= 1.0 - gamma;
    }
    Ok(solution)
}
