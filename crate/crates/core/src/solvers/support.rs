use nalgebra::{DMatrix, DVector};

use super::minimax::row_payoffs;
use crate::error::{Error, Result};
use crate::game::{JointPolicy, MixedStrategy, Policy, StochasticGame};
use crate::linalg;

const FEASIBILITY: f64 = 1e-12;
const BEST_REPLY: f64 = 1e-9;

/// Nash equilibria found by support enumeration.
#[derive(Debug, Clone)]
pub struct SupportEnumeration {
    pub equilibria: Vec<(MixedStrategy, MixedStrategy)>,
    /// Some support system was singular or some equilibrium has a support
    /// size mismatch or an off-support tie; equilibria may then be missed.
    pub degenerate: bool,
}

impl SupportEnumeration {
    pub fn joint_policies(&self) -> Vec<JointPolicy> {
        self.equilibria
            .iter()
            .map(|(r, c)| {
                JointPolicy::new(vec![
                    Policy::new(vec![r.clone()]),
                    Policy::new(vec![c.clone()]),
                ])
            })
            .collect()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            go(i + 1, n, k, current, out);
            current.pop();
        }
    }
    go(0, n, k, &mut current, &mut out);
    out
}

/// Strategy on `own` support (of length `own_n`) that makes the opponent
/// indifferent across `their` support, where `payoff[o][a]` is the
/// opponent's payoff for its action `o` against own action `a`.
/// Returns `None` when the system is singular or infeasible.
fn indifference(payoff: &dyn Fn(usize, usize) -> f64, own: &[usize], their: &[usize], own_n: usize) -> Option<Vec<f64>> {
    let k = own.len();
    // unknowns: weights on `own`, then the common payoff
    let mut a = DMatrix::zeros(k + 1, k + 1);
    let mut b = DVector::zeros(k + 1);
    for (r, &o) in their.iter().enumerate() {
        for (c, &own_a) in own.iter().enumerate() {
            a[(r, c)] = payoff(o, own_a);
        }
        a[(r, k)] = -1.0;
    }
    for c in 0..k {
        a[(k, c)] = 1.0;
    }
    b[k] = 1.0;
    let x = linalg::solve(a, &b).ok()?;
    if x.iter().take(k).any(|&w| w < -FEASIBILITY) {
        return None;
    }
    let mut out = vec![0.0; own_n];
    for (c, &own_a) in own.iter().enumerate() {
        out[own_a] = x[c].max(0.0);
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= total);
    Some(out)
}

/// All Nash equilibria of a two-player matrix game found on equal-size
/// supports, deduplicated.
pub fn support_enumeration_bimatrix(game: &StochasticGame, max_actions: usize) -> Result<SupportEnumeration> {
    let a = row_payoffs(game)?;
    let (m, n) = (game.action_count(0), game.action_count(1));
    if max_actions > 5 || m > max_actions || n > max_actions {
        return Err(Error::Size(format!(
            "{m}x{n} game exceeds the support-enumeration bound {}",
            max_actions.min(5)
        )));
    }
    let b: Vec<Vec<f64>> = (0..m)
        .map(|r| (0..n).map(|c| game.reward(1, 0, game.joint_index(&[r, c]))).collect())
        .collect();

    let mut equilibria: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut degenerate = false;
    for k in 1..=m.min(n) {
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                // Column mix making the row player indifferent over `rows`.
                let y = indifference(&|r, c| a[r][c], &cols, &rows, n);
                // Row mix making the column player indifferent over `cols`.
                let x = indifference(&|c, r| b[r][c], &rows, &cols, m);
                let (Some(x), Some(y)) = (x, y) else {
                    continue;
                };
                let row_payoff: Vec<f64> = (0..m)
                    .map(|r| (0..n).map(|c| a[r][c] * y[c]).sum())
                    .collect();
                let col_payoff: Vec<f64> = (0..n)
                    .map(|c| (0..m).map(|r| b[r][c] * x[r]).sum())
                    .collect();
                let u = rows.iter().map(|&r| row_payoff[r]).fold(f64::NEG_INFINITY, f64::max);
                let v = cols.iter().map(|&c| col_payoff[c]).fold(f64::NEG_INFINITY, f64::max);
                let row_best = row_payoff.iter().all(|&p| p <= u + BEST_REPLY);
                let col_best = col_payoff.iter().all(|&p| p <= v + BEST_REPLY);
                if !(row_best && col_best) {
                    continue;
                }
                let off_support_tie = (0..m)
                    .filter(|r| !rows.contains(r))
                    .any(|r| row_payoff[r] >= u - BEST_REPLY)
                    || (0..n)
                        .filter(|c| !cols.contains(c))
                        .any(|c| col_payoff[c] >= v - BEST_REPLY);
                let shrunk = rows.iter().any(|&r| x[r] <= FEASIBILITY)
                    || cols.iter().any(|&c| y[c] <= FEASIBILITY);
                degenerate |= off_support_tie || shrunk;
                let seen = equilibria.iter().any(|(ex, ey)| {
                    linalg::max_abs_diff(ex, &x) < BEST_REPLY && linalg::max_abs_diff(ey, &y) < BEST_REPLY
                });
                if !seen {
                    equilibria.push((x, y));
                }
            }
        }
    }
    Ok(SupportEnumeration {
        equilibria: equilibria
            .into_iter()
            .map(|(x, y)| (MixedStrategy::new_unchecked(x), MixedStrategy::new_unchecked(y)))
            .collect(),
        degenerate,
    })
}
