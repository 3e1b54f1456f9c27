//! Dense two-phase simplex for the small LPs in this crate (minimax,
//! hull-weight recovery). Bland's rule throughout, so degenerate problems
//! terminate and results are deterministic.

const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective · x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn constrain(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        debug_assert_eq!(coefficients.len(), self.objective.len());
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        self
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    n_original: usize,
    n_columns: usize,
    first_artificial: usize,
    // rows[m] is the objective row; the last column is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.objective.len();
        let m = lp.constraints.len();

        // Normalize so every rhs is nonnegative.
        let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coefficients.iter().map(|v| -v).collect(), flipped, -c.rhs)
                } else {
                    (c.coefficients.clone(), c.relation, c.rhs)
                }
            })
            .collect();

        let n_slack = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Eq)
            .count();
        let n_artificial = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Le)
            .count();
        let first_artificial = n + n_slack;
        let n_columns = first_artificial + n_artificial;

        let mut rows = vec![vec![0.0; n_columns + 1]; m + 1];
        let mut basis = vec![0; m];
        let mut slack = n;
        let mut artificial = first_artificial;
        for (r, (coefficients, relation, rhs)) in normalized.iter().enumerate() {
            rows[r][..n].copy_from_slice(coefficients);
            rows[r][n_columns] = *rhs;
            match relation {
                Relation::Le => {
                    rows[r][slack] = 1.0;
                    basis[r] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    rows[r][slack] = -1.0;
                    slack += 1;
                    rows[r][artificial] = 1.0;
                    basis[r] = artificial;
                    artificial += 1;
                }
                Relation::Eq => {
                    rows[r][artificial] = 1.0;
                    basis[r] = artificial;
                    artificial += 1;
                }
            }
        }
        Self {
            n_original: n,
            n_columns,
            first_artificial,
            rows,
            basis,
        }
    }

    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.n_columns + 1;
        let p = self.rows[row][col];
        for j in 0..width {
            self.rows[row][j] /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (r, target) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = target[col];
            if factor != 0.0 {
                for j in 0..width {
                    target[j] -= factor * pivot_row[j];
                }
                target[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Iterates Bland's rule over columns `< column_limit`. Returns false when unbounded.
    fn optimize(&mut self, column_limit: usize) -> bool {
        let m = self.m();
        let rhs = self.n_columns;
        for _ in 0..MAX_PIVOTS {
            let entering = (0..column_limit).find(|&j| self.rows[m][j] < -PIVOT_EPS);
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..m {
                let a = self.rows[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.rows[r][rhs] / a;
                    leaving = match leaving {
                        None => Some((r, ratio)),
                        Some((best, best_ratio)) => {
                            if ratio < best_ratio - 1e-14
                                || (ratio <= best_ratio + 1e-14 && self.basis[r] < self.basis[best])
                            {
                                Some((r, ratio))
                            } else {
                                Some((best, best_ratio))
                            }
                        }
                    };
                }
            }
            match leaving {
                None => return false,
                Some((row, _)) => self.pivot(row, col),
            }
        }
        panic!("simplex exceeded {MAX_PIVOTS} pivots");
    }

    fn run(mut self, objective: &[f64]) -> LpOutcome {
        let m = self.m();
        let rhs = self.n_columns;

        // Phase 1: maximize -(sum of artificials).
        if self.first_artificial < self.n_columns {
            for j in self.first_artificial..self.n_columns {
                self.rows[m][j] = 1.0;
            }
            for r in 0..m {
                if self.basis[r] >= self.first_artificial {
                    let row = self.rows[r].clone();
                    for (j, v) in row.iter().enumerate() {
                        self.rows[m][j] -= v;
                    }
                }
            }
            self.optimize(self.n_columns);
            if self.rows[m][rhs] < -1e-9 {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis; rows with no
            // usable pivot are redundant and stay parked on their artificial.
            for r in 0..m {
                if self.basis[r] >= self.first_artificial {
                    if let Some(col) =
                        (0..self.first_artificial).find(|&j| self.rows[r][j].abs() > PIVOT_EPS)
                    {
                        self.pivot(r, col);
                    }
                }
            }
        }

        // Phase 2.
        for j in 0..=self.n_columns {
            self.rows[m][j] = 0.0;
        }
        for (j, c) in objective.iter().enumerate() {
            self.rows[m][j] = -c;
        }
        for r in 0..m {
            let b = self.basis[r];
            let factor = self.rows[m][b];
            if factor != 0.0 {
                let row = self.rows[r].clone();
                for (j, v) in row.iter().enumerate() {
                    self.rows[m][j] -= factor * v;
                }
            }
        }
        if !self.optimize(self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; self.n_original];
        for r in 0..m {
            if self.basis[r] < self.n_original {
                x[self.basis[r]] = self.rows[r][rhs].max(0.0);
            }
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(outcome: LpOutcome) -> (Vec<f64>, f64) {
        match outcome {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.constrain(vec![1.0, 0.0], Relation::Le, 4.0)
            .constrain(vec![0.0, 2.0], Relation::Le, 12.0)
            .constrain(vec![3.0, 2.0], Relation::Le, 18.0);
        let (x, value) = optimal(lp.solve());
        assert!((value - 36.0).abs() < 1e-12);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_ge_constraints() {
        // min x + y (max -x - y), x + y = 1, x >= 0.25
        let mut lp = LinearProgram::new(vec![-1.0, -2.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 1.0)
            .constrain(vec![1.0, 0.0], Relation::Ge, 0.25);
        let (x, value) = optimal(lp.solve());
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_is_detected() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0)
            .constrain(vec![1.0], Relation::Ge, 2.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_is_detected() {
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.constrain(vec![0.0, 1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // max -x, -x <= -3  => x >= 3
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.constrain(vec![-1.0], Relation::Le, -3.0);
        let (x, _) = optimal(lp.solve());
        assert!((x[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 1.0)
            .constrain(vec![2.0, 2.0], Relation::Eq, 2.0);
        let (_, value) = optimal(lp.solve());
        assert!((value - 1.0).abs() < 1e-12);
    }
}
