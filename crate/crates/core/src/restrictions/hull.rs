//! Geometry of convex hulls of finitely many points.

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::lp::{LinearProgram, LpOutcome, Relation};

const WOLFE_EPS: f64 = 1e-13;

/// Nearest point of `conv(points)` to `target` and its convex weights.
///
/// Wolfe's minimum-norm-point algorithm applied to `points - target`.
pub fn nearest_in_hull(points: &[Vec<f64>], target: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let shifted: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(target).map(|(a, b)| a - b).collect())
        .collect();
    let weights = min_norm_weights(&shifted);
    let dim = target.len();
    let mut x = vec![0.0; dim];
    for (w, p) in weights.iter().zip(points) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += w * pi;
        }
    }
    (x, weights)
}

fn combine(points: &[Vec<f64>], support: &[usize], lambda: &[f64]) -> Vec<f64> {
    let dim = points[0].len();
    let mut x = vec![0.0; dim];
    for (&k, &w) in support.iter().zip(lambda) {
        for (xi, pi) in x.iter_mut().zip(&points[k]) {
            *xi += w * pi;
        }
    }
    x
}

/// Minimizer of `|sum mu_k p_k|` over the affine hull (`sum mu = 1`).
fn affine_minimizer(points: &[Vec<f64>], support: &[usize]) -> Vec<f64> {
    let m = support.len();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[(r, c)] = linalg::dot(&points[i], &points[j]);
        }
        a[(r, m)] = 1.0;
        a[(m, r)] = 1.0;
    }
    let mut b = DVector::zeros(m + 1);
    b[m] = 1.0;
    let solution = a
        .clone()
        .lu()
        .solve(&b)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .unwrap_or_else(|| {
            a.svd(true, true)
                .solve(&b, 1e-14)
                .expect("svd with both factors")
        });
    solution.iter().take(m).copied().collect()
}

fn min_norm_weights(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let norms: Vec<f64> = points.iter().map(|p| linalg::dot(p, p)).collect();
    let scale = norms.iter().copied().fold(0.0, f64::max).max(1e-300);
    let start = (0..n)
        .min_by(|&a, &b| norms[a].partial_cmp(&norms[b]).expect("finite"))
        .expect("at least one point");
    let mut support = vec![start];
    let mut lambda = vec![1.0];
    let mut x = points[start].clone();

    for _ in 0..(50 * n + 50) {
        let xx = linalg::dot(&x, &x);
        if xx <= WOLFE_EPS * scale {
            break;
        }
        let scores: Vec<f64> = points.iter().map(|p| linalg::dot(&x, p)).collect();
        let j = (0..n)
            .min_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite"))
            .expect("non-empty");
        if scores[j] >= xx - WOLFE_EPS * scale || support.contains(&j) {
            break;
        }
        support.push(j);
        lambda.push(0.0);
        loop {
            let mu = affine_minimizer(points, &support);
            if mu.iter().all(|&v| v > WOLFE_EPS) {
                lambda = mu;
                x = combine(points, &support, &lambda);
                break;
            }
            let mut theta = 1.0f64;
            for (l, m) in lambda.iter().zip(&mu) {
                if *m <= WOLFE_EPS {
                    let denom = l - m;
                    if denom > 0.0 {
                        theta = theta.min(l / denom);
                    }
                }
            }
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l = theta * m + (1.0 - theta) * *l;
            }
            let mut keep = Vec::new();
            let mut kept = Vec::new();
            for (&k, &l) in support.iter().zip(&lambda) {
                if l > WOLFE_EPS {
                    keep.push(k);
                    kept.push(l);
                }
            }
            if keep.is_empty() {
                // Numerical breakdown; fall back to the newest point.
                keep.push(*support.last().expect("non-empty"));
                kept.push(1.0);
            }
            let total: f64 = kept.iter().sum();
            support = keep;
            lambda = kept.into_iter().map(|l| l / total).collect();
            x = combine(points, &support, &lambda);
            if support.len() == 1 {
                break;
            }
        }
    }
    let mut weights = vec![0.0; n];
    for (&k, &l) in support.iter().zip(&lambda) {
        weights[k] += l;
    }
    weights
}

/// Smallest `t` such that some convex combination of `points` lies within
/// `t` of `target` in every coordinate, with the weights achieving it.
pub fn linf_distance_to_hull(points: &[Vec<f64>], target: &[f64]) -> (f64, Vec<f64>) {
    let k = points.len();
    // variables: w_0..w_{k-1}, t
    let mut objective = vec![0.0; k + 1];
    objective[k] = -1.0;
    let mut lp = LinearProgram::new(objective);
    for (j, &p) in target.iter().enumerate() {
        let mut upper: Vec<f64> = points.iter().map(|g| g[j]).collect();
        let mut lower = upper.clone();
        upper.push(-1.0);
        lower.push(1.0);
        lp.constrain(upper, Relation::Le, p);
        lp.constrain(lower, Relation::Ge, p);
    }
    let mut sum = vec![1.0; k + 1];
    sum[k] = 0.0;
    lp.constrain(sum, Relation::Eq, 1.0);
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => (x[k], x[..k].to_vec()),
        other => unreachable!("hull distance LP is always feasible and bounded: {other:?}"),
    }
}
