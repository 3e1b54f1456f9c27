use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use super::best_response::restricted_best_response;
use crate::error::{Error, Result};
use crate::game::{policy_value, JointPolicy, StochasticGame};
use crate::restrictions::{GridPoint, RestrictedPolicySpace, Shape};

/// Largest total number of grid parameters across all players.
pub const MAX_SWEEP_DIMENSION: usize = 4;

#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// Grid parameters, concatenated over players.
    pub params: Vec<f64>,
    pub joint: JointPolicy,
    pub gaps: Vec<f64>,
    pub max_gap: f64,
}

/// Regret gaps over a grid of joint policies.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub divisions: usize,
    pub epsilon: f64,
    pub points: Vec<SweepPoint>,
    /// Index of the point with the smallest max gap (lowest index on ties).
    pub argmin: usize,
    pub min_max_gap: f64,
    /// Estimate of how much lower the max gap can get between grid points:
    /// total dimension times the largest change between adjacent points.
    pub refinement_bound: f64,
}

impl SweepResult {
    pub fn best(&self) -> &SweepPoint {
        &self.points[self.argmin]
    }

    /// `min_max_gap - refinement_bound`.
    pub fn margin(&self) -> f64 {
        self.min_max_gap - self.refinement_bound
    }

    /// Whether the grid evidence excludes an epsilon-equilibrium: the
    /// margin exceeds epsilon. Numerical evidence, not a proof.
    pub fn excludes_equilibrium(&self) -> bool {
        self.margin() > self.epsilon
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let (params, players) = self
            .points
            .first()
            .map_or((0, 0), |p| (p.params.len(), p.gaps.len()));
        let mut header: Vec<String> = (0..params).map(|k| format!("param_{k}")).collect();
        header.extend((0..players).map(|i| format!("gap_{i}")));
        header.push("max_gap".into());
        writer.write_record(&header).map_err(csv_error)?;
        for p in &self.points {
            let record: Vec<String> = p
                .params
                .iter()
                .chain(&p.gaps)
                .chain(std::iter::once(&p.max_gap))
                .map(|v| v.to_string())
                .collect();
            writer.write_record(&record).map_err(csv_error)?;
        }
        writer.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Malformed(format!("{other:?}")),
    }
}

/// Pairs of grid points one step apart along a single parameter.
fn axis_neighbours(space: &RestrictedPolicySpace, grid: &[GridPoint], divisions: usize) -> Vec<(usize, usize)> {
    if matches!(space, RestrictedPolicySpace::DeterministicOnly) {
        return vec![];
    }
    let key = |p: &GridPoint| -> Vec<i64> {
        p.params
            .iter()
            .map(|v| (v * divisions as f64).round() as i64)
            .collect()
    };
    let index: HashMap<Vec<i64>, usize> = grid.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
    let mut pairs = Vec::new();
    for (i, p) in grid.iter().enumerate() {
        let base = key(p);
        for d in 0..base.len() {
            let mut next = base.clone();
            next[d] += 1;
            if let Some(&j) = index.get(&next) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Evaluates the max regret gap at every point of the product grid of the
/// players' space parameterizations, with `round(1 / resolution)` steps
/// per unit of weight. Deviations are searched over the whole restricted
/// space, not only the grid.
pub fn sweep_existence(
    game: &StochasticGame,
    spaces: &[RestrictedPolicySpace],
    resolution: f64,
    epsilon: f64,
) -> Result<SweepResult> {
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::OutOfRange(format!("resolution {resolution} not in (0, 1]")));
    }
    if spaces.len() != game.player_count() {
        return Err(Error::Dimension("one space per player".into()));
    }
    let divisions = (1.0 / resolution).round() as usize;
    let shapes: Vec<Shape> = (0..game.player_count())
        .map(|i| Shape::new(game.state_count(), game.action_count(i)))
        .collect();
    for (space, &shape) in spaces.iter().zip(&shapes) {
        space.check(shape)?;
    }
    let dimension: usize = spaces
        .iter()
        .zip(&shapes)
        .map(|(s, &sh)| s.parameter_dimension(sh))
        .sum();
    if dimension > MAX_SWEEP_DIMENSION {
        return Err(Error::Size(format!(
            "sweep over {dimension} parameters exceeds {MAX_SWEEP_DIMENSION}"
        )));
    }
    let grids: Vec<Vec<GridPoint>> = spaces
        .iter()
        .zip(&shapes)
        .map(|(s, &sh)| s.grid(sh, divisions))
        .collect();
    let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().product();
    let split = |mut index: usize| -> Vec<usize> {
        let mut out = vec![0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            out[k] = index % sizes[k];
            index /= sizes[k];
        }
        out
    };

    let points: Vec<SweepPoint> = (0..total)
        .into_par_iter()
        .map(|index| {
            let parts = split(index);
            let joint = JointPolicy::new(
                parts
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| grids[i][k].policy.clone())
                    .collect(),
            );
            let params = parts
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| grids[i][k].params.clone())
                .collect();
            let current = policy_value(game, &joint)?;
            let gaps = (0..game.player_count())
                .map(|i| {
                    let br = restricted_best_response(game, i, &joint.others(i), &spaces[i])?;
                    Ok((br.value - current[i]).max(0.0))
                })
                .collect::<Result<Vec<f64>>>()?;
            let max_gap = gaps.iter().copied().fold(0.0, f64::max);
            Ok(SweepPoint {
                params,
                joint,
                gaps,
                max_gap,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut argmin = 0;
    for (i, p) in points.iter().enumerate() {
        if p.max_gap < points[argmin].max_gap {
            argmin = i;
        }
    }

    // Largest max-gap change between neighbours along any one parameter.
    let strides: Vec<usize> = (0..sizes.len())
        .map(|k| sizes[k + 1..].iter().product())
        .collect();
    let mut delta = 0.0f64;
    for (player, (space, grid)) in spaces.iter().zip(&grids).enumerate() {
        let pairs = axis_neighbours(space, grid, divisions);
        for index in 0..total {
            let parts = split(index);
            if parts[player] != 0 {
                continue;
            }
            for &(a, b) in &pairs {
                let ia = index + a * strides[player];
                let ib = index + b * strides[player];
                delta = delta.max((points[ia].max_gap - points[ib].max_gap).abs());
            }
        }
    }
    Ok(SweepResult {
        divisions,
        epsilon,
        min_max_gap: points[argmin].max_gap,
        argmin,
        points,
        refinement_bound: dimension as f64 * delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{rps, Policy};

    #[test]
    fn rps_pure_policies_never_settle() {
        let spaces = vec![RestrictedPolicySpace::DeterministicOnly; 2];
        let sweep = sweep_existence(&rps(), &spaces, 0.5, 0.5).unwrap();
        assert_eq!(sweep.points.len(), 9);
        assert_eq!(sweep.min_max_gap, 1.0);
        assert_eq!(sweep.refinement_bound, 0.0);
        assert!(sweep.excludes_equilibrium());
    }

    #[test]
    fn restricted_rps_sweep_finds_the_equilibrium() {
        let one = |p: &[f64]| Policy::from_rows(vec![p.to_vec()]).unwrap();
        let hull = RestrictedPolicySpace::ConvexHullGlobal(vec![one(&[0.5, 0.5, 0.0]), one(&[0.0, 0.5, 0.5])]);
        let spaces = vec![RestrictedPolicySpace::Full, hull];
        let sweep = sweep_existence(&rps(), &spaces, 1.0 / 6.0, 1e-6).unwrap();
        assert!(sweep.min_max_gap <= 1e-6);
        let mut out = Vec::new();
        sweep.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("param_0,param_1,param_2,gap_0,gap_1,max_gap"));
        assert_eq!(text.lines().count(), sweep.points.len() + 1);
    }

    #[test]
    fn too_many_parameters() {
        let spaces = vec![RestrictedPolicySpace::Full; 2];
        let g = crate::game::blotto_4_3();
        assert!(matches!(sweep_existence(&g, &spaces, 0.5, 0.1), Err(Error::Size(_))));
    }
}
