//! One-command reproductions of the learning experiments and the
//! counterexample checks.
//!
//! Each run writes `summary.json` into its output directory. Learning runs
//! add `trajectory.csv`, `figure.dat` and a gnuplot script `figure.gp`;
//! `fact5` adds `sweep.csv`.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{
    bach_stravinsky, blotto_4_3, fact5_default, policy_value, rps, JointPolicy, MixedStrategy, Policy,
    StochasticGame, FACT5_LEFT, FACT5_RIGHT,
};
use crate::io::{certificate_to_json, write_json};
use crate::learners::{self_play, LearnerConfig, TrajectoryLog, WolfPhcConfig};
use crate::restrictions::RestrictedPolicySpace;
use crate::solvers::{
    best_response_convexity_test, check_equilibrium, enumerate_deterministic, minimax_zero_sum_matrix,
    restricted_equilibrium_via_implicit, support_enumeration_bimatrix, sweep_existence,
};

/// Share of the run, at the end, over which final policies and rewards
/// are averaged.
pub const FINAL_FRACTION: f64 = 0.1;
/// Span and threshold of the stabilization measure.
pub const STABILITY_WINDOW: u64 = 10_000;
pub const STABILITY_THRESHOLD: f64 = 0.01;
/// Grid step of the `fact5` sweep.
pub const FACT5_RESOLUTION: f64 = 0.005;
pub const DEFAULT_ITERATIONS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Rps,
    RpsRestricted,
    Blotto,
    BlottoRestricted,
    Fact1,
    Fact5,
    BosEquilibria,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Rps,
        Experiment::RpsRestricted,
        Experiment::Blotto,
        Experiment::BlottoRestricted,
        Experiment::Fact1,
        Experiment::Fact5,
        Experiment::BosEquilibria,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Rps => "rps",
            Experiment::RpsRestricted => "rps-restricted",
            Experiment::Blotto => "blotto",
            Experiment::BlottoRestricted => "blotto-restricted",
            Experiment::Fact1 => "fact1",
            Experiment::Fact5 => "fact5",
            Experiment::BosEquilibria => "bos-equilibria",
        }
    }

    pub fn is_learning(self) -> bool {
        matches!(
            self,
            Experiment::Rps | Experiment::RpsRestricted | Experiment::Blotto | Experiment::BlottoRestricted
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionSpec {
    pub experiment: Experiment,
    pub seed: u64,
    pub iterations: u64,
    pub out: PathBuf,
}

fn one(probs: &[f64]) -> Policy {
    Policy::new(vec![MixedStrategy::new_unchecked(probs.to_vec())])
}

/// The column player's hull in restricted RPS: "Paper half the time",
/// mixed with Rock or with Scissors.
pub fn rps_column_hull() -> Vec<Policy> {
    vec![one(&[0.5, 0.5, 0.0]), one(&[0.0, 0.5, 0.5])]
}

/// How the row player's two unassigned Blotto regiments are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlottoExtras {
    /// Each regiment independently picks a battlefield.
    IndependentUniform,
    /// The three possible splits are equally likely.
    UniformOverSplits,
}

/// Row generators of restricted Blotto: two regiments are placed as
/// (2,0), (1,1) or (0,2) and the other two at random. Rows are the splits
/// 4-0, 3-1, 2-2, 1-3, 0-4.
pub fn blotto_row_generators(extras: BlottoExtras) -> Vec<Policy> {
    let spread = match extras {
        BlottoExtras::IndependentUniform => [0.25, 0.5, 0.25],
        BlottoExtras::UniformOverSplits => [1.0 / 3.0; 3],
    };
    (0..3)
        .map(|base| {
            let mut row = [0.0; 5];
            for (k, p) in spread.iter().enumerate() {
                row[base + k] += p;
            }
            one(&row)
        })
        .collect()
}

struct LearningSetup {
    game: StochasticGame,
    configs: Vec<LearnerConfig>,
    /// Equilibrium strategies over actions, per player, and value to row.
    reference: JointPolicy,
    reference_value: f64,
    /// Generator weights of the reference, for restricted players.
    reference_weights: Vec<Option<Vec<f64>>>,
}

fn learning_setup(experiment: Experiment) -> Result<LearningSetup> {
    let wolf = LearnerConfig::WolfPhc(WolfPhcConfig::default());
    let restricted = |generators: Vec<Policy>| LearnerConfig::RestrictedWolfPhc {
        config: WolfPhcConfig::default(),
        generators,
    };
    let unrestricted = |game: StochasticGame| -> Result<LearningSetup> {
        let sol = minimax_zero_sum_matrix(&game)?;
        Ok(LearningSetup {
            game,
            configs: vec![wolf.clone(), wolf.clone()],
            reference: JointPolicy::new(vec![Policy::new(vec![sol.row]), Policy::new(vec![sol.col])]),
            reference_value: sol.value,
            reference_weights: vec![None, None],
        })
    };
    match experiment {
        Experiment::Rps => unrestricted(rps()),
        Experiment::Blotto => unrestricted(blotto_4_3()),
        Experiment::RpsRestricted => {
            let game = rps();
            let spaces = [
                RestrictedPolicySpace::Full,
                RestrictedPolicySpace::ConvexHullGlobal(rps_column_hull()),
            ];
            let eq = restricted_equilibrium_via_implicit(&game, &spaces)?;
            Ok(LearningSetup {
                configs: vec![wolf.clone(), restricted(rps_column_hull())],
                reference_value: eq.value(),
                reference_weights: vec![None, Some(eq.solution.col.probs().to_vec())],
                reference: eq.joint,
                game,
            })
        }
        Experiment::BlottoRestricted => {
            let game = blotto_4_3();
            let gens = blotto_row_generators(BlottoExtras::IndependentUniform);
            let spaces = [
                RestrictedPolicySpace::ConvexHullGlobal(gens.clone()),
                RestrictedPolicySpace::Full,
            ];
            let eq = restricted_equilibrium_via_implicit(&game, &spaces)?;
            Ok(LearningSetup {
                configs: vec![restricted(gens), wolf.clone()],
                reference_value: eq.value(),
                reference_weights: vec![Some(eq.solution.row.probs().to_vec()), None],
                reference: eq.joint,
                game,
            })
        }
        other => Err(Error::Unsupported(format!("{other} is not a learning experiment"))),
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Columns: iteration, then every player's explicit probabilities.
fn write_figure(log: &TrajectoryLog, setup: &LearningSetup, dir: &Path) -> Result<()> {
    let mut dat = create(&dir.join("figure.dat"))?;
    let names = setup.game.action_sets();
    write!(dat, "# iteration")?;
    for (i, actions) in names.iter().enumerate() {
        for a in actions {
            write!(dat, " p{i}:{a}")?;
        }
    }
    writeln!(dat)?;
    let rows: Vec<Vec<_>> = (0..log.players).map(|i| log.series(i, 0).collect()).collect();
    for k in 0..rows[0].len() {
        write!(dat, "{}", rows[0][k].iteration)?;
        for series in &rows {
            for p in &series[k].explicit {
                write!(dat, " {p}")?;
            }
        }
        writeln!(dat)?;
    }
    dat.flush()?;

    let mut gp = create(&dir.join("figure.gp"))?;
    writeln!(gp, "set xlabel 'iteration'")?;
    writeln!(gp, "set ylabel 'probability'")?;
    writeln!(gp, "set yrange [0:1]")?;
    writeln!(gp, "set multiplot layout {},1", log.players)?;
    let mut column = 2;
    for (i, actions) in names.iter().enumerate() {
        writeln!(gp, "set title 'player {i}'")?;
        let mut plots = Vec::new();
        for (a, name) in actions.iter().enumerate() {
            plots.push(format!("'figure.dat' using 1:{column} with lines title '{name}'"));
            let target = setup.reference.policy(i).prob(0, a);
            plots.push(format!("{target} with lines dashtype 2 notitle"));
            column += 1;
        }
        writeln!(gp, "plot {}", plots.join(", \\\n     "))?;
    }
    writeln!(gp, "unset multiplot")?;
    gp.flush()?;
    Ok(())
}

fn learning_summary(spec: &ReproductionSpec, setup: &LearningSetup, log: &TrajectoryLog) -> Value {
    let players: Vec<Value> = (0..log.players)
        .map(|i| {
            let (algo, generators) = match &setup.configs[i] {
                LearnerConfig::WolfPhc(_) => ("wolf_phc", None),
                LearnerConfig::RestrictedWolfPhc { generators, .. } => (
                    "restricted_wolf_phc",
                    Some(generators.iter().map(|g| g.row(0).probs().to_vec()).collect::<Vec<_>>()),
                ),
                LearnerConfig::Q(_) => ("q", None),
            };
            json!({
                "algo": algo,
                "generators": generators,
                "final_policy": log.final_mean_policy(i, 0, FINAL_FRACTION, true),
                "final_weights": generators.as_ref().map(|_| log.final_mean_policy(i, 0, FINAL_FRACTION, false)),
                "final_average_reward": log.final_average_reward(i, FINAL_FRACTION),
                "reference_policy": setup.reference.policy(i).row(0).probs(),
                "reference_weights": setup.reference_weights[i],
            })
        })
        .collect();
    json!({
        "experiment": spec.experiment.name(),
        "seed": spec.seed,
        "iterations": spec.iterations,
        "final_fraction": FINAL_FRACTION,
        "config": WolfPhcConfig::default(),
        "players": players,
        "reference": {
            "row": setup.reference.policy(0).row(0).probs(),
            "col": setup.reference.policy(1).row(0).probs(),
            "value": setup.reference_value,
        },
        "stabilization": {
            "window": STABILITY_WINDOW,
            "threshold": STABILITY_THRESHOLD,
            "iteration": log.stabilization_iteration(STABILITY_WINDOW, STABILITY_THRESHOLD),
        },
    })
}

/// Probabilities of L (column action 0) among the column player's
/// state-uniform best responses when the row player plays U with
/// probability `u` in every state, found on a grid of `divisions` steps.
pub fn fact5_column_best_responses(game: &StochasticGame, u: f64, divisions: usize) -> Result<Vec<f64>> {
    let row = Policy::stationary(game.state_count(), MixedStrategy::new(vec![u, 1.0 - u])?);
    let values = (0..=divisions)
        .map(|k| {
            let q = k as f64 / divisions as f64;
            let col = Policy::stationary(game.state_count(), MixedStrategy::new_unchecked(vec![q, 1.0 - q]));
            Ok((q, policy_value(game, &JointPolicy::new(vec![row.clone(), col]))?[1]))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(values
        .iter()
        .filter(|v| v.1 >= best - 1e-12 * (1.0 + best.abs()))
        .map(|v| v.0)
        .collect())
}

fn fact5_summary(dir: &Path) -> Result<Value> {
    let game = fact5_default();
    let spaces = vec![RestrictedPolicySpace::StateUniform; 2];
    let mut profiles = Vec::new();
    for (a, row_name) in ["U", "D"].iter().enumerate() {
        for (b, col_name) in ["L", "R"].iter().enumerate() {
            let joint = JointPolicy::new(vec![
                Policy::stationary(3, MixedStrategy::pure(2, a)),
                Policy::stationary(3, MixedStrategy::pure(2, b)),
            ]);
            let cert = check_equilibrium(&game, &joint, &spaces, 0.0)?;
            profiles.push(json!({
                "profile": format!("{row_name},{col_name}"),
                "gaps": cert.gaps,
                "verdict": cert.verdict,
            }));
        }
    }

    let divisions = 200;
    let trichotomy = [0.25, 0.5, 0.75]
        .iter()
        .map(|&u| Ok(json!({"u": u, "best_response_prob_l": fact5_column_best_responses(&game, u, divisions)?})))
        .collect::<Result<Vec<_>>>()?;
    let half = Policy::stationary(3, MixedStrategy::uniform(2));
    let convex_at_half =
        best_response_convexity_test(&game, 1, &[half], &RestrictedPolicySpace::StateUniform, 50, 0)?;

    let sweep = sweep_existence(&game, &spaces, FACT5_RESOLUTION, 0.0)?;
    sweep.write_csv(create(&dir.join("sweep.csv"))?)?;
    Ok(json!({
        "experiment": "fact5",
        "game": {"left": FACT5_LEFT, "right": FACT5_RIGHT, "eps": 0.1, "gamma": 0.9},
        "pure_profiles": profiles,
        "trichotomy": {"grid_divisions": divisions, "cases": trichotomy},
        "column_best_responses_convex_at_half": convex_at_half,
        "sweep": {
            "resolution": FACT5_RESOLUTION,
            "points": sweep.points.len(),
            "min_max_gap": sweep.min_max_gap,
            "argmin_params": sweep.best().params,
            "refinement_bound": sweep.refinement_bound,
            "margin": sweep.margin(),
            "statement": format!(
                "no restricted equilibrium found at resolution {} with margin {}",
                FACT5_RESOLUTION,
                sweep.margin()
            ),
        },
    }))
}

/// Runs one experiment and writes its files into `spec.out`. Returns the
/// summary that was written to `summary.json`.
pub fn reproduce(spec: &ReproductionSpec) -> Result<Value> {
    fs::create_dir_all(&spec.out)?;
    let summary = match spec.experiment {
        e if e.is_learning() => {
            let setup = learning_setup(e)?;
            let log = self_play(&setup.game, &setup.configs, spec.iterations, spec.seed)?;
            log.write_csv(create(&spec.out.join("trajectory.csv"))?)?;
            write_figure(&log, &setup, &spec.out)?;
            log::info!("{e} seed {} finished {} iterations", spec.seed, spec.iterations);
            learning_summary(spec, &setup, &log)
        }
        Experiment::Fact1 => {
            let game = rps();
            let certs = enumerate_deterministic(&game, 0.5)?;
            let min = certs.iter().map(|c| c.max_gap()).fold(f64::INFINITY, f64::min);
            json!({
                "experiment": "fact1",
                "epsilon": 0.5,
                "profiles": certs.len(),
                "equilibria": certs.iter().filter(|c| c.verdict).count(),
                "min_max_gap": min,
                "certificates": certs.iter().map(|c| certificate_to_json(&game, c)).collect::<Vec<_>>(),
            })
        }
        Experiment::Fact5 => fact5_summary(&spec.out)?,
        Experiment::BosEquilibria => {
            let game = bach_stravinsky();
            let found = support_enumeration_bimatrix(&game, 5)?;
            let equilibria = found
                .joint_policies()
                .iter()
                .map(|j| {
                    Ok(json!({
                        "row": j.policy(0).row(0).probs(),
                        "col": j.policy(1).row(0).probs(),
                        "values": policy_value(&game, j)?,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({
                "experiment": "bos-equilibria",
                "count": equilibria.len(),
                "degenerate": found.degenerate,
                "equilibria": equilibria,
            })
        }
        _ => unreachable!("learning experiments handled above"),
    };
    write_json(&spec.out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Runs `count` consecutive seeds from `first` in parallel, each into its
/// own `seed-<n>` subdirectory of `out`. Summaries come back in seed order.
pub fn reproduce_seeds(experiment: Experiment, first: u64, count: u64, iterations: u64, out: &Path) -> Result<Vec<Value>> {
    (first..first + count)
        .into_par_iter()
        .map(|seed| {
            reproduce(&ReproductionSpec {
                experiment,
                seed,
                iterations,
                out: out.join(format!("seed-{seed}")),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("chess".parse::<Experiment>().is_err());
    }

    #[test]
    fn blotto_generators_are_convolutions() {
        let g = blotto_row_generators(BlottoExtras::IndependentUniform);
        assert_eq!(g[0].row(0).probs(), &[0.25, 0.5, 0.25, 0.0, 0.0]);
        assert_eq!(g[1].row(0).probs(), &[0.0, 0.25, 0.5, 0.25, 0.0]);
        assert_eq!(g[2].row(0).probs(), &[0.0, 0.0, 0.25, 0.5, 0.25]);
        let u = blotto_row_generators(BlottoExtras::UniformOverSplits);
        assert!(u.iter().all(|p| p.is_valid(1e-15)));
    }

    #[test]
    fn fact5_trichotomy() {
        let g = fact5_default();
        assert_eq!(fact5_column_best_responses(&g, 0.25, 200).unwrap(), vec![1.0]);
        assert_eq!(fact5_column_best_responses(&g, 0.75, 200).unwrap(), vec![0.0]);
        assert_eq!(fact5_column_best_responses(&g, 0.5, 200).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn short_learning_run_writes_its_files() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ReproductionSpec {
            experiment: Experiment::RpsRestricted,
            seed: 1,
            iterations: 4000,
            out: dir.path().to_path_buf(),
        };
        let summary = reproduce(&spec).unwrap();
        assert!((summary["reference"]["value"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
        for f in ["summary.json", "trajectory.csv", "figure.dat", "figure.gp"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let again = reproduce(&spec).unwrap();
        assert_eq!(summary, again);
    }

    #[test]
    fn fact1_and_bos() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = ReproductionSpec {
            experiment: Experiment::Fact1,
            seed: 0,
            iterations: 0,
            out: dir.path().to_path_buf(),
        };
        let s = reproduce(&spec).unwrap();
        assert_eq!(s["profiles"], 9);
        assert_eq!(s["equilibria"], 0);
        spec.experiment = Experiment::BosEquilibria;
        let s = reproduce(&spec).unwrap();
        assert_eq!(s["count"], 3);
    }
}
