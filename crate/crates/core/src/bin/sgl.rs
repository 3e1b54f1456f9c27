use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sgl::experiments::{reproduce, reproduce_seeds, Experiment, ReproductionSpec, DEFAULT_ITERATIONS};
use sgl::game::{check_ergodic, policy_value, JointPolicy, Policy, StochasticGame};
use sgl::io;
use sgl::learners::{self_play, LearnerConfig, QConfig, WolfPhcConfig};
use sgl::restrictions::RestrictedPolicySpace;
use sgl::solvers::{
    check_equilibrium, minimax_zero_sum_matrix, restricted_equilibrium_via_implicit,
    support_enumeration_bimatrix, sweep_existence,
};
use sgl::Error;

/// Stochastic games with limited agents: solve, certify, sweep, learn.
#[derive(Parser)]
#[command(name = "sgl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file and print its structural classification.
    Validate { game: PathBuf },
    /// Solve a matrix game.
    Solve {
        method: Method,
        game: PathBuf,
        /// Restricted space files, one per player in order (restricted only;
        /// missing players are unrestricted).
        #[arg(long = "space", value_name = "FILE")]
        spaces: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute regret gaps of a joint policy.
    Check {
        #[arg(long)]
        game: PathBuf,
        /// Joint policy file: a list of per-player policies.
        #[arg(long)]
        policy: PathBuf,
        /// Restricted space files, one per player; default unrestricted.
        #[arg(long, num_args = 1..)]
        spaces: Vec<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search for restricted equilibria.
    Sweep {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        spaces: Vec<PathBuf>,
        #[arg(long)]
        resolution: f64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// CSV with one row per grid point.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Self-play with the same algorithm for every player.
    Learn {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        /// Schedule constants as JSON; defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Per-player space files; a convex_hull_global space makes that
        /// player a restricted WoLF-PHC learner over its generators.
        #[arg(long, num_args = 1..)]
        spaces: Vec<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        iters: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trajectory CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun one of the built-in experiments.
    Reproduce {
        #[arg(value_parser = parse_experiment)]
        name: Experiment,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iters: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Run this many consecutive seeds in parallel, into seed-<n>
        /// subdirectories.
        #[arg(long)]
        seeds: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Minimax,
    SupportEnum,
    Restricted,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    WolfPhc,
    Q,
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Malformed(_) | Error::Json(_) | Error::Io(_) | Error::Dimension(_))
        | Some(Error::NotInSpace { .. } | Error::OutOfRange(_)) => 2,
        Some(Error::Unsupported(_) | Error::Size(_) | Error::Formulation(_)) => 3,
        Some(Error::Ergodicity(_)) => 4,
        Some(Error::Singular) | None => 1,
    }
}

fn print(value: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(std::io::stdout(), "{text}")?;
    if let Some(path) = out {
        io::write_json(path, value)?;
    }
    Ok(())
}

fn load_spaces(game: &StochasticGame, files: &[PathBuf]) -> anyhow::Result<Vec<RestrictedPolicySpace>> {
    if files.len() > game.player_count() {
        bail!(Error::Dimension(format!(
            "{} space files for {} players",
            files.len(),
            game.player_count()
        )));
    }
    let mut spaces = vec![RestrictedPolicySpace::Full; game.player_count()];
    for (i, file) in files.iter().enumerate() {
        let value = io::read_json(file).with_context(|| format!("reading {}", file.display()))?;
        spaces[i] = io::space_from_json(game, i, &value)?;
    }
    Ok(spaces)
}

fn strategies_json(game: &StochasticGame, joint: &JointPolicy) -> anyhow::Result<Value> {
    Ok(json!({
        "policy": io::joint_to_json(game, joint),
        "values": policy_value(game, joint)?,
    }))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Validate { game } => {
            let value = io::read_json(&game)?;
            let game = io::game_from_json(&value)?;
            print(
                &json!({
                    "valid": true,
                    "players": game.player_count(),
                    "states": game.state_count(),
                    "classification": game.classify(),
                    "ergodic": check_ergodic(&game),
                }),
                None,
            )
        }
        Command::Solve {
            method,
            game,
            spaces,
            out,
        } => {
            let game = io::load_game(&game)?;
            let result = match method {
                Method::Minimax => {
                    let sol = minimax_zero_sum_matrix(&game)?;
                    let joint = JointPolicy::new(vec![
                        Policy::new(vec![sol.row.clone()]),
                        Policy::new(vec![sol.col.clone()]),
                    ]);
                    json!({"value": sol.value, "row": sol.row, "col": sol.col, "policy": io::joint_to_json(&game, &joint)})
                }
                Method::SupportEnum => {
                    let found = support_enumeration_bimatrix(&game, 5)?;
                    let equilibria = found
                        .joint_policies()
                        .iter()
                        .map(|j| strategies_json(&game, j))
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    json!({"count": equilibria.len(), "degenerate": found.degenerate, "equilibria": equilibria})
                }
                Method::Restricted => {
                    let spaces = load_spaces(&game, &spaces)?;
                    let eq = restricted_equilibrium_via_implicit(&game, &spaces)?;
                    json!({
                        "value": eq.value(),
                        "implicit_row": eq.solution.row,
                        "implicit_col": eq.solution.col,
                        "policy": io::joint_to_json(&game, &eq.joint),
                        "certificate": io::certificate_to_json(&game, &eq.certificate),
                    })
                }
            };
            print(&result, out.as_deref())
        }
        Command::Check {
            game,
            policy,
            spaces,
            eps,
            out,
        } => {
            let game = io::load_game(&game)?;
            let joint = io::joint_from_json(&game, &io::read_json(&policy)?)?;
            let spaces = load_spaces(&game, &spaces)?;
            let cert = check_equilibrium(&game, &joint, &spaces, eps)?;
            print(&io::certificate_to_json(&game, &cert), out.as_deref())
        }
        Command::Sweep {
            game,
            spaces,
            resolution,
            eps,
            out,
        } => {
            let game = io::load_game(&game)?;
            let spaces = load_spaces(&game, &spaces)?;
            let sweep = sweep_existence(&game, &spaces, resolution, eps)?;
            if let Some(path) = &out {
                sweep.write_csv(fs::File::create(path)?)?;
            }
            print(
                &json!({
                    "points": sweep.points.len(),
                    "min_max_gap": sweep.min_max_gap,
                    "argmin_params": sweep.best().params,
                    "argmin_policy": io::joint_to_json(&game, &sweep.best().joint),
                    "refinement_bound": sweep.refinement_bound,
                    "margin": sweep.margin(),
                    "excludes_equilibrium": sweep.excludes_equilibrium(),
                }),
                None,
            )
        }
        Command::Learn {
            game,
            algo,
            config,
            spaces,
            iters,
            seed,
            out,
        } => {
            let game = io::load_game(&game)?;
            let spaces = load_spaces(&game, &spaces)?;
            let raw = config.map(|p| io::read_json(&p)).transpose()?;
            let configs = spaces
                .into_iter()
                .map(|space| -> anyhow::Result<LearnerConfig> {
                    Ok(match (algo, space) {
                        (Algo::WolfPhc, space) => {
                            let c: WolfPhcConfig = match &raw {
                                Some(v) => serde_json::from_value(v.clone()).map_err(Error::from)?,
                                None => WolfPhcConfig::default(),
                            };
                            match space {
                                RestrictedPolicySpace::Full => LearnerConfig::WolfPhc(c),
                                RestrictedPolicySpace::ConvexHullGlobal(generators) => {
                                    LearnerConfig::RestrictedWolfPhc { config: c, generators }
                                }
                                other => bail!(Error::Unsupported(format!("cannot learn within {other:?}"))),
                            }
                        }
                        (Algo::Q, RestrictedPolicySpace::Full) => LearnerConfig::Q(match &raw {
                            Some(v) => serde_json::from_value::<QConfig>(v.clone()).map_err(Error::from)?,
                            None => QConfig::default(),
                        }),
                        (Algo::Q, _) => bail!(Error::Unsupported("Q-learning has no restricted variant".into())),
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let log = self_play(&game, &configs, iters, seed)?;
            if let Some(path) = &out {
                log.write_csv(fs::File::create(path)?)?;
            }
            let players: Vec<Value> = (0..game.player_count())
                .map(|i| {
                    json!({
                        "final_policy": (0..game.state_count())
                            .map(|s| log.final_mean_policy(i, s, 0.1, true))
                            .collect::<Vec<_>>(),
                        "final_average_reward": log.final_average_reward(i, 0.1),
                    })
                })
                .collect();
            print(&json!({"iterations": iters, "seed": seed, "players": players}), None)
        }
        Command::Reproduce {
            name,
            seed,
            iters,
            out,
            seeds,
        } => {
            let summary = match seeds {
                Some(count) => Value::Array(reproduce_seeds(name, seed, count, iters, &out)?),
                None => reproduce(&ReproductionSpec {
                    experiment: name,
                    seed,
                    iterations: iters,
                    out,
                })?,
            };
            print(&summary, None)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SGL_LOG_LEVEL", "error")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
