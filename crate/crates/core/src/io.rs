//! JSON files for games, policies, restricted spaces, and certificates.
//!
//! Policies are objects from state name to a probability list. Joint
//! actions are keyed by comma-joined zero-based action indices, e.g.
//! `"0,2"`. Probability vectors may be off by up to 1e-9 on load and are
//! renormalized.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{JointPolicy, MixedStrategy, Policy, RewardFormulation, StochasticGame};
use crate::restrictions::{Pin, RestrictedPolicySpace};
use crate::solvers::EquilibriumCertificate;
use crate::tol;

type JointMap<T> = BTreeMap<String, T>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: usize,
    states: Vec<String>,
    actions: Vec<Vec<String>>,
    initial_state: String,
    formulation: RewardFormulation,
    transitions: BTreeMap<String, JointMap<BTreeMap<String, f64>>>,
    rewards: Vec<BTreeMap<String, JointMap<f64>>>,
}

fn joint_key(actions: &[usize]) -> String {
    actions.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn normalized(mut probs: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if probs.iter().any(|p| !p.is_finite() || *p < -tol::LOAD) {
        return Err(Error::Malformed(format!("{what}: invalid probability in {probs:?}")));
    }
    probs.iter_mut().for_each(|p| *p = p.max(0.0));
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol::LOAD {
        return Err(Error::Malformed(format!("{what}: probabilities sum to {total}")));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

fn state_lookup(game_states: &[String], name: &str) -> Result<usize> {
    game_states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::Malformed(format!("unknown state {name:?}")))
}

pub fn game_to_json(game: &StochasticGame) -> Value {
    let states = game.states();
    let mut transitions = BTreeMap::new();
    let mut rewards = vec![BTreeMap::new(); game.player_count()];
    for (s, name) in states.iter().enumerate() {
        let mut by_joint = BTreeMap::new();
        for j in 0..game.joint_count() {
            let key = joint_key(&game.joint_actions(j));
            let next: BTreeMap<String, f64> = game
                .transition(s, j)
                .iter()
                .enumerate()
                .filter(|(_, p)| **p != 0.0)
                .map(|(k, p)| (states[k].clone(), *p))
                .collect();
            by_joint.insert(key.clone(), next);
            for (i, table) in rewards.iter_mut().enumerate() {
                table
                    .entry(name.clone())
                    .or_insert_with(BTreeMap::new)
                    .insert(key.clone(), game.reward(i, s, j));
            }
        }
        transitions.insert(name.clone(), by_joint);
    }
    let file = GameFile {
        players: game.player_count(),
        states: states.to_vec(),
        actions: game.action_sets().to_vec(),
        initial_state: states[game.initial_state()].clone(),
        formulation: game.formulation(),
        transitions,
        rewards,
    };
    serde_json::to_value(file).expect("game file serializes")
}

pub fn game_from_json(value: &Value) -> Result<StochasticGame> {
    let file: GameFile = serde_json::from_value(value.clone())?;
    if file.actions.len() != file.players || file.rewards.len() != file.players {
        return Err(Error::Malformed(format!(
            "{} players but {} action sets and {} reward tables",
            file.players,
            file.actions.len(),
            file.rewards.len()
        )));
    }
    if file.states.is_empty() || file.actions.iter().any(Vec::is_empty) {
        return Err(Error::Malformed("empty state or action set".into()));
    }
    let initial = state_lookup(&file.states, &file.initial_state)?;
    let sizes: Vec<usize> = file.actions.iter().map(Vec::len).collect();
    let joint_count: usize = sizes.iter().product();
    let joints: Vec<String> = (0..joint_count)
        .map(|mut j| {
            let mut digits = vec![0; sizes.len()];
            for k in (0..sizes.len()).rev() {
                digits[k] = j % sizes[k];
                j /= sizes[k];
            }
            joint_key(&digits)
        })
        .collect();

    let n_states = file.states.len();
    let mut transitions = vec![vec![vec![0.0; n_states]; joint_count]; n_states];
    for (name, by_joint) in &file.transitions {
        let s = state_lookup(&file.states, name)?;
        for key in by_joint.keys() {
            if !joints.contains(key) {
                return Err(Error::Malformed(format!("state {name}: unknown joint action {key:?}")));
            }
        }
        for (j, key) in joints.iter().enumerate() {
            let next = by_joint
                .get(key)
                .ok_or_else(|| Error::Malformed(format!("state {name}: no transition for {key:?}")))?;
            let mut row = vec![0.0; n_states];
            for (target, p) in next {
                row[state_lookup(&file.states, target)?] = *p;
            }
            transitions[s][j] = normalized(row, &format!("transition from {name} under {key}"))?;
        }
    }
    if file.transitions.len() != n_states {
        return Err(Error::Malformed("every state needs transitions".into()));
    }
    let mut rewards = vec![vec![vec![0.0; joint_count]; n_states]; file.players];
    for (i, table) in file.rewards.iter().enumerate() {
        if table.len() != n_states {
            return Err(Error::Malformed(format!("player {i}: rewards missing for some state")));
        }
        for (name, by_joint) in table {
            let s = state_lookup(&file.states, name)?;
            if by_joint.len() != joint_count {
                return Err(Error::Malformed(format!("player {i}, state {name}: wrong number of rewards")));
            }
            for (j, key) in joints.iter().enumerate() {
                rewards[i][s][j] = *by_joint
                    .get(key)
                    .ok_or_else(|| Error::Malformed(format!("player {i}, state {name}: no reward for {key:?}")))?;
            }
        }
    }
    StochasticGame::new(file.states, file.actions, transitions, rewards, initial, file.formulation)
}

pub fn policy_to_json(game: &StochasticGame, policy: &Policy) -> Value {
    let map: Map<String, Value> = game
        .states()
        .iter()
        .zip(policy.rows())
        .map(|(name, row)| (name.clone(), json!(row.probs())))
        .collect();
    Value::Object(map)
}

pub fn policy_from_json(game: &StochasticGame, player: usize, value: &Value) -> Result<Policy> {
    let rows: BTreeMap<String, Vec<f64>> = serde_json::from_value(value.clone())?;
    if rows.len() != game.state_count() {
        return Err(Error::Malformed(format!(
            "policy covers {} of {} states",
            rows.len(),
            game.state_count()
        )));
    }
    let mut out = vec![MixedStrategy::uniform(1); game.state_count()];
    for (name, probs) in rows {
        let s = state_lookup(game.states(), &name)?;
        if probs.len() != game.action_count(player) {
            return Err(Error::Malformed(format!(
                "state {name}: {} probabilities for {} actions",
                probs.len(),
                game.action_count(player)
            )));
        }
        out[s] = MixedStrategy::new_unchecked(normalized(probs, &format!("policy at {name}"))?);
    }
    Ok(Policy::new(out))
}

/// A joint policy is a list of per-player policies.
pub fn joint_to_json(game: &StochasticGame, joint: &JointPolicy) -> Value {
    Value::Array(joint.policies().iter().map(|p| policy_to_json(game, p)).collect())
}

pub fn joint_from_json(game: &StochasticGame, value: &Value) -> Result<JointPolicy> {
    let list = value
        .as_array()
        .ok_or_else(|| Error::Malformed("joint policy must be a list of policies".into()))?;
    if list.len() != game.player_count() {
        return Err(Error::Malformed(format!(
            "{} policies for {} players",
            list.len(),
            game.player_count()
        )));
    }
    let policies = list
        .iter()
        .enumerate()
        .map(|(i, v)| policy_from_json(game, i, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(JointPolicy::new(policies))
}

pub fn space_to_json(game: &StochasticGame, space: &RestrictedPolicySpace) -> Value {
    let states = game.states();
    match space {
        RestrictedPolicySpace::Full => json!({"variant": "full"}),
        RestrictedPolicySpace::Singleton(p) => json!({"variant": "singleton", "policy": policy_to_json(game, p)}),
        RestrictedPolicySpace::ConvexHullGlobal(gens) => json!({
            "variant": "convex_hull_global",
            "generators": gens.iter().map(|g| policy_to_json(game, g)).collect::<Vec<_>>(),
        }),
        RestrictedPolicySpace::ConvexHullStatewise(vertices) => {
            let map: Map<String, Value> = states
                .iter()
                .zip(vertices)
                .map(|(name, vs)| (name.clone(), json!(vs.iter().map(|v| v.probs()).collect::<Vec<_>>())))
                .collect();
            json!({"variant": "convex_hull_statewise", "vertices": map})
        }
        RestrictedPolicySpace::StateUniform => json!({"variant": "state_uniform"}),
        RestrictedPolicySpace::FixedCoordinates(pins) => json!({
            "variant": "fixed_coordinates",
            "pins": pins.iter().map(|p| json!([states[p.state], p.action, p.prob])).collect::<Vec<_>>(),
        }),
        RestrictedPolicySpace::DeterministicOnly => json!({"variant": "deterministic_only"}),
    }
}

pub fn space_from_json(game: &StochasticGame, player: usize, value: &Value) -> Result<RestrictedPolicySpace> {
    let field = |name: &str| {
        value
            .get(name)
            .ok_or_else(|| Error::Malformed(format!("space is missing {name:?}")))
    };
    let variant = field("variant")?
        .as_str()
        .ok_or_else(|| Error::Malformed("variant must be a string".into()))?;
    let space = match variant {
        "full" => RestrictedPolicySpace::Full,
        "singleton" => RestrictedPolicySpace::Singleton(policy_from_json(game, player, field("policy")?)?),
        "convex_hull_global" => {
            let list: Vec<Value> = serde_json::from_value(field("generators")?.clone())?;
            RestrictedPolicySpace::ConvexHullGlobal(
                list.iter()
                    .map(|g| policy_from_json(game, player, g))
                    .collect::<Result<_>>()?,
            )
        }
        "convex_hull_statewise" => {
            let map: BTreeMap<String, Vec<Vec<f64>>> = serde_json::from_value(field("vertices")?.clone())?;
            if map.len() != game.state_count() {
                return Err(Error::Malformed("statewise hull needs vertices at every state".into()));
            }
            let mut vertices = vec![Vec::new(); game.state_count()];
            for (name, vs) in map {
                let s = state_lookup(game.states(), &name)?;
                vertices[s] = vs
                    .into_iter()
                    .map(|v| normalized(v, &format!("vertex at {name}")).map(MixedStrategy::new_unchecked))
                    .collect::<Result<_>>()?;
            }
            RestrictedPolicySpace::ConvexHullStatewise(vertices)
        }
        "state_uniform" => RestrictedPolicySpace::StateUniform,
        "fixed_coordinates" => {
            let raw: Vec<(String, usize, f64)> = serde_json::from_value(field("pins")?.clone())?;
            RestrictedPolicySpace::FixedCoordinates(
                raw.into_iter()
                    .map(|(name, action, prob)| {
                        Ok(Pin {
                            state: state_lookup(game.states(), &name)?,
                            action,
                            prob,
                        })
                    })
                    .collect::<Result<_>>()?,
            )
        }
        "deterministic_only" => RestrictedPolicySpace::DeterministicOnly,
        other => return Err(Error::Malformed(format!("unknown space variant {other:?}"))),
    };
    space.check(crate::restrictions::Shape::new(game.state_count(), game.action_count(player)))?;
    Ok(space)
}

pub fn certificate_to_json(game: &StochasticGame, cert: &EquilibriumCertificate) -> Value {
    json!({
        "gaps": cert.gaps,
        "max_gap": cert.max_gap(),
        "epsilon": cert.epsilon,
        "verdict": cert.verdict,
        "policy": joint_to_json(game, &cert.joint),
    })
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_game(path: &Path) -> Result<StochasticGame> {
    game_from_json(&read_json(path)?)
}

pub fn save_game(path: &Path, game: &StochasticGame) -> Result<()> {
    write_json(path, &game_to_json(game))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{blotto_4_3, fact5_default, rps};

    #[test]
    fn games_round_trip_exactly() {
        for game in [rps(), blotto_4_3(), fact5_default()] {
            let text = serde_json::to_string(&game_to_json(&game)).unwrap();
            let back = game_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, game);
        }
    }

    #[test]
    fn rps_file_layout() {
        let v = game_to_json(&rps());
        assert_eq!(v["players"], 2);
        assert_eq!(v["formulation"], "average");
        assert_eq!(game_to_json(&fact5_default())["formulation"], json!({"discounted": 0.9}));
        assert_eq!(v["transitions"]["s0"]["0,2"]["s0"], 1.0);
        assert_eq!(v["rewards"][0]["s0"]["0,2"], 1.0);
        assert_eq!(v["rewards"][1]["s0"]["0,2"], -1.0);
    }

    #[test]
    fn near_stochastic_rows_are_renormalized() {
        let mut v = game_to_json(&fact5_default());
        v["transitions"]["s0"]["0,0"]["left"] = json!(0.9 + 5e-10);
        let g = game_from_json(&v).unwrap();
        assert!((g.transition(0, 0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        v["transitions"]["s0"]["0,0"]["left"] = json!(0.9 + 1e-6);
        assert!(matches!(game_from_json(&v), Err(Error::Malformed(_))));
    }

    #[test]
    fn missing_pieces_are_malformed() {
        let mut v = game_to_json(&rps());
        v["rewards"][0]["s0"].as_object_mut().unwrap().remove("1,1");
        assert!(matches!(game_from_json(&v), Err(Error::Malformed(_))));
        let mut v = game_to_json(&rps());
        v["initial_state"] = json!("nowhere");
        assert!(game_from_json(&v).is_err());
        let mut v = game_to_json(&rps());
        v["extra"] = json!(1);
        assert!(matches!(game_from_json(&v), Err(Error::Json(_))));
    }

    #[test]
    fn spaces_and_policies_round_trip() {
        let g = fact5_default();
        let p = Policy::from_rows(vec![vec![0.25, 0.75], vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let spaces = vec![
            RestrictedPolicySpace::Full,
            RestrictedPolicySpace::Singleton(p.clone()),
            RestrictedPolicySpace::ConvexHullGlobal(vec![p.clone(), Policy::uniform(3, 2)]),
            RestrictedPolicySpace::ConvexHullStatewise(vec![vec![MixedStrategy::pure(2, 0), MixedStrategy::uniform(2)]; 3]),
            RestrictedPolicySpace::StateUniform,
            RestrictedPolicySpace::FixedCoordinates(vec![Pin { state: 1, action: 0, prob: 0.3 }]),
            RestrictedPolicySpace::DeterministicOnly,
        ];
        for space in spaces {
            let v = space_to_json(&g, &space);
            let text = serde_json::to_string(&v).unwrap();
            let back = space_from_json(&g, 0, &serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, space);
        }
        let back = policy_from_json(&g, 1, &policy_to_json(&g, &p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn pins_use_state_names() {
        let g = rps();
        let v = json!({"variant": "fixed_coordinates", "pins": [["s0", 1, 0.5]]});
        let space = space_from_json(&g, 0, &v).unwrap();
        let half = Policy::from_rows(vec![vec![0.25, 0.5, 0.25]]).unwrap();
        assert!(space.contains(&half, 1e-9));
        assert!(space_from_json(&g, 0, &json!({"variant": "hexagon"})).is_err());
    }
}
