use std::io::Write;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{QConfig, WolfPhcConfig};
use super::wolf::{q_learner_step, restricted_wolf_phc_step, sample, wolf_phc_step, LearnerState, QLearnerState, StepInfo};
use crate::error::{Error, Result};
use crate::game::{Policy, StochasticGame};
use crate::linalg;
use crate::solvers::csv_error;

/// Steps before a multi-state episode restarts at the initial state.
pub const EPISODE_LENGTH: u64 = 100;

/// Most checkpoints a log keeps per player and state.
pub const MAX_CHECKPOINTS: u64 = 2000;

/// One player's learning algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum LearnerConfig {
    WolfPhc(WolfPhcConfig),
    /// WoLF-PHC over mixtures of the given policies.
    RestrictedWolfPhc {
        config: WolfPhcConfig,
        generators: Vec<Policy>,
    },
    Q(QConfig),
}

enum Learner {
    Wolf(LearnerState),
    Q(QLearnerState),
}

impl Learner {
    fn build(config: &LearnerConfig, states: usize, actions: usize) -> Result<Self> {
        Ok(match config {
            LearnerConfig::WolfPhc(c) => Learner::Wolf(LearnerState::new(states, actions, *c)?),
            LearnerConfig::RestrictedWolfPhc { config, generators } => {
                let l = LearnerState::restricted(generators.clone(), *config)?;
                if l.policy.states() != states || generators[0].actions() != actions {
                    return Err(Error::Dimension("generators do not fit the game".into()));
                }
                Learner::Wolf(l)
            }
            LearnerConfig::Q(c) => Learner::Q(QLearnerState::new(states, actions, *c)?),
        })
    }

    /// Returns (choice, executed action).
    fn act(&self, state: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
        match self {
            Learner::Wolf(l) => {
                let choice = l.choose(state, rng);
                (choice, l.act(state, choice, rng))
            }
            Learner::Q(l) => {
                let a = l.choose(state, rng);
                (a, a)
            }
        }
    }

    fn update(&mut self, s: usize, choice: usize, r: f64, next: usize) -> Result<Option<StepInfo>> {
        match self {
            Learner::Wolf(l) if l.generators().is_some() => restricted_wolf_phc_step(l, s, choice, r, next).map(Some),
            Learner::Wolf(l) => wolf_phc_step(l, s, choice, r, next).map(Some),
            Learner::Q(l) => q_learner_step(l, s, choice, r, next).map(|_| None),
        }
    }

    /// (learner's own policy, policy over actions).
    fn policies(&self) -> (Policy, Policy) {
        match self {
            Learner::Wolf(l) => (l.policy.clone(), l.explicit_policy()),
            Learner::Q(l) => {
                let p = l.greedy_policy();
                (p.clone(), p)
            }
        }
    }
}

/// One player's state at a checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub iteration: u64,
    pub player: usize,
    pub state: usize,
    /// Over actions, or over generators for a restricted learner.
    pub probs: Vec<f64>,
    pub explicit: Vec<f64>,
    /// Reward received on the last step.
    pub inst_reward: f64,
    /// Mean reward over all steps so far.
    pub avg_reward: f64,
    /// The last WoLF update, if the player runs WoLF-PHC.
    pub step: Option<StepInfo>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub players: usize,
    pub states: usize,
    pub iterations: u64,
    /// Steps between checkpoints.
    pub every: u64,
    /// Ordered by iteration, then player, then state.
    pub records: Vec<Checkpoint>,
}

impl TrajectoryLog {
    pub fn series(&self, player: usize, state: usize) -> impl Iterator<Item = &Checkpoint> {
        self.records
            .iter()
            .filter(move |c| c.player == player && c.state == state)
    }

    /// Checkpoints in the last `fraction` of the run.
    fn tail(&self, player: usize, state: usize, fraction: f64) -> Vec<&Checkpoint> {
        let start = self.iterations as f64 * (1.0 - fraction);
        self.series(player, state)
            .filter(|c| c.iteration as f64 >= start)
            .collect()
    }

    /// Mean of the logged policies over the last `fraction` of checkpoints;
    /// `explicit` picks the action form over the generator weights.
    pub fn final_mean_policy(&self, player: usize, state: usize, fraction: f64, explicit: bool) -> Vec<f64> {
        let tail = self.tail(player, state, fraction);
        let width = tail.first().map_or(0, |c| if explicit { c.explicit.len() } else { c.probs.len() });
        let mut mean = vec![0.0; width];
        for c in &tail {
            let v = if explicit { &c.explicit } else { &c.probs };
            for (m, p) in mean.iter_mut().zip(v) {
                *m += p / tail.len() as f64;
            }
        }
        mean
    }

    /// Mean reward per step over the last `fraction` of the run, recovered
    /// from the running averages.
    pub fn final_average_reward(&self, player: usize, fraction: f64) -> f64 {
        let series: Vec<&Checkpoint> = self.series(player, 0).collect();
        let (Some(last), Some(first)) = (series.last(), self.tail(player, 0, fraction).first().copied()) else {
            return f64::NAN;
        };
        let steps = (last.iteration - first.iteration) as f64;
        if steps == 0.0 {
            return last.avg_reward;
        }
        (last.avg_reward * last.iteration as f64 - first.avg_reward * first.iteration as f64) / steps
    }

    /// First checkpoint iteration after which the explicit policy of every
    /// player moves less than `threshold` in L1 (summed over states) across
    /// every span of `window` steps. `None` if it never settles.
    pub fn stabilization_iteration(&self, window: u64, threshold: f64) -> Option<u64> {
        let lag = window.div_ceil(self.every) as usize;
        let mut result = 0;
        for player in 0..self.players {
            let rows: Vec<Vec<&Checkpoint>> = (0..self.states).map(|s| self.series(player, s).collect()).collect();
            let n = rows[0].len();
            if n <= lag {
                return None;
            }
            let moves = |k: usize| -> f64 {
                rows.iter()
                    .map(|r| linalg::l1_distance(&r[k].explicit, &r[k + lag].explicit))
                    .sum()
            };
            // Walk back from the end to the last unstable span.
            let mut settled = n - lag;
            while settled > 0 && moves(settled - 1) < threshold {
                settled -= 1;
            }
            if settled == n - lag {
                return None;
            }
            result = result.max(rows[0][settled].iteration);
        }
        Some(result)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "iteration",
            "player",
            "state",
            "action_or_generator_probs",
            "explicit_policy_probs",
            "inst_reward",
            "avg_reward",
        ])
        .map_err(csv_error)?;
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        for c in &self.records {
            w.write_record([
                c.iteration.to_string(),
                c.player.to_string(),
                c.state.to_string(),
                join(&c.probs),
                join(&c.explicit),
                c.inst_reward.to_string(),
                c.avg_reward.to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the learners against each other for `iterations` simultaneous
/// plays. Player `i` draws from stream `i + 1` of a ChaCha8 generator
/// seeded with `seed`; the environment uses stream 0.
pub fn self_play(
    game: &StochasticGame,
    configs: &[LearnerConfig],
    iterations: u64,
    seed: u64,
) -> Result<TrajectoryLog> {
    let n = game.player_count();
    if configs.len() != n {
        return Err(Error::Dimension(format!("{} learners for {n} players", configs.len())));
    }
    let states = game.state_count();
    let mut learners = configs
        .iter()
        .enumerate()
        .map(|(i, c)| Learner::build(c, states, game.action_count(i)))
        .collect::<Result<Vec<_>>>()?;
    let stream = |k: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k);
        rng
    };
    let mut env = stream(0);
    let mut rngs: Vec<ChaCha8Rng> = (0..n).map(|i| stream(i as u64 + 1)).collect();

    let every = (iterations / MAX_CHECKPOINTS).max(1);
    let mut log = TrajectoryLog {
        players: n,
        states,
        iterations,
        every,
        records: Vec::new(),
    };
    let mut totals = vec![0.0; n];
    let mut last = vec![0.0; n];
    let mut steps: Vec<Option<StepInfo>> = vec![None; n];
    let record = |log: &mut TrajectoryLog, t: u64, learners: &[Learner], last: &[f64], totals: &[f64], steps: &[Option<StepInfo>]| {
        for (i, l) in learners.iter().enumerate() {
            let (own, explicit) = l.policies();
            for s in 0..states {
                log.records.push(Checkpoint {
                    iteration: t,
                    player: i,
                    state: s,
                    probs: own.row(s).probs().to_vec(),
                    explicit: explicit.row(s).probs().to_vec(),
                    inst_reward: last[i],
                    avg_reward: if t == 0 { 0.0 } else { totals[i] / t as f64 },
                    step: steps[i],
                });
            }
        }
    };
    record(&mut log, 0, &learners, &last, &totals, &steps);

    let mut state = game.initial_state();
    let mut choices = vec![0; n];
    let mut actions = vec![0; n];
    for t in 1..=iterations {
        for i in 0..n {
            (choices[i], actions[i]) = learners[i].act(state, &mut rngs[i]);
        }
        let joint = game.joint_index(&actions);
        let next = sample(game.transition(state, joint), &mut env);
        for i in 0..n {
            let r = game.reward(i, state, joint);
            last[i] = r;
            totals[i] += r;
            steps[i] = learners[i].update(state, choices[i], r, next)?;
        }
        state = if states > 1 && t % EPISODE_LENGTH == 0 {
            game.initial_state()
        } else {
            next
        };
        if t % every == 0 || t == iterations {
            record(&mut log, t, &learners, &last, &totals, &steps);
        }
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::rps;

    fn wolf2() -> Vec<LearnerConfig> {
        vec![LearnerConfig::WolfPhc(WolfPhcConfig::default()); 2]
    }

    #[test]
    fn same_seed_same_log() {
        let a = self_play(&rps(), &wolf2(), 3000, 9).unwrap();
        let b = self_play(&rps(), &wolf2(), 3000, 9).unwrap();
        let c = self_play(&rps(), &wolf2(), 3000, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn checkpoint_cadence() {
        let log = self_play(&rps(), &wolf2(), 10_000, 1).unwrap();
        assert_eq!(log.every, 5);
        assert_eq!(log.series(0, 0).count(), 2001);
        let short = self_play(&rps(), &wolf2(), 7, 1).unwrap();
        assert_eq!(short.every, 1);
        assert_eq!(short.series(1, 0).count(), 8);
    }

    #[test]
    fn logged_steps_follow_the_winning_test() {
        let log = self_play(&rps(), &wolf2(), 5000, 3).unwrap();
        let c = WolfPhcConfig::default();
        for r in log.records.iter().filter(|r| r.iteration > 0) {
            let info = r.step.unwrap();
            let t = r.iteration - 1;
            let expected = if info.winning { c.delta_win.at(t) } else { c.delta_lose.at(t) };
            assert_eq!(info.delta, expected);
            assert!((r.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(r.probs.iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn zero_sum_rewards_cancel() {
        let log = self_play(&rps(), &wolf2(), 2000, 4).unwrap();
        let a = log.final_average_reward(0, 0.5);
        let b = log.final_average_reward(1, 0.5);
        assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let log = self_play(&rps(), &wolf2(), 10, 2).unwrap();
        let mut out = Vec::new();
        log.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iteration,player,state,action_or_generator_probs,explicit_policy_probs,inst_reward,avg_reward"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,0,0,"));
        assert_eq!(first.split(',').nth(3).unwrap().split(';').count(), 3);
    }

    #[test]
    fn stabilization_on_a_constant_log() {
        let log = self_play(&crate::game::zero_sum_matrix(&[vec![1.0]]).unwrap(), &[
            LearnerConfig::WolfPhc(WolfPhcConfig::default()),
            LearnerConfig::Q(QConfig::default()),
        ], 100_000, 0)
        .unwrap();
        assert_eq!(log.stabilization_iteration(10_000, 0.01), Some(0));
        assert!((log.final_mean_policy(0, 0, 0.1, true)[0] - 1.0).abs() < 1e-12);
    }
}
