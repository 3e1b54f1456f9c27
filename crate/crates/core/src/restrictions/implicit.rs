use crate::error::{Error, Result};
use crate::game::{JointPolicy, MixedStrategy, Policy, StochasticGame};
use crate::tol;

/// For each player, state, and implicit action, the distribution over
/// explicit actions it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMapping {
    implicit_actions: Vec<Vec<String>>,
    // [player][state][implicit action]
    maps: Vec<Vec<Vec<MixedStrategy>>>,
}

impl TauMapping {
    pub fn new(
        implicit_actions: Vec<Vec<String>>,
        maps: Vec<Vec<Vec<MixedStrategy>>>,
    ) -> Result<Self> {
        if implicit_actions.len() != maps.len() {
            return Err(Error::Dimension("one action list per player".into()));
        }
        for (names, player) in implicit_actions.iter().zip(&maps) {
            if player.iter().any(|state| state.len() != names.len()) {
                return Err(Error::Dimension(
                    "every state needs one row per implicit action".into(),
                ));
            }
            for row in player.iter().flatten() {
                if !row.is_valid(tol::STRUCTURAL) {
                    return Err(Error::Malformed(format!(
                        "tau row {:?} is not a distribution",
                        row.probs()
                    )));
                }
            }
        }
        Ok(Self {
            implicit_actions,
            maps,
        })
    }

    /// Every implicit action is the explicit action of the same index.
    pub fn identity(game: &StochasticGame) -> Self {
        let maps = (0..game.player_count())
            .map(|i| Self::identity_rows(game, i))
            .collect();
        Self {
            implicit_actions: game.action_sets().to_vec(),
            maps,
        }
    }

    fn identity_rows(game: &StochasticGame, player: usize) -> Vec<Vec<MixedStrategy>> {
        let n = game.action_count(player);
        vec![(0..n).map(|a| MixedStrategy::pure(n, a)).collect(); game.state_count()]
    }

    /// Identity for everyone except `player`, whose implicit actions are
    /// the given whole-policy generators.
    pub fn hull(game: &StochasticGame, player: usize, generators: &[Policy]) -> Result<Self> {
        Self::identity(game).with_hull(game, player, generators)
    }

    /// Replaces `player`'s implicit actions with whole-policy generators.
    pub fn with_hull(
        mut self,
        game: &StochasticGame,
        player: usize,
        generators: &[Policy],
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Malformed("hull needs at least one generator".into()));
        }
        for g in generators {
            game.check_policy(player, g)?;
        }
        self.implicit_actions[player] = (0..generators.len()).map(|k| format!("g{k}")).collect();
        self.maps[player] = (0..game.state_count())
            .map(|s| generators.iter().map(|g| g.row(s).clone()).collect())
            .collect();
        Self::new(self.implicit_actions, self.maps)
    }

    pub fn implicit_actions(&self) -> &[Vec<String>] {
        &self.implicit_actions
    }

    pub fn row(&self, player: usize, state: usize, implicit_action: usize) -> &MixedStrategy {
        &self.maps[player][state][implicit_action]
    }

    fn fits(&self, game: &StochasticGame) -> bool {
        self.maps.len() == game.player_count()
            && self.maps.iter().enumerate().all(|(i, player)| {
                player.len() == game.state_count()
                    && player
                        .iter()
                        .flatten()
                        .all(|row| row.len() == game.action_count(i))
            })
    }
}

/// A game built on top of an explicit game through a [`TauMapping`].
#[derive(Debug, Clone)]
pub struct ImplicitGame {
    pub game: StochasticGame,
    pub tau: TauMapping,
    pub explicit: StochasticGame,
}

fn product_distribution(rows: &[&MixedStrategy]) -> Vec<f64> {
    let mut dist = vec![1.0];
    for row in rows {
        dist = dist
            .iter()
            .flat_map(|d| row.probs().iter().map(move |q| d * q))
            .collect();
    }
    dist
}

fn digits(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for k in (0..radices.len()).rev() {
        out[k] = index % radices[k];
        index /= radices[k];
    }
    out
}

/// Builds the implicit game: transitions and default rewards are the
/// tau-expectations of the explicit ones. `reward_override`, indexed
/// `[player][state][implicit joint action]`, replaces the rewards.
pub fn build_implicit(
    explicit: &StochasticGame,
    tau: TauMapping,
    reward_override: Option<Vec<Vec<Vec<f64>>>>,
) -> Result<ImplicitGame> {
    if !tau.fits(explicit) {
        return Err(Error::Dimension("tau mapping does not match the game".into()));
    }
    let players = explicit.player_count();
    let radices: Vec<usize> = tau.implicit_actions.iter().map(Vec::len).collect();
    let joint_count: usize = radices.iter().product();
    let n_states = explicit.state_count();

    let mut transitions = vec![vec![vec![0.0; n_states]; joint_count]; n_states];
    let mut rewards = vec![vec![vec![0.0; joint_count]; n_states]; players];
    for s in 0..n_states {
        for (jh, row) in transitions[s].iter_mut().enumerate() {
            let implicit = digits(jh, &radices);
            let rows: Vec<&MixedStrategy> = implicit
                .iter()
                .enumerate()
                .map(|(i, &a)| tau.row(i, s, a))
                .collect();
            let dist = product_distribution(&rows);
            for (j, &w) in dist.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for (t, q) in explicit.transition(s, j).iter().enumerate() {
                    row[t] += w * q;
                }
                for (i, r) in rewards.iter_mut().enumerate() {
                    r[s][jh] += w * explicit.reward(i, s, j);
                }
            }
        }
    }
    if let Some(over) = reward_override {
        let fits = over.len() == players
            && over
                .iter()
                .all(|p| p.len() == n_states && p.iter().all(|r| r.len() == joint_count));
        if !fits {
            return Err(Error::Dimension(
                "reward override must cover every state and implicit joint action".into(),
            ));
        }
        rewards = over;
    }
    let game = StochasticGame::new(
        explicit.states().to_vec(),
        tau.implicit_actions.clone(),
        transitions,
        rewards,
        explicit.initial_state(),
        explicit.formulation(),
    )?;
    Ok(ImplicitGame {
        game,
        tau,
        explicit: explicit.clone(),
    })
}

/// Same dynamics, different rewards: identity tau with overridden rewards.
pub fn reward_shaping(explicit: &StochasticGame, shaped: Vec<Vec<Vec<f64>>>) -> Result<ImplicitGame> {
    build_implicit(explicit, TauMapping::identity(explicit), Some(shaped))
}

/// Player `player`'s `broken` action behaves like `null`.
pub fn broken_actuator(
    explicit: &StochasticGame,
    player: usize,
    broken: usize,
    null: usize,
) -> Result<ImplicitGame> {
    if player >= explicit.player_count() {
        return Err(Error::OutOfRange(format!("player {player}")));
    }
    let n = explicit.action_count(player);
    if broken >= n || null >= n {
        return Err(Error::OutOfRange(format!(
            "actions {broken}, {null} for a player with {n} actions"
        )));
    }
    let mut tau = TauMapping::identity(explicit);
    for state in tau.maps[player].iter_mut() {
        state[broken] = MixedStrategy::pure(n, null);
    }
    build_implicit(explicit, tau, None)
}

/// Each player's intended action is replaced by a uniformly random one
/// with probability `eps[i]`.
pub fn epsilon_exploration(explicit: &StochasticGame, eps: &[f64]) -> Result<ImplicitGame> {
    if eps.len() != explicit.player_count() {
        return Err(Error::Dimension("one exploration rate per player".into()));
    }
    if let Some(e) = eps.iter().find(|e| !(0.0..1.0).contains(*e)) {
        return Err(Error::OutOfRange(format!("exploration rate {e} not in [0, 1)")));
    }
    let mut tau = TauMapping::identity(explicit);
    for (i, &e) in eps.iter().enumerate() {
        let n = explicit.action_count(i);
        for state in tau.maps[i].iter_mut() {
            for (a, row) in state.iter_mut().enumerate() {
                let probs = (0..n)
                    .map(|b| e / n as f64 + if a == b { 1.0 - e } else { 0.0 })
                    .collect();
                *row = MixedStrategy::new_unchecked(probs);
            }
        }
    }
    build_implicit(explicit, tau, None)
}

impl ImplicitGame {
    /// Explicit policy equivalent to an implicit one for `player`.
    pub fn map_player_policy(&self, player: usize, policy: &Policy) -> Result<Policy> {
        self.game.check_policy(player, policy)?;
        let n = self.explicit.action_count(player);
        let rows = (0..self.game.state_count())
            .map(|s| {
                let mut out = vec![0.0; n];
                for (ah, &w) in policy.row(s).probs().iter().enumerate() {
                    for (o, t) in out.iter_mut().zip(self.tau.row(player, s, ah).probs()) {
                        *o += w * t;
                    }
                }
                MixedStrategy::new_unchecked(out)
            })
            .collect();
        Ok(Policy::new(rows))
    }

    pub fn map_policy(&self, implicit: &JointPolicy) -> Result<JointPolicy> {
        self.game.check_joint(implicit)?;
        let policies = implicit
            .policies()
            .iter()
            .enumerate()
            .map(|(i, p)| self.map_player_policy(i, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(JointPolicy::new(policies))
    }

    /// Largest deviation from `T^(s, a^, s') = sum_a prod_i tau_i T(s, a, s')`.
    pub fn transition_equation_residual(&self) -> f64 {
        let radices: Vec<usize> = self.tau.implicit_actions.iter().map(Vec::len).collect();
        let mut worst = 0.0f64;
        for s in 0..self.game.state_count() {
            for jh in 0..self.game.joint_count() {
                let implicit = digits(jh, &radices);
                let mut expected = vec![0.0; self.game.state_count()];
                for j in 0..self.explicit.joint_count() {
                    let actions = self.explicit.joint_actions(j);
                    let w: f64 = actions
                        .iter()
                        .enumerate()
                        .map(|(i, &a)| self.tau.row(i, s, implicit[i]).probs()[a])
                        .product();
                    for (e, q) in expected.iter_mut().zip(self.explicit.transition(s, j)) {
                        *e += w * q;
                    }
                }
                for (e, q) in expected.iter().zip(self.game.transition(s, jh)) {
                    worst = worst.max((e - q).abs());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{self, matrix_value, rps};

    fn rps_column_hull() -> ImplicitGame {
        let g = rps();
        let gens = vec![
            Policy::from_rows(vec![vec![0.5, 0.5, 0.0]]).unwrap(),
            Policy::from_rows(vec![vec![0.0, 0.5, 0.5]]).unwrap(),
        ];
        build_implicit(&g, TauMapping::hull(&g, 1, &gens).unwrap(), None).unwrap()
    }

    #[test]
    fn identity_reproduces_the_game() {
        let g = game::fact5_default();
        let ig = build_implicit(&g, TauMapping::identity(&g), None).unwrap();
        assert_eq!(ig.game, g);
    }

    #[test]
    fn rps_column_hull_matrix() {
        let ig = rps_column_hull();
        let expected = [[-0.5, 0.0], [0.5, -0.5], [0.0, 0.5]];
        for (r, row) in expected.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let j = ig.game.joint_index(&[r, c]);
                assert!((ig.game.reward(0, 0, j) - v).abs() < 1e-15);
            }
        }
        assert!(ig.transition_equation_residual() < 1e-12);
    }

    #[test]
    fn mapping_weights_the_generators() {
        let ig = rps_column_hull();
        let col = Policy::from_rows(vec![vec![2.0 / 3.0, 1.0 / 3.0]]).unwrap();
        let mapped = ig.map_player_policy(1, &col).unwrap();
        let want = [1.0 / 3.0, 0.5, 1.0 / 6.0];
        for (a, w) in want.iter().enumerate() {
            assert!((mapped.prob(0, a) - w).abs() < 1e-15);
        }
        let pure = Policy::from_rows(vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(ig.map_player_policy(1, &pure).unwrap().row(0).probs(), &[0.5, 0.5, 0.0]);
    }

    #[test]
    fn broken_actuator_copies_null_rows() {
        let g = game::fact5_default();
        let ig = broken_actuator(&g, 1, 0, 1).unwrap();
        assert!(ig.game.validate().is_empty());
        for s in 0..3 {
            for row_action in 0..2 {
                let broken = ig.game.joint_index(&[row_action, 0]);
                let null = ig.game.joint_index(&[row_action, 1]);
                assert_eq!(ig.game.transition(s, broken), ig.game.transition(s, null));
                for i in 0..2 {
                    assert_eq!(ig.game.reward(i, s, broken), ig.game.reward(i, s, null));
                }
            }
        }
        assert!(broken_actuator(&g, 1, 2, 0).is_err());
    }

    #[test]
    fn exploration_values_match_mixed_play() {
        let g = rps();
        assert_eq!(epsilon_exploration(&g, &[0.0, 0.0]).unwrap().game, g);
        let ig = epsilon_exploration(&g, &[0.3, 0.3]).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let implicit = JointPolicy::new(vec![Policy::pure(3, &[r]), Policy::pure(3, &[c])]);
                let explicit = ig.map_policy(&implicit).unwrap();
                let a = matrix_value(&ig.game, &implicit).unwrap();
                let b = matrix_value(&g, &explicit).unwrap();
                assert!((a[0] - b[0]).abs() < 1e-12);
            }
        }
        assert!(epsilon_exploration(&g, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn bad_tau_rows_are_rejected() {
        let row = MixedStrategy::new_unchecked(vec![0.5, 0.4]);
        assert!(TauMapping::new(vec![vec!["x".into()]], vec![vec![vec![row]]]).is_err());
    }
}
