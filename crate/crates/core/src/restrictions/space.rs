use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::hull;
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, Policy};
use crate::linalg;
use crate::random;
use crate::tol;

/// Number of states and actions of one player's policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub states: usize,
    pub actions: usize,
}

impl Shape {
    pub fn new(states: usize, actions: usize) -> Self {
        Self { states, actions }
    }

    pub fn of(policy: &Policy) -> Self {
        Self::new(policy.states(), policy.actions())
    }

    fn fits(&self, policy: &Policy) -> bool {
        policy.states() == self.states && policy.rows().iter().all(|r| r.len() == self.actions)
    }
}

/// `policy(state, action) = prob` is forced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pin {
    pub state: usize,
    pub action: usize,
    pub prob: f64,
}

/// A non-empty compact set of policies one player is limited to.
#[derive(Debug, Clone, PartialEq)]
pub enum RestrictedPolicySpace {
    Full,
    Singleton(Policy),
    /// Mixtures of whole policies, one weight vector shared by all states.
    ConvexHullGlobal(Vec<Policy>),
    /// Per-state mixtures of strategies with independent weights.
    ConvexHullStatewise(Vec<Vec<MixedStrategy>>),
    /// One strategy played identically in every state.
    StateUniform,
    /// Some coordinates fixed, the remaining mass free.
    FixedCoordinates(Vec<Pin>),
    /// Pure policies only.
    DeterministicOnly,
}

/// A grid point of a space's parameterization.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub params: Vec<f64>,
    pub policy: Policy,
}

/// Compositions of `m` into `k` nonnegative parts, as weights `i / m`.
pub fn simplex_grid(k: usize, m: usize) -> Vec<Vec<f64>> {
    fn recurse(k: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=left {
            prefix.push(i);
            recurse(k - 1, left - i, prefix, out);
            prefix.pop();
        }
    }
    if k == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    recurse(k, m, &mut Vec::new(), &mut out);
    let m = m.max(1) as f64;
    out.into_iter()
        .map(|c| c.into_iter().map(|i| i as f64 / m).collect())
        .collect()
}

fn mix(generators: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; generators[0].len()];
    for (g, w) in generators.iter().zip(weights) {
        for (o, x) in out.iter_mut().zip(g.iter()) {
            *o += w * x;
        }
    }
    out
}

fn cartesian<T: Clone>(factors: &[Vec<T>]) -> Vec<Vec<T>> {
    factors.iter().fold(vec![vec![]], |acc, f| {
        acc.iter()
            .flat_map(|prefix| {
                f.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

impl RestrictedPolicySpace {
    /// Checks that the space is well formed and non-empty for `shape`.
    pub fn check(&self, shape: Shape) -> Result<()> {
        match self {
            Self::Full | Self::StateUniform | Self::DeterministicOnly => Ok(()),
            Self::Singleton(p) => {
                if !shape.fits(p) || !p.is_valid(tol::STRUCTURAL) {
                    return Err(Error::Malformed("singleton policy does not fit".into()));
                }
                Ok(())
            }
            Self::ConvexHullGlobal(gens) => {
                if gens.is_empty() {
                    return Err(Error::Malformed("hull needs at least one generator".into()));
                }
                if gens.iter().any(|g| !shape.fits(g) || !g.is_valid(tol::STRUCTURAL)) {
                    return Err(Error::Malformed("hull generator does not fit".into()));
                }
                Ok(())
            }
            Self::ConvexHullStatewise(gens) => {
                if gens.len() != shape.states || gens.iter().any(Vec::is_empty) {
                    return Err(Error::Malformed(
                        "statewise hull needs generators at every state".into(),
                    ));
                }
                if gens
                    .iter()
                    .flatten()
                    .any(|g| g.len() != shape.actions || !g.is_valid(tol::STRUCTURAL))
                {
                    return Err(Error::Malformed("statewise generator does not fit".into()));
                }
                Ok(())
            }
            Self::FixedCoordinates(pins) => {
                let mut fixed = vec![vec![None::<f64>; shape.actions]; shape.states];
                for pin in pins {
                    if pin.state >= shape.states || pin.action >= shape.actions {
                        return Err(Error::OutOfRange(format!(
                            "pin ({}, {}) outside {}x{}",
                            pin.state, pin.action, shape.states, shape.actions
                        )));
                    }
                    if !(0.0..=1.0).contains(&pin.prob) {
                        return Err(Error::OutOfRange(format!("pin probability {}", pin.prob)));
                    }
                    match fixed[pin.state][pin.action] {
                        Some(p) if (p - pin.prob).abs() > tol::STRUCTURAL => {
                            return Err(Error::Malformed("conflicting pins".into()))
                        }
                        _ => fixed[pin.state][pin.action] = Some(pin.prob),
                    }
                }
                for row in &fixed {
                    let total: f64 = row.iter().flatten().sum();
                    let all_pinned = row.iter().all(Option::is_some);
                    if total > 1.0 + tol::STRUCTURAL {
                        return Err(Error::Malformed(format!("pins sum to {total} > 1")));
                    }
                    if all_pinned && (total - 1.0).abs() > tol::STRUCTURAL {
                        return Err(Error::Malformed(format!(
                            "every action pinned but mass is {total}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    fn pinned(pins: &[Pin], shape: Shape) -> Vec<Vec<Option<f64>>> {
        let mut fixed = vec![vec![None; shape.actions]; shape.states];
        for pin in pins {
            fixed[pin.state][pin.action] = Some(pin.prob);
        }
        fixed
    }

    /// Number of distinct pure policies.
    pub fn pure_policy_count(shape: Shape) -> f64 {
        (shape.actions as f64).powi(shape.states as i32)
    }

    pub fn is_convex(&self, shape: Shape) -> bool {
        match self {
            Self::DeterministicOnly => Self::pure_policy_count(shape) <= 1.0,
            _ => true,
        }
    }

    /// Closed under blending members with a separate weight per state.
    pub fn is_statewise_convex(&self, shape: Shape) -> bool {
        match self {
            Self::Full | Self::Singleton(_) | Self::ConvexHullStatewise(_) => true,
            Self::FixedCoordinates(_) => true,
            Self::ConvexHullGlobal(gens) => {
                // Only one state can differ between generators.
                let differing = (0..shape.states)
                    .filter(|&s| {
                        gens.iter().any(|g| {
                            linalg::max_abs_diff(g.row(s).probs(), gens[0].row(s).probs())
                                > tol::STRUCTURAL
                        })
                    })
                    .count();
                differing <= 1
            }
            Self::StateUniform => shape.states <= 1 || shape.actions <= 1,
            Self::DeterministicOnly => Self::pure_policy_count(shape) <= 1.0,
        }
    }

    /// Whether `policy` lies in the space within `tol` (max-norm).
    pub fn contains(&self, policy: &Policy, tol: f64) -> bool {
        let shape = Shape::of(policy);
        if !policy.is_valid(tol) {
            return false;
        }
        match self {
            Self::Full => true,
            Self::Singleton(p) => shape.fits(p) && p.distance_max(policy) <= tol,
            Self::ConvexHullGlobal(gens) => {
                if gens.iter().any(|g| !shape.fits(g)) {
                    return false;
                }
                let points: Vec<Vec<f64>> = gens.iter().map(Policy::flatten).collect();
                hull::linf_distance_to_hull(&points, &policy.flatten()).0 <= tol
            }
            Self::ConvexHullStatewise(gens) => {
                gens.len() == shape.states
                    && gens.iter().enumerate().all(|(s, row)| {
                        let points: Vec<Vec<f64>> =
                            row.iter().map(|g| g.probs().to_vec()).collect();
                        points.iter().all(|p| p.len() == shape.actions)
                            && hull::linf_distance_to_hull(&points, policy.row(s).probs()).0
                                <= tol
                    })
            }
            Self::StateUniform => policy
                .rows()
                .iter()
                .all(|r| linalg::max_abs_diff(r.probs(), policy.row(0).probs()) <= tol),
            Self::FixedCoordinates(pins) => pins.iter().all(|pin| {
                pin.state < shape.states
                    && pin.action < shape.actions
                    && (policy.prob(pin.state, pin.action) - pin.prob).abs() <= tol
            }),
            Self::DeterministicOnly => policy.rows().iter().all(|r| r.pure_action(tol).is_some()),
        }
    }

    /// Euclidean projection onto the space.
    pub fn project(&self, policy: &Policy) -> Result<Policy> {
        let shape = Shape::of(policy);
        self.check(shape)?;
        let rows = match self {
            Self::DeterministicOnly if !self.is_convex(shape) => {
                return Err(Error::Unsupported(
                    "projection onto a non-convex space".into(),
                ))
            }
            Self::DeterministicOnly => vec![vec![1.0]; shape.states],
            Self::Full => policy
                .rows()
                .iter()
                .map(|r| linalg::project_simplex(r.probs(), 1.0))
                .collect(),
            Self::Singleton(p) => return Ok(p.clone()),
            Self::ConvexHullGlobal(gens) => {
                let points: Vec<Vec<f64>> = gens.iter().map(Policy::flatten).collect();
                let (x, _) = hull::nearest_in_hull(&points, &policy.flatten());
                x.chunks(shape.actions).map(<[f64]>::to_vec).collect()
            }
            Self::ConvexHullStatewise(gens) => gens
                .iter()
                .enumerate()
                .map(|(s, row)| {
                    let points: Vec<Vec<f64>> = row.iter().map(|g| g.probs().to_vec()).collect();
                    hull::nearest_in_hull(&points, policy.row(s).probs()).0
                })
                .collect(),
            Self::StateUniform => {
                let mut mean = vec![0.0; shape.actions];
                for r in policy.rows() {
                    for (m, p) in mean.iter_mut().zip(r.probs()) {
                        *m += p / shape.states as f64;
                    }
                }
                vec![linalg::project_simplex(&mean, 1.0); shape.states]
            }
            Self::FixedCoordinates(pins) => {
                let fixed = Self::pinned(pins, shape);
                fixed
                    .iter()
                    .enumerate()
                    .map(|(s, row)| {
                        let free: Vec<usize> = (0..shape.actions).filter(|&a| row[a].is_none()).collect();
                        let left = (1.0 - row.iter().flatten().sum::<f64>()).max(0.0);
                        let values: Vec<f64> = free.iter().map(|&a| policy.prob(s, a)).collect();
                        let projected = linalg::project_simplex(&values, left);
                        let mut out: Vec<f64> = row.iter().map(|p| p.unwrap_or(0.0)).collect();
                        for (&a, v) in free.iter().zip(projected) {
                            out[a] = v;
                        }
                        out
                    })
                    .collect()
            }
        };
        Ok(Policy::new(
            rows.into_iter().map(MixedStrategy::new_unchecked).collect(),
        ))
    }

    /// Some member of the space.
    pub fn witness(&self, shape: Shape) -> Policy {
        match self {
            Self::Singleton(p) => p.clone(),
            Self::ConvexHullGlobal(gens) => gens[0].clone(),
            Self::ConvexHullStatewise(gens) => {
                Policy::new(gens.iter().map(|row| row[0].clone()).collect())
            }
            Self::DeterministicOnly => Policy::pure(shape.actions, &vec![0; shape.states]),
            Self::Full | Self::StateUniform | Self::FixedCoordinates(_) => {
                self.policy_from_free_weights(shape, &|_, free| vec![1.0 / free as f64; free])
            }
        }
    }

    /// Builds a FixedCoordinates / Full / StateUniform member whose free
    /// mass at each state is split by `weights(state, free_count)`.
    fn policy_from_free_weights(&self, shape: Shape, weights: &dyn Fn(usize, usize) -> Vec<f64>) -> Policy {
        let pins: &[Pin] = match self {
            Self::FixedCoordinates(p) => p,
            _ => &[],
        };
        let fixed = Self::pinned(pins, shape);
        let uniform_row = matches!(self, Self::StateUniform);
        let rows = fixed
            .iter()
            .enumerate()
            .map(|(s, row)| {
                let free: Vec<usize> = (0..shape.actions).filter(|&a| row[a].is_none()).collect();
                let left = (1.0 - row.iter().flatten().sum::<f64>()).max(0.0);
                let mut out: Vec<f64> = row.iter().map(|p| p.unwrap_or(0.0)).collect();
                if !free.is_empty() {
                    let w = weights(if uniform_row { 0 } else { s }, free.len());
                    for (&a, wi) in free.iter().zip(w) {
                        out[a] = left * wi;
                    }
                }
                MixedStrategy::new_unchecked(out)
            })
            .collect();
        Policy::new(rows)
    }

    /// Random member; extreme points are drawn some of the time so that
    /// probes see the boundary.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, shape: Shape) -> Policy {
        let extreme = rng.random_bool(0.3);
        match self {
            Self::Singleton(p) => p.clone(),
            Self::DeterministicOnly => {
                let choice: Vec<usize> = (0..shape.states)
                    .map(|_| rng.random_range(0..shape.actions))
                    .collect();
                Policy::pure(shape.actions, &choice)
            }
            Self::ConvexHullGlobal(gens) => {
                if extreme {
                    return gens[rng.random_range(0..gens.len())].clone();
                }
                let w = random::simplex_point(rng, gens.len());
                let flat: Vec<Vec<f64>> = gens.iter().map(Policy::flatten).collect();
                let refs: Vec<&[f64]> = flat.iter().map(Vec::as_slice).collect();
                let x = mix(&refs, &w);
                Policy::new(
                    x.chunks(shape.actions)
                        .map(|c| MixedStrategy::new_unchecked(c.to_vec()))
                        .collect(),
                )
            }
            Self::ConvexHullStatewise(gens) => Policy::new(
                gens.iter()
                    .map(|row| {
                        if extreme {
                            return row[rng.random_range(0..row.len())].clone();
                        }
                        let w = random::simplex_point(rng, row.len());
                        let refs: Vec<&[f64]> = row.iter().map(MixedStrategy::probs).collect();
                        MixedStrategy::new_unchecked(mix(&refs, &w))
                    })
                    .collect(),
            ),
            Self::Full | Self::StateUniform | Self::FixedCoordinates(_) => {
                let draws: Vec<Vec<f64>> = (0..shape.states)
                    .map(|_| {
                        let n = shape.actions;
                        if extreme {
                            let mut v = vec![0.0; n];
                            v[rng.random_range(0..n)] = 1.0;
                            v
                        } else {
                            random::simplex_point(rng, n)
                        }
                    })
                    .collect();
                self.policy_from_free_weights(shape, &|s, free| {
                    let d = &draws[s];
                    let head: Vec<f64> = d[..free].to_vec();
                    let total: f64 = head.iter().sum();
                    if total > 0.0 {
                        head.into_iter().map(|x| x / total).collect()
                    } else {
                        let mut v = vec![0.0; free];
                        v[0] = 1.0;
                        v
                    }
                })
            }
        }
    }

    /// Per-state vertex sets when the space is a product of per-state
    /// polytopes; `None` otherwise.
    pub fn statewise_vertices(&self, shape: Shape) -> Option<Vec<Vec<MixedStrategy>>> {
        let pure_all = || -> Vec<MixedStrategy> {
            (0..shape.actions)
                .map(|a| MixedStrategy::pure(shape.actions, a))
                .collect()
        };
        match self {
            Self::Full => Some(vec![pure_all(); shape.states]),
            Self::Singleton(p) => Some(p.rows().iter().map(|r| vec![r.clone()]).collect()),
            Self::ConvexHullStatewise(gens) => Some(gens.clone()),
            Self::ConvexHullGlobal(gens) if shape.states == 1 => {
                Some(vec![gens.iter().map(|g| g.row(0).clone()).collect()])
            }
            Self::StateUniform if shape.states == 1 => Some(vec![pure_all()]),
            Self::FixedCoordinates(pins) => {
                let fixed = Self::pinned(pins, shape);
                Some(
                    fixed
                        .iter()
                        .map(|row| {
                            let base: Vec<f64> = row.iter().map(|p| p.unwrap_or(0.0)).collect();
                            let left = (1.0 - base.iter().sum::<f64>()).max(0.0);
                            let free: Vec<usize> =
                                (0..shape.actions).filter(|&a| row[a].is_none()).collect();
                            if free.is_empty() || left <= tol::STRUCTURAL {
                                return vec![MixedStrategy::new_unchecked(base)];
                            }
                            free.iter()
                                .map(|&a| {
                                    let mut v = base.clone();
                                    v[a] += left;
                                    MixedStrategy::new_unchecked(v)
                                })
                                .collect()
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Number of scalar parameters in the grid parameterization.
    pub fn parameter_dimension(&self, shape: Shape) -> usize {
        match self {
            Self::Full => shape.states * shape.actions.saturating_sub(1),
            Self::Singleton(_) => 0,
            Self::ConvexHullGlobal(gens) => gens.len() - 1,
            Self::ConvexHullStatewise(gens) => gens.iter().map(|g| g.len() - 1).sum(),
            Self::StateUniform => shape.actions.saturating_sub(1),
            Self::FixedCoordinates(pins) => {
                let fixed = Self::pinned(pins, shape);
                fixed
                    .iter()
                    .map(|row| {
                        let free = row.iter().filter(|p| p.is_none()).count();
                        let left = 1.0 - row.iter().flatten().sum::<f64>();
                        if left > tol::STRUCTURAL {
                            free.saturating_sub(1)
                        } else {
                            0
                        }
                    })
                    .sum()
            }
            Self::DeterministicOnly => 1,
        }
    }

    /// Grid over the space's parameterization with `divisions` steps per
    /// unit of weight. Pure policies are enumerated by index instead.
    pub fn grid(&self, shape: Shape, divisions: usize) -> Vec<GridPoint> {
        match self {
            Self::Singleton(p) => vec![GridPoint {
                params: vec![],
                policy: p.clone(),
            }],
            Self::DeterministicOnly => {
                let count = Self::pure_policy_count(shape) as usize;
                (0..count)
                    .map(|index| {
                        let mut rest = index;
                        let mut choice = vec![0; shape.states];
                        for c in choice.iter_mut().rev() {
                            *c = rest % shape.actions;
                            rest /= shape.actions;
                        }
                        GridPoint {
                            params: vec![index as f64],
                            policy: Policy::pure(shape.actions, &choice),
                        }
                    })
                    .collect()
            }
            Self::ConvexHullGlobal(gens) => {
                let flat: Vec<Vec<f64>> = gens.iter().map(Policy::flatten).collect();
                let refs: Vec<&[f64]> = flat.iter().map(Vec::as_slice).collect();
                simplex_grid(gens.len(), divisions)
                    .into_iter()
                    .map(|w| {
                        let x = mix(&refs, &w);
                        let policy = Policy::new(
                            x.chunks(shape.actions)
                                .map(|c| MixedStrategy::new_unchecked(c.to_vec()))
                                .collect(),
                        );
                        GridPoint {
                            params: w[..w.len() - 1].to_vec(),
                            policy,
                        }
                    })
                    .collect()
            }
            Self::StateUniform => simplex_grid(shape.actions, divisions)
                .into_iter()
                .map(|w| GridPoint {
                    params: w[..w.len() - 1].to_vec(),
                    policy: Policy::stationary(shape.states, MixedStrategy::new_unchecked(w)),
                })
                .collect(),
            Self::Full | Self::ConvexHullStatewise(_) | Self::FixedCoordinates(_) => {
                let vertices = self.statewise_vertices(shape).expect("statewise polytope");
                let per_state: Vec<Vec<(Vec<f64>, MixedStrategy)>> = vertices
                    .iter()
                    .map(|verts| {
                        let refs: Vec<&[f64]> = verts.iter().map(MixedStrategy::probs).collect();
                        simplex_grid(verts.len(), divisions)
                            .into_iter()
                            .map(|w| {
                                let row = MixedStrategy::new_unchecked(mix(&refs, &w));
                                (w[..w.len() - 1].to_vec(), row)
                            })
                            .collect()
                    })
                    .collect();
                cartesian(&per_state)
                    .into_iter()
                    .map(|combo| {
                        let params = combo.iter().flat_map(|(p, _)| p.clone()).collect();
                        let policy = Policy::new(combo.into_iter().map(|(_, r)| r).collect());
                        GridPoint { params, policy }
                    })
                    .collect()
            }
        }
    }

    /// Extreme points used as blend endpoints by the probes.
    fn extreme_points(&self, shape: Shape) -> Vec<Policy> {
        match self {
            Self::ConvexHullGlobal(gens) => gens.clone(),
            Self::StateUniform => (0..shape.actions)
                .map(|a| Policy::stationary(shape.states, MixedStrategy::pure(shape.actions, a)))
                .collect(),
            _ => vec![],
        }
    }
}

/// Samples member pairs and checks that their midpoints are members.
pub fn convexity_probe(space: &RestrictedPolicySpace, shape: Shape, trials: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).all(|_| {
        let x = space.sample(&mut rng, shape);
        let y = space.sample(&mut rng, shape);
        space.contains(&x.blend(&y, 0.5), tol::MEMBERSHIP)
    })
}

/// Checks closure under per-state blends `alpha(s) x + (1 - alpha(s)) y`
/// with `alpha(s)` on the grid {0, 1/4, ..., 1}.
pub fn statewise_blend_probe(
    space: &RestrictedPolicySpace,
    shape: Shape,
    trials: usize,
    seed: u64,
) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extremes = space.extreme_points(shape);
    let blends_ok = |x: &Policy, y: &Policy, alpha: &[f64]| {
        space.contains(&x.blend_statewise(y, alpha), tol::MEMBERSHIP)
    };
    // Indicator weights on each state between every pair of extreme points.
    for (i, x) in extremes.iter().enumerate() {
        for y in &extremes[i + 1..] {
            for s in 0..shape.states {
                let mut alpha = vec![0.0; shape.states];
                alpha[s] = 1.0;
                if !blends_ok(x, y, &alpha) {
                    return false;
                }
            }
        }
    }
    (0..trials).all(|_| {
        let x = space.sample(&mut rng, shape);
        let y = space.sample(&mut rng, shape);
        let alpha: Vec<f64> = (0..shape.states)
            .map(|_| rng.random_range(0..=4) as f64 / 4.0)
            .collect();
        blends_ok(&x, &y, &alpha)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rps_shape() -> Shape {
        Shape::new(1, 3)
    }

    fn one(p: &[f64]) -> Policy {
        Policy::from_rows(vec![p.to_vec()]).unwrap()
    }

    fn paper_half() -> RestrictedPolicySpace {
        RestrictedPolicySpace::FixedCoordinates(vec![Pin {
            state: 0,
            action: 1,
            prob: 0.5,
        }])
    }

    fn rps_hull() -> RestrictedPolicySpace {
        RestrictedPolicySpace::ConvexHullGlobal(vec![one(&[0.5, 0.5, 0.0]), one(&[0.0, 0.5, 0.5])])
    }

    #[test]
    fn pinned_coordinate_membership() {
        let space = paper_half();
        assert!(space.contains(&one(&[0.25, 0.5, 0.25]), 1e-9));
        assert!(!space.contains(&one(&[1.0 / 3.0; 3]), 1e-9));
    }

    #[test]
    fn global_hull_membership() {
        let space = rps_hull();
        assert!(space.contains(&one(&[1.0 / 3.0, 0.5, 1.0 / 6.0]), 1e-9));
        assert!(!space.contains(&one(&[1.0 / 3.0; 3]), 1e-9));
    }

    #[test]
    fn pinned_projection() {
        let p = paper_half().project(&one(&[1.0, 0.0, 0.0])).unwrap();
        assert!(linalg::max_abs_diff(p.row(0).probs(), &[0.5, 0.5, 0.0]) < 1e-12);
    }

    #[test]
    fn state_uniform_projection_averages_states() {
        let input = Policy::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let p = RestrictedPolicySpace::StateUniform.project(&input).unwrap();
        for s in 0..2 {
            assert!(linalg::max_abs_diff(p.row(s).probs(), &[0.5, 0.5]) < 1e-12);
        }
    }

    #[test]
    fn projection_keeps_members() {
        let member = one(&[1.0 / 3.0, 0.5, 1.0 / 6.0]);
        let p = rps_hull().project(&member).unwrap();
        assert!(p.distance_max(&member) < 1e-10);
    }

    #[test]
    fn deterministic_projection_is_unsupported() {
        let err = RestrictedPolicySpace::DeterministicOnly.project(&one(&[0.5, 0.5, 0.0]));
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn probes_match_flags() {
        let shape = Shape::new(3, 3);
        let singleton = RestrictedPolicySpace::Singleton(Policy::uniform(3, 3));
        assert!(convexity_probe(&RestrictedPolicySpace::StateUniform, shape, 200, 1));
        assert!(convexity_probe(&singleton, shape, 50, 1));
        assert!(!convexity_probe(&RestrictedPolicySpace::DeterministicOnly, rps_shape(), 200, 1));
        assert!(!statewise_blend_probe(&RestrictedPolicySpace::StateUniform, shape, 50, 2));
        assert!(statewise_blend_probe(&RestrictedPolicySpace::Full, shape, 50, 2));
    }

    #[test]
    fn bad_pins_are_rejected() {
        let shape = rps_shape();
        let over = RestrictedPolicySpace::FixedCoordinates(vec![
            Pin { state: 0, action: 0, prob: 0.7 },
            Pin { state: 0, action: 1, prob: 0.7 },
        ]);
        assert!(over.check(shape).is_err());
        let out = RestrictedPolicySpace::FixedCoordinates(vec![Pin { state: 1, action: 0, prob: 0.1 }]);
        assert!(out.check(shape).is_err());
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(simplex_grid(3, 4).len(), 15);
        let grid = RestrictedPolicySpace::DeterministicOnly.grid(rps_shape(), 10);
        assert_eq!(grid.len(), 3);
        let grid = rps_hull().grid(rps_shape(), 4);
        assert_eq!(grid.len(), 5);
        assert!(grid.iter().all(|g| rps_hull().contains(&g.policy, 1e-12)));
    }
}
