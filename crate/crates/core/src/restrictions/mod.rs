//! Restricted policy spaces and implicit games.
//!
//! A restricted space is the set of policies a limited player can actually
//! play. An implicit game re-expresses a limited player's choices as
//! actions of a new game whose dynamics are tau-expectations of the
//! original ones.

pub mod hull;
mod implicit;
mod space;

pub use implicit::{
    broken_actuator, build_implicit, epsilon_exploration, reward_shaping, ImplicitGame, TauMapping,
};
pub use space::{
    convexity_probe, simplex_grid, statewise_blend_probe, GridPoint, Pin, RestrictedPolicySpace,
    Shape,
};
