//! WoLF-PHC and Q-learning agents and self-play.

pub mod config;
pub mod selfplay;
pub mod wolf;

pub use config::{QConfig, Schedule, WolfPhcConfig};
pub use selfplay::{self_play, Checkpoint, LearnerConfig, TrajectoryLog, EPISODE_LENGTH, MAX_CHECKPOINTS};
pub use wolf::{q_learner_step, restricted_wolf_phc_step, wolf_phc_step, LearnerState, QLearnerState, StepInfo};
