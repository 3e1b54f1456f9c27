//! Values, best responses, and restricted equilibria of stochastic games
//! played by limited agents, plus WoLF-PHC self-play.
//!
//! ```
//! use sgl::game::{rps, JointPolicy, Policy, matrix_value};
//!
//! let game = rps();
//! let uniform = JointPolicy::new(vec![Policy::uniform(1, 3), Policy::uniform(1, 3)]);
//! assert_eq!(matrix_value(&game, &uniform).unwrap(), vec![0.0, 0.0]);
//! ```

pub mod error;
pub mod experiments;
pub mod game;
pub mod io;
pub mod linalg;
pub mod learners;
pub mod lp;
pub mod random;
pub mod restrictions;
pub mod solvers;
pub mod tol;

pub use error::{Error, Result};
