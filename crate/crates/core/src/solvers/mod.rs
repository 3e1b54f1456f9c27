//! Equilibria, restricted best responses, and regret certificates.

mod best_response;
mod equilibrium;
mod minimax;
mod support;
mod sweep;

pub use best_response::{
    best_response_convexity_test, restricted_best_response, BestResponse, OptimalSet,
    MAX_PURE_POLICIES,
};
pub use equilibrium::{
    best_response_dynamics, check_equilibrium, enumerate_deterministic,
    restricted_equilibrium_via_implicit, EquilibriumCertificate, ImplicitEquilibrium,
    MAX_PURE_JOINT,
};
pub use minimax::{minimax_matrix, minimax_zero_sum_matrix, row_payoffs, MinimaxSolution};
pub use support::{support_enumeration_bimatrix, SupportEnumeration};
pub use sweep::{sweep_existence, SweepPoint, SweepResult, MAX_SWEEP_DIMENSION};
pub(crate) use sweep::csv_error;
