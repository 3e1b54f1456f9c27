//! Restricted best responses and the convexity of best-response sets.

use sgl::game::{fact5_default, rps, MixedStrategy, Policy};
use sgl::restrictions::RestrictedPolicySpace;
use sgl::solvers::{best_response_convexity_test, restricted_best_response, OptimalSet};

fn main() -> sgl::Result<()> {
    let skewed = Policy::from_rows(vec![vec![0.5, 0.3, 0.2]])?;
    let br = restricted_best_response(&rps(), 1, &[skewed], &RestrictedPolicySpace::Full)?;
    println!("column vs (1/2, 3/10, 1/5): {:?} value {}", br.policy.row(0).probs(), br.value);

    let game = fact5_default();
    for u in [0.3, 0.5, 0.7] {
        let row = Policy::stationary(3, MixedStrategy::new(vec![u, 1.0 - u])?);
        let br = restricted_best_response(&game, 1, &[row.clone()], &RestrictedPolicySpace::StateUniform)?;
        let optima = match &br.optimal_set {
            OptimalSet::Sampled(list) => list.len(),
            OptimalSet::Face(face) => face.iter().map(Vec::len).product(),
        };
        let convex = best_response_convexity_test(&game, 1, &[row], &RestrictedPolicySpace::StateUniform, 20, 0)?;
        println!(
            "u = {u}: column plays L with prob {:.3}, {optima} optimal point(s), best responses convex: {convex}",
            br.policy.prob(0, 0)
        );
    }
    Ok(())
}
