//! Membership, projection and convexity of restricted policy spaces.

use sgl::game::Policy;
use sgl::restrictions::{convexity_probe, statewise_blend_probe, Pin, RestrictedPolicySpace, Shape};

fn main() -> sgl::Result<()> {
    let half_paper = RestrictedPolicySpace::FixedCoordinates(vec![Pin { state: 0, action: 1, prob: 0.5 }]);
    let p = Policy::from_rows(vec![vec![0.25, 0.5, 0.25]])?;
    println!("(1/4,1/2,1/4) pays Paper half the time: {}", half_paper.contains(&p, 1e-9));
    let rock = Policy::pure(3, &[0]);
    println!("projection of Rock: {:?}", half_paper.project(&rock)?.row(0).probs());

    let hull = RestrictedPolicySpace::ConvexHullGlobal(vec![
        Policy::from_rows(vec![vec![0.5, 0.5, 0.0]])?,
        Policy::from_rows(vec![vec![0.0, 0.5, 0.5]])?,
    ]);
    let q = Policy::from_rows(vec![vec![1.0 / 3.0, 0.5, 1.0 / 6.0]])?;
    println!("(1/3,1/2,1/6) in hull: {}", hull.contains(&q, 1e-9));

    let two_states = Shape::new(2, 2);
    let spaces = [
        ("state-uniform", RestrictedPolicySpace::StateUniform),
        ("deterministic", RestrictedPolicySpace::DeterministicOnly),
        ("full", RestrictedPolicySpace::Full),
    ];
    for (name, space) in spaces {
        println!(
            "{name:14} convex {} (probe {}), statewise convex {} (probe {})",
            space.is_convex(two_states),
            convexity_probe(&space, two_states, 200, 1),
            space.is_statewise_convex(two_states),
            statewise_blend_probe(&space, two_states, 200, 1),
        );
    }
    Ok(())
}
