//! All equilibria of Bach or Stravinsky by support enumeration.

use sgl::game::{bach_stravinsky, policy_value};
use sgl::solvers::support_enumeration_bimatrix;

fn main() -> sgl::Result<()> {
    let game = bach_stravinsky();
    let found = support_enumeration_bimatrix(&game, 5)?;
    for joint in found.joint_policies() {
        println!(
            "row {:?} col {:?} values {:?}",
            joint.policy(0).row(0).probs(),
            joint.policy(1).row(0).probs(),
            policy_value(&game, &joint)?
        );
    }
    println!("degenerate: {}", found.degenerate);
    Ok(())
}
