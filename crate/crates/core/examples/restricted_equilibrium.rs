//! Restricted equilibria of matrix games through their implicit games.

use sgl::experiments::{blotto_row_generators, rps_column_hull, BlottoExtras};
use sgl::game::{blotto_4_3, rps};
use sgl::restrictions::RestrictedPolicySpace;
use sgl::solvers::restricted_equilibrium_via_implicit;

fn main() -> sgl::Result<()> {
    let spaces = [
        RestrictedPolicySpace::Full,
        RestrictedPolicySpace::ConvexHullGlobal(rps_column_hull()),
    ];
    let eq = restricted_equilibrium_via_implicit(&rps(), &spaces)?;
    println!("restricted RPS: value {:.12}", eq.value());
    println!("  row {:?}", eq.joint.policy(0).row(0).probs());
    println!("  col {:?}", eq.joint.policy(1).row(0).probs());
    println!("  max gap {:.1e}", eq.certificate.max_gap());

    for extras in [BlottoExtras::IndependentUniform, BlottoExtras::UniformOverSplits] {
        let spaces = [
            RestrictedPolicySpace::ConvexHullGlobal(blotto_row_generators(extras)),
            RestrictedPolicySpace::Full,
        ];
        let eq = restricted_equilibrium_via_implicit(&blotto_4_3(), &spaces)?;
        println!("restricted Blotto ({extras:?}): value {:.12}", eq.value());
        println!("  generator weights {:?}", eq.solution.row.probs());
    }
    Ok(())
}
