//! Grid search for a restricted equilibrium in `fact5_default` with
//! state-uniform players. Pass a resolution (default 0.02).

use sgl::game::fact5_default;
use sgl::restrictions::RestrictedPolicySpace;
use sgl::solvers::sweep_existence;

fn main() -> sgl::Result<()> {
    let resolution = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("resolution"))
        .unwrap_or(0.02);
    let spaces = vec![RestrictedPolicySpace::StateUniform; 2];
    let sweep = sweep_existence(&fact5_default(), &spaces, resolution, 0.0)?;
    println!("{} grid points", sweep.points.len());
    println!("smallest max gap {:.6} at {:?}", sweep.min_max_gap, sweep.best().params);
    println!("refinement bound {:.6}, margin {:.6}", sweep.refinement_bound, sweep.margin());
    Ok(())
}
