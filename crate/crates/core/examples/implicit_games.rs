//! Limitations expressed as implicit games.

use sgl::experiments::rps_column_hull;
use sgl::game::{rps, JointPolicy, Policy};
use sgl::restrictions::{broken_actuator, build_implicit, epsilon_exploration, TauMapping};

fn main() -> sgl::Result<()> {
    let game = rps();
    let tau = TauMapping::hull(&game, 1, &rps_column_hull())?;
    let implicit = build_implicit(&game, tau, None)?;
    println!("row payoffs against the column player's two generators:");
    for a in 0..3 {
        let row: Vec<f64> = (0..2).map(|b| implicit.game.reward(0, 0, a * 2 + b)).collect();
        println!("  {:8} {row:?}", game.action_sets()[0][a]);
    }
    let weights = JointPolicy::new(vec![
        Policy::uniform(1, 3),
        Policy::from_rows(vec![vec![2.0 / 3.0, 1.0 / 3.0]])?,
    ]);
    let explicit = implicit.map_policy(&weights)?;
    println!("weights (2/3, 1/3) play {:?}", explicit.policy(1).row(0).probs());

    let broken = broken_actuator(&game, 0, 2, 0)?;
    println!("row's Scissors acts as Rock: payoff vs Paper {}", broken.game.reward(0, 0, 2 * 3 + 1));
    let noisy = epsilon_exploration(&game, &[0.3, 0.0])?;
    println!("30% exploring Rock vs Scissors: {}", noisy.game.reward(0, 0, 2));
    println!("transition residual {:.1e}", noisy.transition_equation_residual());
    Ok(())
}
