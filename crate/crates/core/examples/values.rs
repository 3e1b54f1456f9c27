//! Exact values under both reward formulations.

use sgl::game::{
    bellman_residual, fact5_default, policy_value, policy_value_discounted, rps, stationary_distribution,
    JointPolicy, MixedStrategy, Policy, RewardFormulation,
};

fn main() -> sgl::Result<()> {
    let game = fact5_default();
    let joint = JointPolicy::new(vec![
        Policy::stationary(3, MixedStrategy::new(vec![0.3, 0.7])?),
        Policy::stationary(3, MixedStrategy::uniform(2)),
    ]);
    let table = policy_value_discounted(&game, &joint)?;
    for (s, name) in game.states().iter().enumerate() {
        println!("V_row({name}) = {:.6}", table.get(0, s));
    }
    println!("Bellman residual {:.2e}", bellman_residual(&game, &joint, &table)?);

    let average = game.clone().with_formulation(RewardFormulation::Average);
    println!("stationary distribution {:?}", stationary_distribution(&average, &joint)?);
    println!("average reward per player {:?}", policy_value(&average, &joint)?);

    let uniform = JointPolicy::new(vec![Policy::uniform(1, 3), Policy::uniform(1, 3)]);
    println!("RPS at uniform play: {:?}", policy_value(&rps(), &uniform)?);
    Ok(())
}
