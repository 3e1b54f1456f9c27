//! WoLF-PHC self-play in RPS against a restricted opponent.
//!
//! cargo run --release --example wolf_selfplay -- [iterations] [trajectory.csv]

use sgl::experiments::rps_column_hull;
use sgl::game::rps;
use sgl::learners::{self_play, LearnerConfig, WolfPhcConfig};

fn main() -> sgl::Result<()> {
    let iterations = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("iterations"))
        .unwrap_or(200_000);
    let config = WolfPhcConfig::default();
    let learners = [
        LearnerConfig::WolfPhc(config),
        LearnerConfig::RestrictedWolfPhc {
            config,
            generators: rps_column_hull(),
        },
    ];
    let log = self_play(&rps(), &learners, iterations, 7)?;
    println!("row policy      {:?}", log.final_mean_policy(0, 0, 0.1, true));
    println!("column weights  {:?}", log.final_mean_policy(1, 0, 0.1, false));
    println!("row average reward over the last 10%: {:.4} (1/6 at equilibrium)", log.final_average_reward(0, 0.1));
    if let Some(path) = std::env::args().nth(2) {
        log.write_csv(std::fs::File::create(path)?)?;
    }
    Ok(())
}
