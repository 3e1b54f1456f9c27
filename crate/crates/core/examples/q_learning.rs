//! Q-learners in RPS: pure greedy policies never form an equilibrium.

use sgl::game::{rps, JointPolicy, Policy};
use sgl::learners::{self_play, LearnerConfig, QConfig};
use sgl::restrictions::RestrictedPolicySpace;
use sgl::solvers::check_equilibrium;

fn main() -> sgl::Result<()> {
    let game = rps();
    let learners = [LearnerConfig::Q(QConfig::default()), LearnerConfig::Q(QConfig::default())];
    let log = self_play(&game, &learners, 100_000, 3)?;
    let spaces = vec![RestrictedPolicySpace::Full; 2];
    let mut worst = f64::INFINITY;
    let rows: Vec<Vec<_>> = (0..2).map(|i| log.series(i, 0).collect()).collect();
    for (a, b) in rows[0].iter().zip(&rows[1]) {
        let joint = JointPolicy::new(vec![
            Policy::from_rows(vec![a.explicit.clone()])?,
            Policy::from_rows(vec![b.explicit.clone()])?,
        ]);
        worst = worst.min(check_equilibrium(&game, &joint, &spaces, 1e-9)?.max_gap());
    }
    println!("{} checkpoints, smallest max gap {worst}", rows[0].len());
    Ok(())
}
