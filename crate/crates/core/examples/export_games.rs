//! Writes the built-in games, a few policies and restricted spaces as
//! JSON files the CLI accepts.
//!
//! cargo run --example export_games -- <dir>

use std::path::PathBuf;

use sgl::experiments::rps_column_hull;
use sgl::game::{bach_stravinsky, blotto_4_3, fact5_default, rps, JointPolicy, Policy};
use sgl::io;
use sgl::restrictions::RestrictedPolicySpace;

fn main() -> sgl::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "games".into()));
    std::fs::create_dir_all(&dir)?;
    for (name, game) in [
        ("rps", rps()),
        ("bos", bach_stravinsky()),
        ("blotto", blotto_4_3()),
        ("fact5", fact5_default()),
    ] {
        io::save_game(&dir.join(format!("{name}.json")), &game)?;
    }
    let g = rps();
    let rock = JointPolicy::new(vec![Policy::pure(3, &[0]), Policy::pure(3, &[0])]);
    io::write_json(&dir.join("pure_rock_rock.json"), &io::joint_to_json(&g, &rock))?;
    let hull = RestrictedPolicySpace::ConvexHullGlobal(rps_column_hull());
    io::write_json(&dir.join("rps_column_hull.json"), &io::space_to_json(&g, &hull))?;
    let uniform = RestrictedPolicySpace::StateUniform;
    io::write_json(&dir.join("state_uniform.json"), &io::space_to_json(&fact5_default(), &uniform))?;
    println!("wrote games to {}", dir.display());
    Ok(())
}
