//! Runs a built-in experiment and prints its summary.
//!
//! cargo run --release --example reproduce -- rps-restricted [iterations]

use sgl::experiments::{reproduce, Experiment, ReproductionSpec};

fn main() -> sgl::Result<()> {
    let mut args = std::env::args().skip(1);
    let experiment: Experiment = args.next().unwrap_or_else(|| "fact1".into()).parse()?;
    let iterations = args.next().map(|s| s.parse().expect("iterations")).unwrap_or(100_000);
    let out = std::env::temp_dir().join(format!("sgl-{experiment}"));
    let summary = reproduce(&ReproductionSpec {
        experiment,
        seed: 0,
        iterations,
        out: out.clone(),
    })?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    println!("files in {}", out.display());
    Ok(())
}
