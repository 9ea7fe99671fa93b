//! Loads a scenario file and puts analysis next to simulation.
//!
//! cargo run --release --example compare_config -- crates/core/configs/single_side.toml

use hwbeam::scenario::{cmd_compare, parse_config};

fn main() -> hwbeam::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/highway_default.toml").to_string());
    let cfg = parse_config(&path)?;
    let report = cmd_compare(&cfg)?;
    println!("{path}: {} realizations, gate {:?}", report.realizations, report.gate);
    for r in &report.rows {
        println!(
            "  {:<11} analysis {:>10.3}  simulation {:>10.3} +- {:<8.3} rel {:+.4}",
            r.metric, r.analytic, r.simulated_mean, r.ci_half_width, r.relative_error
        );
    }
    Ok(())
}
