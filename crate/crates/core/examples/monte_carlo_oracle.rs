//! Simulate attacked protocol rounds and compare the tallies with the closed
//! forms.
//!
//!     cargo run --release --example monte_carlo_oracle -- [dim] [D] [rounds]

use mub_eve::mc::{compare_to_analytic, simulate, SimConfig, WChoice};
use mub_eve::ProtocolSpec;

fn main() -> mub_eve::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let dist: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.1);
    let rounds: u64 = args
        .next()
        .and_then(|a| a.parse().ok())
        .unwrap_or(2_000_000);

    let spec = ProtocolSpec::two_bases(d)?;
    let config = SimConfig::new(spec, dist, WChoice::Auto, rounds, 2024).with_shards(8);
    let stats = simulate(&config)?;
    println!("d = {d}, D = {dist}, w = {:.6}, {rounds} rounds", stats.w);
    println!("rounds per basis: {:?}", stats.rounds_per_basis);

    let verdict = compare_to_analytic(&stats, &spec, dist, stats.w)?;
    println!(
        "\n{:<18} {:>10} {:>10} {:>10} {:>7}",
        "check", "observed", "expected", "sigma", "z"
    );
    for c in &verdict.checks {
        println!(
            "{:<18} {:>10.6} {:>10.6} {:>10.2e} {:>7.2}",
            c.name, c.observed, c.expected, c.std_error, c.z
        );
    }
    println!("\nverdict: {}", if verdict.pass { "pass" } else { "FAIL" });
    println!(
        "Eve's block always matched Bob's error set: {}",
        stats.partition_mismatches == 0
    );
    Ok(())
}
