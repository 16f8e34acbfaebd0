//! Critical disturbance for d = 2..10: bisection with the analytic optimum,
//! the closed form, and bisection with a global scan over w.
//!
//! From d = 5 on the scan finds a lower value: near the closed-form point an
//! attack with w close to 1 already gives Eve more information than Bob.
//!
//!     cargo run --release --example critical_disturbances

use mub_eve::optimize::{critical_disturbance, critical_disturbance_with, d_c_closed_form, Method};
use mub_eve::ProtocolSpec;

fn main() -> mub_eve::Result<()> {
    println!(
        "{:>3} {:>12} {:>12} {:>12}",
        "d", "bisection", "closed form", "global scan"
    );
    for d in 2..=10 {
        let spec = ProtocolSpec::two_bases(d)?;
        let analytic = critical_disturbance(&spec, 1e-12)?;
        let scan = critical_disturbance_with(&spec, 1e-10, Method::GridScan)?;
        println!(
            "{d:>3} {:>12.8} {:>12.8} {:>12.8}",
            analytic.critical,
            d_c_closed_form(d)?,
            scan.critical
        );
    }
    let three = critical_disturbance(&ProtocolSpec::qutrit_three_bases(), 1e-12)?;
    println!("\nqutrit, three bases: {:.6}", three.critical);
    Ok(())
}
