//! Build Eve's optimal attack for a qutrit and audit it: coefficients, the
//! isometry, per-state disturbance and the ancilla overlap structure.
//!
//!     cargo run --example attack_construction -- [dim] [D]

use mub_eve::attack::{build_eve_states, build_isometry, disturbance_per_state, AttackParams};
use mub_eve::optimize::w_bar;
use mub_eve::verify::verify_attack;
use mub_eve::ProtocolSpec;

fn main() -> mub_eve::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let dist: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.1);

    let spec = ProtocolSpec::two_bases(d)?;
    let w = w_bar(d, dist)?;
    let params = AttackParams::new(spec, dist, w)?;
    println!("d = {d}, D = {dist}, w = {w:.6}, s = {:.6}", params.s());

    let states = build_eve_states(&params)?;
    let (u, v, r, q) = states.coeffs();
    println!(
        "no-error states: u = {u:.6}, v = {v:.6}  (u^2 = {:.6})",
        u * u
    );
    println!(
        "error states:    r = {r:.6}, q = {q:.6}  (r^2 = {:.6})",
        r * r
    );

    let iso = build_isometry(&params)?;
    println!("\n|V^dag V - 1| = {:.2e}", iso.isometry_residual());
    for basis in spec.bases() {
        let ds = disturbance_per_state(&iso, &basis)?;
        let shown: Vec<String> = ds.iter().map(|x| format!("{x:.12}")).collect();
        println!("{:>13}: {}", basis.label(), shown.join("  "));
    }

    let p = states.profile();
    println!(
        "\noverlaps: w = {:.6}, s = {:.6}, max |x|,|y|,|z|,|t| = {:.1e}",
        p.w,
        p.s,
        p.max_vanishing()
    );

    let report = verify_attack(&spec, dist, w, params.layout());
    println!("\nall checks pass: {}", report.pass);
    Ok(())
}
