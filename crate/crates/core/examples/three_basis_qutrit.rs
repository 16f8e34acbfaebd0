//! Qutrit protocol with all three mutually unbiased bases. There is no closed
//! form for Eve's best overlap, so it is found numerically and checked against
//! a dense scan.
//!
//!     cargo run --example three_basis_qutrit

use mub_eve::info::{i_ab, mu_nu_threebasis};
use mub_eve::optimize::{critical_disturbance, maximize_w, maximize_w_with, Method};
use mub_eve::ProtocolSpec;

fn main() -> mub_eve::Result<()> {
    let three = ProtocolSpec::qutrit_three_bases();
    let two = ProtocolSpec::two_bases(3)?;
    println!(
        "{:>6} {:>10} {:>8} {:>8} {:>10} {:>10} {:>9}",
        "D", "w_opt", "mu", "nu", "I_AE(3)", "I_AE(2)", "scan gap"
    );
    for k in 1..=12 {
        let dist = 0.05 * k as f64;
        let opt = maximize_w(&three, dist, 1e-12)?;
        let scan = maximize_w_with(&three, dist, 1e-12, Method::GridScan)?;
        let (mu, nu) = mu_nu_threebasis(dist, opt.w_opt)?;
        println!(
            "{dist:>6.2} {:>10.6} {mu:>8.5} {nu:>8.5} {:>10.6} {:>10.6} {:>9.1e}",
            opt.w_opt,
            opt.i_ae_opt,
            maximize_w(&two, dist, 1e-12)?.i_ae_opt,
            scan.i_ae_opt - opt.i_ae_opt
        );
    }
    let c3 = critical_disturbance(&three, 1e-12)?;
    let c2 = critical_disturbance(&two, 1e-12)?;
    println!(
        "\ncritical disturbance: three bases {:.6}, two bases {:.6} (I_AB there: {:.6})",
        c3.critical,
        c2.critical,
        i_ab(3, c3.critical)?
    );
    Ok(())
}
