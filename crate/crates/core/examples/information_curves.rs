//! Bob's and Eve's information against the disturbance, with the crossing.
//! Pass `--csv` to print the full table for plotting.
//!
//!     cargo run --example information_curves -- [--csv]

use mub_eve::table::CurveTable;
use mub_eve::ProtocolSpec;

fn main() -> mub_eve::Result<()> {
    let csv = std::env::args().any(|a| a == "--csv");
    for spec in [
        ProtocolSpec::two_bases(3)?,
        ProtocolSpec::qutrit_three_bases(),
        ProtocolSpec::two_bases(4)?,
    ] {
        let table = CurveTable::compute(spec, 0.0, spec.max_disturbance(), 301)?;
        if csv {
            print!("{}", table.to_csv());
            continue;
        }
        println!("d = {}, {} bases", spec.dim(), spec.bases_count());
        println!("{:>8} {:>10} {:>10} {:>10}", "D", "w_opt", "I_AB", "I_AE");
        for row in table.rows().iter().step_by(30) {
            println!(
                "{:>8.4} {:>10.6} {:>10.6} {:>10.6}",
                row.disturbance, row.w_opt, row.i_ab, row.i_ae
            );
        }
        if let Some(k) = table.crossing() {
            let (a, b) = (&table.rows()[k], &table.rows()[k + 1]);
            println!(
                "curves cross in D ∈ [{:.4}, {:.4}]\n",
                a.disturbance, b.disturbance
            );
        }
    }
    Ok(())
}
