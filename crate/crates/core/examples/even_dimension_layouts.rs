//! For even d the alternative error-set listing (reflections (i, j - i) for odd
//! labels) is only symmetric for a real ququart basis; the cyclic layout works
//! with the Fourier basis in every dimension.
//!
//!     cargo run --example even_dimension_layouts

use mub_eve::attack::{build_isometry, disturbance_per_state, AttackParams, ErrorLayout};
use mub_eve::optimize::w_bar;
use mub_eve::qudit::{fourier_basis, ququart_real_basis, Basis};
use mub_eve::ProtocolSpec;

fn spread(params: &AttackParams, basis: &Basis) -> mub_eve::Result<f64> {
    let iso = build_isometry(params)?;
    let ds = disturbance_per_state(&iso, basis)?;
    Ok(ds
        .iter()
        .map(|x| (x - params.disturbance()).abs())
        .fold(0.0, f64::max))
}

fn main() -> mub_eve::Result<()> {
    let dist = 0.2;
    for layout in [ErrorLayout::CyclicShift, ErrorLayout::Listing] {
        let params = AttackParams::new(ProtocolSpec::two_bases(4)?, dist, w_bar(4, dist)?)?
            .with_layout(layout);
        println!(
            "{layout:?}: max |D_state - D| fourier {:.2e}, walsh {:.2e}",
            spread(&params, &fourier_basis(4)?)?,
            spread(&params, &ququart_real_basis())?
        );
        let partition = layout.partition(4)?;
        for block in 1..4 {
            let pairs: Vec<String> = partition
                .iter()
                .filter(|(_, &b)| b == block)
                .map(|((i, j), _)| format!("({i},{j})"))
                .collect();
            println!("  block {block}: {}", pairs.join(" "));
        }
    }
    Ok(())
}
