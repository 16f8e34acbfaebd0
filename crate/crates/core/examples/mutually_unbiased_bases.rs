//! The protocol bases: computational and Fourier in any dimension, the real
//! ququart basis, and the three mutually unbiased qutrit bases.
//!
//!     cargo run --example mutually_unbiased_bases

use mub_eve::qudit::{
    computational_basis, fourier_basis, ququart_real_basis, qutrit_three_basis_set,
    unbiasedness_residual,
};

fn main() -> mub_eve::Result<()> {
    for d in 2..=6 {
        let z = computational_basis(d)?;
        let f = fourier_basis(d)?;
        println!(
            "d = {d}: orthonormality {:.1e}, max ||<z|f>|^2 - 1/d| = {:.1e}",
            f.orthonormality_residual(),
            unbiasedness_residual(&z, &f)?
        );
    }

    let walsh = ququart_real_basis();
    println!("\n{walsh}");
    println!(
        "unbiased with the computational basis: {:.1e}",
        unbiasedness_residual(&computational_basis(4)?, &walsh)?
    );

    let [z, a, b] = qutrit_three_basis_set();
    println!("\n{a}{b}");
    for (x, y) in [(&z, &a), (&z, &b), (&a, &b)] {
        println!(
            "{} vs {}: {:.1e}",
            x.label(),
            y.label(),
            unbiasedness_residual(x, y)?
        );
    }
    Ok(())
}
