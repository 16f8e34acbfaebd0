use serde::Serialize;

use crate::error::{Error, Result};
use crate::qudit::{computational_basis, fourier_basis, qutrit_three_basis_set, Basis};

/// Which prepare-and-measure protocol is under attack.
///
/// Two bases are available in any dimension (computational + Fourier);
/// three bases only for qutrits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ProtocolSpec {
    dim: usize,
    bases_count: usize,
}

impl ProtocolSpec {
    pub fn new(dim: usize, bases_count: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        match (dim, bases_count) {
            (_, 2) | (3, 3) => Ok(ProtocolSpec { dim, bases_count }),
            _ => Err(Error::UnsupportedProtocol {
                dim,
                bases: bases_count,
            }),
        }
    }

    pub fn two_bases(dim: usize) -> Result<Self> {
        Self::new(dim, 2)
    }

    pub fn qutrit_three_bases() -> Self {
        ProtocolSpec {
            dim: 3,
            bases_count: 3,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bases_count(&self) -> usize {
        self.bases_count
    }

    pub fn is_three_basis(&self) -> bool {
        self.bases_count == 3
    }

    /// `(d-1)/d`, the disturbance at which Bob's outcome is uniform.
    pub fn max_disturbance(&self) -> f64 {
        (self.dim as f64 - 1.0) / self.dim as f64
    }

    /// The protocol bases, computational basis first.
    pub fn bases(&self) -> Vec<Basis> {
        if self.is_three_basis() {
            qutrit_three_basis_set().into()
        } else {
            vec![
                computational_basis(self.dim).expect("dim validated"),
                fourier_basis(self.dim).expect("dim validated"),
            ]
        }
    }
}
