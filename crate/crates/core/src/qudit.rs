//! Small dense complex linear algebra and the protocol bases.
//!
//! Everything here is sized for d <= 16 and joint spaces of a few hundred
//! amplitudes, so plain `Vec<Complex64>` storage is enough.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Index;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default tolerance for orthonormality and unbiasedness checks.
pub const BASIS_TOL: f64 = 1e-12;

/// A complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec(Vec<Complex64>);

impl CVec {
    pub fn new(entries: Vec<Complex64>) -> Self {
        CVec(entries)
    }

    pub fn zeros(len: usize) -> Self {
        CVec(vec![Complex64::new(0.0, 0.0); len])
    }

    /// One-hot vector `e_index` of length `len`.
    pub fn basis_state(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(entries: &[f64]) -> Self {
        CVec(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVec) -> Complex64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVec]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, CVec::len);
        let mut m = Self::zeros(rows, cols);
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for r in 0..rows {
                m.set(r, c, col[r]);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Complex64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn column(&self, c: usize) -> CVec {
        CVec((0..self.rows).map(|r| self.get(r, c)).collect())
    }

    pub fn mul_vec(&self, v: &CVec) -> Result<CVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let out = (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(v.entries()).map(|(a, b)| a * b).sum()
            })
            .collect();
        Ok(CVec(out))
    }

    /// `self† · self`, the Gram matrix of the columns.
    pub fn gram(&self) -> CMat {
        let mut g = CMat::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in 0..self.cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..self.rows {
                    acc += self.get(r, i).conj() * self.get(r, j);
                }
                g.set(i, j, acc);
            }
        }
        g
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Reduced density matrix of the first factor of a bipartite pure state.
///
/// `psi` is indexed as `a * dim_b + b`.
pub fn reduce_to_first(psi: &CVec, dim_a: usize, dim_b: usize) -> Result<CMat> {
    if psi.len() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            found: psi.len(),
        });
    }
    let mut rho = CMat::zeros(dim_a, dim_a);
    for x in 0..dim_a {
        for y in 0..dim_a {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim_b {
                acc += psi[x * dim_b + k] * psi[y * dim_b + k].conj();
            }
            rho.set(x, y, acc);
        }
    }
    Ok(rho)
}

/// An ordered orthonormal basis of C^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    dim: usize,
    vectors: Vec<CVec>,
    label: String,
}

impl Basis {
    /// Assemble a basis, checking that the vectors are orthonormal to `BASIS_TOL`.
    pub fn new(label: impl Into<String>, vectors: Vec<CVec>) -> Result<Self> {
        let dim = vectors.len();
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        let basis = Basis {
            dim,
            vectors,
            label: label.into(),
        };
        let residual = basis.orthonormality_residual();
        if residual > BASIS_TOL {
            return Err(Error::InvalidArgument(format!(
                "basis '{}' is not orthonormal (residual {residual:e})",
                basis.label
            )));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &CVec {
        &self.vectors[i]
    }

    /// `max |⟨v_i|v_j⟩ - δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (d = {})", self.label, self.dim)?;
        for (i, v) in self.vectors.iter().enumerate() {
            write!(f, "  |{i}> = (")?;
            for (k, z) in v.entries().iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f, ")")?;
        }
        Ok(())
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// The standard basis e_0, ..., e_{d-1}.
pub fn computational_basis(d: usize) -> Result<Basis> {
    check_dim(d)?;
    let vectors = (0..d).map(|i| CVec::basis_state(d, i)).collect();
    Basis::new("computational", vectors)
}

/// Discrete Fourier transform of the computational basis:
/// vector `l` has entries `exp(2πi·k·l/d)/√d`.
pub fn fourier_basis(d: usize) -> Result<Basis> {
    check_dim(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    let vectors = (0..d)
        .map(|l| {
            CVec::new(
                (0..d)
                    .map(|k| {
                        // reduce k*l mod d first so large d keeps full phase accuracy
                        let phase = 2.0 * PI * ((k * l) % d) as f64 / d as f64;
                        Complex64::from_polar(norm, phase)
                    })
                    .collect(),
            )
        })
        .collect();
    Basis::new("fourier", vectors)
}

/// The real ququart basis (Walsh-Hadamard type) used for the d = 4 two-basis protocol:
/// (1,1,1,1)/2, (1,-1,1,-1)/2, (1,-1,-1,1)/2, (1,1,-1,-1)/2.
pub fn ququart_real_basis() -> Basis {
    let vectors = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
    ]
    .iter()
    .map(|row| CVec::from_real(&row.map(|x| x / 2.0)))
    .collect();
    Basis::new("walsh", vectors).expect("hard-coded basis is orthonormal")
}

/// `α = exp(2πi/3)`.
pub fn alpha() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Basis whose vector `l` is `(1, .., phase at position l, .., 1)/√3`.
fn qutrit_phase_basis(label: &str, phase: Complex64) -> Basis {
    let norm = 1.0 / 3f64.sqrt();
    let vectors = (0..3)
        .map(|l| {
            CVec::new(
                (0..3)
                    .map(|k| {
                        if k == l {
                            phase * norm
                        } else {
                            Complex64::new(norm, 0.0)
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    Basis::new(label, vectors).expect("phase basis is orthonormal")
}

/// The three qutrit bases of the three-basis protocol:
/// computational, the α-weighted basis and its α* counterpart.
pub fn qutrit_three_basis_set() -> [Basis; 3] {
    [
        computational_basis(3).expect("d = 3 is valid"),
        qutrit_phase_basis("alpha", alpha()),
        qutrit_phase_basis("alpha-star", alpha().conj()),
    ]
}

/// True iff every cross overlap `|⟨a_i|b_j⟩|` is within `tol` of `1/√d`.
pub fn is_mutually_unbiased(a: &Basis, b: &Basis, tol: f64) -> Result<bool> {
    Ok(unbiasedness_residual(a, b)? <= tol)
}

/// `max | |⟨a_i|b_j⟩| - 1/√d|` over all pairs.
pub fn unbiasedness_residual(a: &Basis, b: &Basis) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    let target = 1.0 / (a.dim as f64).sqrt();
    let mut worst: f64 = 0.0;
    for va in &a.vectors {
        for vb in &b.vectors {
            worst = worst.max((va.inner(vb).norm() - target).abs());
        }
    }
    Ok(worst)
}

/// Serializable view of a complex number.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexRepr {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        ComplexRepr { re: z.re, im: z.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn computational_is_one_hot() {
        let b = computational_basis(3).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let want = if i == k { 1.0 } else { 0.0 };
                assert_eq!(b.vector(i)[k], c(want, 0.0));
            }
        }
        assert_eq!(computational_basis(4).unwrap().vectors().len(), 4);
        assert_eq!(computational_basis(1), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn fourier_qutrit_vector_one() {
        let f = fourier_basis(3).unwrap();
        let n = 1.0 / 3f64.sqrt();
        let v = f.vector(1);
        assert!(close(v[0], c(n, 0.0)));
        assert!(close(v[1], alpha() * n));
        assert!(close(v[2], alpha().conj() * n));
    }

    #[test]
    fn fourier_qubit_is_hadamard() {
        let f = fourier_basis(2).unwrap();
        let n = 1.0 / 2f64.sqrt();
        assert!(close(f.vector(1)[0], c(n, 0.0)));
        assert!(close(f.vector(1)[1], c(-n, 0.0)));
    }

    #[test]
    fn ququart_bases_are_both_unbiased() {
        let comp = computational_basis(4).unwrap();
        let f = fourier_basis(4).unwrap();
        let n = 0.5;
        assert!(close(f.vector(1)[1], c(0.0, n)));
        assert!(close(f.vector(1)[2], c(-n, 0.0)));
        let w = ququart_real_basis();
        assert!(is_mutually_unbiased(&comp, &f, BASIS_TOL).unwrap());
        assert!(is_mutually_unbiased(&comp, &w, BASIS_TOL).unwrap());
    }

    #[test]
    fn three_basis_set_entries() {
        let [_, second, third] = qutrit_three_basis_set();
        let n = 1.0 / 3f64.sqrt();
        assert!(close(second.vector(0)[0], alpha() * n));
        assert!(close(second.vector(0)[1], c(n, 0.0)));
        assert!(close(third.vector(0)[0], alpha().conj() * n));
        assert!(close(third.vector(0)[2], c(n, 0.0)));
    }

    #[test]
    fn three_basis_overlaps_are_one_over_sqrt3() {
        let set = qutrit_three_basis_set();
        let target = 1.0 / 3f64.sqrt();
        for a in 0..3 {
            for b in (a + 1)..3 {
                for va in set[a].vectors() {
                    for vb in set[b].vectors() {
                        assert!((va.inner(vb).norm() - target).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn unbiasedness_examples() {
        let comp3 = computational_basis(3).unwrap();
        assert!(is_mutually_unbiased(&comp3, &fourier_basis(3).unwrap(), BASIS_TOL).unwrap());
        assert!(!is_mutually_unbiased(&comp3, &comp3, BASIS_TOL).unwrap());
        let comp5 = computational_basis(5).unwrap();
        assert!(is_mutually_unbiased(&fourier_basis(5).unwrap(), &comp5, BASIS_TOL).unwrap());
        assert!(matches!(
            is_mutually_unbiased(&comp3, &comp5, BASIS_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fourier_family_d2_to_10() {
        for d in 2..=10 {
            let f = fourier_basis(d).unwrap();
            let comp = computational_basis(d).unwrap();
            assert!(f.orthonormality_residual() <= 1e-12, "d = {d}");
            assert!(
                unbiasedness_residual(&comp, &f).unwrap() <= 1e-12,
                "d = {d}"
            );
        }
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let v = vec![CVec::from_real(&[1.0, 0.0]), CVec::from_real(&[1.0, 0.0])];
        assert!(matches!(
            Basis::new("bad", v),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn reduce_product_state() {
        // |1> ⊗ (|0>+|1>)/√2 traces down to |1><1|
        let n = 1.0 / 2f64.sqrt();
        let psi = CVec::from_real(&[0.0, 0.0, n, n]);
        let rho = reduce_to_first(&psi, 2, 2).unwrap();
        assert!(close(rho.get(1, 1), c(1.0, 0.0)));
        assert!(close(rho.get(0, 0), c(0.0, 0.0)));
    }

    proptest::proptest! {
        #[test]
        fn inner_product_conjugate_symmetric(
            re in proptest::collection::vec(-1.0f64..1.0, 8),
            im in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let a = CVec::new((0..4).map(|k| c(re[k], im[k])).collect());
            let b = CVec::new((4..8).map(|k| c(re[k], im[k])).collect());
            let ab = a.inner(&b);
            let ba = b.inner(&a);
            proptest::prop_assert!((ab - ba.conj()).norm() <= 1e-15);
        }
    }
}
