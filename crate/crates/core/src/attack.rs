//! Eve's symmetric incoherent attack.
//!
//! The attack sends Alice's basis state `|i⟩` to
//!
//! ```text
//! √(1-D) |i⟩|E_ii⟩ + √(D/(d-1)) Σ_{j≠i} |j⟩|E_ij⟩
//! ```
//!
//! Eve's d² output states live in a d²-dimensional ancilla split into d
//! orthogonal coordinate blocks of size d. Block 0 holds the "no error"
//! states `E_ii`; each error block holds the d states of one orthogonal set.
//! Inside a block, states are `major·e_p + minor·Σ_{k≠p} e_k` where `p` is the
//! sender symbol `i`, so all pairwise overlaps in the block are equal and
//! every overlap across blocks is exactly zero.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{check_range, Error, Result};
use crate::protocol::ProtocolSpec;
use crate::qudit::{reduce_to_first, Basis, CMat, CVec};

/// Radicands above this negative value are clamped to zero.
pub const RADICAND_SLACK: f64 = 1e-14;

/// Which pairs `(i, j)`, `i ≠ j`, share an error block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorLayout {
    /// Block `(j - i) mod d`. Compatible with the Fourier basis in every dimension.
    #[default]
    CyclicShift,
    /// The parity-dependent listing: for odd d identical to `CyclicShift`; for
    /// even d the odd-labelled blocks are reflections `{(i, j - i)}`. Matches the
    /// real Walsh basis for d = 4 but not the Fourier basis when d ≥ 4 is even.
    Listing,
}

impl ErrorLayout {
    pub fn partition(self, d: usize) -> Result<BTreeMap<(usize, usize), usize>> {
        match self {
            ErrorLayout::CyclicShift => cyclic_shift_partition(d),
            ErrorLayout::Listing => error_set_partition(d),
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// Partition of the off-diagonal pairs into d-1 orthogonal sets of d pairs,
/// following the parity-dependent construction.
///
/// Odd d: block `(j - i) mod d`. Even d: label `j ∈ {2, 4, .., d-2}` holds
/// `{(i, i + j)}` and label `j ∈ {1, 3, .., d-1}` holds `{(i, j - i)}`.
pub fn error_set_partition(d: usize) -> Result<BTreeMap<(usize, usize), usize>> {
    check_dim(d)?;
    if d % 2 == 1 {
        return cyclic_shift_partition(d);
    }
    let mut blocks = BTreeMap::new();
    for label in 1..d {
        for i in 0..d {
            let j = if label % 2 == 0 {
                (i + label) % d
            } else {
                (label + d - i) % d
            };
            blocks.insert((i, j), label);
        }
    }
    Ok(blocks)
}

/// Partition by cyclic shift: `(i, j) → (j - i) mod d`.
pub fn cyclic_shift_partition(d: usize) -> Result<BTreeMap<(usize, usize), usize>> {
    check_dim(d)?;
    let mut blocks = BTreeMap::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                blocks.insert((i, j), (j + d - i) % d);
            }
        }
    }
    Ok(blocks)
}

/// Overlap `s = ⟨E_ii|E_jj⟩` forced by equal disturbance on every protocol state.
pub fn s_from_dw(dim: usize, bases_count: usize, disturbance: f64, w: f64) -> Result<f64> {
    let spec = ProtocolSpec::new(dim, bases_count)?;
    let one_minus = 1.0 - disturbance;
    if one_minus == 0.0 {
        return Err(Error::Singular);
    }
    let d = dim as f64;
    let s = if spec.is_three_basis() {
        (w * disturbance + 2.0 - 3.0 * disturbance) / (2.0 * one_minus)
    } else {
        (1.0 - w * disturbance) / one_minus - d / (d - 1.0) * disturbance / one_minus
    };
    Ok(s)
}

/// Real coefficients of a block of d states with common pairwise overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffPair {
    pub major: f64,
    pub minor: f64,
}

pub(crate) fn clamped_sqrt(name: &'static str, x: f64) -> Result<f64> {
    if x < -RADICAND_SLACK {
        return Err(Error::NegativeRadicand { name, value: x });
    }
    Ok(x.max(0.0).sqrt())
}

/// Solve `major² + (d-1)·minor² = 1`, `2·major·minor + (d-2)·minor² = overlap`,
/// taking the root with `major ≥ minor`.
pub fn solve_coeff_pair(overlap: f64, d: usize) -> Result<CoeffPair> {
    check_dim(d)?;
    let dm1 = d as f64 - 1.0;
    let lo = -1.0 / dm1;
    check_range(
        "overlap",
        overlap,
        lo - RADICAND_SLACK,
        1.0 + RADICAND_SLACK,
    )?;
    // eigenvalues of the Gram matrix (1-ov)I + ov·J
    let sym = clamped_sqrt("1+(d-1)·overlap", 1.0 + dm1 * overlap)?;
    let anti = clamped_sqrt("1-overlap", 1.0 - overlap)?;
    let d = d as f64;
    Ok(CoeffPair {
        major: (sym + dm1 * anti) / d,
        minor: (sym - anti) / d,
    })
}

/// Full parametrization of Eve's strategy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AttackParams {
    spec: ProtocolSpec,
    disturbance: f64,
    w: f64,
    s: f64,
    layout: ErrorLayout,
}

impl AttackParams {
    /// Validate `(D, w)` for the protocol and derive `s`.
    pub fn new(spec: ProtocolSpec, disturbance: f64, w: f64) -> Result<Self> {
        let d = spec.dim() as f64;
        let lo = -1.0 / (d - 1.0);
        check_range("D", disturbance, 0.0, spec.max_disturbance())?;
        check_range("w", w, lo, 1.0)?;
        let s = s_from_dw(spec.dim(), spec.bases_count(), disturbance, w)?;
        check_range("s", s, lo - RADICAND_SLACK, 1.0 + RADICAND_SLACK)?;
        Ok(AttackParams {
            spec,
            disturbance,
            w,
            s,
            layout: ErrorLayout::default(),
        })
    }

    pub fn with_layout(mut self, layout: ErrorLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn spec(&self) -> ProtocolSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn disturbance(&self) -> f64 {
        self.disturbance
    }

    pub fn fidelity(&self) -> f64 {
        1.0 - self.disturbance
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn layout(&self) -> ErrorLayout {
        self.layout
    }

    /// `(u, v)` for the no-error states.
    pub fn diagonal_coeffs(&self) -> Result<CoeffPair> {
        solve_coeff_pair(self.s, self.dim())
    }

    /// `(r, q)` for the error states.
    pub fn error_coeffs(&self) -> Result<CoeffPair> {
        solve_coeff_pair(self.w, self.dim())
    }
}

/// Overlap groups measured on a concrete state set.
///
/// `x`: `⟨E_ii|E_ij⟩` and `⟨E_ij|E_jj⟩`; `y`: `⟨E_ii|E_jk⟩`, i,j,k distinct;
/// `z`: `⟨E_ij|E_ik⟩`, i,j,k distinct; `t`: every other overlap between error
/// states in different blocks. Each is the largest-modulus value found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarProductProfile {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
    pub t: Complex64,
    /// Mean overlap inside the error blocks.
    pub w: f64,
    /// Mean `⟨E_ii|E_jj⟩`, i ≠ j.
    pub s: f64,
    /// Largest deviation of any within-error-block overlap from `w` (imaginary parts included).
    pub w_spread: f64,
    /// Largest deviation of any `⟨E_ii|E_jj⟩` from `s`.
    pub s_spread: f64,
}

impl ScalarProductProfile {
    /// `max(|x|, |y|, |z|, |t|)`.
    pub fn max_vanishing(&self) -> f64 {
        [self.x, self.y, self.z, self.t]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Eve's d² ancilla output states.
#[derive(Debug, Clone)]
pub struct EveStateSet {
    dim: usize,
    states: Vec<Vec<CVec>>,
    block_of: Vec<Vec<usize>>,
    diagonal: CoeffPair,
    error: CoeffPair,
}

impl EveStateSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.dim * self.dim
    }

    /// `|E_ij⟩`.
    pub fn state(&self, i: usize, j: usize) -> &CVec {
        &self.states[i][j]
    }

    /// Block index of `(i, j)`; 0 for the diagonal.
    pub fn block_of(&self, i: usize, j: usize) -> usize {
        self.block_of[i][j]
    }

    /// `(u, v, r, q)`.
    pub fn coeffs(&self) -> (f64, f64, f64, f64) {
        (
            self.diagonal.major,
            self.diagonal.minor,
            self.error.major,
            self.error.minor,
        )
    }

    pub fn normalization_residual(&self) -> f64 {
        self.states
            .iter()
            .flatten()
            .map(|v| (v.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|⟨E_ij|E_kl⟩|` over pairs in different blocks.
    pub fn cross_block_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for (a, b) in pairs(d) {
            for (c, e) in pairs(d) {
                if self.block_of[a][b] != self.block_of[c][e] {
                    worst = worst.max(self.states[a][b].inner(&self.states[c][e]).norm());
                }
            }
        }
        worst
    }

    /// Measure the six overlap groups.
    pub fn profile(&self) -> ScalarProductProfile {
        let d = self.dim;
        let zero = Complex64::new(0.0, 0.0);
        let mut x = zero;
        let mut y = zero;
        let mut z = zero;
        let mut t = zero;
        let keep = |slot: &mut Complex64, value: Complex64| {
            if value.norm() > slot.norm() {
                *slot = value;
            }
        };
        let e = |i: usize, j: usize| &self.states[i][j];

        let mut s_vals = Vec::new();
        let mut w_vals = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                keep(&mut x, e(i, i).inner(e(i, j)));
                keep(&mut x, e(i, j).inner(e(j, j)));
                s_vals.push(e(i, i).inner(e(j, j)));
                for k in 0..d {
                    if k == i || k == j {
                        continue;
                    }
                    keep(&mut y, e(i, i).inner(e(j, k)));
                    keep(&mut z, e(i, j).inner(e(i, k)));
                }
            }
        }
        for (a, b) in pairs(d) {
            for (c, f) in pairs(d) {
                if (a, b) == (c, f) {
                    continue;
                }
                if a == b && c == f {
                    continue;
                }
                let value = e(a, b).inner(e(c, f));
                if self.block_of[a][b] == self.block_of[c][f] {
                    w_vals.push(value);
                } else if a != c {
                    // same sender in different blocks is already the z group
                    keep(&mut t, value);
                }
            }
        }
        let (s, s_spread) = mean_and_spread(&s_vals);
        let (w, w_spread) = mean_and_spread(&w_vals);
        ScalarProductProfile {
            x,
            y,
            z,
            t,
            w,
            s,
            w_spread,
            s_spread,
        }
    }

    /// Largest residual of the unitarity relations
    /// `√(F·D/(d-1))(⟨E_ij|E_jj⟩ + ⟨E_ii|E_ji⟩) + D/(d-1)·Σ_{k≠i,j} ⟨E_ik|E_jk⟩ = 0`.
    pub fn unitarity_relation_residual(&self, disturbance: f64) -> f64 {
        let d = self.dim;
        let c_err = disturbance / (d as f64 - 1.0);
        let c_mix = ((1.0 - disturbance) * c_err).sqrt();
        let e = |i: usize, j: usize| &self.states[i][j];
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let mut rel = (e(i, j).inner(e(j, j)) + e(i, i).inner(e(j, i))) * c_mix;
                for k in (0..d).filter(|&k| k != i && k != j) {
                    rel += e(i, k).inner(e(j, k)) * c_err;
                }
                worst = worst.max(rel.norm());
            }
        }
        worst
    }
}

fn pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |i| (0..d).map(move |j| (i, j)))
}

fn mean_and_spread(values: &[Complex64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().map(|v| v.re).sum::<f64>() / values.len() as f64;
    let spread = values
        .iter()
        .map(|v| (v - Complex64::new(mean, 0.0)).norm())
        .fold(0.0, f64::max);
    (mean, spread)
}

/// Lay out Eve's states in d orthogonal coordinate blocks.
pub fn build_eve_states(params: &AttackParams) -> Result<EveStateSet> {
    let d = params.dim();
    let diagonal = params.diagonal_coeffs()?;
    let error = params.error_coeffs()?;
    let partition = params.layout().partition(d)?;
    let anc = d * d;

    let block_state = |block: usize, position: usize, c: CoeffPair| {
        let mut v = CVec::zeros(anc);
        for k in 0..d {
            let amp = if k == position { c.major } else { c.minor };
            v.entries_mut()[block * d + k] = Complex64::new(amp, 0.0);
        }
        v
    };

    let mut states = vec![vec![CVec::zeros(anc); d]; d];
    let mut block_of = vec![vec![0usize; d]; d];
    for i in 0..d {
        states[i][i] = block_state(0, i, diagonal);
        for j in (0..d).filter(|&j| j != i) {
            let block = partition[&(i, j)];
            block_of[i][j] = block;
            states[i][j] = block_state(block, i, error);
        }
    }
    Ok(EveStateSet {
        dim: d,
        states,
        block_of,
        diagonal,
        error,
    })
}

/// The attack as a `(d·d²) × d` isometry from Alice's qudit to Bob ⊗ Eve.
///
/// Joint index is `bob * d² + ancilla`.
#[derive(Debug, Clone)]
pub struct AttackIsometry {
    dim: usize,
    matrix: CMat,
}

impl AttackIsometry {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.dim * self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// `max |V†V - I|`.
    pub fn isometry_residual(&self) -> f64 {
        self.matrix.gram().max_abs_diff(&CMat::identity(self.dim))
    }

    /// Joint Bob ⊗ Eve state for Alice's input.
    pub fn apply(&self, input: &CVec) -> Result<CVec> {
        self.matrix.mul_vec(input)
    }

    /// Bob's reduced state for Alice's input.
    pub fn bob_state(&self, input: &CVec) -> Result<CMat> {
        let joint = self.apply(input)?;
        reduce_to_first(&joint, self.dim, self.ancilla_dim())
    }
}

/// Assemble the isometry from the constructed Eve states.
pub fn build_isometry(params: &AttackParams) -> Result<AttackIsometry> {
    let states = build_eve_states(params)?;
    Ok(isometry_from_states(params, &states))
}

pub(crate) fn isometry_from_states(params: &AttackParams, states: &EveStateSet) -> AttackIsometry {
    let d = params.dim();
    let anc = d * d;
    let keep = params.fidelity().sqrt();
    let flip = (params.disturbance() / (d as f64 - 1.0)).sqrt();
    let mut matrix = CMat::zeros(d * anc, d);
    for i in 0..d {
        for j in 0..d {
            let amp = if i == j { keep } else { flip };
            let e = states.state(i, j);
            for k in 0..anc {
                matrix.set(j * anc + k, i, e[k] * amp);
            }
        }
    }
    AttackIsometry { dim: d, matrix }
}

/// `1 - ⟨b_i|ρ_B|b_i⟩` for every vector of `basis`.
pub fn disturbance_per_state(v: &AttackIsometry, basis: &Basis) -> Result<Vec<f64>> {
    if basis.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: basis.dim(),
        });
    }
    basis
        .vectors()
        .iter()
        .map(|b| {
            let rho = v.bob_state(b)?;
            let rho_b = rho.mul_vec(b)?;
            Ok(1.0 - b.inner(&rho_b).re)
        })
        .collect()
}
