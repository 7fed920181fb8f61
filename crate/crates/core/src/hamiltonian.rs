//! The search instance and its interpolating Hamiltonian
//!
//! `H(s) = (1 - s) H0 + s Hm` with `H0 = I - |psi0><psi0|` and
//! `Hm = I - |m><m|`. Both terms are rank-one perturbations of the identity,
//! so a matrix-vector product costs two passes over the state and the
//! dynamics starting from `|psi0>` never leave `span{|m>, |psi0>}`.
//!
//! Inside that span we use the orthonormal basis `{|m>, |m_perp>}` with
//! `|m_perp> = (|psi0> - N^{-1/2} |m>) / sqrt(1 - 1/N)`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest N accepted by [`dense_matrix`].
pub const DENSE_ORACLE_CAP: usize = 256;

/// Default tolerance on `| ||psi||^2 - 1 |` when validating a state.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-9;

/// A search problem over `N = 2^n` items with one marked index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHamiltonian {
    n_qubits: u32,
    size: usize,
    marked: usize,
}

impl SearchHamiltonian {
    pub fn new(n_qubits: u32, marked: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits >= usize::BITS {
            return Err(Error::InvalidSize(1usize.checked_shl(n_qubits).unwrap_or(0)));
        }
        let size = 1usize << n_qubits;
        if marked >= size {
            return Err(Error::MarkedOutOfRange { marked, size });
        }
        Ok(Self {
            n_qubits,
            size,
            marked,
        })
    }

    /// Builds an instance from the database size, which must be a power of two.
    pub fn from_size(size: usize, marked: usize) -> Result<Self> {
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::InvalidSize(size));
        }
        Self::new(size.trailing_zeros(), marked)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Database size N.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn marked(&self) -> usize {
        self.marked
    }

    /// Same problem size, different marked item.
    pub fn with_marked(&self, marked: usize) -> Result<Self> {
        Self::new(self.n_qubits, marked)
    }

    /// `<m|psi0> = 1/sqrt(N)`.
    pub fn overlap_marked_uniform(&self) -> f64 {
        (1.0 / self.size as f64).sqrt()
    }

    /// `<m_perp|psi0> = sqrt(1 - 1/N)`.
    pub fn overlap_perp_uniform(&self) -> f64 {
        (1.0 - 1.0 / self.size as f64).sqrt()
    }

    /// Writes `H(s) psi` into `out`. No allocation; two passes over `psi`.
    pub fn apply_into(&self, s: f64, psi: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), self.size);
        debug_assert_eq!(out.len(), self.size);
        let amp = self.overlap_marked_uniform();
        let uniform_overlap: Complex64 = psi.iter().sum::<Complex64>() * amp;
        let shift = uniform_overlap * ((1.0 - s) * amp);
        for (o, p) in out.iter_mut().zip(psi) {
            *o = p - shift;
        }
        out[self.marked] -= psi[self.marked] * s;
    }

    /// Coordinates of `psi` in the `{|m>, |m_perp>}` basis of the invariant span.
    pub fn project_reduced(&self, psi: &[Complex64]) -> [Complex64; 2] {
        let a = self.overlap_marked_uniform();
        let b = self.overlap_perp_uniform();
        let uniform_overlap: Complex64 = psi.iter().sum::<Complex64>() * a;
        let c_m = psi[self.marked];
        [c_m, (uniform_overlap - c_m * a) / b]
    }

    /// Expands reduced coordinates back to a full amplitude vector.
    pub fn expand_reduced(&self, coords: [Complex64; 2]) -> Vec<Complex64> {
        let a = self.overlap_marked_uniform();
        let b = self.overlap_perp_uniform();
        // |m_perp> has amplitude a/b off the marked index and zero on it.
        let off = coords[1] * (a / b);
        let mut out = vec![off; self.size];
        out[self.marked] = coords[0];
        out
    }
}

/// A complex amplitude vector over the N basis states (hbar = 1 units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Validates normalization against `tolerance`.
    pub fn new(amplitudes: Vec<Complex64>, tolerance: f64) -> Result<Self> {
        let state = Self { amplitudes };
        let drift = state.norm_error();
        if !drift.is_finite() || drift > tolerance {
            return Err(Error::InvalidArgument(format!(
                "state norm deviates from 1 by {drift:e} (tolerance {tolerance:e})"
            )));
        }
        Ok(state)
    }

    /// Wraps amplitudes without checking the norm. Used for integrator output,
    /// where the norm drift is itself the accuracy witness.
    pub fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Basis state `|index>`.
    pub fn basis(size: usize, index: usize) -> Result<Self> {
        if index >= size {
            return Err(Error::MarkedOutOfRange {
                marked: index,
                size,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); size];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `| ||psi||^2 - 1 |`
    pub fn norm_error(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<i|psi>|^2`
    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }
}

/// The uniform superposition over all N basis states.
pub fn make_uniform_state(h: &SearchHamiltonian) -> QuantumState {
    let amp = Complex64::new(h.overlap_marked_uniform(), 0.0);
    QuantumState {
        amplitudes: vec![amp; h.size()],
    }
}

/// `H(s) psi` by the rank-two structure, in O(N).
pub fn apply_hamiltonian(
    h: &SearchHamiltonian,
    s: f64,
    psi: &QuantumState,
) -> Result<Vec<Complex64>> {
    check_unit_interval(s)?;
    if psi.len() != h.size() {
        return Err(Error::DimensionMismatch {
            expected: h.size(),
            actual: psi.len(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); h.size()];
    h.apply_into(s, psi.amplitudes(), &mut out);
    Ok(out)
}

/// Dense `H(s)`: `M_ij = delta_ij - (1 - s)/N - s delta_im delta_jm`.
///
/// Only meant as a test oracle; capped at [`DENSE_ORACLE_CAP`].
pub fn dense_matrix(h: &SearchHamiltonian, s: f64) -> Result<DMatrix<f64>> {
    let n = h.size();
    if n > DENSE_ORACLE_CAP {
        return Err(Error::DenseCapExceeded {
            size: n,
            cap: DENSE_ORACLE_CAP,
        });
    }
    let off = (1.0 - s) / n as f64;
    let mut m = DMatrix::from_element(n, n, -off);
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    m[(h.marked(), h.marked())] -= s;
    Ok(m)
}

/// `H(s)` restricted to the invariant span, in the `{|m>, |m_perp>}` basis.
pub fn reduced_block(h: &SearchHamiltonian, s: f64) -> Matrix2<f64> {
    reduced_block_of_size(s, h.size())
}

/// The block depends on N only, not on which item is marked.
pub(crate) fn reduced_block_of_size(s: f64, n: usize) -> Matrix2<f64> {
    let a2 = 1.0 / n as f64;
    let b2 = 1.0 - a2;
    let ab = (a2 * b2).sqrt();
    let w = 1.0 - s;
    Matrix2::new(1.0 - s - w * a2, -w * ab, -w * ab, 1.0 - w * b2)
}

pub(crate) fn check_unit_interval(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(s))
    }
}
