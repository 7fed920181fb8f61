//! Analytic spectrum of the interpolating Hamiltonian.
//!
//! The two lowest levels live in the invariant span and satisfy
//! `E0 + E1 = 1`, `E1 - E0 = g(s)`; every other level sits at `E2 = 1` with
//! multiplicity `N - 2`.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{check_unit_interval, reduced_block_of_size};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub s: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub gap: f64,
    pub e2_multiplicity: usize,
}

fn check_domain(s: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    check_unit_interval(s)
}

/// `g(s)^2 = 1 - 4 (N-1)/N s (1-s)`, evaluated as `(2s-1)^2 + 4 s (1-s) / N`
/// to avoid cancellation near the avoided crossing.
pub(crate) fn gap_squared_unchecked(s: f64, n: f64) -> f64 {
    let d = 2.0 * s - 1.0;
    d * d + 4.0 * s * (1.0 - s) / n
}

/// `E1(s) - E0(s) = sqrt(1 - 4 (N-1)/N s (1-s))`
pub fn gap(s: f64, n: usize) -> Result<f64> {
    check_domain(s, n)?;
    Ok(gap_squared_unchecked(s, n as f64).sqrt())
}

pub fn eigenvalues(s: f64, n: usize) -> Result<SpectrumPoint> {
    let g = gap(s, n)?;
    Ok(SpectrumPoint {
        s,
        e0: 0.5 * (1.0 - g),
        e1: 0.5 * (1.0 + g),
        e2: 1.0,
        gap: g,
        e2_multiplicity: n - 2,
    })
}

/// Location and value of the minimum gap: `(1/2, 1/sqrt(N))`.
pub fn min_gap(n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    Ok((0.5, (1.0 / n as f64).sqrt()))
}

/// Ground and first excited eigenvectors of the reduced block, as
/// `(ground, excited)` in `{|m>, |m_perp>}` coordinates.
///
/// Closed-form Jacobi rotation; both vectors are real with a nonnegative
/// `|m>` component (positive `|m_perp>` component when that is zero).
pub fn reduced_eigenvectors(s: f64, n: usize) -> Result<([f64; 2], [f64; 2])> {
    check_domain(s, n)?;
    let m = reduced_block_of_size(s, n);
    let (p, q, r) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let theta = 0.5 * (2.0 * q).atan2(p - r);
    let (sin, cos) = theta.sin_cos();
    Ok((canonical_sign([-sin, cos]), canonical_sign([cos, sin])))
}

fn canonical_sign(v: [f64; 2]) -> [f64; 2] {
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// `|<E1; s| dH/ds |E0; s>|` with `dH/ds = Hm - H0 = |psi0><psi0| - |m><m|`.
pub fn coupling_matrix_element(s: f64, n: usize) -> Result<f64> {
    let (ground, excited) = reduced_eigenvectors(s, n)?;
    let a2 = 1.0 / n as f64;
    let b2 = 1.0 - a2;
    let ab = (a2 * b2).sqrt();
    let derivative = Matrix2::new(a2 - 1.0, ab, ab, b2);
    let g = nalgebra::Vector2::from(ground);
    let e = nalgebra::Vector2::from(excited);
    Ok(e.dot(&(derivative * g)).abs())
}
