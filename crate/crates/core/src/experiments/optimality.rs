//! Numerical check of the lower bound on the running time.
//!
//! For every marked item `m` the register evolves from the same `|psi0>`. The
//! summed distinguishability `D(T) = sum_{m,m'} [1 - |<psi_m,T|psi_m',T>|^2]`
//! can grow no faster than `4 N sqrt(N) s(t)`, so
//! `D(T) <= 4 N sqrt(N) int_0^T s dt`. If every pair must be distinguishable
//! by at least `eps_dist`, this forces `T >= (eps_dist / 4) (N - 1) / sqrt(N)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::hamiltonian::{QuantumState, SearchHamiltonian};
use crate::integrate::IntegratorConfig;
use crate::schedule::{Schedule, ScheduleDescriptor};

/// Largest N accepted by [`optimality_check`].
pub const OPTIMALITY_MAX_SIZE: usize = 64;

/// All ordered pairs are computed from independent runs up to this size;
/// above it the relabeling symmetry is used.
pub const ALL_PAIRS_MAX_SIZE: usize = 16;

/// Default pairwise distinguishability threshold.
pub const DEFAULT_EPS_DIST: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    AllPairs,
    Symmetry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub size: usize,
    pub schedule: ScheduleDescriptor,
    pub total_time: f64,
    pub d_final: f64,
    pub integral_of_s: f64,
    /// `4 N sqrt(N) int_0^T s dt`
    pub bound: f64,
    pub margin: f64,
    /// `min_{m != m'} 1 - |<psi_m,T|psi_m',T>|^2`
    pub min_pairwise_distinguishability: f64,
    pub eps_dist: f64,
    /// `(eps_dist / 4) (N - 1) / sqrt(N)`
    pub lower_bound_time: f64,
    /// True when the run distinguishes every pair by at least `eps_dist`,
    /// which is when the time bound must hold.
    pub distinguishes_all_pairs: bool,
    /// `T >= lower_bound_time`, or vacuously true when the pairs are not
    /// all distinguished.
    pub lower_bound_satisfied: bool,
    pub pair_mode: PairMode,
    /// `1 - |<psi_m|psi_m'>|^2` for every ordered pair; present in all-pairs mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguishability: Option<Vec<Vec<f64>>>,
}

/// Runs the optimality check with the default `eps_dist`.
pub fn optimality_check(
    n: usize,
    sch: &Schedule,
    cfg: &IntegratorConfig,
) -> Result<OptimalityReport> {
    optimality_check_with(n, sch, cfg, DEFAULT_EPS_DIST)
}

pub fn optimality_check_with(
    n: usize,
    sch: &Schedule,
    cfg: &IntegratorConfig,
    eps_dist: f64,
) -> Result<OptimalityReport> {
    if n > OPTIMALITY_MAX_SIZE {
        return Err(Error::InvalidArgument(format!(
            "optimality check needs N <= {OPTIMALITY_MAX_SIZE}, got {n}"
        )));
    }
    let base = SearchHamiltonian::from_size(n, 0)?;
    if !(eps_dist > 0.0 && eps_dist <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps_dist must lie in (0, 1], got {eps_dist}"
        )));
    }
    let cfg = cfg.with_samples(2);
    let pair_mode = if n <= ALL_PAIRS_MAX_SIZE {
        PairMode::AllPairs
    } else {
        PairMode::Symmetry
    };
    let marked: Vec<usize> = match pair_mode {
        PairMode::AllPairs => (0..n).collect(),
        PairMode::Symmetry => vec![0, 1],
    };
    let finals: Vec<QuantumState> = marked
        .par_iter()
        .map(|&m| {
            let h = base.with_marked(m)?;
            Ok(evolve(&h, sch, &cfg)?.final_state.to_state(&h))
        })
        .collect::<Result<_>>()?;

    let distinguish = |a: &QuantumState, b: &QuantumState| 1.0 - a.inner(b).norm_sqr();
    let (d_final, min_pairwise, matrix) = match pair_mode {
        PairMode::AllPairs => {
            let matrix: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                0.0
                            } else {
                                distinguish(&finals[i], &finals[j])
                            }
                        })
                        .collect()
                })
                .collect();
            let total: f64 = matrix.iter().flatten().sum();
            let min = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| matrix[i][j])
                .fold(f64::INFINITY, f64::min);
            (total, min, Some(matrix))
        }
        PairMode::Symmetry => {
            let d = distinguish(&finals[0], &finals[1]);
            ((n * (n - 1)) as f64 * d, d, None)
        }
    };

    let nf = n as f64;
    let integral = sch.integral_of_s();
    let bound = 4.0 * nf * nf.sqrt() * integral;
    let lower_bound_time = eps_dist / 4.0 * (nf - 1.0) / nf.sqrt();
    let distinguishes_all_pairs = min_pairwise >= eps_dist;
    let total_time = sch.total_time();
    Ok(OptimalityReport {
        size: n,
        schedule: sch.descriptor(),
        total_time,
        d_final,
        integral_of_s: integral,
        bound,
        margin: bound - d_final,
        min_pairwise_distinguishability: min_pairwise,
        eps_dist,
        lower_bound_time,
        distinguishes_all_pairs,
        lower_bound_satisfied: !distinguishes_all_pairs || total_time >= lower_bound_time,
        pair_mode,
        distinguishability: matrix,
    })
}
