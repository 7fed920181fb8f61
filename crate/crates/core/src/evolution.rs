//! Time-dependent Schrödinger evolution `i d/dt psi = H(s(t)) psi`.
//!
//! Two engines share one driver:
//!
//! * [`evolve`] integrates all N amplitudes using the O(N) structured product;
//! * [`evolve_reduced`] integrates the two coordinates in `{|m>, |m_perp>}`,
//!   which is exact because the dynamics never leave that span.
//!
//! Neither engine renormalizes; the norm drift is reported instead.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    check_unit_interval, make_uniform_state, reduced_block_of_size, QuantumState,
    SearchHamiltonian,
};
use crate::integrate::{Integrator, IntegratorConfig, OdeSystem};
use crate::schedule::Schedule;
use crate::spectrum;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Full,
    Reduced,
}

/// One trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub s: f64,
    pub ground_fidelity: f64,
    pub gap: f64,
    pub adiabaticity_ratio: f64,
    pub norm_error: f64,
}

/// Final state of a run. The reduced engine keeps the two span coordinates
/// only; [`FinalState::to_state`] expands them on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalState {
    Full(QuantumState),
    Reduced { coordinates: [Complex64; 2] },
}

impl FinalState {
    pub fn to_state(&self, h: &SearchHamiltonian) -> QuantumState {
        match self {
            FinalState::Full(state) => state.clone(),
            FinalState::Reduced { coordinates } => {
                QuantumState::from_raw(h.expand_reduced(*coordinates))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResult {
    pub engine: Engine,
    pub final_state: FinalState,
    /// `|<m|psi(T)>|^2`
    pub success_probability: f64,
    /// `|<E0; T|psi(T)>|^2`
    pub ground_fidelity_final: f64,
    pub trajectory: Vec<TrajectorySample>,
    pub norm_drift_max: f64,
    /// Largest squared norm outside `span{|m>, |psi0>}`; zero for the reduced engine.
    pub leakage_max: f64,
    /// Set when `norm_drift_max` exceeds the configured threshold.
    pub norm_flagged: bool,
    pub steps: usize,
}

struct FullSystem<'a> {
    h: &'a SearchHamiltonian,
    schedule: &'a Schedule,
}

impl OdeSystem for FullSystem<'_> {
    fn dim(&self) -> usize {
        self.h.size()
    }

    fn eval(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let s = self.schedule.s_at_clamped(t);
        self.h.apply_into(s, y, dy);
        for d in dy.iter_mut() {
            *d *= MINUS_I;
        }
    }
}

struct ReducedSystem<'a> {
    size: usize,
    schedule: &'a Schedule,
}

impl OdeSystem for ReducedSystem<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let b = reduced_block_of_size(self.schedule.s_at_clamped(t), self.size);
        dy[0] = (y[0] * b[(0, 0)] + y[1] * b[(0, 1)]) * MINUS_I;
        dy[1] = (y[0] * b[(1, 0)] + y[1] * b[(1, 1)]) * MINUS_I;
    }
}

/// Evolves `|psi0>` under the schedule in the full N-dimensional space.
pub fn evolve(
    h: &SearchHamiltonian,
    sch: &Schedule,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult> {
    let sys = FullSystem { h, schedule: sch };
    let psi0 = make_uniform_state(h).into_amplitudes();
    drive(
        h,
        sch,
        cfg,
        &sys,
        psi0,
        |y| {
            let coords = h.project_reduced(y);
            let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
            (coords, norm)
        },
        Engine::Full,
    )
}

/// Evolves the two span coordinates; cost independent of N.
pub fn evolve_reduced(
    h: &SearchHamiltonian,
    sch: &Schedule,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult> {
    let sys = ReducedSystem {
        size: h.size(),
        schedule: sch,
    };
    let start = vec![
        Complex64::new(h.overlap_marked_uniform(), 0.0),
        Complex64::new(h.overlap_perp_uniform(), 0.0),
    ];
    drive(
        h,
        sch,
        cfg,
        &sys,
        start,
        |y| ([y[0], y[1]], y[0].norm_sqr() + y[1].norm_sqr()),
        Engine::Reduced,
    )
}

fn drive<S, F>(
    h: &SearchHamiltonian,
    sch: &Schedule,
    cfg: &IntegratorConfig,
    sys: &S,
    mut y: Vec<Complex64>,
    reduce: F,
    engine: Engine,
) -> Result<EvolutionResult>
where
    S: OdeSystem,
    F: Fn(&[Complex64]) -> ([Complex64; 2], f64),
{
    cfg.validate()?;
    let n = h.size();
    let total = sch.total_time();
    let mut integ = Integrator::new(cfg.method, sys.dim());
    let mut trajectory = Vec::with_capacity(cfg.sample_count);
    let mut norm_drift_max: f64 = 0.0;
    let mut leakage_max: f64 = 0.0;

    let intervals = cfg.sample_count - 1;
    let sample_time = |k: usize| {
        if k == intervals {
            total
        } else {
            total * k as f64 / intervals as f64
        }
    };
    for k in 0..cfg.sample_count {
        let t = sample_time(k);
        if k > 0 {
            integ.advance(sys, &mut y, sample_time(k - 1), t)?;
        }
        let (coords, norm_sqr) = reduce(&y);
        let s = sch.s_at_clamped(t);
        let norm_error = (norm_sqr - 1.0).abs();
        let in_span = coords[0].norm_sqr() + coords[1].norm_sqr();
        norm_drift_max = norm_drift_max.max(norm_error);
        leakage_max = leakage_max.max((norm_sqr - in_span).abs());
        trajectory.push(TrajectorySample {
            t,
            s,
            ground_fidelity: ground_fidelity_of_coords(coords, s, n)?,
            gap: spectrum::gap(s, n)?,
            adiabaticity_ratio: adiabaticity_ratio(s, sch.rate(t)?, n)?,
            norm_error,
        });
    }

    let (coords, _) = reduce(&y);
    let final_state = match engine {
        Engine::Full => FinalState::Full(QuantumState::from_raw(y)),
        Engine::Reduced => FinalState::Reduced {
            coordinates: coords,
        },
    };
    let ground_fidelity_final = ground_fidelity_of_coords(coords, 1.0, n)?;
    Ok(EvolutionResult {
        engine,
        final_state,
        success_probability: coords[0].norm_sqr(),
        ground_fidelity_final,
        trajectory,
        norm_drift_max,
        leakage_max,
        norm_flagged: norm_drift_max > cfg.norm_drift_threshold,
        steps: integ.steps(),
    })
}

fn ground_fidelity_of_coords(coords: [Complex64; 2], s: f64, n: usize) -> Result<f64> {
    let (ground, _) = spectrum::reduced_eigenvectors(s, n)?;
    Ok((coords[0] * ground[0] + coords[1] * ground[1]).norm_sqr())
}

/// `|<E0; s|psi>|^2` with the ground state taken from the reduced block.
pub fn instantaneous_ground_fidelity(
    psi: &QuantumState,
    s: f64,
    h: &SearchHamiltonian,
) -> Result<f64> {
    check_unit_interval(s)?;
    if psi.len() != h.size() {
        return Err(Error::DimensionMismatch {
            expected: h.size(),
            actual: psi.len(),
        });
    }
    ground_fidelity_of_coords(h.project_reduced(psi.amplitudes()), s, h.size())
}

/// `(ds/dt) |<E1| dH/ds |E0>| / g(s)^2`, the instantaneous adiabaticity ratio.
pub fn adiabaticity_ratio(s: f64, ds_dt: f64, n: usize) -> Result<f64> {
    if ds_dt == 0.0 {
        spectrum::gap(s, n)?;
        return Ok(0.0);
    }
    let g = spectrum::gap(s, n)?;
    Ok(ds_dt * spectrum::coupling_matrix_element(s, n)? / (g * g))
}
