//! Minimal running time per database size and power-law fits of the result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve, evolve_reduced, Engine};
use crate::hamiltonian::SearchHamiltonian;
use crate::integrate::IntegratorConfig;
use crate::schedule::ScheduleFamily;

/// Sizes up to this use the full engine under [`EngineChoice::Auto`].
pub const AUTO_FULL_ENGINE_MAX: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Full,
    Reduced,
    /// Full engine for small N, reduced above [`AUTO_FULL_ENGINE_MAX`].
    Auto,
}

impl EngineChoice {
    fn resolve(self, n: usize) -> Engine {
        match self {
            EngineChoice::Full => Engine::Full,
            EngineChoice::Reduced => Engine::Reduced,
            EngineChoice::Auto if n <= AUTO_FULL_ENGINE_MAX => Engine::Full,
            EngineChoice::Auto => Engine::Reduced,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub engine: EngineChoice,
    /// First duration tried by the doubling phase.
    pub initial_time: f64,
    /// Give up when doubling passes this duration.
    pub time_cap: f64,
    /// Relative width of the final bisection bracket.
    pub tolerance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            engine: EngineChoice::Auto,
            initial_time: 1.0,
            time_cap: 1e6,
            tolerance: 1e-4,
        }
    }
}

/// Success probability of `family` stretched to `total_time`.
pub fn success_at(
    n: usize,
    family: ScheduleFamily,
    total_time: f64,
    cfg: &IntegratorConfig,
    engine: Engine,
) -> Result<f64> {
    let h = SearchHamiltonian::from_size(n, 0)?;
    let sch = family.with_duration(n, total_time)?;
    let cfg = cfg.with_samples(2);
    let res = match engine {
        Engine::Full => evolve(&h, &sch, &cfg)?,
        Engine::Reduced => evolve_reduced(&h, &sch, &cfg)?,
    };
    Ok(res.success_probability)
}

/// Smallest total time for which `family` reaches `target` success probability,
/// to relative accuracy `tol`.
///
/// Success probability is not monotone in T, so the search doubles T until the
/// target is first met and then bisects inside that bracket.
pub fn minimal_time(
    n: usize,
    family: ScheduleFamily,
    target: f64,
    cfg: &IntegratorConfig,
    tol: f64,
) -> Result<f64> {
    let opts = SearchOptions {
        tolerance: tol,
        ..SearchOptions::default()
    };
    minimal_time_with(n, family, target, cfg, &opts)
}

pub fn minimal_time_with(
    n: usize,
    family: ScheduleFamily,
    target: f64,
    cfg: &IntegratorConfig,
    opts: &SearchOptions,
) -> Result<f64> {
    SearchHamiltonian::from_size(n, 0)?;
    if !(target > 1.0 / n as f64 && target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target fidelity must lie in (1/N, 1), got {target}"
        )));
    }
    if !(opts.tolerance > 0.0) || !(opts.initial_time > 0.0) {
        return Err(Error::InvalidArgument(
            "search tolerance and initial time must be positive".into(),
        ));
    }
    let engine = opts.engine.resolve(n);
    let reaches = |t: f64| -> Result<bool> { Ok(success_at(n, family, t, cfg, engine)? >= target) };

    // T -> 0 leaves the state at |psi0>, whose success probability 1/N is
    // below target, so 0 is a valid lower end.
    let mut lo = 0.0;
    let mut hi = opts.initial_time;
    while !reaches(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > opts.time_cap {
            return Err(Error::BracketNotFound {
                target,
                cap: opts.time_cap,
            });
        }
    }
    while hi - lo > opts.tolerance * hi {
        let mid = 0.5 * (lo + hi);
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::NonPositiveData { x, y });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all x values coincide".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let residual = (logs
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(PowerLawFit {
        exponent,
        prefactor: intercept.exp(),
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub size: usize,
    pub t_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub family: ScheduleFamily,
    pub target_fidelity: f64,
    pub points: Vec<ScalingPoint>,
    pub exponent: f64,
    pub prefactor: f64,
    pub residual: f64,
}

/// Minimum number of sizes in a sweep.
pub const MIN_SWEEP_SIZES: usize = 4;

/// Runs [`minimal_time_with`] for each size (in parallel on the current rayon
/// pool, results in input order) and fits `T_min = prefactor * N^exponent`.
pub fn scaling_sweep(
    sizes: &[usize],
    family: ScheduleFamily,
    target: f64,
    cfg: &IntegratorConfig,
) -> Result<ScalingReport> {
    scaling_sweep_with(sizes, family, target, cfg, &SearchOptions::default())
}

pub fn scaling_sweep_with(
    sizes: &[usize],
    family: ScheduleFamily,
    target: f64,
    cfg: &IntegratorConfig,
    opts: &SearchOptions,
) -> Result<ScalingReport> {
    if sizes.len() < MIN_SWEEP_SIZES {
        return Err(Error::InsufficientPoints {
            needed: MIN_SWEEP_SIZES,
            got: sizes.len(),
        });
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("sizes must increase strictly".into()));
    }
    if sizes[sizes.len() - 1] < 4 * sizes[0] {
        return Err(Error::InvalidArgument("sizes must span at least two octaves".into()));
    }
    let times: Vec<f64> = sizes
        .par_iter()
        .map(|&n| minimal_time_with(n, family, target, cfg, opts))
        .collect::<Result<_>>()?;
    let points: Vec<ScalingPoint> = sizes
        .iter()
        .zip(&times)
        .map(|(&size, &t_min)| ScalingPoint { size, t_min })
        .collect();
    let fit = fit_power_law(
        &points
            .iter()
            .map(|p| (p.size as f64, p.t_min))
            .collect::<Vec<_>>(),
    )?;
    Ok(ScalingReport {
        family,
        target_fidelity: target,
        points,
        exponent: fit.exponent,
        prefactor: fit.prefactor,
        residual: fit.residual,
    })
}
