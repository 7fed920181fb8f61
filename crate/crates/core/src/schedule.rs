//! Interpolation schedules `s(t)` on `[0, T]`.
//!
//! Three shapes are supported:
//!
//! * linear, `s = t / T`;
//! * the closed-form local-adiabatic schedule, which solves
//!   `ds/dt = eps g(s)^2` for the search gap and has an analytic inverse;
//! * tabulated schedules produced by integrating the local rate equation for an
//!   arbitrary gap profile, interpolated with monotone cubic Hermite segments.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::check_unit_interval;
use crate::integrate::{DP_B4, DP_B5, DP_C};
use crate::quadrature::adaptive_simpson;
use crate::spectrum::{self, gap_squared_unchecked};

/// Default step cap for [`schedule_from_gap`].
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidSize(n))
    } else {
        Ok(())
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

fn check_duration(total_time: f64) -> Result<()> {
    if total_time.is_finite() && total_time > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "total time must be positive and finite, got {total_time}"
        )))
    }
}

/// `T >= N / eps` from the worst-case gap `1/sqrt(N)`.
pub fn global_adiabatic_time(n: usize, eps: f64) -> Result<f64> {
    check_size(n)?;
    check_epsilon(eps)?;
    Ok(n as f64 / eps)
}

/// Time at which the local-adiabatic schedule reaches `s`:
/// `t(s) = N / (2 eps sqrt(N-1)) [atan(sqrt(N-1)(2s-1)) + atan(sqrt(N-1))]`.
pub fn local_time_of_s(s: f64, n: usize, eps: f64) -> Result<f64> {
    check_unit_interval(s)?;
    check_size(n)?;
    check_epsilon(eps)?;
    Ok(time_of_s_unchecked(s, n as f64, eps))
}

/// Inverse of [`local_time_of_s`].
pub fn local_s_of_time(t: f64, n: usize, eps: f64) -> Result<f64> {
    check_size(n)?;
    check_epsilon(eps)?;
    let total = local_total_time(n, eps)?;
    if !(0.0..=total).contains(&t) {
        return Err(Error::TimeOutOfRange { t, total });
    }
    Ok(s_of_time_unchecked(t, n as f64, eps, total))
}

/// Duration of the local-adiabatic schedule, `t(1)`. Tends to
/// `(pi / 2 eps) sqrt(N)` for large N.
pub fn local_total_time(n: usize, eps: f64) -> Result<f64> {
    check_size(n)?;
    check_epsilon(eps)?;
    Ok(time_of_s_unchecked(1.0, n as f64, eps))
}

fn time_of_s_unchecked(s: f64, n: f64, eps: f64) -> f64 {
    let r = (n - 1.0).sqrt();
    n / (2.0 * eps * r) * ((r * (2.0 * s - 1.0)).atan() + r.atan())
}

fn s_of_time_unchecked(t: f64, n: f64, eps: f64, total: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= total {
        return 1.0;
    }
    let r = (n - 1.0).sqrt();
    let phase = 2.0 * eps * r / n * t - r.atan();
    (0.5 + phase.tan() / (2.0 * r)).clamp(0.0, 1.0)
}

/// Monotone piecewise-cubic table of `(t, s)` knots with slopes `ds/dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Table {
    /// Builds a table from strictly increasing times and nondecreasing values in
    /// `[0, 1]`, starting at `(0, 0)` and ending at `s = 1`. `slopes` are the
    /// desired derivatives at the knots; they are limited (Fritsch-Carlson) so
    /// that the interpolant stays monotone.
    pub fn new(times: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let n = times.len();
        if n < 2 || values.len() != n || slopes.len() != n {
            return Err(Error::InvalidArgument(
                "table needs >= 2 knots with matching value and slope counts".into(),
            ));
        }
        if times[0] != 0.0 || values[0] != 0.0 || values[n - 1] != 1.0 {
            return Err(Error::InvalidArgument(
                "table must start at (0, 0) and end at s = 1".into(),
            ));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidArgument("knot times must increase strictly".into()));
            }
        }
        for w in values.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidArgument("knot values must be nondecreasing".into()));
            }
        }
        let mut slopes = slopes;
        for d in slopes.iter_mut() {
            if !d.is_finite() || *d < 0.0 {
                *d = 0.0;
            }
        }
        for k in 0..n - 1 {
            let secant = (values[k + 1] - values[k]) / (times[k + 1] - times[k]);
            if secant == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            let alpha = slopes[k] / secant;
            let beta = slopes[k + 1] / secant;
            let radius = alpha.hypot(beta);
            if radius > 3.0 {
                let tau = 3.0 / radius;
                slopes[k] = tau * alpha * secant;
                slopes[k + 1] = tau * beta * secant;
            }
        }
        Ok(Self {
            times,
            values,
            slopes,
        })
    }

    pub fn total_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Knots as `(t, s, ds/dt)`.
    pub fn knots(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.values)
            .zip(&self.slopes)
            .map(|((t, s), d)| (*t, *s, *d))
    }

    fn segment(&self, t: f64) -> usize {
        match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i.min(self.times.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.times.len() - 2),
        }
    }

    fn value(&self, t: f64) -> f64 {
        let k = self.segment(t);
        let h = self.times[k + 1] - self.times[k];
        let x = (t - self.times[k]) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let x2 = x * x;
        let x3 = x2 * x;
        let v = (2.0 * x3 - 3.0 * x2 + 1.0) * y0
            + (x3 - 2.0 * x2 + x) * d0
            + (-2.0 * x3 + 3.0 * x2) * y1
            + (x3 - x2) * d1;
        v.clamp(y0, y1)
    }

    fn derivative(&self, t: f64) -> f64 {
        let k = self.segment(t);
        let h = self.times[k + 1] - self.times[k];
        let x = (t - self.times[k]) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let x2 = x * x;
        let dv = (6.0 * x2 - 6.0 * x) * y0
            + (3.0 * x2 - 4.0 * x + 1.0) * d0
            + (-6.0 * x2 + 6.0 * x) * y1
            + (3.0 * x2 - 2.0 * x) * d1;
        (dv / h).max(0.0)
    }
}

/// Schedule variants.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleKind {
    Linear,
    /// Closed-form local-adiabatic schedule for database size `size`.
    /// `epsilon` may exceed 1 when the schedule has been time-rescaled.
    LocalAdiabatic { size: usize, epsilon: f64 },
    Tabulated(Table),
}

/// A monotone map `s(t)` on `[0, T]` with `s(0) = 0` and `s(T) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    total_time: f64,
    kind: ScheduleKind,
}

/// Flat description of a schedule, for reports and config echoes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDescriptor {
    pub kind: String,
    pub total_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub knots: Option<usize>,
}

/// `s(t) = t / T`
pub fn linear_schedule(total_time: f64) -> Result<Schedule> {
    check_duration(total_time)?;
    Ok(Schedule {
        total_time,
        kind: ScheduleKind::Linear,
    })
}

impl Schedule {
    /// The local-adiabatic schedule at adiabaticity parameter `eps`.
    pub fn local_adiabatic(n: usize, eps: f64) -> Result<Self> {
        let total_time = local_total_time(n, eps)?;
        Ok(Self {
            total_time,
            kind: ScheduleKind::LocalAdiabatic {
                size: n,
                epsilon: eps,
            },
        })
    }

    /// The local-adiabatic shape stretched or compressed to last `total_time`.
    /// Equivalent to choosing `eps = t_1(N) / T`, where `t_1` is the duration at
    /// `eps = 1`; no upper bound on the effective `eps` is imposed here.
    pub fn local_with_duration(n: usize, total_time: f64) -> Result<Self> {
        check_size(n)?;
        check_duration(total_time)?;
        let epsilon = time_of_s_unchecked(1.0, n as f64, 1.0) / total_time;
        Ok(Self {
            total_time,
            kind: ScheduleKind::LocalAdiabatic { size: n, epsilon },
        })
    }

    pub fn tabulated(table: Table) -> Self {
        Self {
            total_time: table.total_time(),
            kind: ScheduleKind::Tabulated(table),
        }
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if (0.0..=self.total_time).contains(&t) {
            Ok(())
        } else {
            Err(Error::TimeOutOfRange {
                t,
                total: self.total_time,
            })
        }
    }

    /// `s(t)`.
    pub fn s_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.s_at_clamped(t))
    }

    /// `s(t)` with `t` clamped into `[0, T]`; used inside integrators whose
    /// stage times may overshoot by rounding.
    pub fn s_at_clamped(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.total_time);
        if t == self.total_time {
            return 1.0;
        }
        match &self.kind {
            ScheduleKind::Linear => t / self.total_time,
            ScheduleKind::LocalAdiabatic { size, epsilon } => {
                s_of_time_unchecked(t, *size as f64, *epsilon, self.total_time)
            }
            ScheduleKind::Tabulated(table) => table.value(t),
        }
    }

    /// `ds/dt` at time `t`.
    pub fn rate(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(match &self.kind {
            ScheduleKind::Linear => 1.0 / self.total_time,
            ScheduleKind::LocalAdiabatic { size, epsilon } => {
                epsilon * gap_squared_unchecked(self.s_at_clamped(t), *size as f64)
            }
            ScheduleKind::Tabulated(table) => table.derivative(t),
        })
    }

    /// `int_0^T s(t) dt` by adaptive quadrature.
    pub fn integral_of_s(&self) -> f64 {
        let tol = 1e-12 * self.total_time.max(1.0);
        adaptive_simpson(|t| self.s_at_clamped(t), 0.0, self.total_time, tol)
    }

    pub fn descriptor(&self) -> ScheduleDescriptor {
        let (kind, size, epsilon, knots) = match &self.kind {
            ScheduleKind::Linear => ("linear", None, None, None),
            ScheduleKind::LocalAdiabatic { size, epsilon } => {
                ("local_adiabatic", Some(*size), Some(*epsilon), None)
            }
            ScheduleKind::Tabulated(table) => ("tabulated", None, None, Some(table.len())),
        };
        ScheduleDescriptor {
            kind: kind.to_string(),
            total_time: self.total_time,
            size,
            epsilon,
            knots,
        }
    }
}

/// `ds/dt` of a schedule; see [`Schedule::rate`].
pub fn rate(sch: &Schedule, t: f64) -> Result<f64> {
    sch.rate(t)
}

/// Schedule shapes that can be stretched to any total time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleFamily {
    Linear,
    LocalAdiabatic,
}

impl ScheduleFamily {
    pub fn with_duration(self, n: usize, total_time: f64) -> Result<Schedule> {
        match self {
            ScheduleFamily::Linear => linear_schedule(total_time),
            ScheduleFamily::LocalAdiabatic => Schedule::local_with_duration(n, total_time),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScheduleFamily::Linear => "linear",
            ScheduleFamily::LocalAdiabatic => "local",
        }
    }
}

impl fmt::Display for ScheduleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Gap profile `g(s)` plus the coupling `|<E1| dH/ds |E0>|` used in the
/// local condition `ds/dt <= eps g^2 / coupling`.
#[derive(Clone)]
pub struct GapModel {
    gap: ScalarFn,
    coupling: ScalarFn,
}

impl fmt::Debug for GapModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GapModel(..)")
    }
}

impl GapModel {
    /// Gap evaluator with the coupling bounded by 1.
    pub fn new(gap: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            gap: Arc::new(gap),
            coupling: Arc::new(|_| 1.0),
        }
    }

    /// Analytic search gap for database size `n`.
    pub fn grover(n: usize) -> Result<Self> {
        check_size(n)?;
        let nf = n as f64;
        Ok(Self::new(move |s| gap_squared_unchecked(s, nf).sqrt()))
    }

    /// Replaces the coupling by a constant bound `c > 0`.
    pub fn with_coupling_bound(mut self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "coupling bound must be positive, got {c}"
            )));
        }
        self.coupling = Arc::new(move |_| c);
        Ok(self)
    }

    /// Uses the exact s-dependent search coupling instead of the bound 1.
    pub fn with_exact_grover_coupling(mut self, n: usize) -> Result<Self> {
        check_size(n)?;
        self.coupling = Arc::new(move |s| {
            spectrum::coupling_matrix_element(s.clamp(0.0, 1.0), n).unwrap_or(1.0)
        });
        Ok(self)
    }

    pub fn gap(&self, s: f64) -> f64 {
        (self.gap)(s)
    }

    pub fn coupling(&self, s: f64) -> f64 {
        (self.coupling)(s)
    }

    /// `dt/ds = coupling / (eps g^2)`, checking positivity of the gap.
    fn time_per_unit_s(&self, s: f64, eps: f64) -> Result<f64> {
        let g = self.gap(s);
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::NonPositiveGap { s, gap: g });
        }
        let c = self.coupling(s);
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "coupling must be positive, got {c} at s = {s}"
            )));
        }
        Ok(c / (eps * g * g))
    }
}

/// Synthesizes a tabulated schedule obeying `ds/dt = eps g(s)^2 / c(s)`.
///
/// Since the right-hand side depends on `s` only, the equation is integrated
/// in its inverse form `dt/ds = c / (eps g^2)` from `s = 0` to `s = 1`, which
/// lands exactly on the boundary `s(T) = 1`. Steps are Dormand-Prince 5(4)
/// with the local error per unit `s` kept below `tol`, so the accumulated
/// error in `T` stays below `tol`.
pub fn schedule_from_gap(model: &GapModel, eps: f64, tol: f64) -> Result<Schedule> {
    schedule_from_gap_with_cap(model, eps, tol, DEFAULT_MAX_STEPS)
}

pub fn schedule_from_gap_with_cap(
    model: &GapModel,
    eps: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Schedule> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut times = vec![0.0];
    let mut values = vec![0.0];
    let mut slopes = vec![1.0 / model.time_per_unit_s(0.0, eps)?];

    let mut s = 0.0;
    let mut t = 0.0;
    let mut h: f64 = 1e-3;
    let mut attempts = 0usize;
    while s < 1.0 {
        attempts += 1;
        if attempts > max_steps {
            return Err(Error::StepLimit(max_steps));
        }
        let last = s + h >= 1.0;
        let h_try = if last { 1.0 - s } else { h };
        let mut f = [0.0; 7];
        for (fi, c) in f.iter_mut().zip(DP_C) {
            *fi = model.time_per_unit_s((s + c * h_try).min(1.0), eps)?;
        }
        let dt5: f64 = h_try * f.iter().zip(DP_B5).map(|(fi, b)| fi * b).sum::<f64>();
        let dt4: f64 = h_try * f.iter().zip(DP_B4).map(|(fi, b)| fi * b).sum::<f64>();
        let err = (dt5 - dt4).abs();
        let allowed = tol * h_try;
        if err <= allowed {
            s = if last { 1.0 } else { s + h_try };
            t += dt5;
            if t > *times.last().unwrap() {
                times.push(t);
                values.push(s);
                slopes.push(1.0 / f[6]);
            }
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * (allowed / err).powf(0.25)).clamp(0.2, 4.0)
        };
        h = h_try * factor;
        if h < 1e-15 {
            return Err(Error::StepLimit(attempts));
        }
    }
    // the final knot must sit exactly at s = 1
    *values.last_mut().unwrap() = 1.0;
    Ok(Schedule::tabulated(Table::new(times, values, slopes)?))
}
