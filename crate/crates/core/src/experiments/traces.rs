use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{linear_schedule, Schedule};
use crate::spectrum::{self, SpectrumPoint};

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        Err(Error::InvalidArgument(format!("need >= 2 samples, got {samples}")))
    } else {
        Ok(())
    }
}

fn grid(samples: usize, end: f64) -> impl Iterator<Item = f64> {
    let last = samples - 1;
    (0..samples).map(move |k| {
        if k == last {
            end
        } else {
            end * (k as f64 / last as f64)
        }
    })
}

/// Spectrum at `samples` equally spaced values of `s` in `[0, 1]`.
pub fn spectrum_trace(n: usize, samples: usize) -> Result<Vec<SpectrumPoint>> {
    check_samples(samples)?;
    grid(samples, 1.0).map(|s| spectrum::eigenvalues(s, n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub t: f64,
    pub s: f64,
    pub rate: f64,
}

/// Samples `(t, s(t), ds/dt)` of any schedule at equally spaced times.
pub fn sample_schedule(sch: &Schedule, samples: usize) -> Result<Vec<ScheduleRow>> {
    check_samples(samples)?;
    grid(samples, sch.total_time())
        .map(|t| {
            Ok(ScheduleRow {
                t,
                s: sch.s_at(t)?,
                rate: sch.rate(t)?,
            })
        })
        .collect()
}

/// The local-adiabatic schedule `s(t)` at `samples` equally spaced times.
pub fn schedule_trace(n: usize, eps: f64, samples: usize) -> Result<Vec<ScheduleRow>> {
    sample_schedule(&Schedule::local_adiabatic(n, eps)?, samples)
}

/// The straight-line comparison `s = t/T` over the same duration as the
/// local schedule.
pub fn linear_comparison_trace(n: usize, eps: f64, samples: usize) -> Result<Vec<ScheduleRow>> {
    let total = Schedule::local_adiabatic(n, eps)?.total_time();
    sample_schedule(&linear_schedule(total)?, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spectrum_trace_rows() {
        let rows = spectrum_trace(64, 101).unwrap();
        assert_eq!(rows.len(), 101);
        assert_eq!(rows[50].s, 0.5);
        assert_eq!(rows[50].gap, 0.125);
        for end in [&rows[0], &rows[100]] {
            assert_eq!(end.gap, 1.0);
            assert_eq!(end.e0, 0.0);
        }
        for r in &rows {
            assert!((r.e0 + r.e1 - 1.0).abs() < 1e-14);
        }
        assert!(spectrum_trace(64, 1).is_err());
    }

    #[test]
    fn schedule_trace_rows() {
        let rows = schedule_trace(64, 0.1, 201).unwrap();
        let total = rows.last().unwrap().t;
        assert_eq!((rows[0].t, rows[0].s), (0.0, 0.0));
        assert_eq!(rows[200].s, 1.0);
        assert_abs_diff_eq!(rows[100].t, total / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rows[100].s, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rows[100].rate, 0.1 / 64.0, epsilon = 1e-10);
    }

    #[test]
    fn linear_comparison_is_straight() {
        let rows = linear_comparison_trace(64, 0.1, 11).unwrap();
        let total = rows.last().unwrap().t;
        for r in rows {
            assert_eq!(r.s, r.t / total);
        }
    }
}
