//! Explicit Runge-Kutta stepping for `dy/dt = f(t, y)` on complex vectors.
//!
//! Two drivers: classical fixed-step RK4 and an adaptive Dormand-Prince 5(4)
//! pair with mixed absolute/relative error control. Both advance exactly to the
//! requested end time so trajectory samples land on their nominal instants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-hand side of a first-order system over complex amplitudes.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// Classical RK4 with at most `step` per step.
    FixedStep { step: f64 },
    /// Dormand-Prince 5(4) with the given relative (and absolute) tolerance.
    Adaptive { tolerance: f64 },
}

/// Integrator settings shared by both evolution engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Number of equally spaced trajectory samples in `[0, T]`, endpoints included.
    pub sample_count: usize,
    /// Runs whose norm drift exceeds this are flagged.
    pub norm_drift_threshold: f64,
}

/// Default fixed step: `min(0.01, 0.1 / ||H||)` with `||H|| <= 1`.
pub const DEFAULT_STEP: f64 = 0.01;

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::FixedStep { step: DEFAULT_STEP },
            sample_count: 101,
            norm_drift_threshold: 1e-8,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(step: f64) -> Self {
        Self {
            method: Method::FixedStep { step },
            ..Self::default()
        }
    }

    pub fn adaptive(tolerance: f64) -> Self {
        Self {
            method: Method::Adaptive { tolerance },
            ..Self::default()
        }
    }

    pub fn with_samples(mut self, sample_count: usize) -> Self {
        self.sample_count = sample_count;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let value = match self.method {
            Method::FixedStep { step } => step,
            Method::Adaptive { tolerance } => tolerance,
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "integrator step/tolerance must be positive, got {value}"
            )));
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidArgument(format!(
                "sample_count must be >= 2, got {}",
                self.sample_count
            )));
        }
        if !(self.norm_drift_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "norm drift threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

// Dormand-Prince 5(4) tableau.
pub(crate) const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
pub(crate) const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
pub(crate) const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
pub(crate) const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];


/// Scratch buffers, reused across calls to avoid per-step allocation.
pub struct Integrator {
    method: Method,
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    y5: Vec<Complex64>,
    /// Last accepted adaptive step, carried over between segments.
    h_prev: Option<f64>,
    steps: usize,
}

impl Integrator {
    pub fn new(method: Method, dim: usize) -> Self {
        let zero = || vec![Complex64::new(0.0, 0.0); dim];
        Self {
            method,
            k: std::array::from_fn(|_| zero()),
            tmp: zero(),
            y5: zero(),
            h_prev: None,
            steps: 0,
        }
    }

    /// Accepted steps so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Advances `y` from `t0` to `t1`.
    pub fn advance<S: OdeSystem>(
        &mut self,
        sys: &S,
        y: &mut [Complex64],
        t0: f64,
        t1: f64,
    ) -> Result<()> {
        if t1 <= t0 {
            return Ok(());
        }
        match self.method {
            Method::FixedStep { step } => {
                let n = ((t1 - t0) / step).ceil().max(1.0) as usize;
                let h = (t1 - t0) / n as f64;
                for i in 0..n {
                    self.rk4_step(sys, y, t0 + i as f64 * h, h);
                }
                self.steps += n;
            }
            Method::Adaptive { tolerance } => self.dopri_segment(sys, y, t0, t1, tolerance)?,
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(t1));
        }
        Ok(())
    }

    fn rk4_step<S: OdeSystem>(&mut self, sys: &S, y: &mut [Complex64], t: f64, h: f64) {
        let [k1, k2, k3, k4, ..] = &mut self.k;
        let tmp = &mut self.tmp;
        sys.eval(t, y, k1);
        axpy_into(tmp, y, h / 2.0, k1);
        sys.eval(t + h / 2.0, tmp, k2);
        axpy_into(tmp, y, h / 2.0, k2);
        sys.eval(t + h / 2.0, tmp, k3);
        axpy_into(tmp, y, h, k3);
        sys.eval(t + h, tmp, k4);
        let c = h / 6.0;
        for i in 0..y.len() {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * c;
        }
    }

    fn dopri_segment<S: OdeSystem>(
        &mut self,
        sys: &S,
        y: &mut [Complex64],
        t0: f64,
        t1: f64,
        tol: f64,
    ) -> Result<()> {
        const MAX_STEPS: usize = 50_000_000;
        let span = t1 - t0;
        let mut t = t0;
        let mut h = self.h_prev.unwrap_or(0.01).min(span);
        let mut attempts = 0usize;
        while t < t1 {
            let remaining = t1 - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let h_try = if last { remaining } else { h };
            let err = self.dopri_trial(sys, y, t, h_try, tol);
            attempts += 1;
            if attempts > MAX_STEPS {
                return Err(Error::StepLimit(MAX_STEPS));
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                y.copy_from_slice(&self.y5);
                t = if last { t1 } else { t + h_try };
                self.steps += 1;
                if !last {
                    self.h_prev = Some(h_try * factor);
                }
            }
            h = h_try * factor;
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::NonFinite(t));
            }
        }
        Ok(())
    }

    /// One Dormand-Prince trial step; leaves the 5th-order solution in
    /// `self.y5` and returns the scaled error norm.
    fn dopri_trial<S: OdeSystem>(
        &mut self,
        sys: &S,
        y: &[Complex64],
        t: f64,
        h: f64,
        tol: f64,
    ) -> f64 {
        let n = y.len();
        for stage in 0..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, a) in DP_A[stage].iter().enumerate().take(stage) {
                    if *a != 0.0 {
                        acc += self.k[j][i] * (h * a);
                    }
                }
                self.tmp[i] = acc;
            }
            sys.eval(t + DP_C[stage] * h, &self.tmp, &mut self.k[stage]);
        }
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut hi = y[i];
            let mut lo = y[i];
            for j in 0..7 {
                hi += self.k[j][i] * (h * DP_B5[j]);
                lo += self.k[j][i] * (h * DP_B4[j]);
            }
            self.y5[i] = hi;
            let scale = tol * (1.0 + y[i].norm().max(hi.norm()));
            err_sq += ((hi - lo).norm() / scale).powi(2);
        }
        (err_sq / n as f64).sqrt()
    }
}

fn axpy_into(out: &mut [Complex64], y: &[Complex64], a: f64, x: &[Complex64]) {
    for ((o, yi), xi) in out.iter_mut().zip(y).zip(x) {
        *o = yi + xi * a;
    }
}
