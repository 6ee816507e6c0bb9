//! Explicit Runge–Kutta integrators for small fixed-size systems.
//!
//! [`Dopri5`] is the Dormand–Prince 5(4) embedded pair with an I-controller;
//! [`rk4_fixed`] is the classical fourth-order scheme with a constant step.

use thiserror::Error;

/// Marker returned by a right-hand side evaluated outside its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutOfDomain;

/// System of first-order ODEs `dy/dt = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N], OutOfDomain>;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("solution left its domain near t = {t}")]
    DomainExit { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("maximum number of steps ({0}) exceeded")]
    TooManySteps(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub fn_evals: usize,
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Error coefficients: fifth-order weights minus the embedded fourth-order ones.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive Dormand–Prince 5(4) integrator.
///
/// The integrator keeps its last accepted step size so that a sequence of
/// calls to [`Dopri5::advance`] over consecutive output times does not
/// restart the step-size selection each time.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    h: Option<f64>,
    pub stats: Stats,
}

impl Dopri5 {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
            h: None,
            stats: Stats::default(),
        }
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    /// Advances `y` from `t0` to `t1` (either direction) and returns the
    /// state at `t1`.
    pub fn advance<const N: usize, S: OdeSystem<N>>(
        &mut self,
        sys: &S,
        t0: f64,
        y0: [f64; N],
        t1: f64,
    ) -> Result<[f64; N], OdeError> {
        if t1 == t0 {
            return Ok(y0);
        }
        let dir = (t1 - t0).signum();
        let span = (t1 - t0).abs();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = self.eval(sys, t, &y).map_err(|_| OdeError::DomainExit { t })?;
        let mut h = match self.h {
            Some(h) => h.abs().min(span),
            None => self.initial_step(sys, t, &y, &k1, dir, span)?,
        }
        .min(self.max_step);
        let mut last_was_domain = false;
        let mut steps = 0usize;

        loop {
            let remaining = (t1 - t).abs();
            if remaining <= 1e-15 * t1.abs().max(1.0) {
                return Ok(y);
            }
            let mut last = false;
            if h >= remaining {
                h = remaining;
                last = true;
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(if last_was_domain {
                    OdeError::DomainExit { t }
                } else {
                    OdeError::StepUnderflow { t }
                });
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(OdeError::TooManySteps(self.max_steps));
            }

            let hs = dir * h;
            match self.step(sys, t, &y, &k1, hs) {
                Err(OutOfDomain) => {
                    self.stats.rejected += 1;
                    last_was_domain = true;
                    h *= 0.25;
                    continue;
                }
                Ok((y_new, k7, err)) => {
                    if !err.is_finite() {
                        self.stats.rejected += 1;
                        h *= 0.25;
                        continue;
                    }
                    if err <= 1.0 {
                        self.stats.accepted += 1;
                        last_was_domain = false;
                        t = if last { t1 } else { t + hs };
                        y = y_new;
                        if y.iter().any(|v| !v.is_finite()) {
                            return Err(OdeError::NonFinite { t });
                        }
                        k1 = k7;
                        let factor = if err == 0.0 {
                            5.0
                        } else {
                            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                        };
                        let next = (h * factor).min(self.max_step);
                        // Keep the unclamped step for the next call when the
                        // final step was shortened to land on t1.
                        if !last || next > self.h.unwrap_or(0.0) {
                            self.h = Some(next);
                        }
                        h = next;
                        if last {
                            return Ok(y);
                        }
                    } else {
                        self.stats.rejected += 1;
                        h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                    }
                }
            }
        }
    }

    fn eval<const N: usize, S: OdeSystem<N>>(
        &mut self,
        sys: &S,
        t: f64,
        y: &[f64; N],
    ) -> Result<[f64; N], OutOfDomain> {
        self.stats.fn_evals += 1;
        sys.rhs(t, y)
    }

    #[allow(clippy::type_complexity)]
    fn step<const N: usize, S: OdeSystem<N>>(
        &mut self,
        sys: &S,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> Result<([f64; N], [f64; N], f64), OutOfDomain> {
        let stage = |coeffs: &[(f64, &[f64; N])]| {
            let mut out = *y;
            for (c, k) in coeffs {
                for i in 0..N {
                    out[i] += h * c * k[i];
                }
            }
            out
        };
        let k2 = self.eval(sys, t + C2 * h, &stage(&[(A21, k1)]))?;
        let k3 = self.eval(sys, t + C3 * h, &stage(&[(A31, k1), (A32, &k2)]))?;
        let k4 = self.eval(sys, t + C4 * h, &stage(&[(A41, k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = self.eval(
            sys,
            t + C5 * h,
            &stage(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = self.eval(
            sys,
            t + h,
            &stage(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = stage(&[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = self.eval(sys, t + h, &y_new)?;

        let mut sum = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
            sum += (e / sc).powi(2);
        }
        Ok((y_new, k7, (sum / N as f64).sqrt()))
    }

    fn initial_step<const N: usize, S: OdeSystem<N>>(
        &mut self,
        sys: &S,
        t: f64,
        y: &[f64; N],
        f0: &[f64; N],
        dir: f64,
        span: f64,
    ) -> Result<f64, OdeError> {
        // Hairer, Nørsett & Wanner, starting step heuristic.
        let (atol, rtol) = (self.abs_tol, self.rel_tol);
        let norm = |v: &[f64; N]| {
            let s: f64 = (0..N)
                .map(|i| (v[i] / (atol + rtol * y[i].abs())).powi(2))
                .sum();
            (s / N as f64).sqrt()
        };
        let d0 = norm(y);
        let d1 = norm(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span).min(self.max_step);
        let mut y1 = *y;
        for i in 0..N {
            y1[i] += dir * h0 * f0[i];
        }
        let f1 = match self.eval(sys, t + dir * h0, &y1) {
            Ok(f) => f,
            Err(OutOfDomain) => return Ok(h0 * 1e-3),
        };
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - f0[i];
        }
        let d2 = norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(span))
    }
}

/// Classical fourth-order Runge–Kutta with a constant step, landing exactly
/// on `t1`.
pub fn rk4_fixed<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    step: f64,
) -> Result<[f64; N], OdeError> {
    if t1 == t0 {
        return Ok(y0);
    }
    let n = ((t1 - t0).abs() / step.abs()).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let dom = |_| OdeError::DomainExit { t };
        let k1 = sys.rhs(t, &y).map_err(dom)?;
        let k2 = sys.rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1)).map_err(dom)?;
        let k3 = sys.rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2)).map_err(dom)?;
        let k4 = sys.rhs(t + h, &axpy(&y, h, &k3)).map_err(dom)?;
        for j in 0..N {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFinite { t: t + h });
        }
    }
    Ok(y)
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, x: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * x[i];
    }
    out
}
