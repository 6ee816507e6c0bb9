//! Numerical integration of the radial Euler–Lagrange equation.
//!
//! With J fixed, the state is `(r, v = ṙ, φ)` and
//!
//! ```text
//! ṙ = v
//! v̇ = λ r v²/(1+λr²) − α² r/(1+λr²) + (J²+k)(1+λr²)/r³
//! φ̇ = J/r²
//! ```
//!
//! which conserves `½ v²/(1+λr²) + V_eff(r)`. The second-order form is
//! smooth through turning points, so no event handling is needed.

use crate::error::{Error, Result};
use crate::model::{barrier, ClassicalSetup, ModelParams};
use crate::ode::{rk4_fixed, Dopri5, OdeSystem, OutOfDomain};

/// Margin used to stop trajectories that approach the boundary `r² = 1/|λ|`.
const HYPERBOLIC_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalState {
    pub t: f64,
    pub r: f64,
    pub v: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub dr_dt: f64,
    pub dv_dt: f64,
    pub dphi_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Dormand–Prince 5(4).
    Adaptive,
    /// Classical RK4 with the given step.
    FixedRk4 { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            method: Method::Adaptive,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && !v.is_nan();
        if !positive(self.rel_tol) || !positive(self.abs_tol) || !positive(self.max_step) {
            return Err(Error::InvalidParameter(
                "integrator tolerances and max_step must be positive".into(),
            ));
        }
        if let Method::FixedRk4 { step } = self.method {
            if !positive(step) || !step.is_finite() {
                return Err(Error::InvalidParameter("RK4 step must be positive".into()));
            }
        }
        Ok(())
    }
}

/// A state together with conserved-quantity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: DynamicalState,
    pub energy: f64,
    pub angular_momentum: f64,
}

struct RadialSystem {
    params: ModelParams,
    j: f64,
    barrier: f64,
}

impl RadialSystem {
    fn new(setup: &ClassicalSetup) -> Self {
        Self {
            params: setup.params,
            j: setup.j,
            barrier: barrier(&setup.params, setup.j),
        }
    }

    fn in_domain(&self, r: f64) -> bool {
        let l = self.params.lambda();
        r > 0.0 && r.is_finite() && (l > 0.0 || -l * r * r <= 1.0 - HYPERBOLIC_GUARD)
    }

    fn derivatives(&self, r: f64, v: f64) -> Derivatives {
        let l = self.params.lambda();
        let a2 = self.params.alpha() * self.params.alpha();
        let r2 = r * r;
        let g = 1.0 + l * r2;
        Derivatives {
            dr_dt: v,
            dv_dt: l * r * v * v / g - a2 * r / g + self.barrier * g / (r2 * r),
            dphi_dt: self.j / r2,
        }
    }
}

impl OdeSystem<3> for RadialSystem {
    fn rhs(&self, _t: f64, y: &[f64; 3]) -> std::result::Result<[f64; 3], OutOfDomain> {
        if !self.in_domain(y[0]) {
            return Err(OutOfDomain);
        }
        let d = self.derivatives(y[0], y[1]);
        Ok([d.dr_dt, d.dv_dt, d.dphi_dt])
    }
}

/// Right-hand side of the equations of motion at `state`.
pub fn equations_of_motion(setup: &ClassicalSetup, state: &DynamicalState) -> Result<Derivatives> {
    let sys = RadialSystem::new(setup);
    if !sys.in_domain(state.r) {
        return Err(Error::OutOfDomain {
            r: state.r,
            domain: "integrator domain".into(),
        });
    }
    Ok(sys.derivatives(state.r, state.v))
}

/// `½ v²/(1+λr²) + V_eff(r)`.
pub fn state_energy(setup: &ClassicalSetup, state: &DynamicalState) -> f64 {
    let p = &setup.params;
    0.5 * state.v * state.v / (1.0 + p.lambda() * state.r * state.r)
        + p.effective_potential_unchecked(setup.j, state.r)
}

fn sample(setup: &ClassicalSetup, state: DynamicalState) -> Sample {
    let dphi = setup.j / (state.r * state.r);
    Sample {
        state,
        energy: state_energy(setup, &state),
        angular_momentum: state.r * state.r * dphi,
    }
}

/// Integrates from `initial` and records the state at each of `times`.
///
/// `times` must be monotone (either direction) starting at or beyond
/// `initial.t`. The initial state must reproduce the setup's energy to
/// 1e-10 (relative); an energy drift beyond `100 × rel_tol` is reported as
/// [`Error::EnergyDrift`].
pub fn integrate(
    setup: &ClassicalSetup,
    initial: DynamicalState,
    times: &[f64],
    config: &IntegratorConfig,
) -> Result<Vec<Sample>> {
    config.validate()?;
    let sys = RadialSystem::new(setup);
    if !sys.in_domain(initial.r) {
        return Err(Error::InconsistentState(format!(
            "initial radius {} outside the domain",
            initial.r
        )));
    }
    let e0 = state_energy(setup, &initial);
    let scale = setup.energy().abs().max(1.0);
    if (e0 - setup.energy()).abs() > 1e-10 * scale {
        return Err(Error::InconsistentState(format!(
            "initial energy {e0} differs from setup energy {}",
            setup.energy()
        )));
    }
    let allowed = 100.0 * config.rel_tol;
    let mut ig = Dopri5::new(config.rel_tol, config.abs_tol).with_max_step(config.max_step);
    let mut t = initial.t;
    let mut y = [initial.r, initial.v, initial.phi];
    let mut out = Vec::with_capacity(times.len());
    for &t_next in times {
        y = match config.method {
            Method::Adaptive => ig.advance(&sys, t, y, t_next)?,
            Method::FixedRk4 { step } => rk4_fixed(&sys, t, y, t_next, step)?,
        };
        t = t_next;
        let s = sample(
            setup,
            DynamicalState {
                t,
                r: y[0],
                v: y[1],
                phi: y[2],
            },
        );
        let drift = (s.energy - e0).abs() / e0.abs().max(f64::MIN_POSITIVE);
        if drift > allowed {
            return Err(Error::EnergyDrift { drift, allowed, t });
        }
        out.push(s);
    }
    Ok(out)
}

/// Uniform output grid of `samples` points on `[t0, t1]` (a single point when
/// `samples <= 1` or the interval is empty).
pub fn uniform_times(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    if samples <= 1 || t0 == t1 {
        return vec![t0];
    }
    (0..samples)
        .map(|i| t0 + (t1 - t0) * i as f64 / (samples - 1) as f64)
        .collect()
}
