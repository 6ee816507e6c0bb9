//! Exact trajectories `r²(t)` and `φ(t)` for the three admissible regimes.
//!
//! The angular motion follows from `φ̇ = J/r²`. In the bounded regime the
//! relation between φ and t passes through `tan(ωt + φ₀/2)`, which is only
//! defined modulo π, so the evaluation tracks the branch index of that
//! argument and adds `π·J/√(J²+k)` per crossing. The unbounded and limiting
//! regimes involve `tanh` and a linear function and need a single branch.
//!
//! The angular constant K is defined on the principal branch at t = 0:
//! `φ(0) = K + (J/√(J²+k))·arctan(RHS(0))`, where RHS is the right-hand side
//! of the tan relation. Use [`ClosedFormTrajectory::angle_constant_for`] to
//! obtain K from a prescribed initial angle.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{barrier, ClassicalSetup, TrajectoryRegime};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    pub r: f64,
    pub dr_dt: f64,
    pub phi: f64,
    pub dphi_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTrajectory {
    setup: ClassicalSetup,
    regime: TrajectoryRegime,
    /// √(J²+k)
    root_barrier: f64,
    /// Branch index of `ωt + φ₀/2` at t = 0 (bounded regime only).
    initial_branch: i64,
}

impl ClosedFormTrajectory {
    pub fn new(setup: ClassicalSetup) -> Result<Self> {
        let regime = setup.classify().regime;
        if let TrajectoryRegime::Forbidden = regime {
            return Err(Error::ForbiddenRegime {
                energy: setup.energy(),
            });
        }
        let initial_branch = match regime {
            TrajectoryRegime::Bounded { .. } => branch_of(0.5 * setup.phase),
            _ => 0,
        };
        Ok(Self {
            setup,
            regime,
            root_barrier: barrier(&setup.params, setup.j).sqrt(),
            initial_branch,
        })
    }

    pub fn setup(&self) -> &ClassicalSetup {
        &self.setup
    }

    pub fn regime(&self) -> TrajectoryRegime {
        self.regime
    }

    /// Radial period π/ω of a bounded orbit.
    pub fn period(&self) -> Option<f64> {
        match self.regime {
            TrajectoryRegime::Bounded { omega, .. } => Some(PI / omega),
            _ => None,
        }
    }

    /// Closed interval of r² visited by the orbit (upper end may be infinite).
    pub fn r_squared_range(&self) -> (f64, f64) {
        match self.regime {
            TrajectoryRegime::Bounded {
                amplitude, offset, ..
            } => (offset - amplitude, offset + amplitude),
            TrajectoryRegime::Unbounded {
                amplitude, offset, ..
            } => (offset + amplitude, f64::INFINITY),
            TrajectoryRegime::Limiting { offset, .. } => (offset, f64::INFINITY),
            TrajectoryRegime::Forbidden => unreachable!("constructor rejects forbidden regimes"),
        }
    }

    pub fn r_squared_at(&self, t: f64) -> f64 {
        self.r_squared_and_rate(t).0
    }

    /// `(r², d(r²)/dt)` at time t.
    fn r_squared_and_rate(&self, t: f64) -> (f64, f64) {
        let phase = self.setup.phase;
        match self.regime {
            TrajectoryRegime::Bounded {
                omega,
                amplitude,
                offset,
            } => {
                let x = 2.0 * omega * t + phase;
                (
                    amplitude * x.sin() + offset,
                    2.0 * omega * amplitude * x.cos(),
                )
            }
            TrajectoryRegime::Unbounded {
                omega,
                amplitude,
                offset,
            } => {
                let x = 2.0 * omega * t + phase;
                (
                    amplitude * x.cosh() + offset,
                    2.0 * omega * amplitude * x.sinh(),
                )
            }
            TrajectoryRegime::Limiting { amplitude, offset } => {
                let x = amplitude * t + phase;
                (x * x + offset, 2.0 * amplitude * x)
            }
            TrajectoryRegime::Forbidden => unreachable!("constructor rejects forbidden regimes"),
        }
    }

    /// Continuous polar angle φ(t).
    pub fn phi_at(&self, t: f64) -> f64 {
        let k_angle = self.setup.angle_constant;
        let j = self.setup.j;
        if j == 0.0 {
            return k_angle;
        }
        k_angle + j / self.root_barrier * self.winding(t)
    }

    /// `(φ − K)·√(J²+k)/J`, unwrapped.
    fn winding(&self, t: f64) -> f64 {
        let s = self.root_barrier;
        let phase = self.setup.phase;
        match self.regime {
            TrajectoryRegime::Bounded {
                omega,
                amplitude,
                offset,
            } => {
                let theta = omega * t + 0.5 * phase;
                let branch = branch_of(theta);
                let reduced = theta - branch as f64 * PI;
                // arctan(ω(B tan θ + A)/s) on cos θ ≥ 0, free of the poles of tan.
                let principal = f64::atan2(
                    omega * (offset * reduced.sin() + amplitude * reduced.cos()),
                    s * reduced.cos(),
                );
                principal + (branch - self.initial_branch) as f64 * PI
            }
            TrajectoryRegime::Unbounded {
                omega,
                amplitude,
                offset,
            } => (omega / s * (amplitude - offset) * (omega * t + 0.5 * phase).tanh()).atan(),
            TrajectoryRegime::Limiting { amplitude, .. } => {
                (amplitude / s * (amplitude * t + phase)).atan()
            }
            TrajectoryRegime::Forbidden => unreachable!("constructor rejects forbidden regimes"),
        }
    }

    /// The angular constant K that makes φ(0) equal `initial_angle`.
    pub fn angle_constant_for(&self, initial_angle: f64) -> f64 {
        let j = self.setup.j;
        if j == 0.0 {
            return initial_angle;
        }
        initial_angle - j / self.root_barrier * self.winding(0.0)
    }

    /// Sets K from a prescribed φ(0).
    pub fn with_initial_angle(mut self, initial_angle: f64) -> Self {
        self.setup.angle_constant = self.angle_constant_for(initial_angle);
        self
    }

    /// Angle swept per radial period of a bounded orbit.
    pub fn apsidal_advance(&self) -> Option<f64> {
        self.period()
            .map(|_| PI * self.setup.j / self.root_barrier)
    }

    pub fn state_at(&self, t: f64) -> PolarState {
        let (u, du) = self.r_squared_and_rate(t);
        let r = u.max(0.0).sqrt();
        PolarState {
            r,
            dr_dt: if r > 0.0 { du / (2.0 * r) } else { 0.0 },
            phi: self.phi_at(t),
            dphi_dt: self.setup.j / u,
        }
    }

    /// `½ ṙ²/(1+λr²) + V_eff(r)` evaluated on the closed form.
    pub fn energy_at(&self, t: f64) -> f64 {
        let st = self.state_at(t);
        let p = &self.setup.params;
        0.5 * st.dr_dt * st.dr_dt / (1.0 + p.lambda() * st.r * st.r)
            + p.effective_potential_unchecked(self.setup.j, st.r)
    }
}

/// Index n such that θ − nπ ∈ [−π/2, π/2).
fn branch_of(theta: f64) -> i64 {
    ((theta + 0.5 * PI) / PI).floor() as i64
}
