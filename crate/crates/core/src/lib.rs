//! Classical and quantum solutions of the harmonic oscillator with an
//! isotonic term on the sphere (λ > 0) and the hyperbolic plane (λ < 0).
//!
//! * [`model`]: parameters, effective potential, regime classification.
//! * [`closed_form`]: exact trajectories r²(t), φ(t).
//! * [`integrator`]: numerical Euler–Lagrange integration (classical oracle).
//! * [`spectrum`]: Jacobi-polynomial eigenfunctions and energies.
//! * [`oracle`]: finite-volume and shooting eigensolvers (quantum oracle).
//! * [`verify`]: the verification campaign built on the two oracles.

pub mod closed_form;
pub mod error;
pub mod integrator;
pub mod jacobi;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod spectrum;
pub mod verify;

pub use closed_form::{ClosedFormTrajectory, PolarState};
pub use error::{Error, Result};
pub use integrator::{DynamicalState, IntegratorConfig, Method};
pub use model::{ClassicalSetup, Classification, ModelParams, QuarticCoefficients, RegimeTag, TrajectoryRegime};
pub use spectrum::{QuantumLevel, RadialWavefunction};
