use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("radius {r} outside the admissible domain {domain}")]
    OutOfDomain { r: f64, domain: String },

    #[error("energy {energy} is below every attainable value of the effective potential (forbidden)")]
    ForbiddenRegime { energy: f64 },

    #[error("level (n_r = {n_r}, m = {m}) is not normalizable: n = {n} violates n < beta/lambda - 1/2 = {bound}")]
    NotNormalizable { n_r: u32, m: i32, n: f64, bound: f64 },

    #[error("initial state inconsistent with setup: {0}")]
    InconsistentState(String),

    #[error("integration failed: {0}")]
    Integration(#[from] crate::ode::OdeError),

    #[error("energy drift {drift:e} exceeds the allowed {allowed:e} at t = {t}")]
    EnergyDrift { drift: f64, allowed: f64, t: f64 },

    #[error("requested {requested} bound states but only {available} lie below the continuum threshold {threshold}")]
    BeyondBoundSector {
        requested: usize,
        available: usize,
        threshold: f64,
    },

    #[error("eigenvalue not converged under grid refinement: relative change {change:e} > {tol:e}")]
    NotConverged { change: f64, tol: f64 },

    #[error("shooting integration blew up: {0}")]
    ShootingBlowUp(String),

    #[error("trial energy {energy} is outside the admissible shooting window: {reason}")]
    ShootingWindow { energy: f64, reason: String },

    #[error("no sign change of the matching defect in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}
