use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad configuration or parameters outside the model.
    #[error("{0}")]
    Usage(String),
    /// A numerical method failed (integrator, eigensolver, quadrature).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The verification campaign ran but at least one check failed.
    #[error("verification failed: {failed} of {total} checks")]
    VerificationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<isocurve::Error> for CliError {
    fn from(e: isocurve::Error) -> Self {
        use isocurve::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::OutOfDomain { .. }
            | E::ForbiddenRegime { .. }
            | E::NotNormalizable { .. }
            | E::InconsistentState(_)
            | E::BeyondBoundSector { .. }
            | E::ShootingWindow { .. } => CliError::Usage(e.to_string()),
            E::Integration(_)
            | E::EnergyDrift { .. }
            | E::NotConverged { .. }
            | E::ShootingBlowUp(_)
            | E::NoBracket { .. } => CliError::Numerical(e.to_string()),
        }
    }
}
