//! Model constants, the effective potential and classification of
//! classical trajectories into regimes.
//!
//! The reduced radial Lagrangian is
//!
//! ```text
//! L = ½ (ṙ²/(1+λr²) + J²/r²) − ½ α²r²/(1+λr²) − k/(2r²)
//! ```
//!
//! with curvature parameter λ = −κ. Energy conservation turns the radial
//! motion into the quadrature `2 dt = d(r²) / √(a + b r² + c r⁴)`.

use crate::error::{Error, Result};

/// Relative band around `α²/(2λ)` inside which an energy is treated as the
/// limiting (separatrix) value.
pub const LIMITING_TOLERANCE: f64 = 1e-9;

/// Absolute band (scaled by `max(1, |V_min|)`) below the potential minimum
/// that still counts as a circular orbit rather than a forbidden energy.
pub const FORBIDDEN_TOLERANCE: f64 = 1e-12;

/// Curvature, oscillator and isotonic constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    lambda: f64,
    alpha: f64,
    k: f64,
    beta: f64,
}

impl ModelParams {
    /// Builds a parameter set. `lambda` must be non-zero, `alpha` positive
    /// and `k` non-negative (`k = 0` reproduces the model without the
    /// isotonic term).
    pub fn new(lambda: f64, alpha: f64, k: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and non-zero (lambda != 0; the flat-space limit is not supported), got {lambda}"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !k.is_finite() || k < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "k must be non-negative, got {k}"
            )));
        }
        Ok(Self {
            lambda,
            alpha,
            k,
            beta: positive_beta(lambda, alpha),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Quantum coupling β > 0 with α² = β(β+λ).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Curvature κ = −λ (κ > 0 on the sphere).
    pub fn kappa(&self) -> f64 {
        -self.lambda
    }

    /// Upper end of the radial domain: `1/√|λ|` for λ < 0, infinite otherwise.
    pub fn radial_limit(&self) -> f64 {
        if self.lambda < 0.0 {
            1.0 / (-self.lambda).sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// `α²/(2λ)`, the r → ∞ asymptote of the effective potential when λ > 0.
    pub fn asymptote(&self) -> f64 {
        self.alpha * self.alpha / (2.0 * self.lambda)
    }

    /// Checks `r > 0` and, when λ < 0, `r < 1/√|λ|`.
    pub fn check_radius(&self, r: f64) -> Result<()> {
        let inside = r > 0.0 && r.is_finite() && (self.lambda > 0.0 || -self.lambda * r * r < 1.0);
        if inside {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                r,
                domain: self.domain_description(),
            })
        }
    }

    fn domain_description(&self) -> String {
        if self.lambda > 0.0 {
            "(0, inf)".to_string()
        } else {
            format!("(0, {})", self.radial_limit())
        }
    }

    /// Integration constant from the energy: `C = 2E − α²/λ`.
    pub fn constant_from_energy(&self, energy: f64) -> f64 {
        2.0 * energy - self.alpha * self.alpha / self.lambda
    }

    /// Energy from the integration constant: `E = C/2 + α²/(2λ)`.
    pub fn energy_from_constant(&self, constant: f64) -> f64 {
        0.5 * constant + self.asymptote()
    }

    /// `V_eff(r) = ½ α²r²/(1+λr²) + (J²+k)/(2r²)`.
    pub fn effective_potential(&self, j: f64, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.effective_potential_unchecked(j, r))
    }

    pub(crate) fn effective_potential_unchecked(&self, j: f64, r: f64) -> f64 {
        let r2 = r * r;
        0.5 * self.alpha * self.alpha * r2 / (1.0 + self.lambda * r2) + barrier(self, j) / (2.0 * r2)
    }

    /// Location and value of the effective-potential minimum, if any.
    ///
    /// For λ > 0 the minimum exists only when `√(J²+k) < α/λ`.
    pub fn effective_minimum(&self, j: f64) -> Option<PotentialMinimum> {
        let s = barrier(self, j).sqrt();
        let denom = self.alpha - self.lambda * s;
        if denom <= 0.0 {
            return None;
        }
        Some(PotentialMinimum {
            r_min: (s / denom).sqrt(),
            v_min: 0.5 * s * (2.0 * self.alpha - self.lambda * s),
        })
    }
}

fn positive_beta(lambda: f64, alpha: f64) -> f64 {
    // (−λ + √(λ²+4α²))/2 written to avoid cancellation when λ > 0.
    let root = (lambda * lambda + 4.0 * alpha * alpha).sqrt();
    if lambda > 0.0 {
        2.0 * alpha * alpha / (lambda + root)
    } else {
        0.5 * (root - lambda)
    }
}

/// `J² + k`, the combined centrifugal and isotonic barrier strength.
pub(crate) fn barrier(params: &ModelParams, j: f64) -> f64 {
    j * j + params.k
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialMinimum {
    pub r_min: f64,
    pub v_min: f64,
}

/// A classical initial-value problem: parameters, angular momentum, energy
/// and the two phase constants of the closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSetup {
    pub params: ModelParams,
    /// Signed angular momentum `J = r² φ̇`.
    pub j: f64,
    energy: f64,
    constant: f64,
    /// Phase φ appearing inside the radial closed forms.
    pub phase: f64,
    /// Angular integration constant K.
    pub angle_constant: f64,
}

impl ClassicalSetup {
    pub fn from_energy(params: ModelParams, j: f64, energy: f64) -> Result<Self> {
        check_finite("J", j)?;
        check_finite("E", energy)?;
        Ok(Self {
            params,
            j,
            energy,
            constant: params.constant_from_energy(energy),
            phase: 0.0,
            angle_constant: 0.0,
        })
    }

    pub fn from_constant(params: ModelParams, j: f64, constant: f64) -> Result<Self> {
        check_finite("J", j)?;
        check_finite("C", constant)?;
        Ok(Self {
            params,
            j,
            energy: params.energy_from_constant(constant),
            constant,
            phase: 0.0,
            angle_constant: 0.0,
        })
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_angle_constant(mut self, k_angle: f64) -> Self {
        self.angle_constant = k_angle;
        self
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// The integration constant C.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn quartic(&self) -> QuarticCoefficients {
        let p = &self.params;
        let g = barrier(p, self.j);
        QuarticCoefficients {
            a: -g,
            b: self.constant + p.alpha * p.alpha / p.lambda - p.lambda * g,
            c: self.constant * p.lambda,
        }
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

/// Coefficients of `a + b u + c u²` with `u = r²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuarticCoefficients {
    pub fn eval(&self, u: f64) -> f64 {
        self.a + u * (self.b + u * self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    Bounded,
    Unbounded,
    Limiting,
    Forbidden,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::Bounded => "Bounded",
            RegimeTag::Unbounded => "Unbounded",
            RegimeTag::Limiting => "Limiting",
            RegimeTag::Forbidden => "Forbidden",
        }
    }
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Trajectory regime with its closed-form coefficients.
///
/// * `Bounded`: `r² = A sin(2ωt + φ) + B`
/// * `Unbounded`: `r² = A cosh(2ωt + φ) + B`
/// * `Limiting`: `r² = (At + φ)² + B`
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryRegime {
    Bounded { omega: f64, amplitude: f64, offset: f64 },
    Unbounded { omega: f64, amplitude: f64, offset: f64 },
    Limiting { amplitude: f64, offset: f64 },
    Forbidden,
}

impl TrajectoryRegime {
    pub fn tag(&self) -> RegimeTag {
        match self {
            TrajectoryRegime::Bounded { .. } => RegimeTag::Bounded,
            TrajectoryRegime::Unbounded { .. } => RegimeTag::Unbounded,
            TrajectoryRegime::Limiting { .. } => RegimeTag::Limiting,
            TrajectoryRegime::Forbidden => RegimeTag::Forbidden,
        }
    }

    pub fn omega(&self) -> Option<f64> {
        match *self {
            TrajectoryRegime::Bounded { omega, .. } | TrajectoryRegime::Unbounded { omega, .. } => {
                Some(omega)
            }
            _ => None,
        }
    }

    pub fn amplitude(&self) -> Option<f64> {
        match *self {
            TrajectoryRegime::Bounded { amplitude, .. }
            | TrajectoryRegime::Unbounded { amplitude, .. }
            | TrajectoryRegime::Limiting { amplitude, .. } => Some(amplitude),
            TrajectoryRegime::Forbidden => None,
        }
    }

    pub fn offset(&self) -> Option<f64> {
        match *self {
            TrajectoryRegime::Bounded { offset, .. }
            | TrajectoryRegime::Unbounded { offset, .. }
            | TrajectoryRegime::Limiting { offset, .. } => Some(offset),
            TrajectoryRegime::Forbidden => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub regime: TrajectoryRegime,
    /// Set when λ > 0 and the effective potential has no minimum
    /// (`√(J²+k) ≥ α/λ`), a parameter range without a closed-form
    /// discussion of bounded or limiting motion.
    pub outside_discussed_range: bool,
}

pub fn classify(setup: &ClassicalSetup) -> Classification {
    let p = &setup.params;
    let e = setup.energy();
    let minimum = p.effective_minimum(setup.j);
    let outside = p.lambda > 0.0 && minimum.is_none();
    let regime = |regime| Classification {
        regime,
        outside_discussed_range: outside,
    };

    if p.lambda > 0.0 {
        let asym = p.asymptote();
        if (e - asym).abs() <= LIMITING_TOLERANCE * e.abs().max(1.0) {
            return regime(match minimum {
                Some(_) => limiting(setup),
                None => TrajectoryRegime::Forbidden,
            });
        }
        if e > asym {
            return regime(unbounded(setup));
        }
        match minimum {
            Some(min) if !below_minimum(e, min.v_min) => regime(bounded(setup)),
            _ => regime(TrajectoryRegime::Forbidden),
        }
    } else {
        // A minimum always exists for λ < 0.
        let min = minimum.expect("effective potential has a minimum for lambda < 0");
        if below_minimum(e, min.v_min) {
            regime(TrajectoryRegime::Forbidden)
        } else {
            regime(bounded(setup))
        }
    }
}

fn below_minimum(e: f64, v_min: f64) -> bool {
    e < v_min - FORBIDDEN_TOLERANCE * v_min.abs().max(1.0)
}

fn bounded(setup: &ClassicalSetup) -> TrajectoryRegime {
    let p = &setup.params;
    let (alpha, lambda) = (p.alpha, p.lambda);
    let s = barrier(p, setup.j).sqrt();
    let w2 = setup.quartic().c.abs();
    let omega = w2.sqrt();
    let lo = (alpha - lambda * s).powi(2) - w2;
    let hi = (alpha + lambda * s).powi(2) - w2;
    // Tiny negative radicands appear only for circular orbits.
    let amplitude = (lo * hi).max(0.0).sqrt() / (2.0 * lambda.abs() * w2);
    let offset = (alpha * alpha - lambda * lambda * s * s - w2) / (2.0 * lambda * w2);
    TrajectoryRegime::Bounded {
        omega,
        amplitude,
        offset,
    }
}

fn unbounded(setup: &ClassicalSetup) -> TrajectoryRegime {
    let p = &setup.params;
    let (alpha, lambda) = (p.alpha, p.lambda);
    let s = barrier(p, setup.j).sqrt();
    let w2 = setup.quartic().c;
    let omega = w2.sqrt();
    let lo = (alpha - lambda * s).powi(2) + w2;
    let hi = (alpha + lambda * s).powi(2) + w2;
    let amplitude = (lo * hi).sqrt() / (2.0 * lambda * w2);
    let offset = -(alpha * alpha - lambda * lambda * s * s + w2) / (2.0 * lambda * w2);
    TrajectoryRegime::Unbounded {
        omega,
        amplitude,
        offset,
    }
}

fn limiting(setup: &ClassicalSetup) -> TrajectoryRegime {
    let p = &setup.params;
    let g = barrier(p, setup.j);
    let gap = p.alpha * p.alpha - p.lambda * p.lambda * g;
    TrajectoryRegime::Limiting {
        amplitude: (gap / p.lambda).sqrt(),
        offset: p.lambda * g / gap,
    }
}
