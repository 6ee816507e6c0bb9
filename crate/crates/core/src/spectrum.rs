//! Analytic quantum sector.
//!
//! With ħ = 1 and `Ψ(r, φ) = R(r) e^{imφ}/√(2π)`, the radial equation is
//!
//! ```text
//! r²(1+λr²)R'' + r(1+2λr²)R' + (−β(β+λ)r⁴/(1+λr²) + 2Er² − μ²)R = 0,   μ² = m² + k
//! ```
//!
//! and its polynomial solutions are
//!
//! ```text
//! R ∝ (1+λr²)^{−β/(2λ)} r^μ P_{n_r}^{(μ, −β/λ−½)}(1+2λr²),
//! E_n = (n+1)(−λn/2 + β),   n = 2n_r + μ.
//! ```
//!
//! Wavefunctions are normalized under `(1+λr²)^{−1/2} r dr`. For λ > 0 only
//! levels with `n < β/λ − ½` are normalizable; for λ < 0 every level is.

use crate::error::{Error, Result};
use crate::jacobi::{jacobi, jacobi_derivatives, jacobi_scaled};
use crate::model::ModelParams;
use crate::quadrature::{RadialPoint, RadialQuadrature};

/// Jacobi arguments beyond this use the overflow-safe scaled evaluation.
const LARGE_ARGUMENT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumLevel {
    pub n_r: u32,
    pub m: i32,
    /// μ = +√(m²+k)
    pub mu: f64,
    /// n = 2n_r + μ (not necessarily an integer)
    pub n: f64,
    pub energy: f64,
    pub normalizable: bool,
}

/// `β/λ − ½` for λ > 0, `None` on the hyperbolic side where every level is
/// normalizable.
pub fn normalizability_bound(params: &ModelParams) -> Option<f64> {
    (params.lambda() > 0.0).then(|| params.beta() / params.lambda() - 0.5)
}

pub fn energy_level(params: &ModelParams, n_r: u32, m: i32) -> QuantumLevel {
    let mf = m as f64;
    let mu = (mf * mf + params.k()).sqrt();
    let n = 2.0 * n_r as f64 + mu;
    let energy = (n + 1.0) * (-0.5 * params.lambda() * n + params.beta());
    let normalizable = normalizability_bound(params).is_none_or(|bound| n < bound);
    QuantumLevel {
        n_r,
        m,
        mu,
        n,
        energy,
        normalizable,
    }
}

/// Levels with `|m| ≤ max_m`, `n_r ≤ max_nr` that are normalizable, sorted by
/// energy.
pub fn enumerate_bound_states(params: &ModelParams, max_m: u32, max_nr: u32) -> Vec<QuantumLevel> {
    let max_m = max_m as i32;
    let mut levels: Vec<QuantumLevel> = (0..=max_nr)
        .flat_map(|n_r| (-max_m..=max_m).map(move |m| (n_r, m)))
        .map(|(n_r, m)| energy_level(params, n_r, m))
        .filter(|l| l.normalizable)
        .collect();
    levels.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(a.n_r.cmp(&b.n_r))
            .then(a.m.cmp(&b.m))
    });
    levels
}

/// Value and r-derivatives of the unnormalized radial function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Closed-form radial solution for a level, without normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialShape {
    params: ModelParams,
    n_r: u32,
    mu: f64,
    /// Jacobi parameters (a, b) = (μ, −β/λ − ½)
    a: f64,
    b: f64,
    /// Exponent −β/(2λ) of (1+λr²)
    power: f64,
}

impl RadialShape {
    pub fn new(params: &ModelParams, level: &QuantumLevel) -> Self {
        let (l, beta) = (params.lambda(), params.beta());
        Self {
            params: *params,
            n_r: level.n_r,
            mu: level.mu,
            a: level.mu,
            b: -beta / l - 0.5,
            power: -beta / (2.0 * l),
        }
    }

    /// Value at a quadrature point; robust for very large `u` (λ > 0) and
    /// near `u = 1/|λ|` (λ < 0).
    pub fn value_at(&self, p: &RadialPoint) -> f64 {
        let l = self.params.lambda();
        let x = if l < 0.0 {
            2.0 * p.one_plus_lambda_u - 1.0
        } else {
            1.0 + 2.0 * l * p.u
        };
        let mut log_mag = self.power * p.one_plus_lambda_u.ln();
        if self.mu != 0.0 {
            log_mag += 0.5 * self.mu * p.u.ln();
        }
        let poly = if x > LARGE_ARGUMENT {
            log_mag += self.n_r as f64 * x.ln();
            jacobi_scaled(self.n_r, self.a, self.b, x)
        } else {
            jacobi(self.n_r, self.a, self.b, x)
        };
        log_mag.exp() * poly
    }

    pub fn value(&self, r: f64) -> f64 {
        self.jet(r).value
    }

    /// Value, first and second r-derivatives, by analytic differentiation.
    pub fn jet(&self, r: f64) -> RadialJet {
        let l = self.params.lambda();
        let r2 = r * r;
        let g = 1.0 + l * r2;
        let x = 1.0 + 2.0 * l * r2;
        let w = g.powf(self.power) * r.powf(self.mu);
        let l1 = 2.0 * self.power * l * r / g + self.mu / r;
        let l2 = 2.0 * self.power * l * (1.0 - l * r2) / (g * g) - self.mu / r2;
        let w1 = w * l1;
        let w2 = w * (l1 * l1 + l2);
        let p = jacobi(self.n_r, self.a, self.b, x);
        let (dp, ddp) = jacobi_derivatives(self.n_r, self.a, self.b, x);
        let p1 = dp * 4.0 * l * r;
        let p2 = ddp * 16.0 * l * l * r2 + dp * 4.0 * l;
        RadialJet {
            value: w * p,
            d1: w1 * p + w * p1,
            d2: w2 * p + 2.0 * w1 * p1 + w * p2,
        }
    }
}

/// Normalized radial eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialWavefunction {
    pub level: QuantumLevel,
    pub params: ModelParams,
    pub norm: f64,
    shape: RadialShape,
}

impl RadialWavefunction {
    pub fn shape(&self) -> &RadialShape {
        &self.shape
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.params.check_radius(r)?;
        Ok(self.norm * self.shape.value(r))
    }

    pub fn value_at(&self, p: &RadialPoint) -> f64 {
        self.norm * self.shape.value_at(p)
    }

    /// Normalized value and r-derivatives.
    pub fn jet(&self, r: f64) -> RadialJet {
        let j = self.shape.jet(r);
        RadialJet {
            value: self.norm * j.value,
            d1: self.norm * j.d1,
            d2: self.norm * j.d2,
        }
    }
}

/// `∫ f(r)·g(r) (1+λr²)^{−1/2} r dr` for functions given at quadrature points.
pub fn measure_integral<F: Fn(&RadialPoint) -> f64>(quad: &RadialQuadrature, f: F) -> f64 {
    quad.integrate(|p| 0.5 * f(p) / p.one_plus_lambda_u.sqrt())
}

/// Normalizes a level under the curved measure.
pub fn normalize(params: &ModelParams, level: &QuantumLevel) -> Result<RadialWavefunction> {
    normalize_with(params, level, &RadialQuadrature::new(params.lambda()))
}

pub fn normalize_with(
    params: &ModelParams,
    level: &QuantumLevel,
    quad: &RadialQuadrature,
) -> Result<RadialWavefunction> {
    if let Some(bound) = normalizability_bound(params) {
        if level.n >= bound {
            return Err(Error::NotNormalizable {
                n_r: level.n_r,
                m: level.m,
                n: level.n,
                bound,
            });
        }
    }
    let shape = RadialShape::new(params, level);
    let integral = measure_integral(quad, |p| shape.value_at(p).powi(2));
    if !(integral.is_finite() && integral > 0.0) {
        return Err(Error::NotNormalizable {
            n_r: level.n_r,
            m: level.m,
            n: level.n,
            bound: normalizability_bound(params).unwrap_or(f64::INFINITY),
        });
    }
    // Sign convention: positive near the origin (P_n(1) > 0 for μ > −1).
    Ok(RadialWavefunction {
        level: *level,
        params: *params,
        norm: integral.sqrt().recip(),
        shape,
    })
}

/// Measure-weighted square integral of the unnormalized closed form over
/// `0 < r < r_max`. Finite for every level; used to exhibit the divergence
/// of excluded levels.
pub fn truncated_norm(params: &ModelParams, level: &QuantumLevel, r_max: f64) -> f64 {
    let shape = RadialShape::new(params, level);
    let quad = RadialQuadrature::new(params.lambda()).with_step(0.01);
    quad.integrate_up_to(
        |p| 0.5 * shape.value_at(p).powi(2) / p.one_plus_lambda_u.sqrt(),
        r_max * r_max,
    )
}

/// Measure-weighted overlap of two normalized wavefunctions.
pub fn overlap(a: &RadialWavefunction, b: &RadialWavefunction) -> f64 {
    let quad = RadialQuadrature::new(a.params.lambda());
    measure_integral(&quad, |p| a.value_at(p) * b.value_at(p))
}

/// Quadrature of the energy functional
/// `∫ [½(1+λr²)R'² + ½α²r²R²/(1+λr²) + μ²R²/(2r²)] dμ / ∫ R² dμ`,
/// the symmetrized form of the radial equation. Independent of the
/// eigenvalue formula.
pub fn rayleigh_quotient(wf: &RadialWavefunction) -> f64 {
    let p = &wf.params;
    let a2 = p.alpha() * p.alpha();
    let mu2 = wf.level.mu * wf.level.mu;
    let quad = RadialQuadrature::new(p.lambda());
    let numer = measure_integral(&quad, |pt| {
        let jet = wf.jet(pt.r());
        0.5 * pt.one_plus_lambda_u * jet.d1 * jet.d1
            + 0.5 * a2 * pt.u / pt.one_plus_lambda_u * jet.value * jet.value
            + 0.5 * mu2 / pt.u * jet.value * jet.value
    });
    let denom = measure_integral(&quad, |pt| wf.value_at(pt).powi(2));
    numer / denom
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    /// Left side of the radial equation.
    pub raw: f64,
    /// Largest magnitude among the three terms of the equation.
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.raw.abs()
        } else {
            self.raw.abs() / self.scale
        }
    }
}

/// Radial-equation residual of the closed form at r.
pub fn radial_residual(params: &ModelParams, level: &QuantumLevel, r: f64) -> Result<Residual> {
    radial_residual_at_energy(params, level, level.energy, r)
}

/// Residual with the energy in the equation replaced by `energy` (negative
/// control: only the true eigenvalue makes it vanish).
pub fn radial_residual_at_energy(
    params: &ModelParams,
    level: &QuantumLevel,
    energy: f64,
    r: f64,
) -> Result<Residual> {
    params.check_radius(r)?;
    let (l, beta) = (params.lambda(), params.beta());
    let jet = RadialShape::new(params, level).jet(r);
    let r2 = r * r;
    let g = 1.0 + l * r2;
    let t1 = r2 * g * jet.d2;
    let t2 = r * (1.0 + 2.0 * l * r2) * jet.d1;
    let t3 = (-beta * (beta + l) * r2 * r2 / g + 2.0 * energy * r2 - level.mu * level.mu) * jet.value;
    Ok(Residual {
        raw: t1 + t2 + t3,
        scale: t1.abs().max(t2.abs()).max(t3.abs()),
    })
}
