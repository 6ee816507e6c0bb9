//! Numerical eigenvalue oracle for the radial equation.
//!
//! The radial equation is rewritten in Sturm–Liouville form in `u = r²`,
//!
//! ```text
//! −(p R_u)_u + q R = E w R,
//! p = u√(1+λu),  w = 1/(2√(1+λu)),  q = [α²u/(1+λu) + μ²/u] / (4√(1+λu)),
//! ```
//!
//! where `w du` is exactly the normalization measure `(1+λr²)^{−1/2} r dr`.
//! It is then mapped to the logarithmic coordinate ξ of
//! [`crate::quadrature::LogCoordinate`], where both ends of the domain are
//! regular-singular points with power-law (exponential in ξ) solutions.
//! Nothing here uses the closed-form spectrum.
//!
//! Two independent methods are provided:
//!
//! * [`solve_eigenvalues`]: cell-centred second-order finite volumes on a
//!   uniform ξ grid, giving a symmetric tridiagonal pencil `A − E M` whose
//!   eigenvalues are located by Sturm-sequence bisection and whose vectors
//!   come from inverse iteration.
//! * [`shooting_check`]: integration of the first-order system from both
//!   ends with [`crate::ode::Dopri5`] and a matching defect at an interior
//!   point.
//!
//! For λ > 0 the bound sector lies below the continuum threshold
//! `α²/(2λ) + λ/8`, obtained from the indicial equation at infinity.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ode::{Dopri5, OdeError, OdeSystem, OutOfDomain};
use crate::quadrature::{LogCoordinate, RadialPoint};

/// Sturm–Liouville coefficients in ξ for a given (λ, α, μ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOperator {
    coord: LogCoordinate,
    alpha2: f64,
    mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub p: f64,
    pub q: f64,
    pub w: f64,
}

impl RadialOperator {
    pub fn new(params: &ModelParams, mu: f64) -> Self {
        Self {
            coord: LogCoordinate::new(params.lambda()),
            alpha2: params.alpha() * params.alpha(),
            mu,
        }
    }

    pub fn coord(&self) -> &LogCoordinate {
        &self.coord
    }

    /// Coefficients of `−(P Y_ξ)_ξ + Q Y = E W Y` at ξ.
    pub fn coefficients(&self, xi: f64) -> Coefficients {
        let pt = self.coord.point(xi);
        self.coefficients_at(&pt)
    }

    fn coefficients_at(&self, pt: &RadialPoint) -> Coefficients {
        // du/dξ = J: P = p/J, Q = q J, W = w J.
        let g = pt.one_plus_lambda_u;
        let sg = g.sqrt();
        let u = pt.u;
        let jac = pt.jacobian;
        Coefficients {
            p: u * sg / jac,
            q: (self.alpha2 * u * jac / g + self.mu * self.mu * jac / u) / (4.0 * sg),
            w: 0.5 * jac / sg,
        }
    }

    fn lambda(&self) -> f64 {
        self.coord.lambda()
    }

    /// Inner-end exponent: Y ~ e^{(μ/2) ξ}.
    fn inner_exponent(&self) -> f64 {
        0.5 * self.mu
    }

    /// Growth rate −dlnY/dξ of the recessive solution at the outer end of a
    /// hyperbolic domain, `¼ + ¼√(1 + 4α²/λ²)`.
    fn hyperbolic_outer_decay(&self) -> f64 {
        let l = self.lambda();
        0.25 + 0.25 * (1.0 + 4.0 * self.alpha2 / (l * l)).sqrt()
    }

    /// Continuum threshold `α²/(2λ) + λ/8` (λ > 0 only).
    pub fn continuum_threshold(&self) -> Option<f64> {
        let l = self.lambda();
        (l > 0.0).then(|| self.alpha2 / (2.0 * l) + l / 8.0)
    }

    /// Recessive far-field exponent for λ > 0: R ~ (λu)^ρ with
    /// `ρ = −¼ − ¼√(1 − 4C/λ)`, C = 2E − α²/λ. `None` at or above threshold.
    fn spherical_outer_exponent(&self, energy: f64) -> Option<f64> {
        let l = self.lambda();
        let c = 2.0 * energy - self.alpha2 / l;
        let disc = 1.0 - 4.0 * c / l;
        (disc > 0.0).then(|| -0.25 - 0.25 * disc.sqrt())
    }
}

/// Uniform cell-centred grid in ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    /// Relative eigenvalue change tolerated between this grid and the grid
    /// with half the points.
    pub refinement_tol: f64,
}

impl GridSpec {
    /// Desk-scale default: 10⁴ cells. On the sphere the outer end is pushed
    /// far out because weakly bound states decay slowly. On the hyperbolic
    /// side ξ = 25 leaves `1 − |λ|r² ≈ 1e-11`, so neighbouring radii stay
    /// distinct in double precision.
    pub fn default_for(params: &ModelParams) -> Self {
        let xi_max = if params.lambda() > 0.0 { 250.0 } else { 25.0 };
        Self {
            points: 10_000,
            xi_min: -36.0,
            xi_max,
            refinement_tol: 1e-5,
        }
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn step(&self) -> f64 {
        (self.xi_max - self.xi_min) / self.points as f64
    }

    fn validate(&self) -> Result<()> {
        if self.points < 32 || self.xi_max.is_nan() || self.xi_min.is_nan() || self.xi_max <= self.xi_min {
            return Err(Error::InvalidParameter(
                "grid needs at least 32 points and xi_max > xi_min".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceInfo {
    pub points: usize,
    pub xi_range: (f64, f64),
    /// Largest radius of the grid.
    pub truncation_radius: f64,
    /// Second-order eigenvalue on the full grid, before extrapolation.
    pub raw_eigenvalue: f64,
    /// Extrapolated eigenvalue from the grids with half and a quarter of
    /// the points.
    pub coarse_eigenvalue: f64,
    pub bisection_iterations: usize,
    pub inverse_iterations: usize,
}

/// A numerical eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGridSolution {
    /// Radii of the cell centres, strictly increasing.
    pub grid: Vec<f64>,
    /// Cell-centre values of R, normalized so that `Σ W_i R_i² h = 1` and
    /// positive at the inner end.
    pub values: Vec<f64>,
    /// Quadrature weights `W_i h` of the normalization measure.
    pub weights: Vec<f64>,
    pub eigenvalue: f64,
    pub mu: f64,
    pub convergence: ConvergenceInfo,
}

impl RadialGridSolution {
    /// Measure-weighted overlap with a function of r.
    pub fn overlap_with<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.grid
            .iter()
            .zip(&self.values)
            .zip(&self.weights)
            .map(|((&r, &v), &w)| w * v * f(r))
            .sum()
    }
}

/// Symmetric tridiagonal pencil `A − E M` (M diagonal positive).
#[derive(Debug, Clone)]
struct Pencil {
    diag: Vec<f64>,
    off: Vec<f64>,
    mass: Vec<f64>,
    potential: Vec<f64>,
    centres: Vec<f64>,
    h: f64,
}

impl Pencil {
    fn assemble(op: &RadialOperator, grid: &GridSpec) -> Self {
        let n = grid.points;
        let h = grid.step();
        let centres: Vec<f64> = (0..n).map(|i| grid.xi_min + (i as f64 + 0.5) * h).collect();
        let faces: Vec<f64> = (0..=n)
            .map(|i| op.coefficients(grid.xi_min + i as f64 * h).p)
            .collect();
        let mut diag = vec![0.0; n];
        let mut mass = vec![0.0; n];
        let mut potential = vec![0.0; n];
        for i in 0..n {
            let c = op.coefficients(centres[i]);
            diag[i] = (faces[i] + faces[i + 1]) / (h * h) + c.q;
            mass[i] = c.w;
            potential[i] = c.q;
        }
        // Inner face: Robin condition Y' = (μ/2) Y carries outward flux.
        diag[0] -= faces[0] / (h * h);
        diag[0] += faces[0] * op.inner_exponent() / h;
        // Outer face.
        diag[n - 1] -= faces[n] / (h * h);
        if op.lambda() < 0.0 {
            diag[n - 1] += faces[n] * op.hyperbolic_outer_decay() / h;
        } else {
            // Dirichlet on the face, half a cell from the last centre.
            diag[n - 1] += 2.0 * faces[n] / (h * h);
        }
        let off = (1..n).map(|i| -faces[i] / (h * h)).collect();
        Self {
            diag,
            off,
            mass,
            potential,
            centres,
            h,
        }
    }

    /// Number of eigenvalues strictly below `e`.
    fn count_below(&self, e: f64) -> usize {
        let mut count = 0;
        let mut d = 0.0;
        for i in 0..self.diag.len() {
            let a = self.diag[i] - e * self.mass[i];
            d = if i == 0 {
                a
            } else {
                a - self.off[i - 1] * self.off[i - 1] / d
            };
            if d == 0.0 {
                d = -f64::MIN_POSITIVE.sqrt() * (a.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The flux part of A is positive semidefinite, so min Q/W bounds the
    /// spectrum from below.
    fn lower_bound(&self) -> f64 {
        self.potential
            .iter()
            .zip(&self.mass)
            .map(|(q, m)| q / m)
            .fold(f64::INFINITY, f64::min)
    }

    /// Index-th eigenvalue (0-based) by bisection on the Sturm count.
    fn eigenvalue(&self, index: usize) -> (f64, usize) {
        let mut lo = self.lower_bound();
        let mut hi = lo + lo.abs().max(1.0);
        while self.count_below(hi) <= index {
            hi = lo + 2.0 * (hi - lo);
        }
        let mut iters = 0;
        while hi - lo > 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) && iters < 400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            iters += 1;
        }
        (0.5 * (lo + hi), iters)
    }

    /// Inverse iteration at a converged eigenvalue, repeated until the
    /// iterate stops changing. Returns the vector and the iteration count.
    ///
    /// The start vector has equal weight in every cell under the mass norm;
    /// on the sphere the mass grows like e^{ξ/2} and a flat start would be
    /// dominated by the far field.
    fn eigenvector(&self, e: f64, max_iterations: usize) -> (Vec<f64>, usize) {
        let shift = e + 1e-10 * e.abs().max(1.0);
        let mut x: Vec<f64> = self.mass.iter().map(|m| m.sqrt().recip()).collect();
        let mut iterations = 0;
        while iterations < max_iterations {
            let rhs: Vec<f64> = x.iter().zip(&self.mass).map(|(v, m)| v * m).collect();
            let mut next = self.solve_shifted(shift, &rhs);
            let norm = next
                .iter()
                .zip(&self.mass)
                .map(|(v, m)| v * v * m * self.h)
                .sum::<f64>()
                .sqrt();
            let sign = if next.iter().find(|v| v.abs() > 0.0).is_some_and(|v| *v < 0.0) {
                -1.0
            } else {
                1.0
            };
            for v in &mut next {
                *v *= sign / norm;
            }
            iterations += 1;
            let change = next
                .iter()
                .zip(&x)
                .zip(&self.mass)
                .map(|((a, b), m)| (a - b).powi(2) * m * self.h)
                .sum::<f64>()
                .sqrt();
            x = next;
            if change < 1e-13 {
                break;
            }
        }
        (x, iterations)
    }

    /// Thomas algorithm for `(A − s M) x = rhs`.
    fn solve_shifted(&self, s: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let guard = |v: f64, scale: f64| {
            if v.abs() < 1e-300 {
                1e-14 * scale.max(1e-300)
            } else {
                v
            }
        };
        let a0 = self.diag[0] - s * self.mass[0];
        let b0 = guard(a0, self.diag[0].abs());
        c[0] = if n > 1 { self.off[0] / b0 } else { 0.0 };
        d[0] = rhs[0] / b0;
        for i in 1..n {
            let a = self.diag[i] - s * self.mass[i];
            let denom = guard(a - self.off[i - 1] * c[i - 1], self.diag[i].abs());
            c[i] = if i + 1 < n { self.off[i] / denom } else { 0.0 };
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}

/// Lowest `count` eigenvalues (ascending) with eigenvectors.
///
/// The stencil is second order, so each eigenvalue is Richardson-extrapolated
/// from the grid and the grid with half the points, `(4E_h − E_2h)/3`. The
/// same extrapolation from the half and quarter grids must agree with it to
/// `grid.refinement_tol`. On the sphere, requesting more states
/// than lie below the continuum threshold is an error; levels above it on
/// a finite grid are discretization artifacts, not physical states.
pub fn solve_eigenvalues(
    params: &ModelParams,
    mu: f64,
    count: usize,
    grid: &GridSpec,
) -> Result<Vec<RadialGridSolution>> {
    if mu.is_nan() || mu < 0.0 {
        return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
    }
    grid.validate()?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let op = RadialOperator::new(params, mu);
    let fine = Pencil::assemble(&op, grid);
    if let Some(threshold) = op.continuum_threshold() {
        let available = fine.count_below(threshold);
        if available < count {
            return Err(Error::BeyondBoundSector {
                requested: count,
                available,
                threshold,
            });
        }
    }
    let half = Pencil::assemble(&op, &grid.with_points(grid.points / 2));
    let quarter = Pencil::assemble(&op, &grid.with_points(grid.points / 4));
    let max_inverse_iterations = 50;
    let extrapolate = |fine: f64, coarse: f64| (4.0 * fine - coarse) / 3.0;

    (0..count)
        .map(|index| {
            let (raw, bisection_iterations) = fine.eigenvalue(index);
            let (e_half, _) = half.eigenvalue(index);
            let (e_quarter, _) = quarter.eigenvalue(index);
            let e = extrapolate(raw, e_half);
            let e_coarse = extrapolate(e_half, e_quarter);
            let change = ((e - e_coarse) / e).abs();
            if change > grid.refinement_tol {
                return Err(Error::NotConverged {
                    change,
                    tol: grid.refinement_tol,
                });
            }
            let (vector, inverse_iterations) = fine.eigenvector(raw, max_inverse_iterations);
            let grid_r: Vec<f64> = fine
                .centres
                .iter()
                .map(|&xi| op.coord().point(xi).r())
                .collect();
            let weights = fine.mass.iter().map(|m| m * fine.h).collect();
            Ok(RadialGridSolution {
                convergence: ConvergenceInfo {
                    points: grid.points,
                    xi_range: (grid.xi_min, grid.xi_max),
                    truncation_radius: *grid_r.last().expect("non-empty grid"),
                    raw_eigenvalue: raw,
                    coarse_eigenvalue: e_coarse,
                    bisection_iterations,
                    inverse_iterations,
                },
                grid: grid_r,
                values: vector,
                weights,
                eigenvalue: e,
                mu,
            })
        })
        .collect()
}

/// Linear system `Y' = F/P`, `F' = (Q − E W) Y` in ξ.
struct ShootingSystem {
    op: RadialOperator,
    energy: f64,
}

impl OdeSystem<2> for ShootingSystem {
    fn rhs(&self, xi: f64, y: &[f64; 2]) -> std::result::Result<[f64; 2], OutOfDomain> {
        let c = self.op.coefficients(xi);
        Ok([y[1] / c.p, (c.q - self.energy * c.w) * y[0]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    pub xi_inner: f64,
    pub xi_outer_hyperbolic: f64,
    pub xi_outer_spherical: f64,
    pub rel_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            xi_inner: -36.0,
            xi_outer_hyperbolic: 36.0,
            xi_outer_spherical: 40.0,
            rel_tol: 1e-12,
        }
    }
}

/// Matching defect at a trial energy.
///
/// Solutions are started with their recessive behaviour at both ends and
/// integrated to the minimum of the quantum effective potential
/// `½α²u/(1+λu) + μ²/(2u)`. The defect is the normalized Wronskian
/// `(Y_L Y'_R − Y_R Y'_L)/(|(Y_L, Y'_L)|·|(Y_R, Y'_R)|)`, i.e. the sine of
/// the angle between the two log-derivative directions: bounded, continuous
/// in E, and zero exactly at eigenvalues.
pub fn shooting_check(params: &ModelParams, mu: f64, energy: f64) -> Result<f64> {
    shooting_check_with(params, mu, energy, &ShootingConfig::default())
}

pub fn shooting_check_with(
    params: &ModelParams,
    mu: f64,
    energy: f64,
    cfg: &ShootingConfig,
) -> Result<f64> {
    if mu.is_nan() || mu < 0.0 || !energy.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "shooting needs mu >= 0 and finite energy, got mu = {mu}, E = {energy}"
        )));
    }
    let op = RadialOperator::new(params, mu);
    let (xi_outer, outer_rate) = if params.lambda() < 0.0 {
        (cfg.xi_outer_hyperbolic, -op.hyperbolic_outer_decay())
    } else {
        let rho = op
            .spherical_outer_exponent(energy)
            .ok_or_else(|| Error::ShootingWindow {
                energy,
                reason: format!(
                    "at or above the continuum threshold {}",
                    op.continuum_threshold().unwrap_or(f64::NAN)
                ),
            })?;
        (cfg.xi_outer_spherical, rho)
    };
    let xi_match = match_point(params, mu).clamp(cfg.xi_inner + 1.0, xi_outer - 1.0);
    let sys = ShootingSystem { op, energy };

    let start = |xi: f64, rate: f64| {
        let c = op.coefficients(xi);
        [1.0, c.p * rate]
    };
    let run = |from: f64, y0: [f64; 2]| -> Result<[f64; 2]> {
        let mut ig = Dopri5::new(cfg.rel_tol, 1e-300);
        ig.advance(&sys, from, y0, xi_match).map_err(|e| match e {
            OdeError::NonFinite { t } | OdeError::StepUnderflow { t } | OdeError::DomainExit { t } => {
                Error::ShootingBlowUp(format!("integration failed near xi = {t}"))
            }
            other => Error::ShootingBlowUp(other.to_string()),
        })
    };
    let left = run(cfg.xi_inner, start(cfg.xi_inner, op.inner_exponent()))?;
    let right = run(xi_outer, start(xi_outer, outer_rate))?;

    let p = op.coefficients(xi_match).p;
    let (yl, dl) = (left[0], left[1] / p);
    let (yr, dr) = (right[0], right[1] / p);
    let nl = yl.hypot(dl);
    let nr = yr.hypot(dr);
    if !(nl.is_finite() && nr.is_finite()) || nl == 0.0 || nr == 0.0 {
        return Err(Error::ShootingBlowUp(format!(
            "non-finite matching data at xi = {xi_match}"
        )));
    }
    Ok((yl * dr - yr * dl) / (nl * nr))
}

fn match_point(params: &ModelParams, mu: f64) -> f64 {
    let coord = LogCoordinate::new(params.lambda());
    let denom = params.alpha() - params.lambda() * mu;
    if mu > 0.0 && denom > 0.0 {
        coord.xi_of_u(mu / denom)
    } else {
        0.0
    }
}

/// Root of the matching defect in `[lo, hi]` by bisection.
pub fn shooting_root(params: &ModelParams, mu: f64, lo: f64, hi: f64) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = shooting_check(params, mu, a)?;
    let fb = shooting_check(params, mu, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= 1e-13 * mid.abs().max(1.0) {
            break;
        }
        let fm = shooting_check(params, mu, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_count_is_empty() {
        let p = ModelParams::new(-1.0, 2f64.sqrt(), 1.0).unwrap();
        let v = solve_eigenvalues(&p, 1.0, 0, &GridSpec::default_for(&p)).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn rejects_negative_mu_and_bad_grid() {
        let p = ModelParams::new(-1.0, 2f64.sqrt(), 1.0).unwrap();
        assert!(solve_eigenvalues(&p, -1.0, 1, &GridSpec::default_for(&p)).is_err());
        let g = GridSpec::default_for(&p).with_points(2);
        assert!(solve_eigenvalues(&p, 1.0, 1, &g).is_err());
    }

    #[test]
    fn beyond_bound_sector() {
        let p = ModelParams::new(1.0, 2.0, 1.0).unwrap();
        let err = solve_eigenvalues(&p, 1.0, 2, &GridSpec::default_for(&p)).unwrap_err();
        assert!(matches!(err, Error::BeyondBoundSector { requested: 2, available: 1, .. }), "{err:?}");
    }

    #[test]
    fn shooting_rejects_continuum_energy() {
        let p = ModelParams::new(1.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            shooting_check(&p, 1.0, 2.2),
            Err(Error::ShootingWindow { .. })
        ));
    }

    #[test]
    fn coefficients_reproduce_measure() {
        // W dξ is the normalization measure ½(1+λu)^{−1/2} du.
        for &l in &[1.0, -1.0] {
            let p = ModelParams::new(l, 2.0, 1.0).unwrap();
            let op = RadialOperator::new(&p, 1.0);
            let pt = op.coord().point(0.3);
            let c = op.coefficients(0.3);
            assert!((c.w - 0.5 * pt.jacobian / pt.one_plus_lambda_u.sqrt()).abs() < 1e-15);
        }
    }
}
