//! Integration over the radial domain in a logarithmic coordinate.
//!
//! With `u = r²`, the coordinate ξ is
//!
//! * λ > 0: `ξ = ln(λu)`, covering `u ∈ (0, ∞)`;
//! * λ < 0: `ξ = ln(t/(1−t))` with `t = |λ|u`, covering `u ∈ (0, 1/|λ|)`.
//!
//! Bound-state integrands decay exponentially in ξ at both ends and are
//! analytic in the strip |Im ξ| < π, so the trapezoidal rule converges
//! geometrically in the step. Far-field terms become a pure exponential in ξ
//! (corrections are powers of `e^{−|ξ|}`); past `|ξ| = TAIL_ONSET` the
//! remaining sum is added as a geometric series. This handles the slowly
//! decaying tails of weakly bound states on the sphere without pushing `u`
//! toward overflow.

/// |ξ| beyond which the far-field expansion is treated as exact.
const TAIL_ONSET: f64 = 50.0;
const MAX_TERMS: usize = 200_000;

/// A point of the radial domain with quantities that lose accuracy when
/// recomputed from `u` alone near the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub xi: f64,
    /// u = r²
    pub u: f64,
    /// 1 + λu
    pub one_plus_lambda_u: f64,
    /// du/dξ
    pub jacobian: f64,
}

impl RadialPoint {
    pub fn r(&self) -> f64 {
        self.u.sqrt()
    }
}

/// Maps between ξ and the radial domain for a given λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCoordinate {
    lambda: f64,
}

impl LogCoordinate {
    pub fn new(lambda: f64) -> Self {
        assert!(lambda != 0.0, "logarithmic coordinate needs lambda != 0");
        Self { lambda }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn point(&self, xi: f64) -> RadialPoint {
        if self.lambda > 0.0 {
            let e = xi.exp();
            let u = e / self.lambda;
            RadialPoint {
                xi,
                u,
                one_plus_lambda_u: 1.0 + e,
                jacobian: u,
            }
        } else {
            let al = -self.lambda;
            let t = 1.0 / (1.0 + (-xi).exp());
            let ct = 1.0 / (1.0 + xi.exp());
            RadialPoint {
                xi,
                u: t / al,
                one_plus_lambda_u: ct,
                jacobian: t * ct / al,
            }
        }
    }

    /// ξ corresponding to `u = r²`.
    pub fn xi_of_u(&self, u: f64) -> f64 {
        if self.lambda > 0.0 {
            (self.lambda * u).ln()
        } else {
            let t = -self.lambda * u;
            (t / (1.0 - t)).ln()
        }
    }
}

/// Trapezoidal quadrature in ξ with geometric tail completion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialQuadrature {
    pub coord: LogCoordinate,
    pub step: f64,
}

impl RadialQuadrature {
    pub const DEFAULT_STEP: f64 = 0.125;

    pub fn new(lambda: f64) -> Self {
        Self {
            coord: LogCoordinate::new(lambda),
            step: Self::DEFAULT_STEP,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// `∫ f du` over the whole radial domain. Returns ±∞ when the terms stop
    /// decaying (the integral diverges).
    pub fn integrate<F: Fn(&RadialPoint) -> f64>(&self, f: F) -> f64 {
        let g = |xi: f64| {
            let p = self.coord.point(xi);
            f(&p) * p.jacobian
        };
        let center = g(0.0);
        let right = self.march(&g, 0.0, 1.0);
        let left = self.march(&g, 0.0, -1.0);
        self.step * (center + right + left)
    }

    /// `∫_0^{u_max} f du` (the upper cut is a grid node with half weight).
    pub fn integrate_up_to<F: Fn(&RadialPoint) -> f64>(&self, f: F, u_max: f64) -> f64 {
        let xi_max = self.coord.xi_of_u(u_max);
        let g = |xi: f64| {
            let p = self.coord.point(xi);
            f(&p) * p.jacobian
        };
        let edge = g(xi_max);
        self.step * (0.5 * edge + self.march(&g, xi_max, -1.0))
    }

    /// Sum of g over `start + dir·j·h`, j ≥ 1, with geometric tail.
    fn march<G: Fn(f64) -> f64>(&self, g: &G, start: f64, dir: f64) -> f64 {
        let h = self.step;
        let mut sum = 0.0;
        let mut prev = g(start);
        let mut negligible = 0;
        for j in 1..MAX_TERMS {
            let xi = start + dir * h * j as f64;
            let term = g(xi);
            if !term.is_finite() {
                return if term.is_nan() { f64::NAN } else { term };
            }
            sum += term;
            // a single tiny term can be a node of the integrand
            if term.abs() <= 1e-18 * sum.abs() || term == 0.0 {
                negligible += 1;
                if negligible >= 4 {
                    return sum;
                }
            } else {
                negligible = 0;
            }
            if xi.abs() >= TAIL_ONSET && prev != 0.0 {
                let ratio = term / prev;
                if ratio.abs() >= 1.0 {
                    return f64::INFINITY.copysign(sum);
                }
                return sum + term * ratio / (1.0 - ratio);
            }
            prev = term;
        }
        sum
    }
}
