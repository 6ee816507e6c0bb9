//! Verification campaign: every closed-form result compared with an
//! independent numerical computation.
//!
//! Each check reports the measured quantity, the threshold and how the two
//! are compared, so that a report can be inspected without rerunning it.

use std::f64::consts::PI;

use crate::closed_form::ClosedFormTrajectory;
use crate::error::{Error, Result};
use crate::integrator::{integrate, uniform_times, DynamicalState, IntegratorConfig};
use crate::model::{ClassicalSetup, ModelParams, TrajectoryRegime};
use crate::oracle::{shooting_root, solve_eigenvalues, GridSpec};
use crate::quadrature::{LogCoordinate, RadialQuadrature};
use crate::spectrum::{
    energy_level, measure_integral, normalizability_bound, normalize, normalize_with, overlap,
    radial_residual_at_energy, rayleigh_quotient, truncated_norm, QuantumLevel, RadialWavefunction,
};

/// Largest |m| and n_r exercised by the quantum checks.
pub const MAX_M: i32 = 2;
pub const MAX_NR: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// measured < threshold
    Below,
    /// measured > threshold
    Above,
    /// measured ≥ threshold
    AtLeast,
    /// measured == threshold
    Equal,
}

impl Relation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::Above => ">",
            Relation::AtLeast => ">=",
            Relation::Equal => "==",
        }
    }

    fn holds(&self, measured: f64, threshold: f64) -> bool {
        match self {
            Relation::Below => measured < threshold,
            Relation::Above => measured > threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::Equal => measured == threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        relation: Relation,
        threshold: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            relation,
            passed: relation.holds(measured, threshold),
            detail: detail.into(),
        }
    }

    /// A check that could not be evaluated.
    pub fn errored(name: impl Into<String>, relation: Relation, threshold: f64, err: &Error) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            threshold,
            relation,
            passed: false,
            detail: format!("error: {err}"),
        }
    }

    fn from_result(
        name: String,
        relation: Relation,
        threshold: f64,
        result: Result<(f64, String)>,
    ) -> Self {
        match result {
            Ok((measured, detail)) => Self::new(name, measured, relation, threshold, detail),
            Err(e) => Self::errored(name, relation, threshold, &e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignOptions {
    /// Added to every eigenvalue fed to the residual check. Non-zero only as
    /// a negative control.
    pub energy_perturbation: f64,
    pub grid_points: usize,
    pub samples: usize,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        Self {
            energy_perturbation: 0.0,
            grid_points: 10_000,
            samples: 1000,
        }
    }
}

/// A classical trajectory together with the time window it is checked on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalCase {
    pub setup: ClassicalSetup,
    pub t_end: f64,
}

impl ClassicalCase {
    /// One radial period for bounded orbits, `[0, open_span]` otherwise.
    ///
    /// Unbounded orbits get the phase `−ω·open_span` so that the closest
    /// approach sits in the middle of the window. With φ = 0 the orbit
    /// starts at periapsis and r² grows like `e^{2ωt}`, so an absolute r²
    /// comparison would mostly measure the integrator's relative tolerance
    /// times a huge radius.
    pub fn new(setup: ClassicalSetup, open_span: f64) -> Result<Self> {
        let cf = ClosedFormTrajectory::new(setup)?;
        let (setup, t_end) = match cf.regime() {
            TrajectoryRegime::Bounded { omega, .. } => (setup, PI / omega),
            TrajectoryRegime::Unbounded { omega, .. } => {
                (setup.with_phase(-omega * open_span), open_span)
            }
            _ => (setup, open_span),
        };
        Ok(Self { setup, t_end })
    }

    pub fn label(&self) -> String {
        let tag = self.setup.classify().regime.tag();
        format!("{tag} J={} E={}", self.setup.j, self.setup.energy())
    }

    fn trajectory(&self) -> ClosedFormTrajectory {
        ClosedFormTrajectory::new(self.setup).expect("case built from an admissible setup")
    }

    fn times(&self, samples: usize) -> Vec<f64> {
        uniform_times(0.0, self.t_end, samples)
    }
}

/// Representative trajectories for J ∈ {0, 1}: on the sphere a bounded orbit
/// halfway between the minimum and the asymptote, an unbounded one one unit
/// above the asymptote and the limiting one; on the hyperbolic plane two
/// bounded orbits above the minimum.
pub fn classical_cases(params: &ModelParams) -> Vec<ClassicalCase> {
    let mut setups = Vec::new();
    for j in [0.0, 1.0] {
        let minimum = params.effective_minimum(j);
        if params.lambda() > 0.0 {
            let asym = params.asymptote();
            if let Some(min) = minimum {
                setups.push((j, 0.5 * (min.v_min + asym)));
            }
            setups.push((j, asym + 1.0));
            if minimum.is_some() {
                setups.push((j, asym));
            }
        } else if let Some(min) = minimum {
            setups.push((j, min.v_min + 1.0));
            setups.push((j, min.v_min + 10.0));
        }
    }
    setups
        .into_iter()
        .filter_map(|(j, e)| {
            let setup = ClassicalSetup::from_energy(*params, j, e).ok()?;
            ClassicalCase::new(setup, 5.0).ok()
        })
        .collect()
}

/// Deviation between the closed form and the integrator over a case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryDeviation {
    /// max |r²_closed − r²_numeric|
    pub absolute: f64,
    /// max |r²_closed − r²_numeric| / max(1, r²_closed)
    pub scaled: f64,
}

/// Compares r² from the integrator, started from the closed-form state at
/// t = 0, with the closed form.
pub fn closed_form_vs_integrator(
    case: &ClassicalCase,
    samples: usize,
    rel_tol: f64,
) -> Result<TrajectoryDeviation> {
    let cf = case.trajectory();
    let st = cf.state_at(0.0);
    let initial = DynamicalState {
        t: 0.0,
        r: st.r,
        v: st.dr_dt,
        phi: st.phi,
    };
    let config = IntegratorConfig {
        rel_tol,
        ..IntegratorConfig::default()
    };
    let out = integrate(&case.setup, initial, &case.times(samples), &config)?;
    let mut dev = TrajectoryDeviation {
        absolute: 0.0,
        scaled: 0.0,
    };
    for s in &out {
        let closed = cf.r_squared_at(s.state.t);
        let diff = (s.state.r * s.state.r - closed).abs();
        dev.absolute = dev.absolute.max(diff);
        dev.scaled = dev.scaled.max(diff / closed.max(1.0));
    }
    Ok(dev)
}

/// Max relative deviation of `½ṙ²/(1+λr²) + V_eff(r)` from E on the closed
/// form.
pub fn energy_identity(case: &ClassicalCase, samples: usize) -> f64 {
    let cf = case.trajectory();
    let e = case.setup.energy();
    case.times(samples)
        .iter()
        .map(|&t| (cf.energy_at(t) - e).abs() / e.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Max relative mismatch `|V_eff(r) − E|/|E|` at both turning points of a
/// bounded orbit.
pub fn turning_point_mismatch(setup: &ClassicalSetup) -> Result<f64> {
    let cf = ClosedFormTrajectory::new(*setup)?;
    let TrajectoryRegime::Bounded {
        amplitude, offset, ..
    } = cf.regime()
    else {
        return Err(Error::InvalidParameter("turning points need a bounded orbit".into()));
    };
    let e = setup.energy();
    let mut worst: f64 = 0.0;
    for u in [offset - amplitude, offset + amplitude] {
        let v = setup.params.effective_potential(setup.j, u.sqrt())?;
        worst = worst.max((v - e).abs() / e.abs());
    }
    Ok(worst)
}

/// Central-difference dφ/dt against J/r², relative to `max(1, |J/r²|)`.
/// For J = 0 this is the largest |φ − K| instead, which must vanish.
pub fn angular_mismatch(case: &ClassicalCase, samples: usize) -> f64 {
    let cf = case.trajectory();
    let times = case.times(samples);
    if case.setup.j == 0.0 {
        let k = case.setup.angle_constant;
        return times
            .iter()
            .map(|&t| (cf.phi_at(t) - k).abs())
            .fold(0.0, f64::max);
    }
    let h = 1e-5 * case.t_end.max(1.0);
    times
        .iter()
        .map(|&t| {
            let fd = (cf.phi_at(t + h) - cf.phi_at(t - h)) / (2.0 * h);
            let exact = case.setup.j / cf.r_squared_at(t);
            (fd - exact).abs() / exact.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Normalizable levels with `0 ≤ m ≤ MAX_M`, `n_r ≤ MAX_NR`, grouped by m.
pub fn levels_by_m(params: &ModelParams) -> Vec<Vec<QuantumLevel>> {
    (0..=MAX_M)
        .map(|m| {
            (0..=MAX_NR)
                .map(|n_r| energy_level(params, n_r, m))
                .filter(|l| l.normalizable)
                .collect::<Vec<_>>()
        })
        .filter(|v| !v.is_empty())
        .collect()
}

/// Oracle outcome for one analytic level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelAgreement {
    pub level: QuantumLevel,
    pub matrix: f64,
    pub shooting: f64,
    /// |overlap| of the oracle eigenvector with the analytic wavefunction.
    pub overlap: f64,
}

impl LevelAgreement {
    pub fn matrix_error(&self) -> f64 {
        ((self.matrix - self.level.energy) / self.level.energy).abs()
    }

    pub fn shooting_error(&self) -> f64 {
        ((self.shooting - self.level.energy) / self.level.energy).abs()
    }

    pub fn cross_error(&self) -> f64 {
        ((self.matrix - self.shooting) / self.matrix).abs()
    }
}

/// Runs the matrix solver and the shooting method on the levels sharing one
/// μ. The shooting root is bracketed by `E ± 0.1` (narrowed to a third of
/// the gap to the neighbouring levels).
pub fn oracle_levels(
    params: &ModelParams,
    levels: &[QuantumLevel],
    grid: &GridSpec,
) -> Result<Vec<LevelAgreement>> {
    let Some(first) = levels.first() else {
        return Ok(Vec::new());
    };
    let mu = first.mu;
    let sols = solve_eigenvalues(params, mu, levels.len(), grid)?;
    let mut out = Vec::with_capacity(levels.len());
    for (i, (level, sol)) in levels.iter().zip(&sols).enumerate() {
        let mut half = 0.1f64;
        if i > 0 {
            half = half.min((level.energy - levels[i - 1].energy) / 3.0);
        }
        if i + 1 < levels.len() {
            half = half.min((levels[i + 1].energy - level.energy) / 3.0);
        }
        if let Some(threshold) = crate::oracle::RadialOperator::new(params, mu).continuum_threshold() {
            half = half.min((threshold - level.energy) / 2.0);
        }
        let shooting = shooting_root(params, mu, level.energy - half, level.energy + half)?;
        let wf = normalize(params, level)?;
        let ov = sol.overlap_with(|r| wf.value(r).unwrap_or(0.0));
        out.push(LevelAgreement {
            level: *level,
            matrix: sol.eigenvalue,
            shooting,
            overlap: ov.abs(),
        });
    }
    Ok(out)
}

/// Max relative residual of the radial equation at `E + shift` over interior
/// points `ξ ∈ [−6, 6]` of the logarithmic coordinate.
pub fn residual_max(params: &ModelParams, level: &QuantumLevel, shift: f64) -> Result<f64> {
    let coord = LogCoordinate::new(params.lambda());
    let mut worst: f64 = 0.0;
    for i in 0..=48 {
        let xi = -6.0 + 0.25 * i as f64;
        let r = coord.point(xi).r();
        let res = radial_residual_at_energy(params, level, level.energy + shift, r)?;
        worst = worst.max(res.relative());
    }
    Ok(worst)
}

/// Largest entrywise deviation of the Gram matrix of same-μ levels from the
/// identity.
pub fn gram_deviation(params: &ModelParams, levels: &[QuantumLevel]) -> Result<f64> {
    let wfs: Vec<RadialWavefunction> = levels
        .iter()
        .map(|l| normalize(params, l))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in wfs.iter().enumerate() {
        for (j, b) in wfs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((overlap(a, b) - target).abs());
        }
    }
    Ok(worst)
}

/// |∫R² dμ − 1| for the normalized level, with the integral recomputed at
/// half the quadrature step.
pub fn normalization_error(params: &ModelParams, level: &QuantumLevel) -> Result<f64> {
    let wf = normalize(params, level)?;
    let quad = RadialQuadrature::new(params.lambda()).with_step(0.5 * RadialQuadrature::DEFAULT_STEP);
    Ok((measure_integral(&quad, |p| wf.value_at(p).powi(2)) - 1.0).abs())
}

/// The lowest level (m ≥ 0) excluded by the normalizability bound.
pub fn first_excluded_level(params: &ModelParams) -> Option<QuantumLevel> {
    normalizability_bound(params)?;
    (0..=MAX_NR + 4)
        .flat_map(|n_r| (0..=MAX_M + 4).map(move |m| (n_r, m)))
        .map(|(n_r, m)| energy_level(params, n_r, m))
        .filter(|l| !l.normalizable)
        .min_by(|a, b| a.n.total_cmp(&b.n))
}

/// Growth factor of the truncated norm per doubling of the truncation
/// radius as r → ∞: the integrand behaves like `u^{n − β/λ − ½}`.
pub fn asymptotic_growth(params: &ModelParams, level: &QuantumLevel) -> f64 {
    let exponent = level.n - params.beta() / params.lambda() + 0.5;
    4f64.powf(exponent)
}

/// Truncated norms at `r0, 2r0, 4r0, 8r0` and the smallest ratio between
/// consecutive ones.
pub fn truncated_growth(params: &ModelParams, level: &QuantumLevel, r0: f64) -> (Vec<f64>, f64) {
    let norms: Vec<f64> = (0..4)
        .map(|i| truncated_norm(params, level, r0 * 2f64.powi(i)))
        .collect();
    let ratio = norms
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::INFINITY, f64::min);
    (norms, ratio)
}

fn describe(level: &QuantumLevel) -> String {
    format!("n_r={} m={} mu={}", level.n_r, level.m, level.mu)
}

/// The full campaign for one parameter set.
pub fn run_campaign(params: &ModelParams, options: &CampaignOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let samples = options.samples.max(2);

    for case in classical_cases(params) {
        let label = case.label();
        checks.push(Check::from_result(
            format!("closed form vs integrator [{label}]"),
            Relation::Below,
            1e-6,
            closed_form_vs_integrator(&case, samples, 1e-10).map(|d| {
                (
                    d.scaled,
                    format!("max |r2 diff| / max(1, r2); absolute {:e}", d.absolute),
                )
            }),
        ));
        checks.push(Check::new(
            format!("energy identity [{label}]"),
            energy_identity(&case, samples),
            Relation::Below,
            1e-10,
            "max relative deviation",
        ));
        if case.setup.j == 0.0 {
            checks.push(Check::new(
                format!("angle constant [{label}]"),
                angular_mismatch(&case, samples),
                Relation::Equal,
                0.0,
                "max |phi - K|",
            ));
        } else {
            checks.push(Check::new(
                format!("angular velocity [{label}]"),
                angular_mismatch(&case, samples),
                Relation::Below,
                1e-6,
                "finite-difference dphi/dt vs J/r^2",
            ));
        }
        if case.setup.classify().regime.tag() == crate::model::RegimeTag::Bounded {
            checks.push(Check::from_result(
                format!("turning points [{label}]"),
                Relation::Below,
                1e-9,
                turning_point_mismatch(&case.setup).map(|d| (d, "max |V_eff - E|/E".into())),
            ));
        }
    }

    let grid = GridSpec::default_for(params).with_points(options.grid_points);
    for levels in levels_by_m(params) {
        let mu = levels[0].mu;
        match oracle_levels(params, &levels, &grid) {
            Ok(agreements) => {
                for a in agreements {
                    let d = describe(&a.level);
                    checks.push(Check::new(
                        format!("matrix eigenvalue [{d}]"),
                        a.matrix_error(),
                        Relation::Below,
                        1e-4,
                        format!("E_formula={} E_matrix={}", a.level.energy, a.matrix),
                    ));
                    checks.push(Check::new(
                        format!("shooting root [{d}]"),
                        a.shooting_error(),
                        Relation::Below,
                        1e-6,
                        format!("E_shooting={}", a.shooting),
                    ));
                    checks.push(Check::new(
                        format!("matrix vs shooting [{d}]"),
                        a.cross_error(),
                        Relation::Below,
                        1e-6,
                        "relative difference",
                    ));
                    checks.push(Check::new(
                        format!("eigenvector overlap [{d}]"),
                        a.overlap,
                        Relation::Above,
                        0.99999,
                        "|<oracle, analytic>|",
                    ));
                }
            }
            Err(e) => checks.push(Check::errored(
                format!("oracle levels [mu={mu}]"),
                Relation::Below,
                1e-4,
                &e,
            )),
        }

        for level in &levels {
            let d = describe(level);
            checks.push(Check::from_result(
                format!("radial residual [{d}]"),
                Relation::Below,
                1e-9,
                residual_max(params, level, options.energy_perturbation)
                    .map(|v| (v, "max relative residual".into())),
            ));
            checks.push(Check::from_result(
                format!("residual negative control [{d}]"),
                Relation::AtLeast,
                1e4,
                residual_max(params, level, 0.1).and_then(|off| {
                    let on = residual_max(params, level, 0.0)?;
                    Ok((off / on.max(f64::MIN_POSITIVE), "inflation at E + 0.1".into()))
                }),
            ));
            checks.push(Check::from_result(
                format!("normalization [{d}]"),
                Relation::Below,
                1e-10,
                normalization_error(params, level).map(|v| (v, "|norm - 1|".into())),
            ));
            checks.push(Check::from_result(
                format!("rayleigh quotient [{d}]"),
                Relation::Below,
                1e-8,
                normalize(params, level).map(|wf| {
                    let q = rayleigh_quotient(&wf);
                    (((q - level.energy) / level.energy).abs(), format!("quotient={q}"))
                }),
            ));
        }
        if levels.len() > 1 {
            checks.push(Check::from_result(
                format!("orthonormality [mu={mu}]"),
                Relation::Below,
                1e-8,
                gram_deviation(params, &levels).map(|v| (v, "max |G - I|".into())),
            ));
        }
    }

    if let Some(level) = first_excluded_level(params) {
        let r0 = 10.0 / params.lambda().sqrt();
        let (norms, ratio) = truncated_growth(params, &level, r0);
        // Levels just past the bound diverge slowly; then require half the
        // asymptotic growth instead.
        let predicted = asymptotic_growth(params, &level);
        let threshold = if predicted > 1.5 { 1.5 } else { 0.5 * (1.0 + predicted) };
        checks.push(Check::new(
            format!("bound sharpness [{}]", describe(&level)),
            ratio,
            Relation::Above,
            threshold,
            format!("truncated norms {norms:?}; asymptotic growth {predicted}"),
        ));
        let refused = matches!(
            normalize_with(params, &level, &RadialQuadrature::new(params.lambda())),
            Err(Error::NotNormalizable { .. })
        );
        checks.push(Check::new(
            format!("excluded level refused [{}]", describe(&level)),
            if refused { 1.0 } else { 0.0 },
            Relation::Equal,
            1.0,
            "normalization rejects levels past the bound",
        ));
    }
    checks
}
