//! Subcommand implementations. Each one resolves its configuration, builds a
//! record and renders it in the requested format.

use std::path::Path;

use isocurve::integrator::{integrate, uniform_times};
use isocurve::spectrum::{enumerate_bound_states, energy_level, normalizability_bound, normalize};
use isocurve::verify::{run_campaign, CampaignOptions};
use isocurve::{ClassicalSetup, ClosedFormTrajectory, DynamicalState, IntegratorConfig, ModelParams};

use crate::args::{Cli, Command};
use crate::config::{Format, RunConfig, Sector};
use crate::error::CliError;
use crate::records::*;

const DEFAULT_SAMPLES: usize = 1000;
const DEFAULT_WAVEFUNCTION_SAMPLES: usize = 200;
const OPEN_SPAN: f64 = 5.0;

/// Parameters used by `verify` when none are given.
pub const DEFAULT_CAMPAIGN: (f64, f64, f64) = (1.0, 2.0, 1.0);

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (flags, config_path, sector) = match &cli.command {
        Command::Classify(a) | Command::Simulate(a) => (a.to_config(), &a.output.config, Sector::Classical),
        Command::Spectrum(a) => (a.to_config(), &a.output.config, Sector::Quantum),
        Command::Wavefunction(a) => (a.to_config(), &a.output.config, Sector::Quantum),
        Command::Verify(a) => (a.to_config(), &a.output.config, Sector::Verify),
    };
    let base = match config_path {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.overlay(&flags).select_sector(sector)?;

    match &cli.command {
        Command::Classify(_) => {
            let rec = classify(&cfg)?;
            emit(&cfg, Format::Json, || Ok(to_json(&rec)), || rec.to_csv())
        }
        Command::Simulate(_) => {
            let sim = simulate(&cfg)?;
            emit(&cfg, Format::Csv, || Ok(to_json(&sim)), || sim.to_csv())
        }
        Command::Spectrum(_) => {
            let rep = spectrum(&cfg)?;
            emit(&cfg, Format::Json, || Ok(to_json(&rep)), || rep.to_csv())
        }
        Command::Wavefunction(_) => {
            let wf = wavefunction(&cfg)?;
            emit(&cfg, Format::Csv, || Ok(to_json(&wf)), || wf.to_csv())
        }
        Command::Verify(a) => {
            let rep = verify(&cfg, a.inject_energy_perturbation.unwrap_or(0.0))?;
            emit(&cfg, Format::Json, || Ok(to_json(&rep)), || rep.to_csv())?;
            if rep.passed {
                Ok(())
            } else {
                Err(CliError::VerificationFailed {
                    failed: rep.failed,
                    total: rep.total,
                })
            }
        }
    }
}

fn emit(
    cfg: &RunConfig,
    default: Format,
    json: impl FnOnce() -> Result<String, CliError>,
    csv: impl FnOnce() -> Result<String, CliError>,
) -> Result<(), CliError> {
    let text = match cfg.output.format.unwrap_or(default) {
        Format::Json => json()?,
        Format::Csv => csv()?,
    };
    write_output(cfg.output.path.as_deref(), &text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
            Ok(())
        }
    }
}

fn required(value: Option<f64>, flag: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag} (or `{flag}` in the config file)")))
}

fn model(cfg: &RunConfig) -> Result<ModelParams, CliError> {
    let m = &cfg.model;
    Ok(ModelParams::new(
        required(m.lambda, "lambda")?,
        required(m.alpha, "alpha")?,
        required(m.k, "k")?,
    )?)
}

fn classical_setup(cfg: &RunConfig) -> Result<ClassicalSetup, CliError> {
    let p = model(cfg)?;
    let c = &cfg.classical;
    let j = c.j.unwrap_or(0.0);
    let setup = match (c.energy, c.constant) {
        (Some(e), None) => ClassicalSetup::from_energy(p, j, e)?,
        (None, Some(k)) => ClassicalSetup::from_constant(p, j, k)?,
        (Some(_), Some(_)) => return Err(CliError::Usage("give either E or C, not both".into())),
        (None, None) => return Err(CliError::Usage("missing --E or --C".into())),
    };
    Ok(setup
        .with_phase(c.phi0.unwrap_or(0.0))
        .with_angle_constant(c.angle_constant.unwrap_or(0.0)))
}

pub fn classify(cfg: &RunConfig) -> Result<ClassifyRecord, CliError> {
    let setup = classical_setup(cfg)?;
    let p = setup.params;
    let class = setup.classify();
    let min = p.effective_minimum(setup.j);
    let period = ClosedFormTrajectory::new(setup).ok().and_then(|cf| cf.period());
    Ok(ClassifyRecord {
        params: (&p).into(),
        j: setup.j,
        energy: setup.energy(),
        constant: setup.constant(),
        regime: class.regime.tag().to_string(),
        outside_discussed_range: class.outside_discussed_range,
        omega: class.regime.omega(),
        amplitude: class.regime.amplitude(),
        offset: class.regime.offset(),
        period,
        r_min: min.map(|m| m.r_min),
        v_min: min.map(|m| m.v_min),
        thresholds: Thresholds {
            v_eff_min: min.map(|m| m.v_min),
            alpha2_over_2lambda: (p.lambda() > 0.0).then(|| p.asymptote()),
        },
    })
}

pub fn simulate(cfg: &RunConfig) -> Result<Simulation, CliError> {
    let setup = classical_setup(cfg)?;
    let cf = ClosedFormTrajectory::new(setup)?;
    let c = &cfg.classical;
    let t_start = c.t_start.unwrap_or(0.0);
    let t_end = c.t_end.unwrap_or_else(|| t_start + cf.period().unwrap_or(OPEN_SPAN));
    let samples = c.samples.unwrap_or(DEFAULT_SAMPLES);
    if !(t_start.is_finite() && t_end.is_finite()) || t_end < t_start {
        return Err(CliError::Usage(format!(
            "need finite t_start <= t_end, got [{t_start}, {t_end}]"
        )));
    }
    if samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }

    let st = cf.state_at(t_start);
    let initial = DynamicalState {
        t: t_start,
        r: st.r,
        v: st.dr_dt,
        phi: st.phi,
    };
    let config = IntegratorConfig::default();
    let times = uniform_times(t_start, t_end, samples);
    let numeric = integrate(&setup, initial, &times, &config)?;

    let e = setup.energy();
    let e_scale = e.abs().max(f64::MIN_POSITIVE);
    let rows: Vec<SimulationRow> = numeric
        .iter()
        .map(|s| {
            let t = s.state.t;
            let r2 = cf.r_squared_at(t);
            let r = r2.max(0.0).sqrt();
            let phi = cf.phi_at(t);
            SimulationRow {
                t,
                r,
                phi,
                x: r * phi.cos(),
                y: r * phi.sin(),
                r2_closed: r2,
                r2_numeric: s.state.r * s.state.r,
                e_drift: (s.energy - e) / e_scale,
            }
        })
        .collect();
    let max_abs = |f: fn(&SimulationRow) -> f64| rows.iter().map(f).map(f64::abs).fold(0.0, f64::max);
    let metadata = SimulationMeta {
        params: (&setup.params).into(),
        j: setup.j,
        energy: e,
        constant: setup.constant(),
        regime: cf.regime().tag().to_string(),
        phi0: setup.phase,
        angle_constant: setup.angle_constant,
        t_start,
        t_end,
        samples: rows.len(),
        rel_tol: config.rel_tol,
        period: cf.period(),
        max_abs_r2_diff: max_abs(|r| r.r2_numeric - r.r2_closed),
        max_abs_e_drift: max_abs(|r| r.e_drift),
    };
    Ok(Simulation { metadata, rows })
}

pub fn spectrum(cfg: &RunConfig) -> Result<SpectrumReport, CliError> {
    let p = model(cfg)?;
    let max_m = cfg.quantum.max_m.unwrap_or(2);
    let max_nr = cfg.quantum.max_nr.unwrap_or(2);
    let levels: Vec<LevelRecord> = enumerate_bound_states(&p, max_m, max_nr)
        .iter()
        .map(|l| LevelRecord {
            n_r: l.n_r,
            m: l.m,
            mu: l.mu,
            n: l.n,
            energy: l.energy,
            normalizable: l.normalizable,
        })
        .collect();
    let bound = normalizability_bound(&p);
    let note = match bound {
        None => "hyperbolic plane: every level is normalizable".to_string(),
        Some(b) if levels.is_empty() => format!(
            "no level with n = 2n_r + mu < {b} in the requested range; the bound excludes all of them"
        ),
        Some(b) => format!("levels with n = 2n_r + mu >= {b} are excluded"),
    };
    Ok(SpectrumReport {
        params: (&p).into(),
        max_m,
        max_nr,
        bound,
        note,
        levels,
    })
}

pub fn wavefunction(cfg: &RunConfig) -> Result<Wavefunction, CliError> {
    let p = model(cfg)?;
    let q = &cfg.quantum;
    let level = energy_level(&p, q.n_r.unwrap_or(0), q.m.unwrap_or(0));
    let wf = normalize(&p, &level)?;
    let r_max = q.r_max.unwrap_or_else(|| {
        if p.lambda() < 0.0 {
            0.999 * p.radial_limit()
        } else {
            10.0 / p.lambda().sqrt()
        }
    });
    p.check_radius(r_max)?;
    let samples = q.samples.unwrap_or(DEFAULT_WAVEFUNCTION_SAMPLES);
    if samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    let rows = (1..=samples)
        .map(|i| {
            let r = r_max * i as f64 / samples as f64;
            let jet = wf.jet(r);
            WavefunctionRow {
                r,
                value: jet.value,
                derivative: jet.d1,
            }
        })
        .collect();
    Ok(Wavefunction {
        metadata: WavefunctionMeta {
            params: (&p).into(),
            n_r: level.n_r,
            m: level.m,
            mu: level.mu,
            n: level.n,
            energy: level.energy,
            norm: wf.norm,
            r_max,
            samples,
        },
        rows,
    })
}

pub fn verify(cfg: &RunConfig, energy_perturbation: f64) -> Result<VerifyReport, CliError> {
    let (l, a, k) = DEFAULT_CAMPAIGN;
    let m = &cfg.model;
    let p = ModelParams::new(m.lambda.unwrap_or(l), m.alpha.unwrap_or(a), m.k.unwrap_or(k))?;
    let defaults = CampaignOptions::default();
    let options = CampaignOptions {
        energy_perturbation,
        grid_points: cfg.quantum.grid_points.unwrap_or(defaults.grid_points),
        samples: cfg.classical.samples.unwrap_or(defaults.samples),
    };
    if options.grid_points < 32 {
        return Err(CliError::Usage("grid_points must be at least 32".into()));
    }
    let checks: Vec<CheckRecord> = run_campaign(&p, &options).iter().map(CheckRecord::from).collect();
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(VerifyReport {
        params: (&p).into(),
        options: VerifyOptionsRecord {
            grid_points: options.grid_points,
            samples: options.samples,
            energy_perturbation,
        },
        passed: failed == 0,
        total: checks.len(),
        failed,
        checks,
    })
}
