//! Structured records emitted by the subcommands, and their rendering.
//!
//! Tables are comma-separated with floats in `{:.16e}` (17 significant
//! digits, exact round trip). Reports are JSON documents.

use serde::{Deserialize, Serialize};

use isocurve::verify::Check;
use isocurve::ModelParams;

use crate::error::CliError;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// `Some(x)` for finite x, so that JSON never meets NaN or infinities.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Numerical(format!("cannot format table: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Numerical(format!("cannot format table: {e}")))?;
    Ok(String::from_utf8(bytes).expect("table is UTF-8"))
}

fn footer(out: &mut String, pairs: &[(&str, String)]) {
    for (k, v) in pairs {
        out.push_str(&format!("# {k}={v}\n"));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub lambda: f64,
    pub alpha: f64,
    pub k: f64,
    pub beta: f64,
}

impl From<&ModelParams> for ParamsRecord {
    fn from(p: &ModelParams) -> Self {
        Self {
            lambda: p.lambda(),
            alpha: p.alpha(),
            k: p.k(),
            beta: p.beta(),
        }
    }
}

impl ParamsRecord {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("lambda", fmt_f64(self.lambda)),
            ("alpha", fmt_f64(self.alpha)),
            ("k", fmt_f64(self.k)),
            ("beta", fmt_f64(self.beta)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum of the effective potential, when it has one.
    #[serde(rename = "V_eff_min")]
    pub v_eff_min: Option<f64>,
    /// α²/(2λ), the asymptote on the sphere.
    pub alpha2_over_2lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRecord {
    pub params: ParamsRecord,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "C")]
    pub constant: f64,
    pub regime: String,
    pub outside_discussed_range: bool,
    pub omega: Option<f64>,
    #[serde(rename = "A")]
    pub amplitude: Option<f64>,
    #[serde(rename = "B")]
    pub offset: Option<f64>,
    pub period: Option<f64>,
    pub r_min: Option<f64>,
    #[serde(rename = "V_min")]
    pub v_min: Option<f64>,
    pub thresholds: Thresholds,
}

impl ClassifyRecord {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut pairs = self.params.pairs();
        pairs.extend([
            ("J", fmt_f64(self.j)),
            ("E", fmt_f64(self.energy)),
            ("C", fmt_f64(self.constant)),
            ("regime", self.regime.clone()),
            ("outside_discussed_range", self.outside_discussed_range.to_string()),
            ("omega", fmt_opt(self.omega)),
            ("A", fmt_opt(self.amplitude)),
            ("B", fmt_opt(self.offset)),
            ("period", fmt_opt(self.period)),
            ("r_min", fmt_opt(self.r_min)),
            ("V_min", fmt_opt(self.v_min)),
            ("V_eff_min", fmt_opt(self.thresholds.v_eff_min)),
            ("alpha2_over_2lambda", fmt_opt(self.thresholds.alpha2_over_2lambda)),
        ]);
        csv_table(
            &["key", "value"],
            pairs.into_iter().map(|(k, v)| vec![k.to_string(), v]),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationMeta {
    pub params: ParamsRecord,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "C")]
    pub constant: f64,
    pub regime: String,
    pub phi0: f64,
    #[serde(rename = "K")]
    pub angle_constant: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub rel_tol: f64,
    pub period: Option<f64>,
    pub max_abs_r2_diff: f64,
    pub max_abs_e_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    pub r2_closed: f64,
    pub r2_numeric: f64,
    #[serde(rename = "E_drift")]
    pub e_drift: f64,
}

pub const SIMULATION_COLUMNS: [&str; 8] =
    ["t", "r", "phi", "x", "y", "r2_closed", "r2_numeric", "E_drift"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub metadata: SimulationMeta,
    pub rows: Vec<SimulationRow>,
}

impl Simulation {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = csv_table(
            &SIMULATION_COLUMNS,
            self.rows.iter().map(|r| {
                [r.t, r.r, r.phi, r.x, r.y, r.r2_closed, r.r2_numeric, r.e_drift]
                    .into_iter()
                    .map(fmt_f64)
                    .collect()
            }),
        )?;
        let m = &self.metadata;
        let mut pairs = m.params.pairs();
        pairs.extend([
            ("J", fmt_f64(m.j)),
            ("E", fmt_f64(m.energy)),
            ("C", fmt_f64(m.constant)),
            ("regime", m.regime.clone()),
            ("phi0", fmt_f64(m.phi0)),
            ("K", fmt_f64(m.angle_constant)),
            ("t_start", fmt_f64(m.t_start)),
            ("t_end", fmt_f64(m.t_end)),
            ("samples", m.samples.to_string()),
            ("rel_tol", fmt_f64(m.rel_tol)),
            ("period", fmt_opt(m.period)),
            ("max_abs_r2_diff", fmt_f64(m.max_abs_r2_diff)),
            ("max_abs_E_drift", fmt_f64(m.max_abs_e_drift)),
        ]);
        footer(&mut out, &pairs);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n_r: u32,
    pub m: i32,
    pub mu: f64,
    pub n: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub normalizable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: ParamsRecord,
    pub max_m: u32,
    pub max_nr: u32,
    /// β/λ − ½ on the sphere; absent on the hyperbolic plane.
    pub bound: Option<f64>,
    pub note: String,
    pub levels: Vec<LevelRecord>,
}

impl SpectrumReport {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = csv_table(
            &["n_r", "m", "mu", "n", "E", "normalizable"],
            self.levels.iter().map(|l| {
                vec![
                    l.n_r.to_string(),
                    l.m.to_string(),
                    fmt_f64(l.mu),
                    fmt_f64(l.n),
                    fmt_f64(l.energy),
                    l.normalizable.to_string(),
                ]
            }),
        )?;
        let mut pairs = self.params.pairs();
        pairs.extend([
            ("max_m", self.max_m.to_string()),
            ("max_nr", self.max_nr.to_string()),
            ("bound", fmt_opt(self.bound)),
            ("levels", self.levels.len().to_string()),
            ("note", self.note.clone()),
        ]);
        footer(&mut out, &pairs);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionMeta {
    pub params: ParamsRecord,
    pub n_r: u32,
    pub m: i32,
    pub mu: f64,
    pub n: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    /// Factor applied to the closed form to normalize it.
    pub norm: f64,
    pub r_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionRow {
    pub r: f64,
    #[serde(rename = "R")]
    pub value: f64,
    #[serde(rename = "dR_dr")]
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavefunction {
    pub metadata: WavefunctionMeta,
    pub rows: Vec<WavefunctionRow>,
}

impl Wavefunction {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = csv_table(
            &["r", "R", "dR_dr"],
            self.rows
                .iter()
                .map(|r| vec![fmt_f64(r.r), fmt_f64(r.value), fmt_f64(r.derivative)]),
        )?;
        let m = &self.metadata;
        let mut pairs = m.params.pairs();
        pairs.extend([
            ("n_r", m.n_r.to_string()),
            ("m", m.m.to_string()),
            ("mu", fmt_f64(m.mu)),
            ("n", fmt_f64(m.n)),
            ("E", fmt_f64(m.energy)),
            ("norm", fmt_f64(m.norm)),
            ("r_max", fmt_f64(m.r_max)),
            ("samples", m.samples.to_string()),
        ]);
        footer(&mut out, &pairs);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Absent when the check could not be evaluated.
    pub measured: Option<f64>,
    pub relation: String,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name.clone(),
            measured: finite(c.measured),
            relation: c.relation.as_str().to_string(),
            threshold: c.threshold,
            passed: c.passed,
            detail: c.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptionsRecord {
    pub grid_points: usize,
    pub samples: usize,
    pub energy_perturbation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ParamsRecord,
    pub options: VerifyOptionsRecord,
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = csv_table(
            &["name", "measured", "relation", "threshold", "passed", "detail"],
            self.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    fmt_opt(c.measured),
                    c.relation.clone(),
                    fmt_f64(c.threshold),
                    c.passed.to_string(),
                    c.detail.clone(),
                ]
            }),
        )?;
        let mut pairs = self.params.pairs();
        pairs.extend([
            ("grid_points", self.options.grid_points.to_string()),
            ("samples", self.options.samples.to_string()),
            ("energy_perturbation", fmt_f64(self.options.energy_perturbation)),
            ("passed", self.passed.to_string()),
            ("total", self.total.to_string()),
            ("failed", self.failed.to_string()),
        ]);
        footer(&mut out, &pairs);
        Ok(out)
    }
}
