//! Run configuration: a TOML document that may replace command-line flags.
//!
//! Every field is optional so that a file can hold a partial configuration;
//! flags given on the command line are layered on top with
//! [`RunConfig::overlay`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Classical,
    Quantum,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSection {
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    /// Phase inside the radial closed forms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    /// Angular integration constant.
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub angle_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_nr: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector: Option<Sector>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub classical: ClassicalSection,
    #[serde(default)]
    pub quantum: QuantumSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn layer<T: Clone>(base: &mut Option<T>, top: &Option<T>) {
    if top.is_some() {
        base.clone_from(top);
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable in TOML")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fields present in `top` replace those in `self`. Giving E or C on top
    /// discards the other one from below, since the two are alternatives.
    pub fn overlay(mut self, top: &RunConfig) -> Self {
        layer(&mut self.sector, &top.sector);
        layer(&mut self.model.lambda, &top.model.lambda);
        layer(&mut self.model.alpha, &top.model.alpha);
        layer(&mut self.model.k, &top.model.k);

        let c = &top.classical;
        if c.energy.is_some() || c.constant.is_some() {
            self.classical.energy = c.energy;
            self.classical.constant = c.constant;
        }
        layer(&mut self.classical.j, &c.j);
        layer(&mut self.classical.phi0, &c.phi0);
        layer(&mut self.classical.angle_constant, &c.angle_constant);
        layer(&mut self.classical.t_start, &c.t_start);
        layer(&mut self.classical.t_end, &c.t_end);
        layer(&mut self.classical.samples, &c.samples);

        let q = &top.quantum;
        layer(&mut self.quantum.m, &q.m);
        layer(&mut self.quantum.n_r, &q.n_r);
        layer(&mut self.quantum.max_m, &q.max_m);
        layer(&mut self.quantum.max_nr, &q.max_nr);
        layer(&mut self.quantum.grid_points, &q.grid_points);
        layer(&mut self.quantum.r_max, &q.r_max);
        layer(&mut self.quantum.samples, &q.samples);

        layer(&mut self.output.format, &top.output.format);
        layer(&mut self.output.path, &top.output.path);
        self
    }

    /// Fixes the sector for a subcommand, refusing a file that asks for a
    /// different one.
    pub fn select_sector(mut self, sector: Sector) -> Result<Self, CliError> {
        match self.sector {
            Some(s) if s != sector => Err(CliError::Usage(format!(
                "config selects the {s:?} sector but the command needs {sector:?}"
            ))),
            _ => {
                self.sector = Some(sector);
                Ok(self)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            sector: Some(Sector::Classical),
            model: ModelSection {
                lambda: Some(-1.0),
                alpha: Some(std::f64::consts::SQRT_2),
                k: Some(0.1),
            },
            classical: ClassicalSection {
                j: Some(1.0),
                energy: Some(1.75),
                t_end: Some(0.1 + 0.2),
                samples: Some(7),
                ..Default::default()
            },
            quantum: QuantumSection {
                m: Some(-2),
                ..Default::default()
            },
            output: OutputSection {
                format: Some(Format::Json),
                path: Some(PathBuf::from("out/run.json")),
            },
        }
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let cfg = sample();
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn flags_override_file_values() {
        let file = sample();
        let flags = RunConfig {
            classical: ClassicalSection {
                constant: Some(-0.5),
                samples: Some(9),
                ..Default::default()
            },
            ..Default::default()
        };
        let merged = file.overlay(&flags);
        assert_eq!(merged.classical.energy, None);
        assert_eq!(merged.classical.constant, Some(-0.5));
        assert_eq!(merged.classical.samples, Some(9));
        assert_eq!(merged.classical.j, Some(1.0));
        assert_eq!(merged.model.lambda, Some(-1.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[model]\nlambda = 1.0\nbeta = 2.0\n").is_err());
    }

    #[test]
    fn conflicting_sector_is_a_usage_error() {
        let cfg = sample();
        assert!(cfg.clone().select_sector(Sector::Classical).is_ok());
        assert!(matches!(
            cfg.select_sector(Sector::Quantum),
            Err(CliError::Usage(_))
        ));
    }
}
