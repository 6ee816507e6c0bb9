//! Command-line flags. Each subcommand turns its flags into a partial
//! [`RunConfig`] that is layered over the optional config file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    ClassicalSection, Format, ModelSection, OutputSection, QuantumSection, RunConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "isocurve",
    version,
    about = "Isotonic oscillator on the sphere and the hyperbolic plane: trajectories, spectra and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a classical setup and print its regime constants.
    #[command(allow_negative_numbers = true)]
    Classify(ClassicalArgs),
    /// Sample the closed-form trajectory next to a numerical integration.
    #[command(allow_negative_numbers = true)]
    Simulate(ClassicalArgs),
    /// List the normalizable levels.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Sample a normalized radial wavefunction.
    #[command(allow_negative_numbers = true)]
    Wavefunction(WavefunctionArgs),
    /// Run the verification campaign.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Curvature parameter (non-zero; > 0 sphere, < 0 hyperbolic plane).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Oscillator frequency (> 0).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Isotonic coupling (>= 0).
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Angular momentum.
    #[arg(long = "J")]
    pub j: Option<f64>,
    /// Energy.
    #[arg(long = "E", conflicts_with = "constant")]
    pub energy: Option<f64>,
    /// Integration constant C = 2E − α²/λ (alternative to --E).
    #[arg(long = "C")]
    pub constant: Option<f64>,
    /// Phase of the radial closed form.
    #[arg(long)]
    pub phi0: Option<f64>,
    /// Angular constant K.
    #[arg(long = "K")]
    pub angle_constant: Option<f64>,
    #[arg(long)]
    pub t_start: Option<f64>,
    /// Defaults to one radial period for bounded orbits, t_start + 5 otherwise.
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub max_m: Option<u32>,
    #[arg(long)]
    pub max_nr: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub m: Option<i32>,
    #[arg(long)]
    pub nr: Option<u32>,
    /// Largest sampled radius (default: just inside the disk for λ < 0,
    /// 10/√λ for λ > 0).
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Cells of the finite-volume eigensolver grid.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Samples per classical trajectory.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Test hook: shift the energies fed to the residual check.
    #[arg(long, hide = true)]
    pub inject_energy_perturbation: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl ModelArgs {
    fn section(&self) -> ModelSection {
        ModelSection {
            lambda: self.lambda,
            alpha: self.alpha,
            k: self.k,
        }
    }
}

impl OutputArgs {
    fn section(&self) -> OutputSection {
        OutputSection {
            format: self.format,
            path: self.out.clone(),
        }
    }
}

impl ClassicalArgs {
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            model: self.model.section(),
            classical: ClassicalSection {
                j: self.j,
                energy: self.energy,
                constant: self.constant,
                phi0: self.phi0,
                angle_constant: self.angle_constant,
                t_start: self.t_start,
                t_end: self.t_end,
                samples: self.samples,
            },
            output: self.output.section(),
            ..Default::default()
        }
    }
}

impl SpectrumArgs {
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            model: self.model.section(),
            quantum: QuantumSection {
                max_m: self.max_m,
                max_nr: self.max_nr,
                ..Default::default()
            },
            output: self.output.section(),
            ..Default::default()
        }
    }
}

impl WavefunctionArgs {
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            model: self.model.section(),
            quantum: QuantumSection {
                m: self.m,
                n_r: self.nr,
                r_max: self.r_max,
                samples: self.samples,
                ..Default::default()
            },
            output: self.output.section(),
            ..Default::default()
        }
    }
}

impl VerifyArgs {
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            model: self.model.section(),
            classical: ClassicalSection {
                samples: self.samples,
                ..Default::default()
            },
            quantum: QuantumSection {
                grid_points: self.grid_points,
                ..Default::default()
            },
            output: self.output.section(),
            ..Default::default()
        }
    }
}
