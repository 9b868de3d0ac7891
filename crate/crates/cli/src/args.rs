//! Command-line syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliResult;
use crate::spec::{parse_measures, Settings};

#[derive(Debug, Parser)]
#[command(name = "rydpump", version, about = "Two-atom entanglement by dissipative Rydberg pumping")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of populations and measures.
    Evolve(RunArgs),
    /// Measures of the steady state.
    Steady(SteadyArgs),
    /// Steady-state measure over a 1-D or 2-D parameter grid.
    Sweep(SweepArgs),
    /// Data behind one figure, written to <out-dir>/<figure>.csv.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Named parameter set (fig2, fig3, fig5-inset, ...).
    #[arg(long)]
    pub preset: Option<String>,
    /// Key-value file; flags take precedence over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// bell or qutrit.
    #[arg(long)]
    pub scheme: Option<String>,
    /// singlet, triplet, phi or phi-prime.
    #[arg(long)]
    pub target: Option<String>,
    /// Ω/2π in MHz.
    #[arg(long, allow_negative_numbers = true)]
    pub rabi_mhz: Option<f64>,
    /// ω/Ω.
    #[arg(long, visible_alias = "microwave", allow_negative_numbers = true)]
    pub microwave_rel: Option<f64>,
    /// ω/2π in kHz, instead of --microwave-rel.
    #[arg(long, conflicts_with = "microwave_rel", allow_negative_numbers = true)]
    pub microwave_khz: Option<f64>,
    /// Δ/2π in MHz; defaults to U_rr/2.
    #[arg(long, allow_negative_numbers = true)]
    pub delta_mhz: Option<f64>,
    /// U_rr/2π in MHz.
    #[arg(long, allow_negative_numbers = true)]
    pub urr_mhz: Option<f64>,
    /// Decay rate γ in kHz.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_khz: Option<f64>,
    /// Read --gamma-khz as γ/2π.
    #[arg(long)]
    pub gamma_angular: bool,
    /// Initial state id (ground-ff, mixture, target, S, ff, ...) or path to a matrix file.
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long)]
    pub t_max_ms: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Comma-separated: populations, fidelity, chsh, negativity.
    #[arg(long)]
    pub measures: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Omit the generation timestamp from the output.
    #[arg(long)]
    pub no_timestamp: bool,
    /// propagator or rk45.
    #[arg(long)]
    pub method: Option<String>,
    /// null-space or long-time.
    #[arg(long)]
    pub backend: Option<String>,
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Solve with both backends and fail if they disagree.
    #[arg(long)]
    pub cross_check: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// name:min:max:steps, given once or twice.
    #[arg(long = "axis", required = true)]
    pub axes: Vec<String>,
    /// Measure evaluated at each grid point.
    #[arg(long, default_value = "fidelity")]
    pub reduce: String,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    pub figure: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Grid points per swept axis.
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub no_timestamp: bool,
}

impl RunArgs {
    /// Config file entries overlaid with the flags that were given.
    pub fn settings(&self) -> CliResult<Settings> {
        let file = match &self.config {
            Some(p) => Settings::from_config_file(p)?,
            None => Settings::default(),
        };
        let flags = Settings {
            preset: self.preset.clone(),
            scheme: self.scheme.clone(),
            target: self.target.clone(),
            rabi_mhz: self.rabi_mhz,
            microwave_rel: self.microwave_rel,
            microwave_khz: self.microwave_khz,
            microwave2_khz: None,
            delta_mhz: self.delta_mhz,
            urr_mhz: self.urr_mhz,
            gamma_khz: self.gamma_khz,
            gamma_angular: self.gamma_angular.then_some(true),
            initial: self.initial.clone(),
            t_max_ms: self.t_max_ms,
            samples: self.samples,
            measures: self.measures.as_deref().map(parse_measures).transpose()?,
            format: self.format.as_deref().map(str::parse).transpose()?,
            out: self.out.clone(),
            method: self.method.clone(),
            backend: self.backend.clone(),
            timestamp: self.no_timestamp.then_some(false),
        };
        let mut merged = file.clone().overlay(flags);
        // a flag-given microwave setting replaces the file's other form
        if self.microwave_rel.is_some() {
            merged.microwave_khz = None;
        } else if self.microwave_khz.is_some() {
            merged.microwave_rel = None;
        }
        Ok(merged)
    }
}
