use std::path::PathBuf;

use clap::ValueEnum;
use critmet_core::ParamSet;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Quadrature grid for homodyne distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Run configuration shared by all subcommands. Each command reads only the
/// fields it needs; unset grids are filled with command defaults before the
/// configuration is recorded in the output header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamSet,
    /// Coupling grid (absolute g, or fractions of g_c for `dissipative`).
    pub g_values: Option<Vec<f64>>,
    /// Frequency ratios ω₀/Ω scanned by `fig1`, with ω₀ from `params`.
    pub etas: Vec<f64>,
    /// Homodyne quadrature angle.
    pub angle: f64,
    /// Fixed Fock cutoff; automatic when unset.
    pub cutoff: Option<usize>,
    /// Relative finite-difference step for exact QFI and FI.
    pub delta: f64,
    pub x_grid: Option<XGrid>,
    pub schedule_points: usize,
    /// Integrate the Schrödinger equation along the sweep.
    pub integrate: bool,
    pub dt: Option<f64>,
    /// Evolution times for `dissipative`, starting from the vacuum.
    pub times: Vec<f64>,
    /// Fit window in units of the critical coupling.
    pub window: (f64, f64),
    pub fit_points: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamSet { omega0: 1.0, omega: 100.0, g: 0.5, kappa: 2.0, spin_decay: 20.0, gamma: 0.05 },
            g_values: None,
            etas: vec![0.1, 0.02, 0.01],
            angle: std::f64::consts::FRAC_PI_4,
            cutoff: None,
            delta: 1e-4,
            x_grid: None,
            schedule_points: 201,
            integrate: false,
            dt: None,
            times: Vec::new(),
            window: (0.99, 0.9999),
            fit_points: 32,
            out: None,
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::new("config", format!("invalid configuration: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration is always serializable")
    }

    /// Coupling grid, filled with `default` when unset.
    pub fn grid_or(&mut self, default: impl FnOnce() -> Vec<f64>) -> Vec<f64> {
        self.g_values.get_or_insert_with(default).clone()
    }
}

/// `start, start + step, …` up to `stop` inclusive, rounded to 12 digits.
pub fn arange(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if stop < start {
        return Vec::new();
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| ((start + step * k as f64) * 1e12).round() / 1e12).collect()
}
