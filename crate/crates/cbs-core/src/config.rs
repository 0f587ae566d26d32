//! Run configuration for the command-line front end.
//!
//! A configuration is a JSON object. Only `mode` is required; every other key
//! has a default and unknown keys are rejected. Input frequencies share the
//! unit of `gamma`; runs rescale them so that outputs are in units of γ.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::atom::{AtomParams, C64};
use crate::diagrams::ContributionType;
use crate::error::{CbsError, Result};
use crate::spectra::{self, QuadratureConfig};

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Inelastic spectra of the four contribution types plus elastic intensities.
    Spectrum,
    /// Elastic intensities over a range of Rabi frequencies.
    ElasticSweep,
    /// Numerical spectra and intensities against the weak-drive closed forms.
    PerturbativeCheck,
    /// Per-path total intensities against the three-atom master equation.
    OracleCheck,
    /// Term listing of one type, or validation of the whole catalog.
    Diagrams,
}

impl RunMode {
    pub const ALL: [RunMode; 5] =
        [RunMode::Spectrum, RunMode::ElasticSweep, RunMode::PerturbativeCheck, RunMode::OracleCheck, RunMode::Diagrams];

    pub fn name(self) -> &'static str {
        match self {
            RunMode::Spectrum => "spectrum",
            RunMode::ElasticSweep => "elastic-sweep",
            RunMode::PerturbativeCheck => "perturbative-check",
            RunMode::OracleCheck => "oracle-check",
            RunMode::Diagrams => "diagrams",
        }
    }
}

impl FromStr for RunMode {
    type Err = CbsError;
    fn from_str(s: &str) -> Result<Self> {
        RunMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CbsError::Config(format!("unknown mode `{s}`")))
    }
}

/// Which files a run writes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = CbsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            _ => Err(CbsError::Config(format!("unknown format `{s}`"))),
        }
    }
}

fn default_rabi() -> f64 {
    1.0
}

fn default_gamma() -> f64 {
    1.0
}

fn default_sweep_max() -> f64 {
    3.0
}

fn default_sweep_points() -> usize {
    61
}

fn default_oracle_tol() -> f64 {
    1e-5
}

fn default_out() -> PathBuf {
    PathBuf::from("cbs-out")
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: RunMode,
    /// Rabi frequency Ω (real; the phase-free configuration).
    #[serde(default = "default_rabi")]
    pub rabi: f64,
    /// Laser detuning δ.
    #[serde(default)]
    pub detuning: f64,
    /// Half the radiative decay rate; sets the frequency unit.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// ν grid. Unset bounds default to ±(4Ω_g + 8)γ, unset count to 801.
    #[serde(default)]
    pub nu_min: Option<f64>,
    #[serde(default)]
    pub nu_max: Option<f64>,
    #[serde(default)]
    pub nu_points: Option<usize>,
    /// Rabi-frequency grid of the elastic sweep.
    #[serde(default)]
    pub rabi_min: f64,
    #[serde(default = "default_sweep_max")]
    pub rabi_max: f64,
    #[serde(default = "default_sweep_points")]
    pub rabi_points: usize,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    /// Diagrams mode: list this type's terms; validate the catalog when unset.
    #[serde(default)]
    pub diagram_type: Option<ContributionType>,
    /// Largest relative deviation accepted by the oracle check.
    #[serde(default = "default_oracle_tol")]
    pub oracle_tol: f64,
    /// Output directory.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CbsError {
    CbsError::Config(format!("field `{field}`: {msg}"))
}

fn check_finite(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(field_error(field, format!("must be finite, got {x}")))
    }
}

impl RunConfig {
    /// Defaults for every field except the mode.
    pub fn new(mode: RunMode) -> Self {
        Self {
            mode,
            rabi: default_rabi(),
            detuning: 0.0,
            gamma: default_gamma(),
            nu_min: None,
            nu_max: None,
            nu_points: None,
            rabi_min: 0.0,
            rabi_max: default_sweep_max(),
            rabi_points: default_sweep_points(),
            quadrature: QuadratureConfig::default(),
            diagram_type: None,
            oracle_tol: default_oracle_tol(),
            out: default_out(),
            format: OutputFormat::default(),
        }
    }

    /// Parses and validates a JSON configuration.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            CbsError::Config(format!("invalid configuration at line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CbsError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("rabi", self.rabi)?;
        check_finite("detuning", self.detuning)?;
        check_finite("gamma", self.gamma)?;
        if self.gamma <= 0.0 {
            return Err(field_error("gamma", format!("must be positive, got {}", self.gamma)));
        }
        for (name, v) in [("nu_min", self.nu_min), ("nu_max", self.nu_max)] {
            if let Some(x) = v {
                check_finite(name, x)?;
            }
        }
        if let Some(n) = self.nu_points {
            if n < 2 {
                return Err(field_error("nu_points", format!("must be at least 2, got {n}")));
            }
        }
        if let (Some(a), Some(b)) = (self.nu_min, self.nu_max) {
            if a >= b {
                return Err(field_error("nu_max", format!("must exceed nu_min ({a}), got {b}")));
            }
        }
        check_finite("rabi_min", self.rabi_min)?;
        check_finite("rabi_max", self.rabi_max)?;
        if self.rabi_min < 0.0 {
            return Err(field_error("rabi_min", format!("must be non-negative, got {}", self.rabi_min)));
        }
        if self.rabi_max <= self.rabi_min {
            return Err(field_error("rabi_max", format!("must exceed rabi_min ({}), got {}", self.rabi_min, self.rabi_max)));
        }
        if self.rabi_points < 2 {
            return Err(field_error("rabi_points", format!("must be at least 2, got {}", self.rabi_points)));
        }
        if !(self.oracle_tol > 0.0 && self.oracle_tol.is_finite()) {
            return Err(field_error("oracle_tol", format!("must be positive, got {}", self.oracle_tol)));
        }
        self.quadrature.validate().map_err(|e| match e {
            CbsError::Config(m) => field_error("quadrature", m),
            other => other,
        })
    }

    /// Atom parameters in units of γ.
    pub fn params(&self) -> AtomParams {
        AtomParams { rabi: C64::new(self.rabi / self.gamma, 0.0), detuning: self.detuning / self.gamma, gamma: 1.0 }
    }

    /// ν grid in units of γ.
    pub fn nu_grid(&self) -> Vec<f64> {
        let p = self.params();
        let default_half = 4.0 * p.generalized_rabi() + 8.0;
        let min = self.nu_min.map_or(-default_half, |x| x / self.gamma);
        let max = self.nu_max.map_or(default_half, |x| x / self.gamma);
        spectra::uniform_grid(min, max, self.nu_points.unwrap_or(801))
    }

    /// Rabi-frequency grid of the sweep in units of γ.
    pub fn rabi_grid(&self) -> Vec<f64> {
        spectra::uniform_grid(self.rabi_min / self.gamma, self.rabi_max / self.gamma, self.rabi_points)
    }
}
