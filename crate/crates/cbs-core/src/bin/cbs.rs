//! `cbs`: command-line front end for coherent backscattering spectra.
//!
//! The configuration comes from `--config <file>` and/or flags; flags override
//! file values. Exit status: 0 success, 2 configuration or i/o error,
//! 3 numerical failure, 4 check mismatch.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cbs_core::config::{OutputFormat, RunConfig, RunMode};
use cbs_core::diagrams::ContributionType;
use cbs_core::error::{CbsError, Result};
use cbs_core::run::{error_record, run, write_error_record};

#[derive(Debug, Parser)]
#[command(name = "cbs", version, about = "Coherent backscattering spectra of three two-level atoms")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// spectrum, elastic-sweep, perturbative-check, oracle-check or diagrams.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    rabi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    detuning: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    nu_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    nu_max: Option<f64>,
    #[arg(long)]
    nu_points: Option<usize>,
    /// Relative tolerance of the frequency integrals.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// csv, json or both.
    #[arg(long)]
    format: Option<String>,
    /// Diagrams mode: list the terms of L1, L2, C1 or C2.
    #[arg(long)]
    diagram_type: Option<String>,
}

impl Cli {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, &self.mode) {
            (Some(path), _) => RunConfig::from_file(path)?,
            (None, Some(mode)) => RunConfig::new(mode.parse()?),
            (None, None) => return Err(CbsError::Config("either --config or --mode is required".into())),
        };
        if let Some(mode) = &self.mode {
            cfg.mode = mode.parse::<RunMode>()?;
        }
        if let Some(x) = self.rabi {
            cfg.rabi = x;
        }
        if let Some(x) = self.detuning {
            cfg.detuning = x;
        }
        if let Some(x) = self.gamma {
            cfg.gamma = x;
        }
        if self.nu_min.is_some() {
            cfg.nu_min = self.nu_min;
        }
        if self.nu_max.is_some() {
            cfg.nu_max = self.nu_max;
        }
        if self.nu_points.is_some() {
            cfg.nu_points = self.nu_points;
        }
        if let Some(x) = self.rel_tol {
            cfg.quadrature.rel_tol = x;
        }
        if let Some(dir) = self.out {
            cfg.out = dir;
        }
        if let Some(f) = &self.format {
            cfg.format = f.parse::<OutputFormat>()?;
        }
        if let Some(t) = &self.diagram_type {
            cfg.diagram_type = Some(ContributionType::parse(t)?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn fail(err: &CbsError, out: Option<&PathBuf>) -> ExitCode {
    eprintln!("{}", error_record(err));
    if let Some(dir) = out {
        if let Err(e) = write_error_record(dir, err) {
            eprintln!("cannot write error record: {e}");
        }
    }
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flag_out = cli.out.clone();
    let cfg = match cli.into_config() {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e, flag_out.as_ref()),
    };
    match run(&cfg) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", outcome.summary);
            for f in &outcome.files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => fail(&e, Some(&cfg.out)),
    }
}
