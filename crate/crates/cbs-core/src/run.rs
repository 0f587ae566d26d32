//! Execution of a [`RunConfig`]: computes the requested quantities and writes
//! CSV tables and JSON documents into the output directory.
//!
//! Every run writes `run_config.json` with the effective configuration. Data
//! files carry no timestamps, so identical configurations give identical bytes.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::atom::{AtomParams, C64};
use crate::config::{RunConfig, RunMode};
use crate::diagrams::{enumerate_type, validate_catalog, ContributionType};
use crate::error::{CbsError, Result};
use crate::oracle::master::{MasterOracle, ThreeAtomConfig};
use crate::spectra::{self, perturbative, QuadratureConfig};

/// Exit status of a run whose comparison found a mismatch.
pub const MISMATCH_STATUS: i32 = 4;

/// Result of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Process exit status: 0, or [`MISMATCH_STATUS`] when a check failed.
    pub status: i32,
    pub files: Vec<PathBuf>,
    /// Human-readable summary for the terminal.
    pub summary: String,
}

#[derive(Debug, Clone, Serialize)]
struct Metadata<'a> {
    program: &'static str,
    version: &'static str,
    mode: &'static str,
    frequency_unit: &'static str,
    params: AtomParams,
    quadrature: &'a QuadratureConfig,
}

/// Rows of strings under a header.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn metadata(cfg: &RunConfig) -> Metadata<'_> {
    Metadata {
        program: "cbs",
        version: env!("CARGO_PKG_VERSION"),
        mode: cfg.mode.name(),
        frequency_unit: "gamma",
        params: cfg.params(),
        quadrature: &cfg.quadrature,
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CbsError {
    CbsError::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))?;
    Ok(path.to_path_buf())
}

fn write_csv(path: &Path, meta: &Value, table: &Table) -> Result<PathBuf> {
    let mut text = String::new();
    if let Value::Object(map) = meta {
        for (k, v) in map {
            text.push_str(&format!("# {k}: {v}\n"));
        }
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&table.header).map_err(|e| io_error(path, e))?;
    for row in &table.rows {
        writer.write_record(row).map_err(|e| io_error(path, e))?;
    }
    let bytes = writer.into_inner().map_err(|e| io_error(path, e))?;
    text.push_str(std::str::from_utf8(&bytes).expect("CSV output is UTF-8"));
    write_text(path, &text)
}

/// Writes `<stem>.csv` and/or `<stem>.json` as the configured format asks.
fn emit(cfg: &RunConfig, stem: &str, meta: Value, table: &Table, document: Value) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    if cfg.format.csv() {
        files.push(write_csv(&cfg.out.join(format!("{stem}.csv")), &meta, table)?);
    }
    if cfg.format.json() {
        let mut doc = json!({ "metadata": meta });
        if let (Value::Object(d), Value::Object(extra)) = (&mut doc, document) {
            d.extend(extra);
        }
        let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
        files.push(write_text(&cfg.out.join(format!("{stem}.json")), &text)?);
    }
    Ok(files)
}

/// Validates the configuration, creates the output directory and runs the mode.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| io_error(&cfg.out, e))?;
    let config_path = write_text(&cfg.out.join("run_config.json"), &(cfg.to_json() + "\n"))?;
    let mut outcome = match cfg.mode {
        RunMode::Spectrum => run_spectrum(cfg)?,
        RunMode::ElasticSweep => run_elastic_sweep(cfg)?,
        RunMode::PerturbativeCheck => run_perturbative_check(cfg)?,
        RunMode::OracleCheck => run_oracle_check(cfg)?,
        RunMode::Diagrams => run_diagrams(cfg)?,
    };
    outcome.files.insert(0, config_path);
    Ok(outcome)
}

fn run_spectrum(cfg: &RunConfig) -> Result<RunOutcome> {
    let params = cfg.params();
    let grid = cfg.nu_grid();
    let r = spectra::compute_spectrum(&params, &grid, &cfg.quadrature)?;
    let rows = (0..grid.len())
        .map(|k| {
            vec![
                num(grid[k]),
                num(r.ladder1[k]),
                num(r.ladder2[k]),
                num(r.crossed1[k]),
                num(r.crossed2[k]),
                num(r.ladder1[k] + r.ladder2[k]),
                num(r.crossed1[k] + r.crossed2[k]),
            ]
        })
        .collect();
    let table = Table { header: vec!["nu", "L1", "L2", "C1", "C2", "L_tot", "C_tot"], rows };
    let mut meta = serde_json::to_value(metadata(cfg)).expect("metadata serializes");
    meta["term_counts"] = serde_json::to_value(&r.term_counts).expect("counts serialize");
    meta["elastic"] = serde_json::to_value(r.elastic).expect("elastic serializes");
    let l_tot: Vec<f64> = r.ladder1.iter().zip(&r.ladder2).map(|(a, b)| a + b).collect();
    let c_tot: Vec<f64> = r.crossed1.iter().zip(&r.crossed2).map(|(a, b)| a + b).collect();
    let document = json!({
        "nu": r.nu_grid,
        "L1": r.ladder1,
        "L2": r.ladder2,
        "C1": r.crossed1,
        "C2": r.crossed2,
        "L_tot": l_tot,
        "C_tot": c_tot,
    });
    let files = emit(cfg, "spectrum", meta, &table, document)?;
    let e = r.elastic;
    let summary = format!(
        "spectrum on {} points; elastic L1 {:e} L2 {:e} C1 {:e} C2 {:e}",
        grid.len(),
        e.ladder1,
        e.ladder2,
        e.crossed1,
        e.crossed2
    );
    Ok(RunOutcome { status: 0, files, summary })
}

fn run_elastic_sweep(cfg: &RunConfig) -> Result<RunOutcome> {
    let base = cfg.params();
    let rabis = cfg.rabi_grid();
    let sets = rabis
        .par_iter()
        .map(|w| spectra::elastic_set(&AtomParams { rabi: C64::new(*w, 0.0), ..base }, &cfg.quadrature))
        .collect::<Result<Vec<_>>>()?;
    let rows = rabis
        .iter()
        .zip(&sets)
        .map(|(w, e)| {
            vec![
                num(*w),
                num(e.ladder1),
                num(e.ladder2),
                num(e.crossed1),
                num(e.crossed2),
                num(e.ladder1 + e.ladder2),
                num(e.crossed1 + e.crossed2),
            ]
        })
        .collect();
    let table = Table { header: vec!["rabi", "L_el1", "L_el2", "C_el1", "C_el2", "L_el_tot", "C_el_tot"], rows };
    let meta = serde_json::to_value(metadata(cfg)).expect("metadata serializes");
    let document = json!({ "rabi": rabis, "elastic": sets });
    let files = emit(cfg, "elastic_sweep", meta, &table, document)?;
    Ok(RunOutcome { status: 0, files, summary: format!("elastic sweep over {} Rabi frequencies", rabis.len()) })
}

/// Comparison of one quantity with its reference.
#[derive(Debug, Clone, Serialize)]
struct Comparison {
    ty: ContributionType,
    numeric: f64,
    reference: f64,
    rel_error: f64,
}

fn run_perturbative_check(cfg: &RunConfig) -> Result<RunOutcome> {
    let params = cfg.params();
    let (rabi, delta) = (params.rabi.re, params.detuning);
    let grid = cfg.nu_grid();
    let mut columns = Vec::new();
    let mut spectra_report = Vec::new();
    let mut elastic_report = Vec::new();
    for ty in ContributionType::ALL {
        let numeric = spectra::inelastic_spectrum(&params, ty, &grid, &cfg.quadrature)?;
        let reference: Vec<f64> = grid.iter().map(|nu| perturbative::inelastic(ty, delta, rabi, *nu)).collect();
        let peak = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_rel = numeric
            .iter()
            .zip(&reference)
            .filter(|(_, r)| r.abs() > 1e-14 * peak)
            .map(|(n, r)| (n - r).abs() / r.abs())
            .fold(0.0f64, f64::max);
        spectra_report.push(json!({ "type": ty, "max_rel_error": max_rel }));
        let el = spectra::elastic_intensity(&params, ty, &cfg.quadrature)?;
        let el_ref = perturbative::elastic(ty, delta, rabi);
        elastic_report.push(Comparison { ty, numeric: el, reference: el_ref, rel_error: (el - el_ref).abs() / el_ref.abs() });
        columns.push((numeric, reference));
    }
    let rows = (0..grid.len())
        .map(|k| {
            let mut row = vec![num(grid[k])];
            for (n, r) in &columns {
                row.push(num(n[k]));
                row.push(num(r[k]));
            }
            row
        })
        .collect();
    let table = Table {
        header: vec!["nu", "L1", "L1_ref", "L2", "L2_ref", "C1", "C1_ref", "C2", "C2_ref"],
        rows,
    };
    let meta = serde_json::to_value(metadata(cfg)).expect("metadata serializes");
    let eta = perturbative::enhancement_factor(delta);
    let document = json!({
        "spectra": spectra_report,
        "elastic": elastic_report,
        "enhancement_factor_closed_form": eta,
        "crossed_inelastic_closed_form": perturbative::crossed_inelastic_total(delta, rabi),
        "ladder_inelastic_closed_form": perturbative::ladder_inelastic_total(delta, rabi),
    });
    let files = emit(cfg, "perturbative_check", meta, &table, document)?;
    let worst = elastic_report.iter().map(|c| c.rel_error).fold(0.0f64, f64::max);
    Ok(RunOutcome {
        status: 0,
        files,
        summary: format!("perturbative check: worst elastic rel error {worst:.3e}, closed-form η = {eta:.4}"),
    })
}

#[derive(Debug, Clone, Serialize)]
struct OracleRow {
    ty: ContributionType,
    building_blocks: C64,
    oracle: C64,
    rel_error: f64,
    quadrature_error: f64,
    pass: bool,
}

fn run_oracle_check(cfg: &RunConfig) -> Result<RunOutcome> {
    let params = cfg.params();
    let oracle = MasterOracle::new(ThreeAtomConfig::uniform(params))?;
    let mut report = Vec::new();
    for ty in ContributionType::ALL {
        let want = oracle.path_intensity(ty)? / 16.0;
        let got = spectra::path_total([params; 3], ty, &cfg.quadrature)?;
        let rel_error = (got.value - want).norm() / want.norm();
        report.push(OracleRow {
            ty,
            building_blocks: got.value,
            oracle: want,
            rel_error,
            quadrature_error: got.error / want.norm(),
            pass: rel_error <= cfg.oracle_tol,
        });
    }
    let rows = report
        .iter()
        .map(|r| {
            vec![
                r.ty.name().to_string(),
                num(r.building_blocks.re),
                num(r.building_blocks.im),
                num(r.oracle.re),
                num(r.oracle.im),
                num(r.rel_error),
                num(r.quadrature_error),
                r.pass.to_string(),
            ]
        })
        .collect();
    let table = Table {
        header: vec!["type", "blocks_re", "blocks_im", "oracle_re", "oracle_im", "rel_error", "quadrature_error", "pass"],
        rows,
    };
    let mut meta = serde_json::to_value(metadata(cfg)).expect("metadata serializes");
    meta["oracle_tol"] = json!(cfg.oracle_tol);
    meta["coupling_normalization"] = json!(16.0);
    let all_pass = report.iter().all(|r| r.pass);
    let files = emit(cfg, "oracle_check", meta, &table, json!({ "comparisons": report, "pass": all_pass }))?;
    let worst = report.iter().map(|r| r.rel_error).fold(0.0f64, f64::max);
    Ok(RunOutcome {
        status: if all_pass { 0 } else { MISMATCH_STATUS },
        files,
        summary: format!("oracle check: worst rel error {worst:.3e} (tolerance {:.1e})", cfg.oracle_tol),
    })
}

fn run_diagrams(cfg: &RunConfig) -> Result<RunOutcome> {
    let meta = json!({ "program": "cbs", "version": env!("CARGO_PKG_VERSION"), "mode": cfg.mode.name() });
    match cfg.diagram_type {
        Some(ty) => {
            let terms = enumerate_type(ty)?;
            let rows = terms
                .iter()
                .map(|t| vec![t.label(), t.elastic.to_string(), t.n_vars.to_string(), t.describe()])
                .collect();
            let table = Table { header: vec!["label", "elastic", "free_variables", "expression"], rows };
            let listing: Vec<Value> = terms
                .iter()
                .map(|t| json!({ "label": t.label(), "elastic": t.elastic, "free_variables": t.n_vars, "expression": t.describe() }))
                .collect();
            let mut meta = meta;
            meta["type"] = json!(ty);
            let files = emit(cfg, &format!("diagrams_{}", ty.name()), meta, &table, json!({ "terms": listing }))?;
            let labels: Vec<String> = terms.iter().map(|t| t.label()).collect();
            Ok(RunOutcome { status: 0, files, summary: labels.join("\n") })
        }
        None => {
            let report = validate_catalog()?;
            let rows = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.ty.name().to_string(),
                        e.raw.to_string(),
                        e.allowed.to_string(),
                        e.expected_raw.to_string(),
                        e.expected_allowed.to_string(),
                        e.forbidden_matches.to_string(),
                    ]
                })
                .collect();
            let table = Table {
                header: vec!["type", "raw", "allowed", "expected_raw", "expected_allowed", "forbidden_matches"],
                rows,
            };
            let files = emit(cfg, "diagrams_validation", meta, &table, json!({ "catalog": report }))?;
            let summary = report
                .entries
                .iter()
                .map(|e| format!("{} {} -> {} (forbidden list ok: {})", e.ty.name(), e.raw, e.allowed, e.forbidden_matches))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(RunOutcome { status: if report.ok { 0 } else { MISMATCH_STATUS }, files, summary })
        }
    }
}

/// Machine-readable description of a failed run.
pub fn error_record(err: &CbsError) -> Value {
    let kind = match err {
        CbsError::Config(_) => "config",
        CbsError::Io(_) => "io",
        _ => "numerical",
    };
    json!({ "error": { "kind": kind, "message": err.to_string(), "exit_code": err.exit_code() } })
}

/// Writes [`error_record`] to `<dir>/error.json`.
pub fn write_error_record(dir: &Path, err: &CbsError) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let text = serde_json::to_string_pretty(&error_record(err)).expect("record serializes") + "\n";
    write_text(&dir.join("error.json"), &text)
}
