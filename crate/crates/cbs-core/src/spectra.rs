//! Numerical assembly of triple-scattering intensities and spectra.
//!
//! A resolved [`DiagramTerm`] is a product of three single-atom factors whose
//! probe frequencies are integer combinations of ν and up to two free
//! intermediate frequencies. The evaluator integrates the free frequencies
//! with nested adaptive passes; every factor is recomputed only when a
//! variable it depends on changes, and box fluctuation tables are cached at
//! the depth where their probe frequencies become fixed.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atom::{AtomParams, Vec3, C64};
use crate::diagrams::{enumerate_type, ContributionType, DiagramTerm, LinearForm, TermKind};
use crate::error::{CbsError, Result};
use crate::quadrature::{integrate_line_with_error, QuadOptions};
use crate::response::{Atom, Branch, SignedProbe};

/// Complex value with an absolute error estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: C64,
    pub error: f64,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, error: self.error + o.error }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::default(), |a, b| a + b)
    }
}

/// Quadrature settings shared by all terms of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Relative tolerance of the outermost integral; nested passes tighten it tenfold per depth.
    pub rel_tol: f64,
    /// Absolute error floor of every term. Type-level assembly raises it to
    /// rel_tol times the largest term that needs no integration.
    pub abs_tol: f64,
    /// Subinterval budget of a single adaptive pass.
    pub max_intervals: usize,
    /// Half-width of the tangent map onto the real line; defaults to max(γ, Ω_g).
    pub scale: Option<f64>,
    /// Break points for every pass; defaults to {0, ±Ω_g, ±2Ω_g}.
    pub peak_hints: Option<Vec<f64>>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 0.0, max_intervals: 4000, scale: None, peak_hints: None }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(CbsError::Config(format!("rel_tol must lie in (0, 1e-3], got {}", self.rel_tol)));
        }
        if self.abs_tol.is_nan() || self.abs_tol < 0.0 {
            return Err(CbsError::Config(format!("abs_tol must be non-negative, got {}", self.abs_tol)));
        }
        if self.max_intervals < 2 {
            return Err(CbsError::Config("max_intervals must be at least 2".into()));
        }
        if let Some(s) = self.scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CbsError::Config(format!("scale must be positive, got {s}")));
            }
        }
        Ok(())
    }

    fn scale_for(&self, p: &AtomParams) -> f64 {
        self.scale.unwrap_or_else(|| p.gamma.max(p.generalized_rabi()))
    }

    fn hints_for(&self, p: &AtomParams) -> Vec<f64> {
        self.peak_hints.clone().unwrap_or_else(|| {
            let g = p.generalized_rabi();
            if g > 1e-9 {
                vec![0.0, g, -g, 2.0 * g, -2.0 * g]
            } else {
                vec![0.0]
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum FactorKind {
    Circle(u8),
    Box,
    /// Box integrated over its own output frequency.
    BoxTotal,
}

#[derive(Debug, Clone)]
struct Factor {
    atom: usize,
    kind: FactorKind,
    probes: Vec<(crate::response::Sign, LinearForm)>,
    box_nu: Option<LinearForm>,
    /// Depth at which all probe frequencies are fixed.
    probe_depth: usize,
    /// Depth at which the factor's value is fixed.
    depth: usize,
}

#[derive(Debug, Clone, Default)]
struct BoxTables {
    probes: Vec<SignedProbe>,
    qp: Vec<Vec3>,
    qm: Vec<Vec3>,
}

/// Which quantity of a term to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Spectral density at fixed ν, or the δ(ν) weight of an elastic term.
    AtNu,
    /// Integral over every free frequency including ν.
    Total,
}

/// Integration plan for one term.
pub struct TermEvaluator {
    atoms: [Atom; 3],
    term: DiagramTerm,
    factors: Vec<Factor>,
    /// Slots integrated from outermost to innermost.
    order: Vec<usize>,
    /// Break-point forms per depth: (form, coefficient of that depth's slot).
    break_forms: Vec<Vec<(LinearForm, i64)>>,
    hints: Vec<f64>,
    scale: f64,
    opts: QuadOptions,
}

fn depends(form: &LinearForm, slot: usize) -> bool {
    form.0.get(slot).is_some_and(|c| *c != 0)
}

impl TermEvaluator {
    fn build(atoms: [AtomParams; 3], term: &DiagramTerm, cfg: &QuadratureConfig, mode: Mode) -> Result<Self> {
        cfg.validate()?;
        let n_slots = term.n_vars + 1;
        let mut free: Vec<usize> = (1..n_slots).collect();
        if mode == Mode::Total && !term.elastic {
            free.push(0);
        }
        let mut factors: Vec<Factor> = term
            .factors
            .iter()
            .enumerate()
            .map(|(a, f)| Factor {
                atom: a,
                kind: match f.term.kind {
                    TermKind::Split(m) => FactorKind::Circle(m),
                    TermKind::Box => FactorKind::Box,
                },
                probes: f.probes.iter().map(|(c, l)| (c.sign(), l.clone())).collect(),
                box_nu: f.box_nu.clone(),
                probe_depth: 0,
                depth: 0,
            })
            .collect();
        // A slot feeding a single box only through its output frequency integrates in closed form.
        free.retain(|&slot| {
            let users: Vec<usize> = (0..factors.len())
                .filter(|&k| {
                    factors[k].probes.iter().any(|p| depends(&p.1, slot))
                        || factors[k].box_nu.as_ref().is_some_and(|b| depends(b, slot))
                })
                .collect();
            if let [k] = users[..] {
                let f = &mut factors[k];
                if f.kind == FactorKind::Box && f.probes.iter().all(|p| !depends(&p.1, slot)) {
                    f.kind = FactorKind::BoxTotal;
                    f.box_nu = None;
                    return false;
                }
            }
            true
        });
        let order = best_order(&factors, &free);
        let depth_of = |form: &LinearForm| -> usize {
            order.iter().enumerate().filter(|(_, s)| depends(form, **s)).map(|(d, _)| d + 1).max().unwrap_or(0)
        };
        for f in factors.iter_mut() {
            f.probe_depth = f.probes.iter().map(|p| depth_of(&p.1)).max().unwrap_or(0);
            f.depth = f.probe_depth.max(f.box_nu.as_ref().map_or(0, depth_of));
        }
        // Resonances sit where an arrow frequency or a box's shifted output hits a hint.
        let mut forms: Vec<LinearForm> = term.arrow_freqs.clone();
        for f in &factors {
            if let Some(nu) = &f.box_nu {
                let mut shifted = nu.0.clone();
                for (sign, p) in &f.probes {
                    for (x, c) in shifted.iter_mut().zip(&p.0) {
                        *x -= (sign.value() as i64) * c;
                    }
                }
                forms.push(LinearForm(shifted));
            }
        }
        let break_forms = (0..order.len())
            .map(|d| {
                forms
                    .iter()
                    .filter(|f| depth_of(f) == d + 1)
                    .map(|f| (f.clone(), f.0[order[d]]))
                    .collect()
            })
            .collect();
        let p0 = atoms[0];
        Ok(Self {
            atoms: [Atom::new(atoms[0])?, Atom::new(atoms[1])?, Atom::new(atoms[2])?],
            term: term.clone(),
            factors,
            order,
            break_forms,
            hints: cfg.hints_for(&p0),
            scale: cfg.scale_for(&p0),
            opts: QuadOptions { rel_tol: cfg.rel_tol, abs_tol: 1e-300, max_intervals: cfg.max_intervals },
        })
    }

    /// Number of nested numerical integrations the plan performs.
    pub fn dimension(&self) -> usize {
        self.order.len()
    }

    fn signed_probes(&self, f: &Factor, vals: &[f64]) -> Vec<SignedProbe> {
        f.probes.iter().map(|(s, l)| SignedProbe { sign: *s, omega: l.eval(vals[0], &vals[1..]) }).collect()
    }

    fn factor_value(&self, k: usize, vals: &[f64], tables: &[BoxTables]) -> Result<C64> {
        let f = &self.factors[k];
        let atom = &self.atoms[f.atom];
        match f.kind {
            FactorKind::Circle(mask) => {
                let probes = self.signed_probes(f, vals);
                let (plus, minus): (Vec<_>, Vec<_>) =
                    probes.iter().enumerate().partition(|(j, _)| mask >> j & 1 == 1);
                let plus: Vec<SignedProbe> = plus.into_iter().map(|x| *x.1).collect();
                let minus: Vec<SignedProbe> = minus.into_iter().map(|x| *x.1).collect();
                Ok(atom.response_vector(&plus)?[1] * atom.response_vector(&minus)?[0])
            }
            FactorKind::Box => {
                let t = &tables[k];
                let nu = f.box_nu.as_ref().expect("box output frequency").eval(vals[0], &vals[1..]);
                Ok(atom.inelastic_from_tables(&t.probes, &t.qp, &t.qm, nu)?.value)
            }
            FactorKind::BoxTotal => {
                let t = &tables[k];
                Ok(Atom::total_from_tables(&t.qp, &t.qm))
            }
        }
    }

    fn fill_tables(&self, depth: usize, vals: &[f64], tables: &mut [BoxTables]) -> Result<()> {
        for (k, f) in self.factors.iter().enumerate() {
            if f.probe_depth == depth && matches!(f.kind, FactorKind::Box | FactorKind::BoxTotal) {
                let atom = &self.atoms[f.atom];
                let probes = self.signed_probes(f, vals);
                let r = atom.subset_responses(&probes)?;
                tables[k] = BoxTables {
                    qp: atom.subset_q(&r, Branch::Plus),
                    qm: atom.subset_q(&r, Branch::Minus),
                    probes,
                };
            }
        }
        Ok(())
    }

    /// Value and error estimate of the integrand below `depth`, aiming for
    /// an absolute error of at most `abs_tol`.
    fn eval_depth(
        &self,
        depth: usize,
        vals: &mut [f64],
        tables: &mut [BoxTables],
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<(C64, f64)> {
        self.fill_tables(depth, vals, tables)?;
        let mut product = C64::new(1.0, 0.0);
        for k in 0..self.factors.len() {
            if self.factors[k].depth == depth {
                product *= self.factor_value(k, vals, tables)?;
            }
        }
        if depth == self.order.len() || product == C64::default() {
            return Ok((product, 0.0));
        }
        let slot = self.order[depth];
        let mut breaks = Vec::new();
        for (form, c) in &self.break_forms[depth] {
            vals[slot] = 0.0;
            let rest = form.eval(vals[0], &vals[1..]);
            for h in &self.hints {
                breaks.push((h - rest) / *c as f64);
            }
        }
        // Half of the budget goes to this pass, half to the passes below it.
        // The tangent map has total θ-length π, so a pointwise error of
        // budget·s/(π(s²+x²)) integrates to at most the budget.
        let budget = abs_tol / product.norm();
        let tol_scale = 0.1f64.powi(depth as i32);
        let opts = QuadOptions {
            rel_tol: (rel_tol * tol_scale).max(1e-14),
            abs_tol: 0.5 * budget,
            ..self.opts
        };
        let s = self.scale;
        let mut local_vals = vals.to_vec();
        let mut local_tables = tables.to_vec();
        let inner = integrate_line_with_error(
            |x| {
                local_vals[slot] = x;
                let share = 0.5 * budget * s / (PI * (s * s + x * x));
                self.eval_depth(depth + 1, &mut local_vals, &mut local_tables, share, rel_tol)
            },
            &breaks,
            s,
            &opts,
        )?;
        Ok((product * inner.value, product.norm() * inner.error))
    }

    /// Value with its error estimate.
    fn run(&self, nu: f64, abs_tol: f64) -> Result<Estimate> {
        self.run_with(nu, abs_tol, self.opts.rel_tol)
    }

    fn run_with(&self, nu: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
        let mut vals = vec![0.0; self.term.n_vars + 1];
        vals[0] = nu;
        let mut tables = vec![BoxTables::default(); self.factors.len()];
        let (value, error) = self.eval_depth(0, &mut vals, &mut tables, abs_tol, rel_tol)?;
        Ok(Estimate { value, error })
    }
}

/// Relative tolerance of the pass that sizes a batch without closed-form terms.
const SCOUT_REL_TOL: f64 = 1e-3;

/// Evaluates a batch of terms at one ν. The absolute target is rel_tol times
/// the largest term that needs no integration (or, failing that, the largest
/// term from a loose scouting pass), so terms that are many orders below the
/// sum are not chased to full relative accuracy.
fn run_batch(evaluators: &[TermEvaluator], nu: f64, cfg: &QuadratureConfig) -> Result<Vec<Estimate>> {
    let mut out = vec![Estimate::default(); evaluators.len()];
    let mut scale = 0.0f64;
    for (k, e) in evaluators.iter().enumerate() {
        if e.dimension() == 0 {
            out[k] = e.run(nu, 0.0)?;
            scale = scale.max(out[k].value.norm());
        }
    }
    if scale == 0.0 {
        for e in evaluators {
            scale = scale.max(e.run_with(nu, 0.0, SCOUT_REL_TOL)?.value.norm());
        }
    }
    let abs_tol = cfg.abs_tol.max(cfg.rel_tol * scale);
    for (k, e) in evaluators.iter().enumerate() {
        if e.dimension() > 0 {
            out[k] = e.run(nu, abs_tol)?;
        }
    }
    Ok(out)
}

/// Greedy-free exhaustive choice of nesting order minimizing a work estimate.
fn best_order(factors: &[Factor], free: &[usize]) -> Vec<usize> {
    let mut best = free.to_vec();
    let mut best_cost = f64::INFINITY;
    let mut perm = free.to_vec();
    perm.sort();
    loop {
        let depth_of = |form: &LinearForm| -> usize {
            perm.iter().enumerate().filter(|(_, s)| depends(form, **s)).map(|(d, _)| d + 1).max().unwrap_or(0)
        };
        let mut cost = 0.0;
        for f in factors {
            let pd = f.probes.iter().map(|p| depth_of(&p.1)).max().unwrap_or(0);
            let d = pd.max(f.box_nu.as_ref().map_or(0, depth_of));
            let size = (1u32 << f.probes.len()) as f64;
            let n = 150f64;
            match f.kind {
                FactorKind::Circle(_) => cost += n.powi(d as i32) * size,
                _ => cost += n.powi(pd as i32) * 3.0 * size + n.powi(d as i32) * 2.0 * size,
            }
        }
        if cost < best_cost {
            best_cost = cost;
            best = perm.clone();
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn build_all(atoms: [AtomParams; 3], terms: &[DiagramTerm], cfg: &QuadratureConfig, mode: Mode) -> Result<Vec<TermEvaluator>> {
    terms.iter().map(|t| TermEvaluator::build(atoms, t, cfg, mode)).collect()
}

fn uniform(params: &AtomParams) -> [AtomParams; 3] {
    [*params; 3]
}

/// Value of one term with unit couplings: the spectral density at ν for an
/// inelastic term, or the weight of δ(ν) for an elastic one (ν ignored).
/// The tolerance is set as for a batch holding only this term.
pub fn evaluate_diagram(params: &AtomParams, term: &DiagramTerm, nu: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let evaluator = TermEvaluator::build(uniform(params), term, cfg, Mode::AtNu)?;
    Ok(run_batch(std::slice::from_ref(&evaluator), nu, cfg)?[0])
}

/// Integral of a term over every free frequency including ν.
pub fn term_total(atoms: [AtomParams; 3], term: &DiagramTerm, cfg: &QuadratureConfig) -> Result<Estimate> {
    TermEvaluator::build(atoms, term, cfg, Mode::Total)?.run(0.0, cfg.abs_tol)
}

/// Number of nested numerical integrations used for a term total.
pub fn total_dimension(term: &DiagramTerm) -> Result<usize> {
    Ok(TermEvaluator::build(uniform(&AtomParams::new(1.0, 0.0)), term, &QuadratureConfig::default(), Mode::Total)?
        .dimension())
}

/// Degeneracy times the real part. For C2 the real part carries the sum over
/// the path and its conjugate; for the other types the per-path sum is real.
pub fn assemble(ty: ContributionType, sum: C64) -> f64 {
    ty.degeneracy() * sum.re
}

/// Elastic intensity of a contribution type: all terms whose detected light
/// sits at the laser frequency, times the degeneracy (C2 as 12·Re).
pub fn elastic_intensity(params: &AtomParams, ty: ContributionType, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(assemble(ty, elastic_sum(params, ty, cfg)?.value))
}

/// Per-path elastic sum before degeneracy and real-part conventions.
pub fn elastic_sum(params: &AtomParams, ty: ContributionType, cfg: &QuadratureConfig) -> Result<Estimate> {
    let terms: Vec<DiagramTerm> = enumerate_type(ty)?.into_iter().filter(|t| t.elastic).collect();
    let evaluators = build_all(uniform(params), &terms, cfg, Mode::AtNu)?;
    Ok(run_batch(&evaluators, 0.0, cfg)?.into_iter().sum())
}

fn spectral_sum(params: &AtomParams, terms: &[DiagramTerm], grid: &[f64], cfg: &QuadratureConfig) -> Result<Vec<Estimate>> {
    let evaluators = build_all(uniform(params), terms, cfg, Mode::AtNu)?;
    grid.par_iter().map(|nu| Ok(run_batch(&evaluators, *nu, cfg)?.into_iter().sum())).collect()
}

/// Per-path inelastic sum on a ν grid, before degeneracy and real-part conventions.
pub fn inelastic_path_sum(
    params: &AtomParams,
    ty: ContributionType,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<Estimate>> {
    let terms: Vec<DiagramTerm> = enumerate_type(ty)?.into_iter().filter(|t| !t.elastic).collect();
    spectral_sum(params, &terms, grid, cfg)
}

/// Inelastic spectral density of a contribution type on a ν grid.
pub fn inelastic_spectrum(
    params: &AtomParams,
    ty: ContributionType,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    Ok(inelastic_path_sum(params, ty, grid, cfg)?.into_iter().map(|s| assemble(ty, s.value)).collect())
}

/// Labels of the all-box term of each contribution type.
pub fn strong_drive_label(ty: ContributionType) -> &'static str {
    match ty {
        ContributionType::L1 => "(a2)(b5)(b5)",
        ContributionType::L2 => "(a2)(e17)(a2)",
        ContributionType::C1 => "(c3)(f5)(d3)",
        ContributionType::C2 => "(a2)(g9)(d3)",
    }
}

/// Spectrum restricted to the all-box term, which dominates for Ω ≫ γ.
pub fn strong_drive_spectrum(
    params: &AtomParams,
    ty: ContributionType,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let term = crate::diagrams::find_term(ty, strong_drive_label(ty))?;
    Ok(spectral_sum(params, &[term], grid, cfg)?.into_iter().map(|s| assemble(ty, s.value)).collect())
}

/// Per-path total intensity (elastic plus ν-integrated inelastic) with unit
/// couplings, before degeneracy factors and real-part conventions.
pub fn path_total(atoms: [AtomParams; 3], ty: ContributionType, cfg: &QuadratureConfig) -> Result<Estimate> {
    Ok(path_term_totals(atoms, ty, cfg)?.into_iter().map(|x| x.1).sum())
}

/// Per-term totals of a contribution type, labelled.
pub fn path_term_totals(
    atoms: [AtomParams; 3],
    ty: ContributionType,
    cfg: &QuadratureConfig,
) -> Result<Vec<(String, Estimate)>> {
    let terms = enumerate_type(ty)?;
    let evaluators = build_all(atoms, &terms, cfg, Mode::Total)?;
    let values = run_batch(&evaluators, 0.0, cfg)?;
    Ok(terms.iter().map(|t| t.label()).zip(values).collect())
}

/// Default ν grid: 801 points on [−4Ω_g − 8, 4Ω_g + 8].
pub fn default_grid(params: &AtomParams) -> Vec<f64> {
    let half = 4.0 * params.generalized_rabi() + 8.0;
    uniform_grid(-half, half, 801)
}

pub fn uniform_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![min];
    }
    (0..points).map(|k| min + (max - min) * k as f64 / (points - 1) as f64).collect()
}

/// Elastic intensities of the four contribution types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticSet {
    pub ladder1: f64,
    pub ladder2: f64,
    pub crossed1: f64,
    pub crossed2: f64,
}

impl ElasticSet {
    pub fn get(&self, ty: ContributionType) -> f64 {
        match ty {
            ContributionType::L1 => self.ladder1,
            ContributionType::L2 => self.ladder2,
            ContributionType::C1 => self.crossed1,
            ContributionType::C2 => self.crossed2,
        }
    }
}

pub fn elastic_set(params: &AtomParams, cfg: &QuadratureConfig) -> Result<ElasticSet> {
    Ok(ElasticSet {
        ladder1: elastic_intensity(params, ContributionType::L1, cfg)?,
        ladder2: elastic_intensity(params, ContributionType::L2, cfg)?,
        crossed1: elastic_intensity(params, ContributionType::C1, cfg)?,
        crossed2: elastic_intensity(params, ContributionType::C2, cfg)?,
    })
}

/// Term counts recorded alongside computed spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    pub elastic: usize,
    pub inelastic: usize,
}

/// Full spectral result for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub params: AtomParams,
    pub quadrature: QuadratureConfig,
    pub nu_grid: Vec<f64>,
    pub ladder1: Vec<f64>,
    pub ladder2: Vec<f64>,
    pub crossed1: Vec<f64>,
    pub crossed2: Vec<f64>,
    pub elastic: ElasticSet,
    pub term_counts: Vec<(ContributionType, TermCounts)>,
}

pub fn compute_spectrum(params: &AtomParams, grid: &[f64], cfg: &QuadratureConfig) -> Result<SpectrumResult> {
    params.validate()?;
    let spectrum = |ty| inelastic_spectrum(params, ty, grid, cfg);
    let term_counts = ContributionType::ALL
        .iter()
        .map(|ty| {
            let terms = enumerate_type(*ty)?;
            let elastic = terms.iter().filter(|t| t.elastic).count();
            Ok((*ty, TermCounts { elastic, inelastic: terms.len() - elastic }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult {
        params: *params,
        quadrature: cfg.clone(),
        nu_grid: grid.to_vec(),
        ladder1: spectrum(ContributionType::L1)?,
        ladder2: spectrum(ContributionType::L2)?,
        crossed1: spectrum(ContributionType::C1)?,
        crossed2: spectrum(ContributionType::C2)?,
        elastic: elastic_set(params, cfg)?,
        term_counts,
    })
}

/// Closed-form weak-drive results valid through fourth order in Ω/γ.
pub mod perturbative {
    use super::*;

    fn norm(delta: f64, omega: f64) -> (f64, f64) {
        (1.0 + delta * delta, omega * omega)
    }

    /// Elastic intensity of a contribution type.
    pub fn elastic(ty: ContributionType, delta: f64, omega: f64) -> f64 {
        let (d, w2) = norm(delta, omega);
        match ty {
            ContributionType::L1 => 3.0 * w2 / (32.0 * d.powi(3)) - 27.0 * w2 * w2 / (32.0 * d.powi(4)),
            ContributionType::L2 => -6.0 * w2 * w2 / (32.0 * d.powi(4)),
            ContributionType::C1 => 3.0 * w2 / (32.0 * d.powi(3)) - 24.0 * w2 * w2 / (32.0 * d.powi(4)),
            ContributionType::C2 => -24.0 * w2 * w2 / (32.0 * d.powi(4)),
        }
    }

    /// Inelastic spectral density of a contribution type.
    pub fn inelastic(ty: ContributionType, delta: f64, omega: f64, nu: f64) -> f64 {
        let (d, w2) = norm(delta, omega);
        let w4 = w2 * w2;
        let lm = 1.0 + (delta - nu).powi(2);
        let lp = 1.0 + (delta + nu).powi(2);
        let value = match ty {
            ContributionType::L1 => {
                6.0 * w4 / (32.0 * d.powi(3)) * (3.0 * d + 4.0 * delta * nu + 2.0 * nu * nu).powi(2) / (lm * lp.powi(3))
            }
            ContributionType::L2 => w4 / (32.0 * d.powi(3)) * 12.0 / (lm * lp),
            ContributionType::C1 => {
                6.0 * w4 / (4.0 * d.powi(3)) * (1.0 + delta * (delta + nu)).powi(2) / (lm * lp.powi(3))
            }
            ContributionType::C2 => 6.0 * w4 / (4.0 * d.powi(3)) * (1.0 + delta * (delta + nu)) / (lm * lp.powi(2)),
        };
        value / (2.0 * PI)
    }

    /// Frequency-integrated inelastic crossed intensity C1 + C2.
    pub fn crossed_inelastic_total(delta: f64, omega: f64) -> f64 {
        let (d, w2) = norm(delta, omega);
        3.0 * (22.0 + delta * delta) * w2 * w2 / (128.0 * d.powi(4))
    }

    /// Frequency-integrated inelastic ladder intensity L1 + L2.
    pub fn ladder_inelastic_total(delta: f64, omega: f64) -> f64 {
        let (d, w2) = norm(delta, omega);
        let d2 = delta * delta;
        3.0 * (154.0 + 25.0 * d2 + 3.0 * d2 * d2) * w2 * w2 / (1024.0 * d.powi(4))
    }

    /// η = 1 + C_inel/L_inel from the integrated weak-drive spectra.
    pub fn enhancement_factor(delta: f64) -> f64 {
        1.0 + crossed_inelastic_total(delta, 1.0) / ladder_inelastic_total(delta, 1.0)
    }
}
