//! Adaptive Gauss–Kronrod quadrature over the real line.
//!
//! The line is mapped onto (−π/2, π/2) by x = s·tan θ, so integrands decaying
//! like 1/x² become bounded and no cutoff is needed. Intervals are bisected
//! globally in order of their error estimate (7-point Gauss, 15-point
//! Kronrod) until the error falls below the requested tolerance. Integrands
//! may report their own error (for example an inner adaptive pass); that
//! error is integrated alongside the value and acts as a noise floor below
//! which further subdivision is pointless.

use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::atom::C64;
use crate::error::{CbsError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule and budget for one adaptive pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Target error relative to ∫|f|.
    pub rel_tol: f64,
    /// Absolute error floor.
    pub abs_tol: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-300, max_intervals: 4000 }
    }
}

/// Converged integral with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: C64,
    pub error: f64,
    /// Estimate of ∫|f|, the scale used by the relative tolerance.
    pub l1: f64,
    /// Integrated error reported by the integrand itself.
    pub noise: f64,
    pub evals: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: C64,
    l1: f64,
    noise: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> Result<(C64, f64)>>(f: &mut F, a: f64, b: f64) -> Result<Piece> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, ec) = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.norm() * WGK[7];
    let mut noise = ec * WGK[7];
    let mut fv = [C64::default(); 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, e1) = f(c - dx)?;
        let (f2, e2) = f(c + dx)?;
        fv[j] = f1;
        fv[14 - j] = f2;
        kron += (f1 + f2) * WGK[j];
        l1 += (f1.norm() + f2.norm()) * WGK[j];
        noise += (e1 + e2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    // Deviation from the mean, used to temper the raw Gauss/Kronrod difference.
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }
    let value = kron * h;
    let asc = asc * h.abs();
    let mut error = ((kron - gauss) * h).norm();
    if asc > 0.0 && error > 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    // Roundoff floor.
    error = error.max(50.0 * f64::EPSILON * l1 * h.abs());
    Ok(Piece { a, b, value, l1: l1 * h.abs(), noise: noise * h.abs(), error })
}

/// Adaptive integral of f over [a, b] with interior break points.
pub fn integrate_interval<F: FnMut(f64) -> Result<C64>>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<QuadOutcome> {
    integrate_interval_with_error(|x| Ok((f(x)?, 0.0)), a, b, breaks, opts)
}

/// As [`integrate_interval`] for an integrand returning (value, error).
/// Refinement stops once the discretization error drops below either the
/// tolerance or the integrated integrand error.
pub fn integrate_interval_with_error<F: FnMut(f64) -> Result<(C64, f64)>>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<QuadOutcome> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b && x.is_finite()).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (b - a));
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in cuts.windows(2) {
        heap.push(gk15(&mut f, w[0], w[1])?);
        evals += 15;
    }
    loop {
        let value: C64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let l1: f64 = heap.iter().map(|p| p.l1).sum();
        let noise: f64 = heap.iter().map(|p| p.noise).sum();
        let target = opts.abs_tol.max(opts.rel_tol * l1).max(noise);
        if error <= target {
            return Ok(QuadOutcome { value, error: error + noise, l1, noise, evals, intervals: heap.len() });
        }
        if heap.len() >= opts.max_intervals {
            return Err(CbsError::Quadrature { estimate: value.re, error: error + noise, intervals: heap.len() });
        }
        let worst = heap.pop().expect("at least one interval");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine precision; accept what we have.
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        heap.push(gk15(&mut f, worst.a, mid)?);
        heap.push(gk15(&mut f, mid, worst.b)?);
        evals += 30;
    }
}

/// Adaptive integral of f over the whole real line using x = scale·tan θ.
pub fn integrate_line<F: FnMut(f64) -> Result<C64>>(
    mut f: F,
    breaks: &[f64],
    scale: f64,
    opts: &QuadOptions,
) -> Result<QuadOutcome> {
    integrate_line_with_error(|x| Ok((f(x)?, 0.0)), breaks, scale, opts)
}

/// As [`integrate_line`] for an integrand returning (value, error).
pub fn integrate_line_with_error<F: FnMut(f64) -> Result<(C64, f64)>>(
    mut f: F,
    breaks: &[f64],
    scale: f64,
    opts: &QuadOptions,
) -> Result<QuadOutcome> {
    if scale.is_nan() || scale <= 0.0 {
        return Err(CbsError::Config(format!("quadrature scale must be positive, got {scale}")));
    }
    let thetas: Vec<f64> = breaks.iter().map(|x| (x / scale).atan()).collect();
    integrate_interval_with_error(
        |t| {
            let c = t.cos();
            let x = scale * t.tan();
            let jac = scale / (c * c);
            let (v, e) = f(x)?;
            Ok((v * jac, e * jac))
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        &thetas,
        opts,
    )
}
