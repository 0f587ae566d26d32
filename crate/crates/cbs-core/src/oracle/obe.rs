//! Time-domain optical Bloch equations with explicit weak probe fields.
//!
//! Each probe (s, ω) is a real classical field of amplitude ε entering as
//! ε(Δ^(s) e^{isωt} + Δ^(−s) e^{−isωt}). After the transients have decayed the
//! solution is periodic with the common period of the probes, and its
//! Fourier coefficient at Σ s_j ω_j divided by εⁿ estimates the n-probe
//! response. Probe frequencies must be rational multiples of a common base
//! so that one period of the trapezoid rule demodulates exactly.

use std::f64::consts::PI;

use crate::atom::{bloch_matrix, delta_minus, delta_plus, steady_bloch, AtomParams, Mat3, Vec3, C64, I};
use crate::error::{CbsError, Result};
use crate::response::{Sign, SignedProbe};

/// Largest denominator tried when looking for a common probe period.
const MAX_DENOMINATOR: u64 = 64;
/// Upper bound on the RK4 step.
const MAX_STEP: f64 = 1e-3;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Common base frequency of all probes, if their ratios are simple rationals.
pub fn common_base(probes: &[SignedProbe]) -> Result<Option<f64>> {
    let freqs: Vec<f64> = probes.iter().map(|p| p.omega.abs()).filter(|w| *w > 0.0).collect();
    if freqs.is_empty() {
        return Ok(None);
    }
    for q in 1..=MAX_DENOMINATOR {
        let ints: Vec<f64> = freqs.iter().map(|w| w * q as f64).collect();
        if ints.iter().all(|x| (x - x.round()).abs() < 1e-9 * x.max(1.0)) {
            let g = ints.iter().fold(0u64, |g, x| gcd(g, x.round() as u64));
            return Ok(Some(g as f64 / q as f64));
        }
    }
    Err(CbsError::Config(format!(
        "probe frequencies {freqs:?} have no common period with denominator ≤ {MAX_DENOMINATOR}"
    )))
}

/// Estimated response with the agreement between two consecutive periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObeEstimate {
    pub response: Vec3,
    /// Relative change of the demodulated coefficient between the last two periods.
    pub period_drift: f64,
}

/// Time-domain estimate of ⟨σ⃗(ω₁…ωₙ)⟩^(s₁…sₙ).
///
/// `horizon` is the settling time in units of 1/γ before demodulation starts.
pub fn polychromatic_obe_oracle(
    p: &AtomParams,
    probes: &[SignedProbe],
    epsilon: f64,
    horizon: f64,
) -> Result<ObeEstimate> {
    p.validate()?;
    if !(epsilon > 0.0 && epsilon <= 1e-2) {
        return Err(CbsError::Config(format!("epsilon must lie in (0, 1e-2], got {epsilon}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(CbsError::Config(format!("horizon must be positive, got {horizon}")));
    }
    for (j, a) in probes.iter().enumerate() {
        if probes[..j].iter().any(|b| (a.omega.abs() - b.omega.abs()).abs() < 1e-12) {
            return Err(CbsError::Config("probe frequencies must be pairwise distinct".into()));
        }
    }
    let base = common_base(probes)?.unwrap_or(1.0);
    let period = 2.0 * PI / base;
    let steps_per_period = (period / MAX_STEP).ceil() as usize;
    let dt = period / steps_per_period as f64;
    let settle_periods = (horizon / period).ceil() as usize;
    let target: f64 = probes.iter().map(|q| q.signed()).sum();

    let m = bloch_matrix(p);
    let steady = steady_bloch(p);
    let (dp, dm) = (delta_plus(), delta_minus());
    // Drive terms: (matrix, frequency) with the coupling ε Σ D e^{iνt}.
    let mut drives: Vec<(Mat3, f64)> = Vec::new();
    for q in probes {
        let (d, dc) = match q.sign {
            Sign::Plus => (dp, dm),
            Sign::Minus => (dm, dp),
        };
        drives.push((d * C64::new(epsilon, 0.0), q.signed()));
        drives.push((dc * C64::new(epsilon, 0.0), -q.signed()));
    }
    let coupling = |t: f64| -> Mat3 {
        drives.iter().fold(Mat3::zeros(), |acc, (d, w)| acc + d * (I * (w * t)).exp())
    };
    // u = σ − σ_ss obeys u' = (M + V(t))u + V(t)σ_ss.
    let rhs = |t: f64, u: &Vec3| -> Vec3 {
        let v = coupling(t);
        m * u + v * (u + steady)
    };
    let ground = Vec3::new(C64::default(), C64::default(), C64::new(-1.0, 0.0));
    let mut u = ground - steady;
    let mut t = 0.0;
    let step = |t: &mut f64, u: &mut Vec3| {
        let k1 = rhs(*t, u);
        let k2 = rhs(*t + 0.5 * dt, &(*u + k1 * C64::new(0.5 * dt, 0.0)));
        let k3 = rhs(*t + 0.5 * dt, &(*u + k2 * C64::new(0.5 * dt, 0.0)));
        let k4 = rhs(*t + dt, &(*u + k3 * C64::new(dt, 0.0)));
        *u += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
        *t += dt;
    };
    for _ in 0..settle_periods * steps_per_period {
        step(&mut t, &mut u);
    }
    // Periodic trapezoid rule over one full period equals the plain mean of samples.
    let demodulate = |t: &mut f64, u: &mut Vec3| -> Vec3 {
        let mut acc = Vec3::zeros();
        for _ in 0..steps_per_period {
            acc += *u * (-I * (target * *t)).exp();
            step(t, u);
        }
        acc / C64::new(steps_per_period as f64, 0.0)
    };
    let first = demodulate(&mut t, &mut u);
    let second = demodulate(&mut t, &mut u);
    let mut coeff = second;
    if target.abs() < 1e-12 {
        coeff += steady;
    }
    let period_drift = (second - first).norm() / coeff.norm().max(f64::MIN_POSITIVE);
    let response = coeff / C64::new(epsilon.powi(probes.len() as i32), 0.0);
    if !response.iter().all(|x| x.re.is_finite() && x.im.is_finite()) || period_drift > 1e-4 {
        return Err(CbsError::NonConvergence(format!(
            "probe response not periodic after {horizon} (drift {period_drift:.2e})"
        )));
    }
    Ok(ObeEstimate { response, period_drift })
}
