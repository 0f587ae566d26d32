//! Single-atom resonance-fluorescence spectrum by quantum regression.
//!
//! The fluctuation correlation vector ⟨δσ⃗(τ)δσ⁻(0)⟩ obeys the homogeneous
//! Bloch equation, so it equals Σ_k e^{r_k τ} P_k c₀ with c₀ built from the
//! equal-time operator products. The half-range transform is then a sum of
//! simple poles and no time stepping is needed.

use std::f64::consts::PI;

use crate::atom::{spectral_decomposition, steady_bloch, AtomParams, Vec3, C64, I};
use crate::error::Result;

/// Initial fluctuation vector ⟨σ⃗σ⁻⟩ − ⟨σ⃗⟩⟨σ⁻⟩ in the (σ⁻, σ⁺, σᶻ) basis.
pub fn regression_initial(p: &AtomParams) -> Vec3 {
    let s = steady_bloch(p);
    let minus = s[0];
    // σ⁻σ⁻ = 0, σ⁺σ⁻ = (1 + σᶻ)/2, σᶻσ⁻ = −σ⁻.
    let products = Vec3::new(C64::default(), (1.0 + s[2]) / 2.0, -minus);
    products - s * minus
}

/// Inelastic spectral density (1/2π)·2Re ∫₀^∞ e^{−iντ}⟨δσ⁺(τ)δσ⁻(0)⟩ dτ on a ν grid.
pub fn single_atom_spectrum_oracle(p: &AtomParams, nu_grid: &[f64]) -> Result<Vec<f64>> {
    if p.rabi.norm() == 0.0 {
        return Ok(vec![0.0; nu_grid.len()]);
    }
    let dec = spectral_decomposition(p)?;
    let c0 = regression_initial(p);
    let weights: Vec<(C64, C64)> = (0..3).map(|k| (dec.roots[k], (dec.projectors[k] * c0)[1])).collect();
    Ok(nu_grid
        .iter()
        .map(|nu| {
            let half: C64 = weights.iter().map(|(r, w)| w / (I * nu - r)).sum();
            2.0 * half.re / (2.0 * PI)
        })
        .collect())
}

/// Total inelastic power (1 + ⟨σᶻ⟩)/2 − |⟨σ⁻⟩|².
pub fn inelastic_power(p: &AtomParams) -> f64 {
    let s = steady_bloch(p);
    ((1.0 + s[2]) / 2.0).re - s[0].norm_sqr()
}
