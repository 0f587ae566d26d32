//! Single-atom spectral response to the laser plus n weak probe arrows.
//!
//! Circles are corrections to the Bloch vector, boxes are corrections to the
//! inelastic spectrum. Permutation sums are evaluated through subset
//! recursions, so a list of n probes costs O(2ⁿ·n) resolvent applications.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::atom::{self, AtomParams, Mat3, Vec3, C64, I};
use crate::error::{CbsError, Result};

/// Largest supported probe count.
pub const MAX_PROBES: usize = 8;

/// Sign of an incoming probe arrow: `Plus` for a dashed (negative-frequency)
/// arrow, `Minus` for a solid (positive-frequency) arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Incoming probe arrow with detuning ω from the laser frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedProbe {
    pub sign: Sign,
    pub omega: f64,
}

impl SignedProbe {
    pub fn plus(omega: f64) -> Self {
        Self { sign: Sign::Plus, omega }
    }

    pub fn minus(omega: f64) -> Self {
        Self { sign: Sign::Minus, omega }
    }

    /// s·ω
    pub fn signed(&self) -> f64 {
        self.sign.value() * self.omega
    }
}

/// Flip every sign, keeping frequencies and order.
pub fn conjugate_probes(probes: &[SignedProbe]) -> Vec<SignedProbe> {
    probes.iter().map(|p| SignedProbe { sign: p.sign.flip(), omega: p.omega }).collect()
}

/// Box value together with the frequency ν′ = ν − Σ s ω of its solid output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InelasticValue {
    pub value: C64,
    pub nu_prime: f64,
}

/// Branch of the fluctuation vector: `Plus` gives q⃗₊, `Minus` gives q⃗₋.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Precomputed single-atom data reused across many response evaluations.
#[derive(Debug, Clone)]
pub struct Atom {
    pub params: AtomParams,
    m: Mat3,
    steady: Vec3,
}

fn check_count(n: usize) -> Result<()> {
    if n > MAX_PROBES {
        return Err(CbsError::Config(format!("{n} probes exceed the supported maximum {MAX_PROBES}")));
    }
    Ok(())
}

impl Atom {
    pub fn new(params: AtomParams) -> Result<Self> {
        params.validate()?;
        let m = atom::bloch_matrix(&params);
        let steady = atom::resolvent(&m, C64::default())? * atom::drive_vector(&params);
        Ok(Self { params, m, steady })
    }

    pub fn steady(&self) -> Vec3 {
        self.steady
    }

    /// G(z) = (z − M)⁻¹.
    pub fn green(&self, z: C64) -> Result<Mat3> {
        atom::resolvent(&self.m, z)
    }

    /// (iω − M)⁻¹·v by cofactors. A valid atom has γ > 0, so every eigenvalue
    /// of M lies in the open left half-plane and iω − M is invertible.
    fn solve_at(&self, omega: f64, v: &Vec3) -> Vec3 {
        let a = Mat3::from_diagonal_element(I * omega) - self.m;
        let c00 = a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)];
        let c01 = a[(1, 2)] * a[(2, 0)] - a[(1, 0)] * a[(2, 2)];
        let c02 = a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)];
        let det = a[(0, 0)] * c00 + a[(0, 1)] * c01 + a[(0, 2)] * c02;
        let x0 = c00 * v[0]
            + (a[(0, 2)] * a[(2, 1)] - a[(0, 1)] * a[(2, 2)]) * v[1]
            + (a[(0, 1)] * a[(1, 2)] - a[(0, 2)] * a[(1, 1)]) * v[2];
        let x1 = c01 * v[0]
            + (a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]) * v[1]
            + (a[(0, 2)] * a[(1, 0)] - a[(0, 0)] * a[(1, 2)]) * v[2];
        let x2 = c02 * v[0]
            + (a[(0, 1)] * a[(2, 0)] - a[(0, 0)] * a[(2, 1)]) * v[1]
            + (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]) * v[2];
        let inv = det.inv();
        Vec3::new(x0 * inv, x1 * inv, x2 * inv)
    }

    /// Δ^(s)·v using the two nonzero entries of each coupling matrix.
    fn couple(s: Sign, v: &Vec3) -> Vec3 {
        let z = C64::default();
        match s {
            Sign::Plus => Vec3::new(z, v[2] * C64::new(0.0, 0.5), v[0] * C64::new(0.0, -1.0)),
            Sign::Minus => Vec3::new(v[2] * C64::new(0.0, -0.5), z, v[1] * I),
        }
    }

    /// Σ s·ω over the probes of every subset, indexed by bitmask.
    fn subset_frequencies(probes: &[SignedProbe]) -> Vec<f64> {
        let mut freq = vec![0.0; 1 << probes.len()];
        for mask in 1usize..freq.len() {
            let low = mask.trailing_zeros() as usize;
            freq[mask] = freq[mask & (mask - 1)] + probes[low].signed();
        }
        freq
    }

    /// Response vectors for every subset of `probes`, indexed by bitmask.
    pub fn subset_responses(&self, probes: &[SignedProbe]) -> Result<Vec<Vec3>> {
        check_count(probes.len())?;
        let n = probes.len();
        let freq = Self::subset_frequencies(probes);
        let mut out = vec![Vec3::zeros(); 1 << n];
        out[0] = self.steady;
        for mask in 1usize..(1 << n) {
            let mut acc = Vec3::zeros();
            for j in (0..n).filter(|j| mask >> j & 1 == 1) {
                acc += Self::couple(probes[j].sign, &out[mask ^ (1 << j)]);
            }
            out[mask] = self.solve_at(freq[mask], &acc);
        }
        Ok(out)
    }

    /// ⟨σ⃗(ω₁…ωₙ)⟩^(s₁…sₙ), summed over all orders of probe application.
    pub fn response_vector(&self, probes: &[SignedProbe]) -> Result<Vec3> {
        Ok(*self.subset_responses(probes)?.last().expect("subset table is never empty"))
    }

    /// g^(s…): sum over the 2ⁿ splits ⟨σ⁺(A)⟩⟨σ⁻(complement)⟩.
    pub fn factorized_g(&self, probes: &[SignedProbe]) -> Result<C64> {
        let r = self.subset_responses(probes)?;
        let full = r.len() - 1;
        Ok((0..=full).map(|a| r[a][1] * r[full ^ a][0]).sum())
    }

    /// Fluctuation vectors q⃗± for every subset, indexed by bitmask.
    pub fn subset_q(&self, r: &[Vec3], branch: Branch) -> Vec<Vec3> {
        let (s, factor, comp, constant) = match branch {
            Branch::Plus => (Sign::Plus, -I, 0, atom::l1()),
            Branch::Minus => (Sign::Minus, I, 1, atom::l2()),
        };
        (0..r.len())
            .map(|mask| {
                let mut q = Self::couple(s, &r[mask]) * factor;
                if mask == 0 {
                    q += constant;
                }
                // Sum over sub-masks a of mask: σ⃗(a)·[σ(mask∖a)]_comp.
                let mut a = mask;
                loop {
                    q -= r[a] * r[mask ^ a][comp];
                    if a == 0 {
                        break;
                    }
                    a = (a - 1) & mask;
                }
                q
            })
            .collect()
    }

    /// q⃗±^(s…) for the full probe list.
    pub fn q_vector(&self, probes: &[SignedProbe], branch: Branch) -> Result<Vec3> {
        let r = self.subset_responses(probes)?;
        Ok(*self.subset_q(&r, branch).last().expect("subset table is never empty"))
    }

    /// Inelastic box P^(s…)(ω…; ν) = (P₊ + P₋)/2π.
    pub fn inelastic_p(&self, probes: &[SignedProbe], nu: f64) -> Result<InelasticValue> {
        let r = self.subset_responses(probes)?;
        let qp = self.subset_q(&r, Branch::Plus);
        let qm = self.subset_q(&r, Branch::Minus);
        self.inelastic_from_tables(probes, &qp, &qm, nu)
    }

    /// ∫dν P^(s…)(ω…; ν), the equal-time fluctuation response ([q⃗₊]₂ + [q⃗₋]₁)/2.
    pub fn inelastic_total(&self, probes: &[SignedProbe]) -> Result<C64> {
        let r = self.subset_responses(probes)?;
        let qp = self.subset_q(&r, Branch::Plus);
        let qm = self.subset_q(&r, Branch::Minus);
        Ok(Self::total_from_tables(&qp, &qm))
    }

    /// Frequency-integrated box from precomputed fluctuation tables.
    pub fn total_from_tables(qp: &[Vec3], qm: &[Vec3]) -> C64 {
        let full = qp.len() - 1;
        (qp[full][1] + qm[full][0]) * 0.5
    }

    /// Box value from precomputed fluctuation tables.
    pub fn inelastic_from_tables(
        &self,
        probes: &[SignedProbe],
        qp: &[Vec3],
        qm: &[Vec3],
        nu: f64,
    ) -> Result<InelasticValue> {
        let n = probes.len();
        let total: f64 = probes.iter().map(|p| p.signed()).sum();
        let nu_prime = nu - total;
        let full = (1usize << n) - 1;
        let freq = Self::subset_frequencies(probes);
        let mut h = vec![Vec3::zeros(); 1 << n];
        let mut k = vec![Vec3::zeros(); 1 << n];
        for mask in 0..=full {
            let mut hp = qp[mask];
            let mut km = qm[mask];
            for j in (0..n).filter(|j| mask >> j & 1 == 1) {
                hp += Self::couple(probes[j].sign, &h[mask ^ (1 << j)]);
                km += Self::couple(probes[j].sign, &k[mask ^ (1 << j)]);
            }
            h[mask] = self.solve_at(nu_prime + freq[mask], &hp);
            k[mask] = self.solve_at(freq[mask] - nu, &km);
        }
        let value = (h[full][1] + k[full][0]) / (2.0 * PI);
        Ok(InelasticValue { value, nu_prime })
    }
}

/// Free-function form of [`Atom::response_vector`].
pub fn response_vector(params: &AtomParams, probes: &[SignedProbe]) -> Result<Vec3> {
    Atom::new(*params)?.response_vector(probes)
}

/// Free-function form of [`Atom::factorized_g`].
pub fn factorized_g(params: &AtomParams, probes: &[SignedProbe]) -> Result<C64> {
    Atom::new(*params)?.factorized_g(probes)
}

/// Free-function form of [`Atom::q_vector`].
pub fn q_vector(params: &AtomParams, probes: &[SignedProbe], branch: Branch) -> Result<Vec3> {
    Atom::new(*params)?.q_vector(probes, branch)
}

/// Free-function form of [`Atom::inelastic_total`].
pub fn inelastic_total(params: &AtomParams, probes: &[SignedProbe]) -> Result<C64> {
    Atom::new(*params)?.inelastic_total(probes)
}

/// Free-function form of [`Atom::inelastic_p`].
pub fn inelastic_p(params: &AtomParams, probes: &[SignedProbe], nu: f64) -> Result<InelasticValue> {
    Atom::new(*params)?.inelastic_p(probes, nu)
}
