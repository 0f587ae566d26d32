//! Single-atom Bloch algebra in the basis (σ⁻, σ⁺, σᶻ).
//!
//! Frequencies are measured in units of γ, half the radiative decay rate.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CbsError, Result};

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;
pub type Vec3 = Vector3<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Laser-driven two-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Rabi frequency Ω, complex to carry a position-dependent phase.
    pub rabi: C64,
    /// Laser detuning δ.
    pub detuning: f64,
    /// Half the radiative decay rate.
    pub gamma: f64,
}

impl AtomParams {
    /// Atom at the origin with real Rabi frequency and γ = 1.
    pub fn new(rabi: f64, detuning: f64) -> Self {
        Self { rabi: c(rabi, 0.0), detuning, gamma: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.rabi.re.is_finite()
            && self.rabi.im.is_finite()
            && self.detuning.is_finite()
            && self.gamma.is_finite();
        if !finite {
            return Err(CbsError::Config("atom parameters must be finite".into()));
        }
        if self.gamma <= 0.0 {
            return Err(CbsError::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Generalized Rabi frequency sqrt(|Ω|² + δ²).
    pub fn generalized_rabi(&self) -> f64 {
        (self.rabi.norm_sqr() + self.detuning * self.detuning).sqrt()
    }
}

/// Bloch evolution matrix M.
pub fn bloch_matrix(p: &AtomParams) -> Mat3 {
    let g = p.gamma;
    let d = p.detuning;
    let om = p.rabi;
    let z = C64::default();
    Mat3::new(
        c(-g, d), z, -I * om / 2.0,
        z, c(-g, -d), I * om.conj() / 2.0,
        -I * om.conj(), I * om, c(-2.0 * g, 0.0),
    )
}

/// Constant drive vector L = (0, 0, −2γ).
pub fn drive_vector(p: &AtomParams) -> Vec3 {
    Vec3::new(C64::default(), C64::default(), c(-2.0 * p.gamma, 0.0))
}

/// Identity contribution L₁ = (0, ½, 0) to ⟨σ⃗ σ⁻⟩.
pub fn l1() -> Vec3 {
    Vec3::new(c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0))
}

/// Identity contribution L₂ = (½, 0, 0) to ⟨σ⁺ σ⃗⟩.
pub fn l2() -> Vec3 {
    Vec3::new(c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0))
}

/// Coupling matrix Δ⁽⁺⁾ of a negative-frequency (dashed) probe.
pub fn delta_plus() -> Mat3 {
    let z = C64::default();
    Mat3::new(z, z, z, z, z, c(0.0, 0.5), c(0.0, -1.0), z, z)
}

/// Coupling matrix Δ⁽⁻⁾ of a positive-frequency (solid) probe.
pub fn delta_minus() -> Mat3 {
    let z = C64::default();
    Mat3::new(z, z, c(0.0, -0.5), z, z, z, z, c(0.0, 1.0), z)
}

/// Resolvent (z − M)⁻¹ for a precomputed Bloch matrix.
pub fn resolvent(m: &Mat3, z: C64) -> Result<Mat3> {
    let a = Mat3::from_diagonal_element(z) - m;
    let det = a.determinant();
    let scale = a.norm().max(1e-300);
    if det.norm() <= 1e-13 * scale * scale * scale {
        return Err(CbsError::Singular("resolvent"));
    }
    a.try_inverse().ok_or(CbsError::Singular("resolvent"))
}

/// Green's matrix G(z) = (z − M)⁻¹.
pub fn green_matrix(p: &AtomParams, z: C64) -> Result<Mat3> {
    resolvent(&bloch_matrix(p), z)
}

/// Steady-state Bloch vector G(0)·L.
pub fn steady_bloch(p: &AtomParams) -> Vec3 {
    // The evolution matrix of a valid atom has eigenvalues in the open left half-plane.
    let g = green_matrix(p, C64::default()).expect("Bloch matrix of a damped atom is invertible");
    g * drive_vector(p)
}

/// Characteristic polynomial det(z − M).
pub fn char_poly(p: &AtomParams, z: C64) -> C64 {
    let g = p.gamma;
    let u = z + g;
    (z + 2.0 * g) * (u * u + p.detuning * p.detuning) + u * p.rabi.norm_sqr()
}

/// Eigen-projector form M = Σ r_k P_k.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub roots: [C64; 3],
    pub projectors: [Mat3; 3],
}

impl SpectralDecomposition {
    /// G(z) = Σ P_k / (z − r_k).
    pub fn green(&self, z: C64) -> Mat3 {
        (0..3).fold(Mat3::zeros(), |acc, k| acc + self.projectors[k] / (z - self.roots[k]))
    }
}

/// Roots of the characteristic cubic. With u = z + γ the cubic reads
/// u³ + γu² + (δ² + |Ω|²)u + γδ², which has a real root in [−γ, 0].
fn cubic_roots(p: &AtomParams) -> [C64; 3] {
    let g = p.gamma;
    let a = g;
    let b = p.detuning * p.detuning + p.rabi.norm_sqr();
    let cc = g * p.detuning * p.detuning;
    let f = |u: f64| ((u + a) * u + b) * u + cc;
    let (mut lo, mut hi) = (-g, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    // Deflate: (u − r)(u² + βu + κ).
    let beta = a + r;
    let kappa = b + r * beta;
    let disc = C64::new(beta * beta - 4.0 * kappa, 0.0).sqrt();
    let q = if beta >= 0.0 { -0.5 * (beta + disc) } else { -0.5 * (beta - disc) };
    let u2 = q;
    let u3 = if q.norm() > 0.0 { C64::new(kappa, 0.0) / q } else { C64::default() };
    let poly = |u: C64| ((u + a) * u + b) * u + cc;
    let dpoly = |u: C64| (3.0 * u + 2.0 * a) * u + b;
    let mut out = [C64::new(r, 0.0), u2, u3];
    for u in out.iter_mut() {
        for _ in 0..4 {
            let d = dpoly(*u);
            if d.norm() == 0.0 {
                break;
            }
            let step = poly(*u) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *u -= step;
        }
    }
    out.map(|u| u - g)
}

/// Spectral decomposition of M from the roots of its characteristic polynomial.
pub fn spectral_decomposition(p: &AtomParams) -> Result<SpectralDecomposition> {
    p.validate()?;
    let m = bloch_matrix(p);
    if p.rabi.norm() < 1e-12 {
        let roots = [m[(0, 0)], m[(1, 1)], m[(2, 2)]];
        let projectors = [0, 1, 2].map(|k| {
            let mut e = Mat3::zeros();
            e[(k, k)] = C64::new(1.0, 0.0);
            e
        });
        return Ok(SpectralDecomposition { roots, projectors });
    }
    let roots = cubic_roots(p);
    let mut sep = f64::INFINITY;
    for k in 0..3 {
        for l in (k + 1)..3 {
            sep = sep.min((roots[k] - roots[l]).norm());
        }
    }
    if sep < 1e-8 * p.gamma {
        return Err(CbsError::Degenerate(sep));
    }
    let id = Mat3::identity();
    let projectors = [0, 1, 2].map(|k| {
        let mut pk = id;
        for l in 0..3 {
            if l != k {
                pk = pk * (m - id * roots[l]) / (roots[k] - roots[l]);
            }
        }
        pk
    });
    Ok(SpectralDecomposition { roots, projectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn undriven_matrix_is_diagonal() {
        let m = bloch_matrix(&AtomParams::new(0.0, 2.0));
        assert_eq!(m, Mat3::from_diagonal(&Vec3::new(c(-1.0, 2.0), c(-1.0, -2.0), c(-2.0, 0.0))));
    }

    #[test]
    fn driven_matrix_off_diagonals() {
        let m = bloch_matrix(&AtomParams::new(1.0, 0.0));
        assert_eq!(m[(0, 2)], c(0.0, -0.5));
        assert_eq!(m[(1, 2)], c(0.0, 0.5));
        assert_eq!(m[(2, 0)], c(0.0, -1.0));
        assert_eq!(m[(2, 1)], c(0.0, 1.0));
        assert_eq!(m.trace(), c(-4.0, 0.0));
    }

    #[test]
    fn coupling_matrix_entries() {
        let (dp, dm) = (delta_plus(), delta_minus());
        assert_eq!(dp.iter().filter(|x| x.norm() > 0.0).count(), 2);
        assert_eq!(dm.iter().filter(|x| x.norm() > 0.0).count(), 2);
        assert_eq!(dp[(1, 2)], c(0.0, 0.5));
        assert_eq!(dp[(2, 0)], c(0.0, -1.0));
        assert_eq!(dm[(0, 2)], c(0.0, -0.5));
        assert_eq!(dm[(2, 1)], c(0.0, 1.0));
    }

    #[test]
    fn green_at_zero_undriven() {
        let g = green_matrix(&AtomParams::new(0.0, 0.0), C64::default()).unwrap();
        assert!(close(g[(2, 2)], c(0.5, 0.0), 1e-15));
        assert!(close(g[(0, 0)], c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn steady_state_population() {
        let s = steady_bloch(&AtomParams::new(1.0, 0.0));
        assert!(close(s[2], c(-2.0 / 3.0, 0.0), 1e-14));
        assert!(close(s[1], s[0].conj(), 1e-14));
        let s0 = steady_bloch(&AtomParams::new(0.0, 0.0));
        assert!(close(s0[2], c(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn decomposition_reconstructs_matrix() {
        for (om, d) in [(4.0, 0.0), (3.0, 1.0), (0.1, 0.0), (2.0, -1.5)] {
            let p = AtomParams::new(om, d);
            let sd = spectral_decomposition(&p).unwrap();
            let m = bloch_matrix(&p);
            let rebuilt = (0..3).fold(Mat3::zeros(), |a, k| a + sd.projectors[k] * sd.roots[k]);
            assert!((rebuilt - m).norm() < 1e-10 * m.norm());
            let sum = sd.projectors.iter().fold(Mat3::zeros(), |a, p| a + p);
            assert!((sum - Mat3::identity()).norm() < 1e-12);
            for r in sd.roots {
                assert!(r.re < 0.0);
                assert!(char_poly(&p, r).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn critical_drive_is_degenerate() {
        assert!(matches!(
            spectral_decomposition(&AtomParams::new(0.5, 0.0)),
            Err(CbsError::Degenerate(_))
        ));
    }
}
