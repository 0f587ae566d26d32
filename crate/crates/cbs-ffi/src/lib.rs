//! C ABI for the `cbs-core` library.
//!
//! Objects cross the boundary as opaque handles created by `*_new` or
//! `*_compute` functions and released by the matching `*_free`. Every fallible
//! function returns a [`CbsStatus`]; on failure the message is kept per thread
//! and can be read with [`cbs_last_error_message`]. Frequencies are in units of γ.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cbs_core::atom::{steady_bloch, AtomParams};
use cbs_core::diagrams::{enumerate_type, raw_terms, ContributionType};
use cbs_core::error::CbsError;
use cbs_core::spectra::{self, perturbative, QuadratureConfig, SpectrumResult};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Parameters, grid or tolerance out of range.
    InvalidArgument = 2,
    /// A numerical routine failed: quadrature, singular resolvent or similar.
    Numerical = 3,
    /// A caller buffer is smaller than the result.
    BufferTooSmall = 4,
    /// Unexpected failure inside the library.
    Internal = 5,
}

/// Contribution type of the triple-scattering signal.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbsContributionType {
    L1 = 0,
    L2 = 1,
    C1 = 2,
    C2 = 3,
}

impl From<CbsContributionType> for ContributionType {
    fn from(t: CbsContributionType) -> Self {
        match t {
            CbsContributionType::L1 => ContributionType::L1,
            CbsContributionType::L2 => ContributionType::L2,
            CbsContributionType::C1 => ContributionType::C1,
            CbsContributionType::C2 => ContributionType::C2,
        }
    }
}

/// Driven two-level atom with γ = 1.
pub struct CbsAtom {
    params: AtomParams,
}

/// Inelastic spectra of all four types on a frequency grid plus elastic intensities.
pub struct CbsSpectrum {
    result: SpectrumResult,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &CbsError) -> CbsStatus {
    match err {
        CbsError::Config(_) => CbsStatus::InvalidArgument,
        CbsError::Internal(_) | CbsError::Io(_) => CbsStatus::Internal,
        _ => CbsStatus::Numerical,
    }
}

/// Runs `f`, recording its error or panic and converting it to a status.
fn guard(f: impl FnOnce() -> Result<(), CbsStatus>) -> CbsStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CbsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside cbs-core");
            CbsStatus::Internal
        }
    }
}

fn check(r: cbs_core::error::Result<()>) -> Result<(), CbsStatus> {
    r.map_err(|e| fail(&e))
}

fn fail(e: &CbsError) -> CbsStatus {
    set_error(e.to_string());
    status_of(e)
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), CbsStatus> {
    if p.is_null() {
        set_error(format!("null pointer argument `{name}`"));
        Err(CbsStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Quadrature settings for `rel_tol`; zero selects the default.
fn quadrature(rel_tol: f64) -> Result<QuadratureConfig, CbsStatus> {
    let cfg = if rel_tol == 0.0 { QuadratureConfig::default() } else { QuadratureConfig::with_rel_tol(rel_tol) };
    check(cfg.validate())?;
    Ok(cfg)
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], CbsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(ptr, name)?;
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `ptr` must be null or point to `len` writable values.
unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, name: &str) -> Result<&'a mut [T], CbsStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    non_null(ptr, name)?;
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cbs_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string contains NUL"),
    };
    VERSION.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cbs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates an atom with real Rabi frequency `rabi` and detuning `detuning`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to release
/// with [`cbs_atom_free`].
#[no_mangle]
pub unsafe extern "C" fn cbs_atom_new(rabi: f64, detuning: f64, out: *mut *mut CbsAtom) -> CbsStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = AtomParams::new(rabi, detuning);
        check(params.validate())?;
        *out = Box::into_raw(Box::new(CbsAtom { params }));
        Ok(())
    })
}

/// Releases an atom handle; null is ignored.
///
/// # Safety
/// `atom` must be null or a handle from [`cbs_atom_new`] not yet released.
#[no_mangle]
pub unsafe extern "C" fn cbs_atom_free(atom: *mut CbsAtom) {
    if !atom.is_null() {
        drop(Box::from_raw(atom));
    }
}

/// Steady-state Bloch vector (⟨σ⁻⟩, ⟨σ⁺⟩, ⟨σᶻ⟩) as separate real and imaginary parts.
///
/// # Safety
/// `atom` must be a live handle; `re` and `im` must each point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cbs_atom_steady_state(atom: *const CbsAtom, re: *mut f64, im: *mut f64) -> CbsStatus {
    guard(|| {
        non_null(atom, "atom")?;
        let re = slice_mut(re, 3, "re")?;
        let im = slice_mut(im, 3, "im")?;
        let s = steady_bloch(&(*atom).params);
        for k in 0..3 {
            re[k] = s[k].re;
            im[k] = s[k].im;
        }
        Ok(())
    })
}

/// Elastic intensity of one contribution type. `rel_tol` = 0 selects the default.
///
/// # Safety
/// `atom` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbs_elastic_intensity(
    atom: *const CbsAtom,
    ty: CbsContributionType,
    rel_tol: f64,
    out: *mut f64,
) -> CbsStatus {
    guard(|| {
        non_null(atom, "atom")?;
        non_null(out, "out")?;
        let cfg = quadrature(rel_tol)?;
        *out = spectra::elastic_intensity(&(*atom).params, ty.into(), &cfg).map_err(|e| fail(&e))?;
        Ok(())
    })
}

/// Inelastic spectrum of one contribution type at the `n` frequencies in `nu`,
/// written to `out`.
///
/// # Safety
/// `atom` must be a live handle; `nu` and `out` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn cbs_inelastic_spectrum(
    atom: *const CbsAtom,
    ty: CbsContributionType,
    nu: *const f64,
    n: usize,
    rel_tol: f64,
    out: *mut f64,
) -> CbsStatus {
    guard(|| {
        non_null(atom, "atom")?;
        let grid = slice(nu, n, "nu")?;
        let dst = slice_mut(out, n, "out")?;
        let cfg = quadrature(rel_tol)?;
        let values = spectra::inelastic_spectrum(&(*atom).params, ty.into(), grid, &cfg).map_err(|e| fail(&e))?;
        dst.copy_from_slice(&values);
        Ok(())
    })
}

/// Weak-drive closed form of the inelastic spectrum at frequency `nu`.
#[no_mangle]
pub extern "C" fn cbs_perturbative_inelastic(ty: CbsContributionType, rabi: f64, detuning: f64, nu: f64) -> f64 {
    perturbative::inelastic(ty.into(), detuning, rabi, nu)
}

/// Weak-drive closed form of the elastic intensity.
#[no_mangle]
pub extern "C" fn cbs_perturbative_elastic(ty: CbsContributionType, rabi: f64, detuning: f64) -> f64 {
    perturbative::elastic(ty.into(), detuning, rabi)
}

/// Number of enumerated diagram terms of a type before (`raw`) and after
/// (`allowed`) removal of closed-loop diagrams.
///
/// # Safety
/// `raw` and `allowed` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cbs_diagram_count(ty: CbsContributionType, raw: *mut usize, allowed: *mut usize) -> CbsStatus {
    guard(|| {
        non_null(raw, "raw")?;
        non_null(allowed, "allowed")?;
        *raw = raw_terms(ty.into()).len();
        *allowed = enumerate_type(ty.into()).map_err(|e| fail(&e))?.len();
        Ok(())
    })
}

/// Computes all four spectra on the `n` frequencies in `nu` together with the
/// elastic intensities.
///
/// # Safety
/// `atom` must be a live handle, `nu` must point to `n` doubles and `out` must be
/// a valid pointer; on success it receives a handle to release with
/// [`cbs_spectrum_free`].
#[no_mangle]
pub unsafe extern "C" fn cbs_spectrum_compute(
    atom: *const CbsAtom,
    nu: *const f64,
    n: usize,
    rel_tol: f64,
    out: *mut *mut CbsSpectrum,
) -> CbsStatus {
    guard(|| {
        non_null(atom, "atom")?;
        non_null(out, "out")?;
        let grid = slice(nu, n, "nu")?;
        let cfg = quadrature(rel_tol)?;
        let result = spectra::compute_spectrum(&(*atom).params, grid, &cfg).map_err(|e| fail(&e))?;
        *out = Box::into_raw(Box::new(CbsSpectrum { result }));
        Ok(())
    })
}

/// Releases a spectrum handle; null is ignored.
///
/// # Safety
/// `spectrum` must be null or a handle from [`cbs_spectrum_compute`] not yet released.
#[no_mangle]
pub unsafe extern "C" fn cbs_spectrum_free(spectrum: *mut CbsSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of frequency points of a spectrum; 0 for a null handle.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbs_spectrum_len(spectrum: *const CbsSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.result.nu_grid.len())
}

/// Copies the spectrum of one type into `out`, which holds `len` doubles.
/// Returns [`CbsStatus::BufferTooSmall`] when `len` is below the grid length.
///
/// # Safety
/// `spectrum` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cbs_spectrum_values(
    spectrum: *const CbsSpectrum,
    ty: CbsContributionType,
    out: *mut f64,
    len: usize,
) -> CbsStatus {
    guard(|| {
        non_null(spectrum, "spectrum")?;
        let r = &(*spectrum).result;
        let values = match ContributionType::from(ty) {
            ContributionType::L1 => &r.ladder1,
            ContributionType::L2 => &r.ladder2,
            ContributionType::C1 => &r.crossed1,
            ContributionType::C2 => &r.crossed2,
        };
        if len < values.len() {
            set_error(format!("buffer holds {len} values, spectrum has {}", values.len()));
            return Err(CbsStatus::BufferTooSmall);
        }
        slice_mut(out, values.len(), "out")?.copy_from_slice(values);
        Ok(())
    })
}

/// Elastic intensity of one type stored with the spectrum.
///
/// # Safety
/// `spectrum` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbs_spectrum_elastic(
    spectrum: *const CbsSpectrum,
    ty: CbsContributionType,
    out: *mut f64,
) -> CbsStatus {
    guard(|| {
        non_null(spectrum, "spectrum")?;
        non_null(out, "out")?;
        *out = (*spectrum).result.elastic.get(ty.into());
        Ok(())
    })
}
