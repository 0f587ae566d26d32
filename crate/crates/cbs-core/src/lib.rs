//! Triple-scattering coherent backscattering of intense laser light by three
//! two-level atoms, assembled from single-atom spectral response functions and
//! checked against a three-atom master-equation solution.

pub mod atom;
pub mod config;
pub mod diagrams;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod response;
pub mod run;
pub mod spectra;

pub use error::{CbsError, Result};
