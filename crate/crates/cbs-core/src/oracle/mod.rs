//! Independent reference computations: three-atom master equation, single-atom
//! regression spectrum and time-domain Bloch equations with explicit probes.

pub mod master;
pub mod obe;
pub mod single;
