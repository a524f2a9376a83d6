//! Exact analytic spectral, relaxation, and transport properties of N
//! disordered two-level emitters collectively coupled to one cavity mode
//! (a Fano-Anderson star model), verified against a finite-size Monte Carlo
//! disorder-ensemble oracle.

pub mod core;
pub mod effham;
pub mod ensemble;
pub mod greens;
pub mod lapack;
pub mod numerics;
pub mod rates;
pub mod spectra;

pub use crate::core::{
    C64, DisorderSample, Error, ProbeParams, ReservoirParams, Result, SystemParams,
};
