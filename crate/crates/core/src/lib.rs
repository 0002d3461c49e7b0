//! Deutsch-Jozsa interference on molecular vibronic coherences.
//!
//! A three-pulse coherent anti-Stokes Raman scattering (CARS) sequence on
//! iodine prepares an equal superposition of B-state vibrational levels with
//! a pump pulse, encodes a Boolean function as a ±1 spectral phase mask on the
//! Stokes pulse, and reads the resulting `|X,4⟩⟨X,0|` coherence with a narrow
//! probe. The modules follow that pipeline:
//!
//! - [`spectral`]: sinc-DVR bound-state solver with analytic Morse oracles.
//! - [`molecule`]: X/B eigenstructure, Franck-Condon matrix, transition table.
//! - [`pulse`]: Gaussian pulse spectra, binned masks, P/S/P' designers.
//! - [`dynamics`]: perturbative coherence transfer and its time-domain oracle.
//! - [`djalgo`]: mask enumeration, fidelity metrics, delay sweeps, the N × delay fidelity grid.
//! - [`config`] and [`cli`]: flat key=value configuration and CSV reproductions.

pub mod cli;
pub mod config;
pub mod djalgo;
pub mod dynamics;
pub mod error;
pub mod molecule;
pub mod pulse;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
