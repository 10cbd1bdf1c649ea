//! Exact and asymptotic combinatorics of linear chord diagrams.
//!
//! A linear chord diagram is a perfect matching on `2n` vertices arranged
//! on a line. This crate enumerates diagrams and classifies their
//! *bubbles* (maximal runs free of short chords) and *bridges* (chords
//! leaving a bubble), counts *crystallized* diagrams (every chord short
//! or a bridge) both by brute force and by closed formulas, certifies the
//! complete-graph spectral identities behind the counting asymptotics in
//! exact arithmetic, evaluates the asymptotic formulas in log space, and
//! simulates a crystallization process.
//!
//! Modules:
//!
//! * [`diagram`] - the diagrams themselves: enumeration, sampling,
//!   structural classification.
//! * [`census`] - exact brute-force tables over all diagrams and Monte
//!   Carlo bridge statistics; the oracle layer for every formula module.
//! * [`crystal`] - closed-form counts of crystallized diagrams and a
//!   scalable reformulation for large `n`.
//! * [`spectral`] - exact certificates for the `K_{k+1}` matrix spectra
//!   and the inverse/determinant identities.
//! * [`asympt`] - log-space evaluation of the asymptotic expressions.
//! * [`process`] - the crystallization process simulation.

pub mod asympt;
pub mod census;
pub mod crystal;
pub mod diagram;
pub mod error;
pub mod process;
pub mod spectral;

pub use error::{Error, Result};
