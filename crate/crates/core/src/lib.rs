//! Simulation and analysis of a symmetric two-way interferometer with a
//! which-way detector (WWD).
//!
//! The crate is organized in four layers:
//!
//! - [`hilbert`]: complex kets, operators, eigendecomposition, partial trace,
//!   and Haar-random basis sampling for the small Hilbert spaces involved
//!   (quanton dim 2, detector dim 3, joint dim 6).
//! - [`interferometer`]: the beam splitter / phase shifter / WWD / beam
//!   merger pipeline, quanton outcome probabilities, and the detector state
//!   for both measurement orders (WWD first vs quanton first).
//! - [`whichway`]: visibility, per-outcome guessing likelihood, the optimal
//!   pre-measurement readout basis, and duality-relation residuals.
//! - [`optimizer`]: Monte Carlo maximization of the readout likelihood over
//!   random orthonormal bases, and the reproducible (visibility, phase) scan
//!   driver.

pub mod error;
pub mod hilbert;
pub mod interferometer;
pub mod optimizer;
pub mod whichway;

pub use error::{Error, Result};
