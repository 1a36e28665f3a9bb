//! Simulation library for a double-well bosonic Josephson junction whose
//! tunnel coupling is controlled by a single trapped ion.
//!
//! The pipeline mirrors the physics: [`scales`] fixes the polarization-potential
//! units (lengths in R*, energies in E*), [`radial`] solves the isotropic
//! atom-ion problem with a quantum-defect boundary condition to produce a
//! spectral basis, [`doublewell`] diagonalizes the double-well Hamiltonian in
//! that basis and extracts the spin-dependent coupling J, the localized modes
//! and the on-site interaction U, [`sequence`] propagates the entangling ramp
//! sequence, [`twomode`] integrates the resulting two-mode Bose-Hubbard
//! dynamics, and [`spinchannels`] provides the exact frame transformation
//! between hyperfine and short-range channel labels.
//!
//! Everything works in dimensionless units internally; SI values enter and
//! leave only through [`scales`].

pub mod angular;
pub mod cache;
pub mod density;
pub mod doublewell;
pub mod error;
pub mod grid;
pub mod radial;
pub mod scales;
pub mod sequence;
pub mod special;
pub mod spinchannels;
pub mod twomode;

pub use error::{Error, Result};
pub use scales::{SystemScales, TrapGeometry};
