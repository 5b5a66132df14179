//! Effective Foldy-Wouthuysen Hamiltonians for a Dirac fermion squeezed onto
//! a curved surface.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] evaluates the embedded-surface data (metric, Weingarten map,
//!   zweibein, spin connection, normal-neighbourhood metric).
//! * [`clifford`] holds the flat Dirac algebra and the reduced surface gammas.
//! * [`sparse`] and [`grid`] provide the periodic finite-difference machinery.
//! * [`hamiltonian`] assembles the surface Hamiltonian and the confinement
//!   corrections; [`normal`] builds the transverse problem.
//! * [`fw`] applies exact unitary Foldy-Wouthuysen conjugations to discretised
//!   Dirac Hamiltonians.
//! * [`spectral`] solves the Hermitian eigenproblems and extracts gap data.

pub mod clifford;
pub mod error;
pub mod fw;
pub mod geometry;
pub mod grid;
pub mod hamiltonian;
pub mod normal;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
