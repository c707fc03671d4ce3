//! Numerical laboratory for the planar Landau model (LM) and the chiral
//! oscillator (CO).
//!
//! Classically the two models are related by a canonical change of variables
//! that splits the Landau model into a dynamical CO sector and an inert
//! Chern-Simons sector carrying the translation symmetry of the orbit
//! center. This crate makes that statement, and its quantum-mechanical
//! breakdown, executable:
//!
//! - [`classical`]: equations of motion, closed-form circular solutions and
//!   fixed-step RK4 integration for the LM, the CO, the restricted planar
//!   dipole (Rydberg) model and the master system.
//! - [`duality`]: the canonical map `{x, p} -> {x+, x-}`, its inverse, the
//!   Poisson-bracket bookkeeping, and the master-system reduction.
//! - [`fock`]: truncated-Fock-basis operators for the noncommutative CO
//!   coordinates, Hamiltonians, angular momenta, rotation operators and
//!   thermal states.
//! - [`gauge`]: gauge potentials on the time circle, large gauge
//!   transformations with winding number, the regularized determinant of
//!   `i d/dt + a`, and the resulting quantization of the Chern-Simons
//!   coefficient.
//! - [`interferometer`]: Mach-Zehnder density-matrix propagation over
//!   path (x) internal space, fringe scans, and Pancharatnam phase
//!   extraction.
//!
//! Everything is dimensionless; `hbar` defaults to 1 and enters only the
//! quantum modules. The planar orientation is fixed once in [`planar`].

pub mod classical;
pub mod csvfmt;
pub mod duality;
pub mod error;
pub mod fock;
pub mod gauge;
pub mod interferometer;
pub mod params;
pub mod planar;

pub use error::{CoreError, Result};
pub use params::{ModelKind, ModelParams};
pub use planar::Vec2;

/// Complex scalar used by all operator-level code.
pub type C64 = num_complex::Complex<f64>;
