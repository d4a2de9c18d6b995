//! Exact diagonalization of dimerized chains of two-level systems in the
//! ultrastrong coupling regime.
//!
//! The crate assembles chain Hamiltonians with alternating couplings
//! `J1`, `J2` (dimerization `epsilon`, total coupling `jbar`), with or
//! without the counter-rotating terms that break excitation-number
//! conservation, diagonalizes them exactly, and computes the derived
//! quantities of interest: spectra, participation ratios, edge and
//! anti-edge localization weights, ground-state occupancy, closed-form
//! dimer dynamics, and the continuum band structure.
//!
//! Modules mirror the pipeline:
//!
//! - [`basis`]: bitmask Fock basis and excitation-number sectors
//! - [`hamiltonian`]: dense Hamiltonian assembly
//! - [`spectra`]: dense eigensolver and the closed-form dimer eigensystem
//! - [`observables`]: per-eigenstate diagnostics and fidelity maps
//! - [`dynamics`]: closed-form dimer correlations and spectral propagation
//! - [`bandtheory`]: continuum dispersion and bow-tie band boundaries
//! - [`sweep`]: parallel parameter grids producing tabular records

/// Library version, echoed into output metadata by downstream tools.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bandtheory;
pub mod basis;
pub mod dynamics;
pub mod hamiltonian;
pub mod observables;
pub mod spectra;
pub mod sweep;

pub use basis::{BasisIndex, SectorTable};
pub use hamiltonian::{Boundary, ChainSpec, Coupling, HermitianOperator};
pub use spectra::Spectrum;
