//! Retarded (Casimir–Polder) atom–wall interaction of hydrogen near a perfect
//! conductor: distance-dependent energy shifts, dipole–quadrupole mixing
//! amplitudes, P-state admixtures to metastable 2S and the resulting
//! quenching rate.
//!
//! Atomic units throughout (ħ = e = mₑ = 1). Distances are in Bohr radii and
//! energies in Hartree; the retardation parameter is `χ = 2|ℰ_q| 𝒵`.
//!
//! Module map:
//! - [`specfun`]: Si, Ci and the auxiliary functions `T(χ)`, `U(χ)`.
//! - [`hydrogen`]: constants, wavefunctions, matrix elements, channel tables.
//! - [`retarded`]: closed-form I/J integrals, `ΔE` and `ΔM`.
//! - [`asymptotics`]: long-range tails and admixture tails.
//! - [`nonretarded`]: mirror-charge potential, 3×3 diagonalization, decay rate.
//! - [`oracle`]: brute-force quadrature and high-precision cross-checks.
//! - [`scan`]: distance grids and CSV/JSON export.

pub mod asymptotics;
pub mod config;
pub mod error;
pub mod hydrogen;
pub mod nonretarded;
pub mod oracle;
pub mod quad;
pub mod retarded;
pub mod scan;
pub mod specfun;

pub use error::{Error, Result};
