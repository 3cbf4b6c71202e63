//! Numerical laboratory for discretised ("cutoff") free scalar quantum field
//! theory on finite lattices.
//!
//! The crate builds explicit coupling matrices K = m² − ∇² for 1–3
//! dimensional lattices, computes their exact Gaussian vacua and correlation
//! structure, evolves field operators and one-particle wavepackets, verifies
//! the localisation hierarchy (Knight-exact vs effective vs not localised),
//! matches pairs of discretisations by finite renormalisation, and
//! cross-checks every closed form against a truncated-Fock exact
//! diagonalization oracle on tiny lattices.
//!
//! Internally all states live in dimensionless lattice units (spacing l = 1,
//! canonical pair normalised to [φ_x, π_y] = iδ_xy); physical units appear
//! only at input/output boundaries.

pub mod bell;
pub mod dynamics;
pub mod error;
pub mod falloff;
pub mod gaussian;
pub mod lattice;
pub mod localisation;
pub mod oracle;
pub mod renorm;
pub mod spectral;
pub mod spreading;

pub use error::{Error, Result};
pub use lattice::{Boundary, CouplingMatrix, LatticeSpec, Stencil};
pub use spectral::{mode_decomposition, HalfPower, ModeBasis};
