//! Equilibria and linear stability of incompressible two-phase flows with
//! phase transitions in spherically symmetric geometry.
//!
//! The crate covers the whole chain from constitutive models to a stability
//! verdict:
//!
//! - [`materials`]: free energies and derived thermodynamic quantities;
//! - [`equilibrium`]: Gibbs–Thomson equilibria, the stability number `s`,
//!   energy and entropy functionals;
//! - [`radial_bvp`]: Chebyshev collocation for the radial transmission
//!   problems;
//! - [`ntd`]: Neumann-to-Dirichlet symbols of the heat and Stokes problems;
//! - [`spectrum`]: dispersion function, unstable eigenvalue, eigenvalue
//!   counts and classification;
//! - [`evolution`]: time integration of the radially symmetric linearised
//!   problem.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod materials;
pub mod ntd;
pub mod radial_bvp;
pub mod roots;
pub mod spectrum;

pub use equilibrium::{EquilibriumState, RadialState};
pub use error::{Error, Result};
pub use geometry::Geometry;
pub use materials::{FreeEnergy, MaterialPair, PhaseModel, Poly};
pub use radial_bvp::{RadialField, RadialMesh};
pub use spectrum::{Classification, StabilityReport};
