//! Two-phase radial boundary-value problems on `[0, R*] U [R*, R_outer]`,
//! discretised by Chebyshev collocation with explicit interface rows.

pub(crate) mod dense;
pub mod mesh;
pub mod scalar;
pub mod stokes;

pub use dense::MAX_CONDITION;
pub use mesh::{ChebInterval, RadialField, RadialMesh};
pub use scalar::{
    capacity_integral, mode_constant, normalize_capacity_mean, scalar_mode_residual,
    solve_neumann_compatible, solve_scalar_mode, PhaseCoeffs,
};
pub use stokes::{divergence, solve_stokes_mode, StokesMode, Viscosities};

/// Default polynomial degree per phase.
pub const DEFAULT_ORDER: usize = 48;
