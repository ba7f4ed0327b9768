//! Fixtures shared by the benchmarks.

use interphase::equilibrium::solve_equilibrium_radius;
use interphase::materials::reference_pair;
use interphase::ntd::NtdContext;
use interphase::{EquilibriumState, Geometry};

/// Reference pair at `theta* = 1`, `sigma = 0.5`, `n = 3` (`R* = 1`).
pub fn reference_equilibrium(r_outer: f64) -> EquilibriumState {
    solve_equilibrium_radius(&reference_pair(0.5), Geometry::concentric(3, 1.0, r_outer), 1.0)
        .expect("reference equilibrium exists")
}

pub fn reference_context(r_outer: f64, order: usize) -> NtdContext {
    NtdContext::new(&reference_equilibrium(r_outer), order).expect("concentric geometry")
}
