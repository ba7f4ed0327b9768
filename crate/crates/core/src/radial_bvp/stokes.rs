//! Unsteady Stokes transmission problem for one poloidal mode `l >= 1`.
//!
//! The velocity is written as `u = U(r) Y e_r + V(r) grad_1 Y` with `Y` a
//! degree-`l` harmonic on the unit sphere (Fourier mode for `n = 2`). Every
//! divergence-free field of this form comes from a potential `f(r)`:
//!
//! ```text
//! U = c_l f / r,     V = f' + (n-2) f / r
//! ```
//!
//! (the poloidal potential for `n = 3`, the stream function for `n = 2`).
//! The momentum equation `lambda u - mu Delta u + grad p = 0` then reduces to
//! two second-order problems per phase,
//!
//! ```text
//! Delta_l f = g,     mu Delta_l g = lambda g,
//! p = mu (r g' + (n-2) g) - lambda (r f' + (n-2) f),
//! ```
//!
//! with `Delta_l = d^2/dr^2 + (n-1)/r d/dr - c_l/r^2`. Interface conditions
//! are continuity of `U`, `V`, of the tangential traction, and
//! `T_rr,1 - T_rr,2 = g_n` for the normal traction (`-[[T nu]] = g nu`). The
//! outer wall is no-slip.

use nalgebra::{DMatrix, DVector};

use super::dense::Factored;
use super::mesh::{RadialField, RadialMesh};
use super::scalar::mode_constant;
use crate::error::{Error, Result};

/// Constant viscosities of the two phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viscosities {
    pub inner: f64,
    pub outer: f64,
}

/// Solution of one Stokes mode problem.
#[derive(Debug, Clone)]
pub struct StokesMode {
    pub potential: RadialField,
    pub potential_laplacian: RadialField,
    pub u_r: RadialField,
    pub u_t: RadialField,
    pub p: RadialField,
}

pub fn solve_stokes_mode(
    mesh: &RadialMesh,
    dim: usize,
    mu: Viscosities,
    l: usize,
    lambda: f64,
    normal_traction_jump: f64,
) -> Result<StokesMode> {
    if l == 0 {
        return Err(Error::UnsupportedMode { l });
    }
    if !(mu.inner > 0.0 && mu.outer > 0.0) {
        return Err(Error::InvalidInput(format!("viscosities must be positive, got {mu:?}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be >= 0")));
    }
    let n = mesh.order;
    let np = n + 1;
    let (f1, g1, f2, g2) = (0, np, 2 * np, 3 * np);
    let c = mode_constant(dim, l);
    let nm1 = (dim - 1) as f64;
    let nm2 = dim as f64 - 2.0;
    let (ci, co) = (&mesh.inner, &mesh.outer);
    let mut a = DMatrix::<f64>::zeros(4 * np, 4 * np);

    for i in 1..n {
        let r = ci.nodes[i];
        for j in 0..np {
            let lap = r * r * ci.d2[(i, j)] + nm1 * r * ci.d1[(i, j)];
            a[(f1 + i, f1 + j)] = lap;
            a[(g1 + i, g1 + j)] = mu.inner * lap;
        }
        a[(f1 + i, f1 + i)] -= c;
        a[(f1 + i, g1 + i)] = -r * r;
        a[(g1 + i, g1 + i)] -= mu.inner * c + lambda * r * r;

        let r = co.nodes[i];
        for j in 0..np {
            let lap = co.d2[(i, j)] + nm1 / r * co.d1[(i, j)];
            a[(f2 + i, f2 + j)] = lap;
            a[(g2 + i, g2 + j)] = mu.outer * lap;
        }
        a[(f2 + i, f2 + i)] -= c / (r * r);
        a[(f2 + i, g2 + i)] = -1.0;
        a[(g2 + i, g2 + i)] -= mu.outer * c / (r * r) + lambda;
    }
    // regularity at the origin
    a[(f1, f1)] = 1.0;
    a[(g1, g1)] = 1.0;
    // no slip at the wall: U = V = 0  <=>  f = f' = 0
    a[(f2 + n, f2 + n)] = 1.0;
    for j in 0..np {
        a[(g2 + n, f2 + j)] = co.d1[(n, j)];
    }

    let rs = mesh.r_star();
    // [[U]] = 0 and [[V]] = 0
    a[(f1 + n, f1 + n)] = 1.0;
    a[(f1 + n, f2)] = -1.0;
    for j in 0..np {
        a[(g1 + n, f1 + j)] = ci.d1[(n, j)];
        a[(g1 + n, f2 + j)] = -co.d1[(0, j)];
    }
    // tangential traction mu (V' - V/r + U/r) = mu (f'' + (n-3) f'/r + (c - 2(n-2)) f/r^2)
    let shear = |d2: f64, d1: f64, id: f64| d2 + (dim as f64 - 3.0) / rs * d1 + (c - 2.0 * nm2) / (rs * rs) * id;
    // normal traction 2 mu U' - p
    let normal_f = |d1: f64, id: f64, m: f64| 2.0 * m * c * (d1 / rs - id / (rs * rs)) + lambda * (rs * d1 + nm2 * id);
    let normal_g = |d1: f64, id: f64, m: f64| -m * (rs * d1 + nm2 * id);
    for j in 0..np {
        let id_in = if j == n { 1.0 } else { 0.0 };
        let id_out = if j == 0 { 1.0 } else { 0.0 };
        a[(f2, f1 + j)] = mu.inner * shear(ci.d2[(n, j)], ci.d1[(n, j)], id_in);
        a[(f2, f2 + j)] = -mu.outer * shear(co.d2[(0, j)], co.d1[(0, j)], id_out);
        a[(g2, f1 + j)] = normal_f(ci.d1[(n, j)], id_in, mu.inner);
        a[(g2, g1 + j)] = normal_g(ci.d1[(n, j)], id_in, mu.inner);
        a[(g2, f2 + j)] = -normal_f(co.d1[(0, j)], id_out, mu.outer);
        a[(g2, g2 + j)] = -normal_g(co.d1[(0, j)], id_out, mu.outer);
    }

    let mut b = DVector::zeros(4 * np);
    b[g2] = normal_traction_jump;
    let x = Factored::new(a)?.solve(&b)?;

    let take = |off: usize| -> Vec<f64> { x.rows(off, np).iter().copied().collect() };
    let potential = RadialField {
        values_inner: take(f1),
        values_outer: take(f2),
        mode: l,
    };
    let potential_laplacian = RadialField {
        values_inner: take(g1),
        values_outer: take(g2),
        mode: l,
    };
    let (u_r, u_t, p) = primitive_fields(mesh, dim, mu, l, lambda, &potential, &potential_laplacian);
    Ok(StokesMode {
        potential,
        potential_laplacian,
        u_r,
        u_t,
        p,
    })
}

fn primitive_fields(
    mesh: &RadialMesh,
    dim: usize,
    mu: Viscosities,
    l: usize,
    lambda: f64,
    f: &RadialField,
    g: &RadialField,
) -> (RadialField, RadialField, RadialField) {
    let c = mode_constant(dim, l);
    let nm2 = dim as f64 - 2.0;
    let mut u_r = RadialField::zeros(mesh, l);
    let mut u_t = RadialField::zeros(mesh, l);
    let mut p = RadialField::zeros(mesh, l);
    for (cheb, fv, gv, m, ur, ut, pp) in [
        (&mesh.inner, &f.values_inner, &g.values_inner, mu.inner, &mut u_r.values_inner, &mut u_t.values_inner, &mut p.values_inner),
        (&mesh.outer, &f.values_outer, &g.values_outer, mu.outer, &mut u_r.values_outer, &mut u_t.values_outer, &mut p.values_outer),
    ] {
        let df = cheb.derivative(fv);
        let dg = cheb.derivative(gv);
        for i in 0..cheb.len() {
            let r = cheb.nodes[i];
            if r == 0.0 {
                // f(0) = g(0) = 0: f/r -> f'(0)
                ur[i] = c * df[i];
                ut[i] = df[i] + nm2 * df[i];
                pp[i] = 0.0;
            } else {
                ur[i] = c * fv[i] / r;
                ut[i] = df[i] + nm2 * fv[i] / r;
                pp[i] = m * (r * dg[i] + nm2 * gv[i]) - lambda * (r * df[i] + nm2 * fv[i]);
            }
        }
    }
    (u_r, u_t, p)
}

/// Pointwise divergence `U' + ((n-1) U - c_l V)/r` of the mode velocity at
/// every node; at the origin the removable quotient is replaced by its limit.
pub fn divergence(mesh: &RadialMesh, dim: usize, sol: &StokesMode) -> RadialField {
    let c = mode_constant(dim, sol.u_r.mode);
    let nm1 = (dim - 1) as f64;
    let mut out = RadialField::zeros(mesh, sol.u_r.mode);
    for (cheb, ur, ut, dst) in [
        (&mesh.inner, &sol.u_r.values_inner, &sol.u_t.values_inner, &mut out.values_inner),
        (&mesh.outer, &sol.u_r.values_outer, &sol.u_t.values_outer, &mut out.values_outer),
    ] {
        let dur = cheb.derivative(ur);
        let dut = cheb.derivative(ut);
        for i in 0..cheb.len() {
            let r = cheb.nodes[i];
            dst[i] = if r == 0.0 {
                dur[i] + nm1 * dur[i] - c * dut[i]
            } else {
                dur[i] + (nm1 * ur[i] - c * ut[i]) / r
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_zero_is_unsupported() {
        let mesh = RadialMesh::new(1.0, 2.0, 16).unwrap();
        let mu = Viscosities { inner: 1.0, outer: 1.0 };
        assert!(matches!(
            solve_stokes_mode(&mesh, 3, mu, 0, 1.0, 1.0),
            Err(Error::UnsupportedMode { l: 0 })
        ));
    }

    #[test]
    fn zero_forcing_gives_zero_flow() {
        let mesh = RadialMesh::new(1.0, 2.0, 24).unwrap();
        let mu = Viscosities { inner: 2.0, outer: 0.5 };
        let s = solve_stokes_mode(&mesh, 3, mu, 2, 3.0, 0.0).unwrap();
        assert_eq!(s.u_r.max_abs() + s.u_t.max_abs() + s.p.max_abs(), 0.0);
    }

    #[test]
    fn velocity_is_continuous_and_divergence_free() {
        let mesh = RadialMesh::new(0.8, 2.0, 32).unwrap();
        let mu = Viscosities { inner: 2.0, outer: 0.5 };
        for dim in [2, 3] {
            for l in [1, 2, 5] {
                let s = solve_stokes_mode(&mesh, dim, mu, l, 4.0, 1.0).unwrap();
                let ur_jump = s.u_r.values_inner[32] - s.u_r.values_outer[0];
                let ut_jump = s.u_t.values_inner[32] - s.u_t.values_outer[0];
                assert!(ur_jump.abs() < 1e-12 && ut_jump.abs() < 1e-12);
                assert!(divergence(&mesh, dim, &s).max_abs() < 1e-9);
                assert!(s.u_r.values_outer[32].abs() < 1e-14);
            }
        }
    }
}
