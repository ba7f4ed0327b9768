//! Scalar transmission problems for one angular mode.
//!
//! Per phase the mode amplitude `v(r)` solves
//!
//! ```text
//! d_i (v'' + (n-1)/r v' - c_l/r^2 v) - kappa_i lambda v = -f_i(r)
//! ```
//!
//! with regularity at `r = 0` (`v'(0) = 0` for `l = 0`, `v(0) = 0` otherwise),
//! continuity and a prescribed flux jump `d_1 v_1' - d_2 v_2' = g` at `R*`
//! (that is `-[[d dv/dnu]] = g` with the normal pointing out of phase 1), and
//! zero flux at `R_outer`.

use nalgebra::{DMatrix, DVector};

use super::dense::Factored;
use super::mesh::{RadialField, RadialMesh};
use crate::error::{Error, Result};
use crate::geometry::sphere_area;

/// Constant coefficients of one phase in the scalar problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCoeffs {
    pub diffusivity: f64,
    pub capacity: f64,
}

/// Eigenvalue `c_l` of `-Delta` on the unit sphere `S^{n-1}` for degree `l`
/// (for `n = 2` this is the squared Fourier index).
pub fn mode_constant(n: usize, l: usize) -> f64 {
    (l * (l + n - 2)) as f64
}

/// Tolerance on the relative Neumann compatibility residual.
pub const COMPATIBILITY_TOL: f64 = 1e-12;

struct Layout {
    n: usize,
}

impl Layout {
    fn inner(&self, i: usize) -> usize {
        i
    }
    fn outer(&self, i: usize) -> usize {
        self.n + 1 + i
    }
    fn size(&self) -> usize {
        2 * (self.n + 1)
    }
}

/// Builds the collocation matrix. Right-hand sides live on interior rows.
fn assemble(
    mesh: &RadialMesh,
    dim: usize,
    coeffs: [PhaseCoeffs; 2],
    l: usize,
    lambda: f64,
) -> DMatrix<f64> {
    let n = mesh.order;
    let lay = Layout { n };
    let c = mode_constant(dim, l);
    let nm1 = (dim - 1) as f64;
    let mut a = DMatrix::zeros(lay.size(), lay.size());

    let (ci, co) = (&mesh.inner, &mesh.outer);
    let (pi, po) = (coeffs[0], coeffs[1]);
    for i in 1..n {
        // inner phase, multiplied through by r^2
        let r = ci.nodes[i];
        let row = lay.inner(i);
        for j in 0..=n {
            a[(row, lay.inner(j))] = pi.diffusivity * (r * r * ci.d2[(i, j)] + nm1 * r * ci.d1[(i, j)]);
        }
        a[(row, lay.inner(i))] -= pi.diffusivity * c + pi.capacity * lambda * r * r;

        let r = co.nodes[i];
        let row = lay.outer(i);
        for j in 0..=n {
            a[(row, lay.outer(j))] = po.diffusivity * (co.d2[(i, j)] + nm1 / r * co.d1[(i, j)]);
        }
        a[(row, lay.outer(i))] -= po.diffusivity * c / (r * r) + po.capacity * lambda;
    }
    // regularity at the origin
    if l == 0 {
        for j in 0..=n {
            a[(lay.inner(0), lay.inner(j))] = ci.d1[(0, j)];
        }
    } else {
        a[(lay.inner(0), lay.inner(0))] = 1.0;
    }
    // continuity at R*
    a[(lay.inner(n), lay.inner(n))] = 1.0;
    a[(lay.inner(n), lay.outer(0))] = -1.0;
    // flux jump d1 v1' - d2 v2' at R*
    for j in 0..=n {
        a[(lay.outer(0), lay.inner(j))] = pi.diffusivity * ci.d1[(n, j)];
        a[(lay.outer(0), lay.outer(j))] = -po.diffusivity * co.d1[(0, j)];
    }
    // zero flux at R_outer
    for j in 0..=n {
        a[(lay.outer(n), lay.outer(j))] = co.d1[(n, j)];
    }
    a
}

fn split(mesh: &RadialMesh, x: &DVector<f64>, l: usize) -> RadialField {
    let n = mesh.order;
    RadialField {
        values_inner: x.rows(0, n + 1).iter().copied().collect(),
        values_outer: x.rows(n + 1, n + 1).iter().copied().collect(),
        mode: l,
    }
}

fn check_coeffs(coeffs: &[PhaseCoeffs; 2], lambda: f64) -> Result<()> {
    for p in coeffs {
        if !(p.diffusivity > 0.0 && p.capacity > 0.0) {
            return Err(Error::InvalidInput(format!(
                "diffusivity and capacity must be positive, got {p:?}"
            )));
        }
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be >= 0")));
    }
    Ok(())
}

/// Solves the homogeneous mode problem driven by the flux jump `g` at `R*`.
pub fn solve_scalar_mode(
    mesh: &RadialMesh,
    dim: usize,
    coeffs: [PhaseCoeffs; 2],
    l: usize,
    lambda: f64,
    flux_jump: f64,
) -> Result<RadialField> {
    check_coeffs(&coeffs, lambda)?;
    if lambda == 0.0 && l == 0 {
        return Err(Error::SingularProblem(
            "lambda = 0, l = 0 is a pure Neumann problem; use solve_neumann_compatible".into(),
        ));
    }
    let a = assemble(mesh, dim, coeffs, l, lambda);
    let mut b = DVector::zeros(a.nrows());
    b[mesh.order + 1] = flux_jump;
    let x = Factored::new(a)?.solve(&b)?;
    Ok(split(mesh, &x, l))
}

/// Solves the radial (`l = 0`), `lambda = 0` problem
/// `-d_i Delta v = f_i` with flux jump `g`, which is solvable only when
/// `int_Omega f + g |Gamma| = 0`. The solution is normalised by
/// `int_Omega kappa v = 0`.
pub fn solve_neumann_compatible(
    mesh: &RadialMesh,
    dim: usize,
    coeffs: [PhaseCoeffs; 2],
    rhs_inner: &dyn Fn(f64) -> f64,
    rhs_outer: &dyn Fn(f64) -> f64,
    flux_jump: f64,
) -> Result<RadialField> {
    check_coeffs(&coeffs, 0.0)?;
    let n = mesh.order;
    let sn = sphere_area(dim);
    let weight = |r: f64| sn * r.powi(dim as i32 - 1);

    let f_in: Vec<f64> = mesh.inner.nodes.iter().map(|&r| rhs_inner(r)).collect();
    let f_out: Vec<f64> = mesh.outer.nodes.iter().map(|&r| rhs_outer(r)).collect();
    let wf_in: Vec<f64> = mesh.inner.nodes.iter().zip(&f_in).map(|(&r, f)| weight(r) * f).collect();
    let wf_out: Vec<f64> = mesh.outer.nodes.iter().zip(&f_out).map(|(&r, f)| weight(r) * f).collect();
    let abs_in: Vec<f64> = wf_in.iter().map(|v| v.abs()).collect();
    let abs_out: Vec<f64> = wf_out.iter().map(|v| v.abs()).collect();
    let gamma = weight(mesh.r_star());
    let residual = mesh.inner.integrate(&wf_in) + mesh.outer.integrate(&wf_out) + flux_jump * gamma;
    let scale = mesh.inner.integrate(&abs_in) + mesh.outer.integrate(&abs_out) + flux_jump.abs() * gamma;
    let rel = if scale > 0.0 { residual.abs() / scale } else { 0.0 };
    if rel > COMPATIBILITY_TOL {
        return Err(Error::IncompatibleData { residual: rel });
    }

    // Bordered system [A u; w^T 0]: w imposes the kappa-weighted mean, u
    // absorbs the one-dimensional defect of the range of A.
    let a = assemble(mesh, dim, coeffs, 0, 0.0);
    let size = a.nrows() + 1;
    let mut big = DMatrix::zeros(size, size);
    big.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(&a);
    for i in 1..n {
        big[(i, size - 1)] = mesh.inner.nodes[i].powi(2);
        big[(n + 1 + i, size - 1)] = 1.0;
    }
    for j in 0..=n {
        big[(size - 1, j)] = coeffs[0].capacity * mesh.inner.weights[j] * weight(mesh.inner.nodes[j]);
        big[(size - 1, n + 1 + j)] += coeffs[1].capacity * mesh.outer.weights[j] * weight(mesh.outer.nodes[j]);
    }
    let mut b = DVector::zeros(size);
    for i in 1..n {
        let r = mesh.inner.nodes[i];
        b[i] = -r * r * f_in[i];
        b[n + 1 + i] = -f_out[i];
    }
    b[n + 1] = flux_jump;
    let x = Factored::new(big)?.solve(&b)?;
    let field = split(mesh, &x.rows(0, size - 1).into_owned(), 0);
    Ok(field)
}

/// `int_Omega kappa v dx` by Clenshaw–Curtis quadrature on both phases.
pub fn capacity_integral(mesh: &RadialMesh, dim: usize, coeffs: [PhaseCoeffs; 2], field: &RadialField) -> f64 {
    let sn = sphere_area(dim);
    let part = |c: &super::mesh::ChebInterval, vals: &[f64], kappa: f64| {
        let f: Vec<f64> = c
            .nodes
            .iter()
            .zip(vals)
            .map(|(&r, v)| kappa * v * r.powi(dim as i32 - 1))
            .collect();
        sn * c.integrate(&f)
    };
    part(&mesh.inner, &field.values_inner, coeffs[0].capacity)
        + part(&mesh.outer, &field.values_outer, coeffs[1].capacity)
}

/// Subtracts the constant that makes `int_Omega kappa v = 0`.
pub fn normalize_capacity_mean(
    mesh: &RadialMesh,
    dim: usize,
    coeffs: [PhaseCoeffs; 2],
    field: &RadialField,
) -> RadialField {
    let ones = RadialField::from_fn(mesh, field.mode, |_| 1.0);
    let shift = capacity_integral(mesh, dim, coeffs, field) / capacity_integral(mesh, dim, coeffs, &ones);
    RadialField {
        values_inner: field.values_inner.iter().map(|v| v - shift).collect(),
        values_outer: field.values_outer.iter().map(|v| v - shift).collect(),
        mode: field.mode,
    }
}

/// Maximum collocation residual of the homogeneous mode equation at interior
/// nodes, relative to the largest individual term.
pub fn scalar_mode_residual(
    mesh: &RadialMesh,
    dim: usize,
    coeffs: [PhaseCoeffs; 2],
    lambda: f64,
    field: &RadialField,
) -> f64 {
    let c = mode_constant(dim, field.mode);
    let nm1 = (dim - 1) as f64;
    let mut worst = 0.0f64;
    for (cheb, vals, p) in [
        (&mesh.inner, &field.values_inner, coeffs[0]),
        (&mesh.outer, &field.values_outer, coeffs[1]),
    ] {
        let d1 = cheb.derivative(vals);
        let d2 = cheb.derivative(&d1);
        let mut scale = 0.0f64;
        let mut res = Vec::new();
        for i in 1..cheb.len() - 1 {
            let r = cheb.nodes[i];
            let terms = [
                p.diffusivity * d2[i],
                p.diffusivity * nm1 / r * d1[i],
                p.diffusivity * c / (r * r) * vals[i],
                p.capacity * lambda * vals[i],
            ];
            scale = terms.iter().fold(scale, |m, t| m.max(t.abs()));
            res.push((terms[0] + terms[1] - terms[2] - terms[3]).abs());
        }
        let local = res.into_iter().fold(0.0, f64::max);
        if scale > 0.0 {
            worst = worst.max(local / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> [PhaseCoeffs; 2] {
        [PhaseCoeffs {
            diffusivity: 1.0,
            capacity: 1.0,
        }; 2]
    }

    #[test]
    fn zero_flux_gives_zero_field() {
        let mesh = RadialMesh::new(1.0, 2.0, 24).unwrap();
        let f = solve_scalar_mode(&mesh, 3, unit(), 2, 0.5, 0.0).unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn singular_neumann_case_is_refused() {
        let mesh = RadialMesh::new(1.0, 2.0, 16).unwrap();
        let err = solve_scalar_mode(&mesh, 3, unit(), 0, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::SingularProblem(_)));
    }

    #[test]
    fn collocation_residual_is_small() {
        let mesh = RadialMesh::new(0.7, 1.9, 48).unwrap();
        let coeffs = [
            PhaseCoeffs {
                diffusivity: 0.5,
                capacity: 2.0,
            },
            PhaseCoeffs {
                diffusivity: 3.0,
                capacity: 1.0,
            },
        ];
        for l in [0, 1, 4] {
            let f = solve_scalar_mode(&mesh, 3, coeffs, l, 1.5, 1.0).unwrap();
            assert!(scalar_mode_residual(&mesh, 3, coeffs, 1.5, &f) < 1e-10);
        }
    }

    #[test]
    fn incompatible_data_is_rejected() {
        let mesh = RadialMesh::new(1.0, 2.0, 16).unwrap();
        let err = solve_neumann_compatible(&mesh, 3, unit(), &|_| 1.0, &|_| 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::IncompatibleData { .. }));
    }

    #[test]
    fn neumann_solution_is_mean_free_and_matches_closed_form() {
        // -Delta v = -a0 with unit flux jump, n = 3, R* = 1, R_outer = 2:
        // a0 = 4 pi / (32 pi / 3) = 3/8.
        let mesh = RadialMesh::new(1.0, 2.0, 32).unwrap();
        let a0 = 3.0 / 8.0;
        let v = solve_neumann_compatible(&mesh, 3, unit(), &|_| -a0, &|_| -a0, 1.0).unwrap();
        // inside: v = a0 r^2/6 + C1; outside: v = a0 r^2/6 + A/r + C2 with
        // v'(2) = 0 -> A = a0 * 8/3 = 1
        let exact = |r: f64| {
            if r <= 1.0 {
                a0 * r * r / 6.0
            } else {
                a0 * r * r / 6.0 + 1.0 / r - 1.0
            }
        };
        let shift = v.interface_value() - exact(1.0);
        for (&r, &val) in mesh.inner.nodes.iter().zip(&v.values_inner) {
            assert_relative_eq!(val, exact(r) + shift, epsilon = 1e-12);
        }
        for (&r, &val) in mesh.outer.nodes.iter().zip(&v.values_outer) {
            assert_relative_eq!(val, exact(r) + shift, epsilon = 1e-12);
        }
        let w = |c: &super::super::mesh::ChebInterval, vals: &[f64]| {
            let f: Vec<f64> = c.nodes.iter().zip(vals).map(|(r, v)| r * r * v).collect();
            c.integrate(&f)
        };
        let mean = w(&mesh.inner, &v.values_inner) + w(&mesh.outer, &v.values_outer);
        assert!(mean.abs() < 1e-13);
    }

    #[test]
    fn normalization_is_idempotent_under_constant_shift() {
        let mesh = RadialMesh::new(1.0, 2.0, 24).unwrap();
        let a0 = 3.0 / 8.0;
        let v = solve_neumann_compatible(&mesh, 3, unit(), &|_| -a0, &|_| -a0, 1.0).unwrap();
        let shifted = RadialField {
            values_inner: v.values_inner.iter().map(|x| x + 5.0).collect(),
            values_outer: v.values_outer.iter().map(|x| x + 5.0).collect(),
            mode: 0,
        };
        let back = normalize_capacity_mean(&mesh, 3, unit(), &shifted);
        let twice = normalize_capacity_mean(&mesh, 3, unit(), &back);
        for ((x, y), z) in v.values_inner.iter().zip(&back.values_inner).zip(&twice.values_inner) {
            assert_relative_eq!(x, y, epsilon = 1e-13);
            assert_relative_eq!(y, z, epsilon = 1e-15);
        }
    }
}
