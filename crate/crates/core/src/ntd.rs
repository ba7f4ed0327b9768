//! Neumann-to-Dirichlet symbols of the heat and Stokes transmission problems.
//!
//! For a concentric interface both maps are diagonal in spherical harmonics,
//! so each reduces to one scalar per degree `l`:
//!
//! - `N_l^H(lambda)`: interface value of the relative temperature produced by
//!   a unit flux jump `-[[d* dtheta/dnu]] = Y_l`;
//! - `N_l^S(lambda)`: interface normal velocity produced by a unit normal
//!   traction jump `-[[T nu]] = Y_l nu`.
//!
//! Harmonics are normalised so that `int_Gamma Y_l^2 = |Gamma*|`; with that
//! choice the energy identities read `N_l |Gamma*| = (volume forms)`.

use crate::equilibrium::EquilibriumState;
use crate::error::{Error, Result};
use crate::geometry::sphere_area;
use crate::radial_bvp::{
    mode_constant, solve_scalar_mode, solve_stokes_mode, ChebInterval, PhaseCoeffs, RadialField, RadialMesh,
    StokesMode, Viscosities, DEFAULT_ORDER,
};

/// Tolerance of the debug-build energy-identity assertion.
const DEBUG_FORM_TOL: f64 = 1e-6;

/// Heat symbol with the field that produced it.
#[derive(Debug, Clone)]
pub struct HeatSample {
    pub l: usize,
    pub lambda: f64,
    pub value: f64,
    pub field: RadialField,
}

/// Stokes symbol; `mode` is `None` for `l = 0`, where the symbol vanishes
/// identically.
#[derive(Debug, Clone)]
pub struct StokesSample {
    pub l: usize,
    pub lambda: f64,
    pub value: f64,
    pub mode: Option<StokesMode>,
}

/// Both symbols at one `(l, lambda)`.
#[derive(Debug, Clone)]
pub struct NtDSample {
    pub l: usize,
    pub lambda: f64,
    pub value_heat: f64,
    pub value_stokes: f64,
    pub field_heat: RadialField,
    pub field_stokes: Option<StokesMode>,
}

/// Two sides of an energy identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormCheck {
    /// `N_l |Gamma*|`.
    pub boundary: f64,
    /// Volume form built from the retained field.
    pub volume: f64,
}

impl FormCheck {
    pub fn relative_error(&self) -> f64 {
        let scale = self.boundary.abs().max(self.volume.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.boundary - self.volume).abs() / scale
        }
    }
}

/// Frozen coefficients plus the collocation mesh of one concentric
/// equilibrium. Construction builds the differentiation matrices once; all
/// evaluations borrow them immutably.
#[derive(Debug, Clone)]
pub struct NtdContext {
    pub eq: EquilibriumState,
    pub mesh: RadialMesh,
}

impl NtdContext {
    pub fn new(eq: &EquilibriumState, order: usize) -> Result<Self> {
        eq.geometry.require_concentric()?;
        let mesh = RadialMesh::new(eq.geometry.r_star, eq.geometry.r_outer, order)?;
        Ok(NtdContext { eq: eq.clone(), mesh })
    }

    pub fn dim(&self) -> usize {
        self.eq.geometry.n
    }

    pub fn heat_coeffs(&self) -> [PhaseCoeffs; 2] {
        [
            PhaseCoeffs {
                diffusivity: self.eq.d_star_1,
                capacity: self.eq.kappa_star_1,
            },
            PhaseCoeffs {
                diffusivity: self.eq.d_star_2,
                capacity: self.eq.kappa_star_2,
            },
        ]
    }

    pub fn viscosities(&self) -> Viscosities {
        Viscosities {
            inner: self.eq.mu_star_1,
            outer: self.eq.mu_star_2,
        }
    }

    pub fn heat(&self, l: usize, lambda: f64) -> Result<HeatSample> {
        if lambda == 0.0 && l == 0 {
            return Err(Error::SingularProblem(
                "N^H at lambda = 0 exists only on mean-free data (l >= 1)".into(),
            ));
        }
        let field = solve_scalar_mode(&self.mesh, self.dim(), self.heat_coeffs(), l, lambda, 1.0)?;
        let sample = HeatSample {
            l,
            lambda,
            value: field.interface_value(),
            field,
        };
        debug_assert!(
            self.heat_form(&sample).relative_error() < DEBUG_FORM_TOL,
            "heat energy identity violated at l = {l}, lambda = {lambda}: {:?}",
            self.heat_form(&sample)
        );
        Ok(sample)
    }

    pub fn stokes(&self, l: usize, lambda: f64) -> Result<StokesSample> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda = {lambda} must be >= 0")));
        }
        if l == 0 {
            // a radial solenoidal field vanishing at the wall is zero
            return Ok(StokesSample {
                l,
                lambda,
                value: 0.0,
                mode: None,
            });
        }
        let mode = solve_stokes_mode(&self.mesh, self.dim(), self.viscosities(), l, lambda, 1.0)?;
        let sample = StokesSample {
            l,
            lambda,
            value: mode.u_r.interface_value(),
            mode: Some(mode),
        };
        debug_assert!(
            self.stokes_form(&sample).relative_error() < DEBUG_FORM_TOL,
            "Stokes energy identity violated at l = {l}, lambda = {lambda}: {:?}",
            self.stokes_form(&sample)
        );
        Ok(sample)
    }

    pub fn sample(&self, l: usize, lambda: f64) -> Result<NtDSample> {
        let h = self.heat(l, lambda)?;
        let s = self.stokes(l, lambda)?;
        Ok(NtDSample {
            l,
            lambda,
            value_heat: h.value,
            value_stokes: s.value,
            field_heat: h.field,
            field_stokes: s.mode,
        })
    }

    fn interface_measure(&self) -> f64 {
        sphere_area(self.dim()) * self.eq.geometry.r_star.powi(self.dim() as i32 - 1)
    }

    /// `N_l^H |Gamma*|` against `lambda int kappa theta^2 + int d |grad theta|^2`.
    pub fn heat_form(&self, sample: &HeatSample) -> FormCheck {
        let dim = self.dim();
        let c = mode_constant(dim, sample.l);
        let coeffs = self.heat_coeffs();
        let mut volume = 0.0;
        for (cheb, vals, p) in [
            (&self.mesh.inner, &sample.field.values_inner, coeffs[0]),
            (&self.mesh.outer, &sample.field.values_outer, coeffs[1]),
        ] {
            let dv = cheb.derivative(vals);
            volume += radial_quadrature(cheb, dim, |r| {
                let v = cheb.interpolate(vals, r);
                let dvr = cheb.interpolate(&dv, r);
                sample.lambda * p.capacity * v * v + p.diffusivity * (dvr * dvr + c * v * v / (r * r))
            });
        }
        FormCheck {
            boundary: sample.value * self.interface_measure(),
            volume,
        }
    }

    /// `N_l^S |Gamma*|` against `lambda int |u|^2 + 2 int mu |D(u)|^2`.
    pub fn stokes_form(&self, sample: &StokesSample) -> FormCheck {
        let Some(mode) = &sample.mode else {
            return FormCheck {
                boundary: 0.0,
                volume: 0.0,
            };
        };
        let dim = self.dim();
        let nf = dim as f64;
        let c = mode_constant(dim, sample.l);
        let mu = self.viscosities();
        let mut volume = 0.0;
        for (cheb, ur, ut, m) in [
            (&self.mesh.inner, &mode.u_r.values_inner, &mode.u_t.values_inner, mu.inner),
            (&self.mesh.outer, &mode.u_r.values_outer, &mode.u_t.values_outer, mu.outer),
        ] {
            let dur = cheb.derivative(ur);
            let dut = cheb.derivative(ut);
            volume += radial_quadrature(cheb, dim, |r| {
                let u = cheb.interpolate(ur, r);
                let v = cheb.interpolate(ut, r);
                let du = cheb.interpolate(&dur, r);
                let dv = cheb.interpolate(&dut, r);
                let shear = dv + (u - v) / r;
                let angular = ((nf - 1.0) * u * u - 2.0 * c * u * v + (c * c - (nf - 2.0) * c) * v * v) / (r * r);
                let strain = du * du + 0.5 * c * shear * shear + angular;
                sample.lambda * (u * u + c * v * v) + 2.0 * m * strain
            });
        }
        FormCheck {
            boundary: sample.value * self.interface_measure(),
            volume,
        }
    }

    /// `lim_{lambda -> 0} lambda N_0^H(lambda)` in closed form and by
    /// polynomial (Richardson) extrapolation from `lambda = 1e-2, 1e-3, 1e-4`.
    pub fn heat_zero_limit(&self) -> Result<HeatZeroLimit> {
        let lambdas = [1e-2, 1e-3, 1e-4];
        let mut samples = Vec::with_capacity(lambdas.len());
        for &lam in &lambdas {
            samples.push((lam, lam * self.heat(0, lam)?.value));
        }
        let extrapolated = neville_at_zero(&samples);
        let closed_form = self.eq.heat_zero_limit_closed_form();
        Ok(HeatZeroLimit {
            closed_form,
            extrapolated,
            samples,
            relative_discrepancy: (extrapolated - closed_form).abs() / closed_form.abs(),
        })
    }

    /// Table of `lambda N_0^H(lambda)` on an increasing grid. The tail check
    /// requires strict increase from the grid midpoint on.
    pub fn heat_infinity_divergence(&self, lambda_grid: &[f64]) -> Result<DivergenceTable> {
        if lambda_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("lambda grid must be strictly increasing".into()));
        }
        let mut rows = Vec::with_capacity(lambda_grid.len());
        for &lam in lambda_grid {
            rows.push((lam, lam * self.heat(0, lam)?.value));
        }
        let tail_increasing = if rows.len() < 2 {
            None
        } else {
            let mid = (rows.len() - 1) / 2;
            Some(rows[mid..].windows(2).all(|w| w[1].1 > w[0].1))
        };
        Ok(DivergenceTable { rows, tail_increasing })
    }
}

/// `s_n int f(r) r^{n-1} dr` over one phase with an interior Fejér rule.
fn radial_quadrature(cheb: &ChebInterval, dim: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = cheb.fejer(2 * cheb.len() + 8);
    sphere_area(dim)
        * x.iter()
            .zip(&w)
            .map(|(&r, &wk)| wk * f(r) * r.powi(dim as i32 - 1))
            .sum::<f64>()
}

/// Value at zero of the interpolating polynomial through `(x_k, y_k)`.
fn neville_at_zero(points: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let x: Vec<f64> = points.iter().map(|&(x, _)| x).collect();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i]);
        }
    }
    p[0]
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatZeroLimit {
    /// `|Gamma*| / (kappa*|1)_Omega`.
    pub closed_form: f64,
    pub extrapolated: f64,
    /// `(lambda, lambda N_0^H(lambda))`.
    pub samples: Vec<(f64, f64)>,
    pub relative_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceTable {
    /// `(lambda, lambda N_0^H(lambda))`.
    pub rows: Vec<(f64, f64)>,
    /// `None` for grids with fewer than two points.
    pub tail_increasing: Option<bool>,
}

/// `N_l^H(lambda)` at the default order.
pub fn ntd_heat(eq: &EquilibriumState, l: usize, lambda: f64) -> Result<HeatSample> {
    NtdContext::new(eq, DEFAULT_ORDER)?.heat(l, lambda)
}

/// `N_l^S(lambda)` at the default order.
pub fn ntd_stokes(eq: &EquilibriumState, l: usize, lambda: f64) -> Result<StokesSample> {
    NtdContext::new(eq, DEFAULT_ORDER)?.stokes(l, lambda)
}
