//! Dispersion relation, unstable eigenvalue and classification of equilibria.
//!
//! Per harmonic degree `l` an eigenvalue `lambda` of the linearisation solves
//! `b_l(lambda) = lambda t_l(lambda) + sigma a_l = 0` with
//!
//! ```text
//! a_l = (c_l - (n-1)) / R*^2,
//! t_l = c* N_l^H / (1 + c* N_l^H N_l^S),      c* = l*^2 / theta*.
//! ```
//!
//! Sign convention (used everywhere below): `lambda t_0 -> c* |Gamma*|/(kappa*|1)`
//! as `lambda -> 0+`, hence `b_0(0+) = -s`. For `s > 0` the mode-0 branch
//! starts negative and, since `lambda t_0` grows without bound, crosses zero
//! at the unstable eigenvalue `lambda_0`.

use std::fmt;

use crate::equilibrium::{equilibrium_energy_derivative, stability_number, EquilibriumState};
use crate::error::{Error, Result};
use crate::materials::MaterialPair;
use crate::ntd::NtdContext;
use crate::radial_bvp::mode_constant;
use crate::roots;

/// Largest degree scanned for positivity.
pub const DEFAULT_L_MAX: usize = 8;
/// Points per decade of the logarithmic lambda scan.
pub const SCAN_PER_DECADE: usize = 24;
/// Default scan range for the unstable eigenvalue.
pub const SCAN_RANGE: (f64, f64) = (1e-4, 1e4);
/// Upper end beyond which the scan gives up extending.
const SCAN_CEILING: f64 = 1e8;
/// `|b_0(lambda_0)|` targeted by the root polish.
pub const ROOT_FTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    pub l: usize,
    pub lambda: f64,
    pub a_l: f64,
    /// `+inf` for `(l, lambda) = (0, 0)`, where only the product
    /// `lambda t_0` has a limit.
    pub t_l: f64,
    pub b_l: f64,
}

/// Eigenvalue of `A* = -(n-1)/R*^2 - Delta_Gamma*` on degree-`l` harmonics.
pub fn surface_eigenvalue(eq: &EquilibriumState, l: usize) -> f64 {
    let n = eq.geometry.n;
    (mode_constant(n, l) - (n - 1) as f64) / eq.geometry.r_star.powi(2)
}

/// Number of linearly independent degree-`l` harmonics on `S^{n-1}`.
pub fn harmonic_multiplicity(n: usize, l: usize) -> usize {
    match (n, l) {
        (_, 0) => 1,
        (2, _) => 2,
        (3, l) => 2 * l + 1,
        _ => panic!("unsupported dimension {n}"),
    }
}

impl NtdContext {
    pub fn dispersion(&self, l: usize, lambda: f64) -> Result<DispersionSample> {
        let a_l = surface_eigenvalue(&self.eq, l);
        let sigma = self.eq.sigma;
        let c = self.eq.c_star;
        if l == 0 && lambda == 0.0 {
            return Ok(DispersionSample {
                l,
                lambda,
                a_l,
                t_l: f64::INFINITY,
                b_l: c * self.eq.heat_zero_limit_closed_form() + sigma * a_l,
            });
        }
        let nh = self.heat(l, lambda)?.value;
        let ns = self.stokes(l, lambda)?.value;
        let t_l = c * nh / (1.0 + c * nh * ns);
        Ok(DispersionSample {
            l,
            lambda,
            a_l,
            t_l,
            b_l: lambda * t_l + sigma * a_l,
        })
    }

    /// `b_0(0+)` from the numerically extrapolated heat limit; equals `-s`
    /// up to the extrapolation error.
    pub fn b0_zero_limit(&self) -> Result<f64> {
        let a0 = self.heat_zero_limit()?.extrapolated;
        Ok(self.eq.c_star * a0 + self.eq.sigma * surface_eigenvalue(&self.eq, 0))
    }

    /// Dispersion table over `0..=l_max` and `lambdas`; `(0, 0)` uses the
    /// zero-limit substitution.
    pub fn dispersion_table(&self, l_max: usize, lambdas: &[f64]) -> Result<Vec<DispersionSample>> {
        let mut out = Vec::with_capacity((l_max + 1) * lambdas.len());
        for l in 0..=l_max {
            for &lam in lambdas {
                out.push(self.dispersion(l, lam)?);
            }
        }
        Ok(out)
    }

    /// Positive root of `b_0`. See [`UnstableEigenvalue`] for the outcomes.
    pub fn find_unstable_eigenvalue(&self) -> Result<UnstableEigenvalue> {
        if self.eq.l_star == 0.0 {
            return Err(Error::Degenerate("l* = 0: mode-0 dispersion is not defined".into()));
        }
        let s = stability_number(&self.eq).s;
        if s.abs() <= classification_tolerance(&self.eq) {
            return Ok(UnstableEigenvalue::Degenerate { s });
        }
        let b0 = |lam: f64| self.dispersion(0, lam).map(|d| d.b_l);

        let (lo, mut hi) = SCAN_RANGE;
        let mut grid = log_grid(lo, hi, SCAN_PER_DECADE);
        let mut values = grid.iter().map(|&x| b0(x)).collect::<Result<Vec<_>>>()?;
        // b_0 -> +inf; extend the scan while the branch is still negative
        while values.last().is_some_and(|&v| v <= 0.0) && hi < SCAN_CEILING {
            let next = hi * 10.0;
            for x in log_grid(hi, next, SCAN_PER_DECADE).into_iter().skip(1) {
                values.push(b0(x)?);
                grid.push(x);
            }
            hi = next;
        }
        let brackets: Vec<(f64, f64)> = (0..grid.len() - 1)
            .filter(|&i| (values[i] < 0.0) != (values[i + 1] < 0.0))
            .map(|i| (grid[i], grid[i + 1]))
            .collect();

        if s < 0.0 {
            return match values.iter().position(|&v| !(v > 0.0)) {
                None => Ok(UnstableEigenvalue::Absent { scanned: grid.len() }),
                Some(i) => Err(Error::NoRoot(format!(
                    "s = {s} < 0 but b_0({}) = {} is not positive",
                    grid[i], values[i]
                ))),
            };
        }
        if brackets.is_empty() {
            return Err(Error::NoRoot(format!(
                "s = {s} > 0 but b_0 has no sign change on [{lo}, {hi}]"
            )));
        }
        // the scalar closure swallows solver errors as NaN, which Brent
        // then reports through the residual check below
        let f = |lam: f64| b0(lam).unwrap_or(f64::NAN);
        let mut found = Vec::with_capacity(brackets.len());
        for (a, b) in &brackets {
            found.push(roots::brent(f, *a, *b, 1e-15 * b, ROOT_FTOL, 200)?);
        }
        // the supremum of the unstable range is the largest root
        let lambda0 = found.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let residual = b0(lambda0)?;
        if !(residual.abs() < 1e-10) {
            return Err(Error::NoRoot(format!("b_0({lambda0}) = {residual} after polish")));
        }
        if found.len() > 1 {
            log::warn!("b_0 changes sign {} times; reporting the largest root", found.len());
        }
        Ok(UnstableEigenvalue::Root {
            lambda0,
            residual,
            sign_changes: brackets.len(),
            all_roots: found,
        })
    }

    /// Numerical side of the kernel count for one concentric inclusion.
    pub fn kernel_check(&self) -> Result<KernelCheck> {
        let dim = kernel_dimension(&self.eq)?;
        let b1 = self.dispersion(1, 0.0)?.b_l;
        let thermal_direction = matches!(self.heat(0, 0.0), Err(Error::SingularProblem(_)));
        Ok(KernelCheck {
            dim,
            b1_at_zero: b1,
            translation_multiplicity: harmonic_multiplicity(self.eq.geometry.n, 1),
            thermal_direction,
        })
    }
}

/// Increasing logarithmic grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let count = ((decades * per_decade as f64).round() as usize).max(1);
    let (a, b) = (lo.ln(), hi.ln());
    (0..=count)
        .map(|i| match i {
            0 => lo,
            i if i == count => hi,
            i => (a + (b - a) * i as f64 / count as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnstableEigenvalue {
    /// `s > tol`: the root of `b_0`, its residual and the number of sign
    /// changes seen on the scan (one when the branch is monotone).
    Root {
        lambda0: f64,
        residual: f64,
        sign_changes: usize,
        all_roots: Vec<f64>,
    },
    /// `s < -tol`: `b_0 > 0` on every scanned point.
    Absent { scanned: usize },
    /// `|s| <= tol`.
    Degenerate { s: f64 },
}

impl UnstableEigenvalue {
    pub fn lambda0(&self) -> Option<f64> {
        match self {
            UnstableEigenvalue::Root { lambda0, .. } => Some(*lambda0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheck {
    pub dim: usize,
    /// `b_1(0)`; zero because `a_1 = 0`.
    pub b1_at_zero: f64,
    /// Translations: `n` independent degree-one harmonics.
    pub translation_multiplicity: usize,
    /// The heat problem at `lambda = 0` has the constants as kernel.
    pub thermal_direction: bool,
}

/// Eigenvalues of `B_0` on the span of the indicator functions of the
/// inclusions, with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct B0Spectrum {
    pub eigenvalues: Vec<(f64, usize)>,
    /// Negative eigenvalues of `B_0` counted with multiplicity, i.e. the
    /// number of positive eigenvalues of the linearisation.
    pub positive_count: usize,
}

/// `B_0` restricted to piecewise constants: `-s` on the common constant and
/// `-sigma (n-1)/R*^2` on the `m - 1` zero-sum combinations.
pub fn b0_explicit_spectrum(eq: &EquilibriumState) -> B0Spectrum {
    let m = eq.geometry.m;
    let curvature = eq.curvature_stiffness();
    let common = eq.c_star * eq.heat_zero_limit_closed_form() - curvature;
    let mut eigenvalues = vec![(common, 1)];
    if m > 1 {
        eigenvalues.push((-curvature, m - 1));
    }
    let s = stability_number(eq).s;
    // s within tolerance counts as s <= 0
    let unstable_common = s > classification_tolerance(eq);
    let positive_count = (m - 1) + usize::from(unstable_common);
    B0Spectrum {
        eigenvalues,
        positive_count,
    }
}

/// `m n + 1`, the dimension of the manifold of equilibria.
pub fn kernel_dimension(eq: &EquilibriumState) -> Result<usize> {
    if eq.l_star == 0.0 {
        return Err(Error::Degenerate("l* = 0".into()));
    }
    Ok(eq.geometry.m * eq.geometry.n + 1)
}

/// `|s|` at or below this is treated as zero.
pub fn classification_tolerance(eq: &EquilibriumState) -> f64 {
    1e-8 * eq.curvature_stiffness()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    NormallyStable,
    NormallyHyperbolicUnstable,
    DegenerateSZero,
    DegenerateLZero,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::NormallyStable => "normally_stable",
            Classification::NormallyHyperbolicUnstable => "normally_hyperbolic_unstable",
            Classification::DegenerateSZero => "degenerate_s_zero",
            Classification::DegenerateLZero => "degenerate_l_zero",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classification_of(eq: &EquilibriumState, s: f64) -> Classification {
    let tol = classification_tolerance(eq);
    if eq.l_star == 0.0 {
        Classification::DegenerateLZero
    } else if eq.geometry.m == 1 && s < -tol {
        Classification::NormallyStable
    } else if s > tol || (eq.geometry.m > 1 && s.abs() > tol) {
        Classification::NormallyHyperbolicUnstable
    } else {
        Classification::DegenerateSZero
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    pub order: usize,
    pub l_max: usize,
    /// Grid of the diagnostic dispersion table.
    pub lambdas: Vec<f64>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            order: crate::radial_bvp::DEFAULT_ORDER,
            l_max: DEFAULT_L_MAX,
            lambdas: vec![0.0, 0.01, 0.1, 1.0, 10.0, 100.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub s: f64,
    /// `None` when the branch is undefined (`l* = 0`).
    pub phi_prime: Option<f64>,
    pub phi_prime_error: Option<f64>,
    pub classification: Classification,
    pub lambda0: Option<f64>,
    pub positive_count: usize,
    pub kernel_dim: usize,
    /// Empty unless the inclusion is a single concentric ball.
    pub diagnostics: Vec<DispersionSample>,
}

/// Full classification of an equilibrium. PDE-backed quantities (`lambda0`,
/// the dispersion table) are produced only for `m = 1`.
pub fn classify(eq: &EquilibriumState, pair: &MaterialPair, opts: &ClassifyOptions) -> Result<StabilityReport> {
    let s = stability_number(eq).s;
    let classification = classification_of(eq, s);
    let kernel_dim = eq.geometry.m * eq.geometry.n + 1;
    let spectrum = b0_explicit_spectrum(eq);
    if classification == Classification::DegenerateLZero {
        return Ok(StabilityReport {
            s,
            phi_prime: None,
            phi_prime_error: None,
            classification,
            lambda0: None,
            positive_count: spectrum.positive_count,
            kernel_dim,
            diagnostics: Vec::new(),
        });
    }
    let phi = equilibrium_energy_derivative(eq, pair)?;
    let (lambda0, diagnostics) = if eq.geometry.m == 1 && eq.geometry.concentric {
        let ctx = NtdContext::new(eq, opts.order)?;
        let root = ctx.find_unstable_eigenvalue()?;
        (root.lambda0(), ctx.dispersion_table(opts.l_max, &opts.lambdas)?)
    } else {
        (None, Vec::new())
    };
    Ok(StabilityReport {
        s,
        phi_prime: Some(phi.value),
        phi_prime_error: Some(phi.error_estimate),
        classification,
        lambda0,
        positive_count: spectrum.positive_count,
        kernel_dim,
        diagnostics,
    })
}
