//! Spherical equilibria and their energetics.
//!
//! At equilibrium the velocity vanishes, the temperature is a constant
//! `theta*` and the interface consists of `m` spheres of radius `R*` tied to
//! `theta*` by the Gibbs–Thomson relation
//!
//! ```text
//! [[psi(theta*)]] = sigma (n-1) / R*,      [[pi*]] = -[[psi(theta*)]].
//! ```
//!
//! Density is fixed to one throughout.

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, Geometry};
use crate::materials::MaterialPair;
use crate::radial_bvp::{RadialField, RadialMesh};
use crate::roots;

/// Subintervals scanned when bracketing equilibrium temperatures.
pub const TEMPERATURE_SCAN: usize = 256;

/// A non-degenerate equilibrium with all coefficients frozen at `theta*`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumState {
    pub theta_star: f64,
    pub geometry: Geometry,
    pub sigma: f64,
    /// `[[psi(theta*)]]`.
    pub psi_jump: f64,
    /// `[[pi*]] = -[[psi(theta*)]]`.
    pub pressure_jump: f64,
    pub kappa_star_1: f64,
    pub kappa_star_2: f64,
    pub d_star_1: f64,
    pub d_star_2: f64,
    pub mu_star_1: f64,
    pub mu_star_2: f64,
    pub l_star: f64,
    /// `l*^2 / theta*`.
    pub c_star: f64,
    /// `(kappa*|1)_Omega = kappa_1 |Omega_1| + kappa_2 |Omega_2|`.
    pub kappa_mass: f64,
}

impl EquilibriumState {
    /// Freezes all coefficients of `pair` at `theta_star` on `geometry`
    /// without checking the Gibbs–Thomson relation.
    pub fn frozen(pair: &MaterialPair, geometry: Geometry, theta_star: f64) -> Result<Self> {
        let s1 = pair.phase1.eval(theta_star)?;
        let s2 = pair.phase2.eval(theta_star)?;
        let j = pair.jumps(theta_star)?;
        Ok(EquilibriumState {
            theta_star,
            geometry,
            sigma: pair.sigma,
            psi_jump: j.psi_jump,
            pressure_jump: -j.psi_jump,
            kappa_star_1: s1.kappa,
            kappa_star_2: s2.kappa,
            d_star_1: s1.d,
            d_star_2: s2.d,
            mu_star_1: s1.mu,
            mu_star_2: s2.mu,
            l_star: j.latent_heat,
            c_star: j.latent_heat * j.latent_heat / theta_star,
            kappa_mass: s1.kappa * geometry.volume_inner() + s2.kappa * geometry.volume_outer(),
        })
    }

    pub fn interface_area(&self) -> f64 {
        self.geometry.interface_area()
    }

    /// `sigma (n-1) / R*^2`.
    pub fn curvature_stiffness(&self) -> f64 {
        self.sigma * (self.geometry.n - 1) as f64 / self.geometry.r_star.powi(2)
    }

    /// `|Gamma*| / (kappa*|1)_Omega`, the limit of `lambda N_lambda^H e` as
    /// `lambda -> 0`.
    pub fn heat_zero_limit_closed_form(&self) -> f64 {
        self.interface_area() / self.kappa_mass
    }

    /// Relative Gibbs–Thomson residual `|[[psi]] R* - sigma (n-1)| / (sigma (n-1))`.
    pub fn gibbs_thomson_residual(&self) -> f64 {
        let target = self.sigma * (self.geometry.n - 1) as f64;
        (self.psi_jump * self.geometry.r_star - target).abs() / target
    }

    /// Replaces the frozen heat capacities (and the derived kappa mass).
    pub fn with_capacities(mut self, kappa_1: f64, kappa_2: f64) -> Self {
        self.kappa_star_1 = kappa_1;
        self.kappa_star_2 = kappa_2;
        self.kappa_mass = kappa_1 * self.geometry.volume_inner() + kappa_2 * self.geometry.volume_outer();
        self
    }
}

fn degenerate_latent_heat(pair: &MaterialPair, theta: f64, latent: f64) -> bool {
    let f1 = &pair.phase1.free_energy;
    let f2 = &pair.phase2.free_energy;
    let scale = theta * (f1.dpsi(theta).abs() + f2.dpsi(theta).abs());
    latent.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE)
}

/// Equilibrium radius for a prescribed temperature:
/// `R* = sigma (n-1) / [[psi(theta*)]]`.
pub fn solve_equilibrium_radius(pair: &MaterialPair, geom_template: Geometry, theta_star: f64) -> Result<EquilibriumState> {
    let j = pair.jumps(theta_star)?;
    if !(j.psi_jump > 0.0) {
        return Err(Error::NoEquilibrium { jump: j.psi_jump });
    }
    let r_star = pair.sigma * (geom_template.n - 1) as f64 / j.psi_jump;
    let geometry = geom_template.with_radius(r_star);
    geometry.validate()?;
    if degenerate_latent_heat(pair, theta_star, j.latent_heat) {
        return Err(Error::Degenerate(format!("latent heat vanishes at theta* = {theta_star}")));
    }
    EquilibriumState::frozen(pair, geometry, theta_star)
}

/// Non-fatal remarks attached to a temperature solve.
#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriumWarning {
    /// Several temperatures satisfy the Gibbs–Thomson relation; the one
    /// nearest to the initial guess was returned.
    MultiRoot { chosen: f64, others: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSolution {
    pub state: EquilibriumState,
    pub warnings: Vec<EquilibriumWarning>,
}

/// Equilibrium temperature for a prescribed radius: solves
/// `[[psi(theta)]] = sigma (n-1)/R*` on the common temperature range by a
/// 256-piece bracketing scan, bisection and Newton polish. When several roots
/// exist the one nearest `initial_guess` (default: range midpoint) wins.
pub fn solve_equilibrium_temperature(
    pair: &MaterialPair,
    geom: Geometry,
    initial_guess: Option<f64>,
) -> Result<TemperatureSolution> {
    geom.validate()?;
    let target = pair.sigma * (geom.n - 1) as f64 / geom.r_star;
    let (lo, hi) = pair.common_range();
    let residual = |t: f64| pair.psi_jump(t) - target;
    let slope = |t: f64| pair.jumps_unchecked(t).dpsi_jump;

    let brackets = roots::bracket_sign_changes(residual, lo, hi, TEMPERATURE_SCAN);
    if brackets.is_empty() {
        return Err(Error::NoRoot(format!(
            "[[psi]] - {target} has no sign change on [{lo}, {hi}]"
        )));
    }
    let mut found = Vec::with_capacity(brackets.len());
    for (a, b) in brackets {
        let x = if a == b {
            a
        } else {
            let x = roots::brent(residual, a, b, 4.0 * f64::EPSILON * b.abs(), 0.0, 200)?;
            roots::newton_polish(residual, slope, x, a, b, 4)
        };
        found.push(x);
    }
    found.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let guess = initial_guess.unwrap_or(0.5 * (lo + hi));
    let best = found
        .iter()
        .copied()
        .min_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()))
        .expect("at least one root");
    let mut warnings = Vec::new();
    if found.len() > 1 {
        warnings.push(EquilibriumWarning::MultiRoot {
            chosen: best,
            others: found.iter().copied().filter(|&x| x != best).collect(),
        });
    }
    let j = pair.jumps_unchecked(best);
    if degenerate_latent_heat(pair, best, j.latent_heat) {
        return Err(Error::Degenerate(format!("latent heat vanishes at theta* = {best}")));
    }
    let state = EquilibriumState::frozen(pair, geom, best)?;
    Ok(TemperatureSolution { state, warnings })
}

/// The stability number `s = sigma (n-1)/R*^2 - l*^2 |Gamma*| / (theta* (kappa*|1))`
/// with its two summands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityNumber {
    pub s: f64,
    /// `sigma (n-1) / R*^2`.
    pub curvature_term: f64,
    /// `l*^2 |Gamma*| / (theta* (kappa*|1)_Omega)`.
    pub latent_term: f64,
}

pub fn stability_number(eq: &EquilibriumState) -> StabilityNumber {
    let curvature_term = eq.curvature_stiffness();
    let latent_term = eq.c_star * eq.heat_zero_limit_closed_form();
    StabilityNumber {
        s: curvature_term - latent_term,
        curvature_term,
        latent_term,
    }
}

/// `phi = eps_1(theta*) |Omega_1| + eps_2(theta*) |Omega_2| + sigma |Gamma*|`.
pub fn equilibrium_energy(eq: &EquilibriumState, pair: &MaterialPair) -> f64 {
    energy_at(pair, &eq.geometry, eq.theta_star, eq.geometry.r_star)
}

fn energy_at(pair: &MaterialPair, geom: &Geometry, theta: f64, r_star: f64) -> f64 {
    let g = geom.with_radius(r_star);
    let e1 = pair.phase1.eval_unchecked(theta).epsilon;
    let e2 = pair.phase2.eval_unchecked(theta).epsilon;
    e1 * g.volume_inner() + e2 * g.volume_outer() + pair.sigma * g.interface_area()
}

/// Energy along the equilibrium branch `theta -> (theta, R*(theta))`.
pub fn branch_energy(pair: &MaterialPair, geom: &Geometry, theta: f64) -> f64 {
    let r = pair.sigma * (geom.n - 1) as f64 / pair.psi_jump(theta);
    energy_at(pair, geom, theta, r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDerivative {
    pub value: f64,
    pub error_estimate: f64,
    pub step: f64,
}

/// `phi'(theta*)` along the equilibrium branch by Richardson-extrapolated
/// central differences. Three base steps are tried and the one with the
/// smallest error estimate (truncation plus round-off) is kept.
pub fn equilibrium_energy_derivative(eq: &EquilibriumState, pair: &MaterialPair) -> Result<EnergyDerivative> {
    let theta = eq.theta_star;
    if degenerate_latent_heat(pair, theta, eq.l_star) {
        return Err(Error::Degenerate("[[psi']] vanishes, branch not defined".into()));
    }
    let (lo, hi) = pair.common_range();
    let phi = |t: f64| branch_energy(pair, &eq.geometry, t);
    let central = |h: f64| (phi(theta + h) - phi(theta - h)) / (2.0 * h);
    let scale = phi(theta).abs()
        + pair.phase1.eval_unchecked(theta).epsilon.abs() * eq.geometry.volume_total()
        + pair.phase2.eval_unchecked(theta).epsilon.abs() * eq.geometry.volume_total();
    let room = (theta - lo).min(hi - theta).max(0.0);

    let mut best: Option<EnergyDerivative> = None;
    for rel in [1e-2, 1e-3, 1e-4] {
        let mut h = rel * theta;
        if h >= room {
            h = 0.9 * room;
        }
        if !(h > 0.0) {
            continue;
        }
        let d1 = central(h);
        let d2 = central(0.5 * h);
        let value = (4.0 * d2 - d1) / 3.0;
        let error_estimate = (d2 - d1).abs() / 3.0 + 8.0 * f64::EPSILON * scale / h;
        if best.is_none_or(|b| error_estimate < b.error_estimate) {
            best = Some(EnergyDerivative {
                value,
                error_estimate,
                step: h,
            });
        }
    }
    best.ok_or(Error::OutOfRange {
        theta,
        min: lo,
        max: hi,
    })
}

/// Radially symmetric state: speed profile `|u|(r)`, absolute temperature
/// `theta(r)` on a two-phase mesh whose interface sits at `R`.
#[derive(Debug, Clone)]
pub struct RadialState {
    pub mesh: RadialMesh,
    pub speed: RadialField,
    pub theta: RadialField,
}

impl RadialState {
    pub fn uniform(mesh: RadialMesh, theta: f64) -> Self {
        let speed = RadialField::zeros(&mesh, 0);
        let theta = RadialField::from_fn(&mesh, 0, |_| theta);
        RadialState { mesh, speed, theta }
    }

    fn check(&self, pair: &MaterialPair, geom: &Geometry) -> Result<()> {
        self.speed.check(&self.mesh)?;
        self.theta.check(&self.mesh)?;
        let ro = self.mesh.r_outer();
        if (ro - geom.r_outer).abs() > 1e-12 * geom.r_outer {
            return Err(Error::GridMismatch(format!(
                "mesh ends at {ro}, domain radius is {}",
                geom.r_outer
            )));
        }
        for (vals, phase) in [(&self.theta.values_inner, &pair.phase1), (&self.theta.values_outer, &pair.phase2)] {
            if let Some(&t) = vals.iter().find(|&&t| !phase.in_range(t)) {
                return Err(Error::OutOfRange {
                    theta: t,
                    min: phase.theta_range.0,
                    max: phase.theta_range.1,
                });
            }
        }
        Ok(())
    }

    fn integrate(&self, dim: usize, density: impl Fn(usize, f64, f64) -> f64) -> f64 {
        let sn = sphere_area(dim);
        let mut total = 0.0;
        for (phase, cheb, speed, theta) in [
            (0, &self.mesh.inner, &self.speed.values_inner, &self.theta.values_inner),
            (1, &self.mesh.outer, &self.speed.values_outer, &self.theta.values_outer),
        ] {
            let f: Vec<f64> = cheb
                .nodes
                .iter()
                .zip(speed.iter().zip(theta))
                .map(|(&r, (&u, &t))| density(phase, u, t) * r.powi(dim as i32 - 1))
                .collect();
            total += sn * cheb.integrate(&f);
        }
        total
    }
}

/// `E = int (|u|^2/2 + eps(theta)) dx + sigma |Gamma|` for a single
/// concentric interface.
pub fn total_energy(state: &RadialState, pair: &MaterialPair, geom: &Geometry) -> Result<f64> {
    state.check(pair, geom)?;
    let phases = [&pair.phase1, &pair.phase2];
    let bulk = state.integrate(geom.n, |p, u, t| 0.5 * u * u + phases[p].eval_unchecked(t).epsilon);
    let r = state.mesh.r_star();
    Ok(bulk + pair.sigma * sphere_area(geom.n) * r.powi(geom.n as i32 - 1))
}

/// `Phi = int eta(theta) dx`.
pub fn total_entropy(state: &RadialState, pair: &MaterialPair, geom: &Geometry) -> Result<f64> {
    state.check(pair, geom)?;
    let phases = [&pair.phase1, &pair.phase2];
    Ok(state.integrate(geom.n, |p, _, t| phases[p].eval_unchecked(t).eta))
}
