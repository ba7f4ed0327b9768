//! Per-phase constitutive models.
//!
//! Each phase is described by its Helmholtz free energy
//!
//! ```text
//! psi(theta) = a + b*theta - c*theta*ln(theta) + p(theta)
//! ```
//!
//! with `p` a polynomial tail, plus polynomial viscosity `mu(theta)` and
//! conductivity `d(theta)`. Entropy, internal energy and heat capacity follow
//! from `psi`:
//!
//! ```text
//! eta = -psi',   epsilon = psi + theta*eta,   kappa = -theta*psi''
//! ```
//!
//! Jumps across the interface use `[[v]] = v_2 - v_1`, phase 1 being the
//! disperse phase inside the interface.

use crate::error::{Error, Result};

/// Number of equispaced samples used to check positivity of `kappa`, `mu`, `d`.
pub const POSITIVITY_SAMPLES: usize = 1024;

/// Polynomial `sum_k coeffs[k] * x^k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(value: f64) -> Self {
        Poly(vec![value])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(Vec::new());
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }
}

/// Reference free-energy family `a + b*theta - c*theta*ln(theta) + tail(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergy {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub tail: Poly,
}

impl FreeEnergy {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        FreeEnergy {
            a,
            b,
            c,
            tail: Poly::default(),
        }
    }

    pub fn with_tail(mut self, tail: Vec<f64>) -> Self {
        self.tail = Poly(tail);
        self
    }

    pub fn psi(&self, theta: f64) -> f64 {
        self.a + self.b * theta - self.c * theta * theta.ln() + self.tail.eval(theta)
    }

    pub fn dpsi(&self, theta: f64) -> f64 {
        self.b - self.c * (theta.ln() + 1.0) + self.tail.derivative().eval(theta)
    }

    pub fn d2psi(&self, theta: f64) -> f64 {
        -self.c / theta + self.tail.derivative().derivative().eval(theta)
    }
}

/// Thermodynamic state of one phase at a given temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub psi: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub mu: f64,
    pub d: f64,
}

/// One fluid phase: free energy, viscosity and heat conductivity on a
/// temperature interval bounded away from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseModel {
    pub free_energy: FreeEnergy,
    pub mu: Poly,
    pub d: Poly,
    pub theta_range: (f64, f64),
}

/// A single violated physical constraint, used both for construction errors
/// and for collecting all problems of a configuration at once.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelViolation {
    /// Which quantity failed: `"theta_range"`, `"kappa"`, `"mu"` or `"d"`.
    pub quantity: &'static str,
    pub message: String,
}

impl PhaseModel {
    /// Builds a phase and rejects it unless `kappa`, `mu` and `d` are positive
    /// on [`POSITIVITY_SAMPLES`] equispaced points of `theta_range`.
    pub fn new(free_energy: FreeEnergy, mu: Poly, d: Poly, theta_range: (f64, f64)) -> Result<Self> {
        let model = PhaseModel {
            free_energy,
            mu,
            d,
            theta_range,
        };
        match model.violations().into_iter().next() {
            None => Ok(model),
            Some(v) => Err(Error::InvalidModel(v.message)),
        }
    }

    /// Lists every violated constraint without failing early.
    pub fn violations(&self) -> Vec<ModelViolation> {
        let (lo, hi) = self.theta_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return vec![ModelViolation {
                quantity: "theta_range",
                message: format!("theta_range [{lo}, {hi}] must satisfy 0 < min < max"),
            }];
        }
        let mut out = Vec::new();
        for name in ["kappa", "mu", "d"] {
            let f = |t: f64| match name {
                "kappa" => self.kappa(t),
                "mu" => self.mu.eval(t),
                _ => self.d.eval(t),
            };
            let bad = sample_grid(lo, hi).find(|&t| !(f(t) > 0.0 && f(t).is_finite()));
            if let Some(t) = bad {
                out.push(ModelViolation {
                    quantity: name,
                    message: format!("{name}({t}) = {} is not positive", f(t)),
                });
            }
        }
        out
    }

    pub fn kappa(&self, theta: f64) -> f64 {
        -theta * self.free_energy.d2psi(theta)
    }

    pub fn in_range(&self, theta: f64) -> bool {
        theta >= self.theta_range.0 && theta <= self.theta_range.1
    }

    /// Evaluates all thermodynamic quantities at `theta`.
    pub fn eval(&self, theta: f64) -> Result<ThermoState> {
        if !self.in_range(theta) {
            return Err(Error::OutOfRange {
                theta,
                min: self.theta_range.0,
                max: self.theta_range.1,
            });
        }
        let state = self.eval_unchecked(theta);
        if !(state.kappa > 0.0) {
            return Err(Error::InvalidModel(format!(
                "kappa({theta}) = {} is not positive",
                state.kappa
            )));
        }
        Ok(state)
    }

    /// Same as [`PhaseModel::eval`] without range or sign checks. Used for
    /// finite differences that may step slightly outside the range.
    pub fn eval_unchecked(&self, theta: f64) -> ThermoState {
        let fe = &self.free_energy;
        let psi = fe.psi(theta);
        let eta = -fe.dpsi(theta);
        ThermoState {
            psi,
            eta,
            epsilon: psi + theta * eta,
            kappa: self.kappa(theta),
            mu: self.mu.eval(theta),
            d: self.d.eval(theta),
        }
    }
}

fn sample_grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (POSITIVITY_SAMPLES - 1) as f64;
    (0..POSITIVITY_SAMPLES).map(move |i| {
        if i == POSITIVITY_SAMPLES - 1 {
            hi
        } else {
            lo + step * i as f64
        }
    })
}

/// Jumps `[[.]] = phase2 - phase1` at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpState {
    pub psi_jump: f64,
    pub dpsi_jump: f64,
    pub latent_heat: f64,
}

/// The disperse phase (inside the interface), the continuous phase, and the
/// surface tension between them.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialPair {
    pub phase1: PhaseModel,
    pub phase2: PhaseModel,
    pub sigma: f64,
}

impl MaterialPair {
    pub fn new(phase1: PhaseModel, phase2: PhaseModel, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "surface tension sigma = {sigma} must be positive"
            )));
        }
        let pair = MaterialPair {
            phase1,
            phase2,
            sigma,
        };
        let (lo, hi) = pair.common_range();
        if !(hi > lo) {
            return Err(Error::InvalidModel(
                "theta ranges of the two phases do not overlap".into(),
            ));
        }
        Ok(pair)
    }

    /// Intersection of both validity intervals.
    pub fn common_range(&self) -> (f64, f64) {
        (
            self.phase1.theta_range.0.max(self.phase2.theta_range.0),
            self.phase1.theta_range.1.min(self.phase2.theta_range.1),
        )
    }

    pub fn swapped(&self) -> MaterialPair {
        MaterialPair {
            phase1: self.phase2.clone(),
            phase2: self.phase1.clone(),
            sigma: self.sigma,
        }
    }

    pub fn jumps(&self, theta: f64) -> Result<JumpState> {
        let (lo, hi) = self.common_range();
        if !(theta >= lo && theta <= hi) {
            return Err(Error::OutOfRange {
                theta,
                min: lo,
                max: hi,
            });
        }
        Ok(self.jumps_unchecked(theta))
    }

    pub fn jumps_unchecked(&self, theta: f64) -> JumpState {
        let f1 = &self.phase1.free_energy;
        let f2 = &self.phase2.free_energy;
        let dpsi_jump = f2.dpsi(theta) - f1.dpsi(theta);
        JumpState {
            psi_jump: f2.psi(theta) - f1.psi(theta),
            dpsi_jump,
            latent_heat: theta * dpsi_jump,
        }
    }

    pub fn psi_jump(&self, theta: f64) -> f64 {
        self.phase2.free_energy.psi(theta) - self.phase1.free_energy.psi(theta)
    }
}

/// Free functions mirroring the method API.
pub fn eval_phase(model: &PhaseModel, theta: f64) -> Result<ThermoState> {
    model.eval(theta)
}

pub fn jumps(pair: &MaterialPair, theta: f64) -> Result<JumpState> {
    pair.jumps(theta)
}

/// The two-phase material used throughout the examples and tests:
/// `psi_1 = -theta ln theta`, `psi_2 = 1 - 2 theta ln theta`, unit transport
/// coefficients, so that `[[psi]](1) = 1` and `l(1) = -1`.
pub fn reference_pair(sigma: f64) -> MaterialPair {
    let range = (0.05, 20.0);
    let p1 = PhaseModel::new(
        FreeEnergy::new(0.0, 0.0, 1.0),
        Poly::constant(1.0),
        Poly::constant(1.0),
        range,
    )
    .expect("reference phase 1 is valid");
    let p2 = PhaseModel::new(
        FreeEnergy::new(1.0, 0.0, 2.0),
        Poly::constant(1.0),
        Poly::constant(1.0),
        range,
    )
    .expect("reference phase 2 is valid");
    MaterialPair::new(p1, p2, sigma).expect("reference pair is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn phase(a: f64, b: f64, c: f64) -> PhaseModel {
        PhaseModel::new(
            FreeEnergy::new(a, b, c),
            Poly::constant(1.0),
            Poly::constant(1.0),
            (0.1, 10.0),
        )
        .unwrap()
    }

    #[test]
    fn pure_entropic_phase_at_unit_temperature() {
        let s = phase(0.0, 0.0, 1.0).eval(1.0).unwrap();
        assert_eq!(s.psi, 0.0);
        assert_eq!(s.eta, 1.0);
        assert_eq!(s.epsilon, 1.0);
        assert_eq!(s.kappa, 1.0);
    }

    #[test]
    fn closed_form_values_at_theta_two() {
        // psi = 1 + 2t - 3t ln t: psi' = -1 - 3 ln t, psi'' = -3/t
        let s = phase(1.0, 2.0, 3.0).eval(2.0).unwrap();
        let ln2 = 2f64.ln();
        assert_relative_eq!(s.psi, 5.0 - 6.0 * ln2, max_relative = 1e-15);
        assert_relative_eq!(s.eta, 1.0 + 3.0 * ln2, max_relative = 1e-15);
        assert_relative_eq!(s.epsilon, 7.0, max_relative = 1e-15);
        assert_relative_eq!(s.kappa, 3.0, max_relative = 1e-15);
    }

    #[test]
    fn convex_free_energy_is_rejected() {
        let err = PhaseModel::new(
            FreeEnergy::new(0.0, 0.0, -1.0),
            Poly::constant(1.0),
            Poly::constant(1.0),
            (0.1, 10.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidModel(_)));
    }

    #[test]
    fn tail_can_destroy_positivity_inside_range() {
        // kappa = 1 - 6 p3 theta^2 turns negative for theta > 1/sqrt(6 p3)
        let fe = FreeEnergy::new(0.0, 0.0, 1.0).with_tail(vec![0.0, 0.0, 0.0, 1.0]);
        let model = PhaseModel {
            free_energy: fe,
            mu: Poly::constant(1.0),
            d: Poly::constant(-1.0),
            theta_range: (0.1, 2.0),
        };
        let v = model.violations();
        let names: Vec<_> = v.iter().map(|v| v.quantity).collect();
        assert_eq!(names, vec!["kappa", "d"]);
    }

    #[test]
    fn out_of_range_is_reported() {
        let err = phase(0.0, 0.0, 1.0).eval(20.0).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
    }

    #[test]
    fn reference_jumps_at_unit_temperature() {
        let j = reference_pair(1.0).jumps(1.0).unwrap();
        assert_eq!(j.psi_jump, 1.0);
        assert_eq!(j.dpsi_jump, -1.0);
        assert_eq!(j.latent_heat, -1.0);
    }

    #[test]
    fn identical_phases_have_no_jump() {
        let p = phase(0.3, 0.2, 1.5);
        let pair = MaterialPair::new(p.clone(), p, 1.0).unwrap();
        let j = pair.jumps(2.5).unwrap();
        assert_eq!(j.psi_jump, 0.0);
        assert_eq!(j.latent_heat, 0.0);
    }

    #[test]
    fn nonpositive_sigma_rejected() {
        let p = phase(0.0, 0.0, 1.0);
        assert!(MaterialPair::new(p.clone(), p, 0.0).is_err());
    }

    #[test]
    fn disjoint_ranges_rejected() {
        let mut p2 = phase(0.0, 0.0, 1.0);
        p2.theta_range = (20.0, 30.0);
        assert!(MaterialPair::new(phase(0.0, 0.0, 1.0), p2, 1.0).is_err());
    }

    #[test]
    fn poly_derivative() {
        let p = Poly(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative().0, vec![2.0, 6.0]);
        assert!(Poly(vec![]).derivative().0.is_empty());
    }
}
