//! Ball domain with `m` equal spherical inclusions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Area of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n) / n as f64
}

/// Outer ball `Omega = B_{R_outer}` containing `m` disjoint inclusions of
/// radius `R_star` (phase 1). Mean curvature convention: the spheres have
/// `H = -(n-1)/R_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub n: usize,
    pub r_outer: f64,
    pub r_star: f64,
    pub m: usize,
    pub concentric: bool,
}

impl Geometry {
    /// Single concentric inclusion.
    pub fn concentric(n: usize, r_star: f64, r_outer: f64) -> Self {
        Geometry {
            n,
            r_outer,
            r_star,
            m: 1,
            concentric: true,
        }
    }

    pub fn with_radius(mut self, r_star: f64) -> Self {
        self.r_star = r_star;
        self
    }

    pub fn with_inclusions(mut self, m: usize) -> Self {
        self.m = m;
        self.concentric = m == 1;
        self
    }

    /// All violated geometric constraints.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.n == 2 || self.n == 3) {
            out.push(format!("n = {} must be 2 or 3", self.n));
            return out;
        }
        if self.m == 0 {
            out.push("m must be at least 1".into());
        }
        if !(self.r_outer > 0.0 && self.r_outer.is_finite()) {
            out.push(format!("R_outer = {} must be positive", self.r_outer));
        }
        if !(self.r_star > 0.0 && self.r_star.is_finite()) {
            out.push(format!("R_star = {} must be positive", self.r_star));
        } else if self.r_star >= self.r_outer {
            out.push(format!(
                "R_star = {} must be smaller than R_outer = {}",
                self.r_star, self.r_outer
            ));
        } else if self.m > 1 && self.volume_inner() >= self.volume_total() {
            out.push(format!(
                "{} balls of radius {} do not fit into the domain",
                self.m, self.r_star
            ));
        }
        if self.m > 1 && self.concentric {
            out.push("concentric arrangement requires m = 1".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some(msg) => Err(Error::GeometryViolation(msg)),
        }
    }

    /// Solvers based on radial PDEs need one concentric inclusion.
    pub fn require_concentric(&self) -> Result<()> {
        if self.m != 1 || !self.concentric {
            return Err(Error::GeometryViolation(format!(
                "radial solvers require m = 1 and a concentric inclusion (m = {})",
                self.m
            )));
        }
        Ok(())
    }

    /// `|Omega_1| = m omega_n R*^n`.
    pub fn volume_inner(&self) -> f64 {
        self.m as f64 * ball_volume(self.n) * self.r_star.powi(self.n as i32)
    }

    /// `|Omega| = omega_n R_outer^n`.
    pub fn volume_total(&self) -> f64 {
        ball_volume(self.n) * self.r_outer.powi(self.n as i32)
    }

    pub fn volume_outer(&self) -> f64 {
        self.volume_total() - self.volume_inner()
    }

    /// `|Gamma*| = m s_n R*^{n-1}`.
    pub fn interface_area(&self) -> f64 {
        self.m as f64 * sphere_area(self.n) * self.r_star.powi(self.n as i32 - 1)
    }

    /// `(n-1)/R*`, minus the mean curvature of the interface.
    pub fn curvature(&self) -> f64 {
        (self.n - 1) as f64 / self.r_star
    }
}
